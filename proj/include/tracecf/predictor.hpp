#pragma once

#include <cstdint>
#include <vector>

#include "tracecf/encoding.hpp"

namespace tracecf {

/// The black-box outcome predictor. Implementations must be deterministic
/// and stateless with respect to predict calls.
class Predictor {
public:
    virtual ~Predictor() = default;

    /// Probability of the positive class, in [0, 1].
    virtual double predict_proba(const FeatureVector& x) const = 0;
    virtual const EncodingSchema& schema() const = 0;

    /// Threshold 0.5, ties resolve to the positive class.
    int predict(const FeatureVector& x) const { return predict_proba(x) >= 0.5 ? 1 : 0; }
};

struct LabeledVector {
    FeatureVector features;
    int label = 0;
};

struct Hyperparams {
    int n_trees = 100;
    int max_depth = 8;  // 0 = unbounded
    int min_leaf = 1;
    double feature_subsample = 1.0;  // fraction of features considered per split

    bool operator==(const Hyperparams&) const = default;
};

/// One node of a CART tree, stored in an index pool. Leaves keep the class
/// frequencies of the training samples they absorbed.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    bool categorical_split = false;
    double threshold = 0.0;    // numeric: goes left when x <= threshold
    std::string category;      // categorical: goes left when x == category
    int left = -1;
    int right = -1;
    int n_samples = 0;
    int n_positive = 0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict_proba(const FeatureVector& x) const;
    bool operator==(const DecisionTree&) const = default;
};

/// Bootstrap-aggregated CART forest with Gini splits: numeric features
/// split on thresholds, categorical features on equality.
class RandomForestModel : public Predictor {
public:
    RandomForestModel() = default;
    RandomForestModel(EncodingSchema schema, Hyperparams params, std::uint64_t seed,
                      std::vector<DecisionTree> trees)
        : schema_(std::move(schema)), params_(params), seed_(seed), trees_(std::move(trees)) {}

    /// Throws DegenerateDataError unless the data has >= 2 samples and both
    /// classes. Deterministic under a fixed seed.
    static RandomForestModel train(const std::vector<LabeledVector>& data,
                                   const EncodingSchema& schema, const Hyperparams& params,
                                   std::uint64_t seed);

    double predict_proba(const FeatureVector& x) const override;
    const EncodingSchema& schema() const override { return schema_; }
    const Hyperparams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<DecisionTree>& trees() const { return trees_; }

    bool operator==(const RandomForestModel& o) const {
        return schema_ == o.schema_ && params_ == o.params_ && seed_ == o.seed_ &&
               trees_ == o.trees_;
    }

private:
    EncodingSchema schema_;
    Hyperparams params_;
    std::uint64_t seed_ = 0;
    std::vector<DecisionTree> trees_;
};

double f1_score(const Predictor& model, const std::vector<LabeledVector>& dataset);

struct GridSearchResult {
    Hyperparams best;
    double f1 = 0.0;
};

/// Exhaustive search over the grid, scored by validation F1. Ties prefer
/// fewer trees, then shallower depth (0 = unbounded counts as deepest).
GridSearchResult grid_search(const std::vector<LabeledVector>& train,
                             const std::vector<LabeledVector>& valid,
                             const EncodingSchema& schema,
                             const std::vector<Hyperparams>& grid, std::uint64_t seed);

std::vector<Hyperparams> default_grid();

}  // namespace tracecf
