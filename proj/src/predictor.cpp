#include "tracecf/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tracecf/errors.hpp"
#include "tracecf/rng.hpp"

namespace tracecf {
namespace {

double gini(std::size_t n, std::size_t n_pos) {
    if (n == 0) return 0.0;
    double p = static_cast<double>(n_pos) / static_cast<double>(n);
    return 2.0 * p * (1.0 - p);
}

struct SplitChoice {
    int feature = -1;
    bool categorical = false;
    double threshold = 0.0;
    std::string category;
    double impurity = std::numeric_limits<double>::infinity();  // weighted child impurity
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<LabeledVector>& data, const EncodingSchema& schema,
                const Hyperparams& params, Rng& rng)
        : data_(data), schema_(schema), params_(params), rng_(rng) {}

    DecisionTree build(std::vector<std::size_t> sample) {
        DecisionTree tree;
        grow(tree, std::move(sample), 0);
        return tree;
    }

private:
    int grow(DecisionTree& tree, std::vector<std::size_t> idx, int depth) {
        int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        std::size_t n_pos = 0;
        for (std::size_t i : idx) n_pos += data_[i].label;
        tree.nodes[node_id].n_samples = static_cast<int>(idx.size());
        tree.nodes[node_id].n_positive = static_cast<int>(n_pos);

        bool pure = n_pos == 0 || n_pos == idx.size();
        bool depth_capped = params_.max_depth > 0 && depth >= params_.max_depth;
        bool too_small = idx.size() < 2 * static_cast<std::size_t>(params_.min_leaf);
        if (pure || depth_capped || too_small || idx.size() < 2) return node_id;

        SplitChoice split = best_split(idx, n_pos);
        if (split.feature < 0) return node_id;

        std::vector<std::size_t> left, right;
        partition(idx, split, left, right);
        idx.clear();
        idx.shrink_to_fit();

        int left_id = grow(tree, std::move(left), depth + 1);
        int right_id = grow(tree, std::move(right), depth + 1);
        TreeNode& node = tree.nodes[node_id];
        node.feature = split.feature;
        node.categorical_split = split.categorical;
        node.threshold = split.threshold;
        node.category = split.category;
        node.left = left_id;
        node.right = right_id;
        return node_id;
    }

    std::vector<std::size_t> candidate_features() {
        std::size_t f = schema_.feature_count();
        std::vector<std::size_t> all(f);
        for (std::size_t i = 0; i < f; ++i) all[i] = i;
        if (params_.feature_subsample >= 1.0) return all;
        std::size_t take = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(params_.feature_subsample * static_cast<double>(f))));
        // partial Fisher-Yates, then restore index order for stable iteration
        for (std::size_t i = 0; i < take; ++i) {
            std::size_t j = i + rng_.index(f - i);
            std::swap(all[i], all[j]);
        }
        all.resize(take);
        std::sort(all.begin(), all.end());
        return all;
    }

    SplitChoice best_split(const std::vector<std::size_t>& idx, std::size_t n_pos_total) {
        SplitChoice best;
        double parent = gini(idx.size(), n_pos_total);
        const std::size_t min_leaf = static_cast<std::size_t>(params_.min_leaf);

        for (std::size_t f : candidate_features()) {
            const Domain& dom = schema_.domain_of(f);
            if (dom.is_categorical()) {
                std::set<std::string> seen;
                for (std::size_t i : idx) seen.insert(std::get<std::string>(data_[i].features[f]));
                if (seen.size() < 2) continue;
                for (const auto& cat : seen) {
                    std::size_t nl = 0, nl_pos = 0;
                    for (std::size_t i : idx) {
                        if (std::get<std::string>(data_[i].features[f]) == cat) {
                            ++nl;
                            nl_pos += data_[i].label;
                        }
                    }
                    consider(best, f, idx.size(), n_pos_total, nl, nl_pos, min_leaf, true, 0.0, cat);
                }
            } else {
                std::vector<std::pair<double, int>> vals;
                vals.reserve(idx.size());
                for (std::size_t i : idx)
                    vals.emplace_back(std::get<double>(data_[i].features[f]), data_[i].label);
                std::sort(vals.begin(), vals.end());
                std::size_t nl = 0, nl_pos = 0;
                for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                    ++nl;
                    nl_pos += vals[i].second;
                    if (vals[i].first == vals[i + 1].first) continue;
                    double threshold = vals[i].first + 0.5 * (vals[i + 1].first - vals[i].first);
                    consider(best, f, idx.size(), n_pos_total, nl, nl_pos, min_leaf, false,
                             threshold, {});
                }
            }
        }
        // require an actual impurity decrease
        if (best.feature >= 0 && parent - best.impurity <= 1e-12) best.feature = -1;
        return best;
    }

    void consider(SplitChoice& best, std::size_t feature, std::size_t n, std::size_t n_pos,
                  std::size_t nl, std::size_t nl_pos, std::size_t min_leaf, bool categorical,
                  double threshold, const std::string& category) {
        std::size_t nr = n - nl;
        if (nl < min_leaf || nr < min_leaf || nl == 0 || nr == 0) return;
        std::size_t nr_pos = n_pos - nl_pos;
        double impurity = (static_cast<double>(nl) * gini(nl, nl_pos) +
                           static_cast<double>(nr) * gini(nr, nr_pos)) /
                          static_cast<double>(n);
        if (impurity + 1e-15 < best.impurity) {
            best.feature = static_cast<int>(feature);
            best.categorical = categorical;
            best.threshold = threshold;
            best.category = category;
            best.impurity = impurity;
        }
    }

    void partition(const std::vector<std::size_t>& idx, const SplitChoice& split,
                   std::vector<std::size_t>& left, std::vector<std::size_t>& right) {
        for (std::size_t i : idx) {
            const Value& v = data_[i].features[static_cast<std::size_t>(split.feature)];
            bool goes_left = split.categorical ? std::get<std::string>(v) == split.category
                                               : std::get<double>(v) <= split.threshold;
            (goes_left ? left : right).push_back(i);
        }
    }

    const std::vector<LabeledVector>& data_;
    const EncodingSchema& schema_;
    const Hyperparams& params_;
    Rng& rng_;
};

}  // namespace

double DecisionTree::predict_proba(const FeatureVector& x) const {
    const TreeNode* node = &nodes[0];
    while (!node->is_leaf()) {
        const Value& v = x[static_cast<std::size_t>(node->feature)];
        bool goes_left = node->categorical_split ? std::get<std::string>(v) == node->category
                                                 : std::get<double>(v) <= node->threshold;
        node = &nodes[static_cast<std::size_t>(goes_left ? node->left : node->right)];
    }
    return node->n_samples == 0
               ? 0.5
               : static_cast<double>(node->n_positive) / static_cast<double>(node->n_samples);
}

RandomForestModel RandomForestModel::train(const std::vector<LabeledVector>& data,
                                           const EncodingSchema& schema,
                                           const Hyperparams& params, std::uint64_t seed) {
    if (data.size() < 2) throw DegenerateDataError("training needs at least 2 samples");
    bool has_pos = false, has_neg = false;
    for (const auto& sample : data) {
        (sample.label ? has_pos : has_neg) = true;
        validate_vector(schema, sample.features);
    }
    if (!has_pos || !has_neg)
        throw DegenerateDataError("training set contains a single class");
    if (params.n_trees < 1 || params.min_leaf < 1 || params.max_depth < 0)
        throw ConfigError("invalid random-forest hyperparameters");

    Rng rng(seed);
    std::vector<DecisionTree> trees;
    trees.reserve(static_cast<std::size_t>(params.n_trees));
    TreeBuilder builder(data, schema, params, rng);
    for (int t = 0; t < params.n_trees; ++t) {
        std::vector<std::size_t> sample(data.size());
        for (auto& s : sample) s = rng.index(data.size());
        trees.push_back(builder.build(std::move(sample)));
    }
    return RandomForestModel(schema, params, seed, std::move(trees));
}

double RandomForestModel::predict_proba(const FeatureVector& x) const {
    if (x.size() != schema_.feature_count())
        throw SchemaError("feature vector has " + std::to_string(x.size()) +
                          " values, model expects " + std::to_string(schema_.feature_count()));
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict_proba(x);
    return trees_.empty() ? 0.5 : sum / static_cast<double>(trees_.size());
}

double f1_score(const Predictor& model, const std::vector<LabeledVector>& dataset) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& sample : dataset) {
        int predicted = model.predict(sample.features);
        if (predicted == 1 && sample.label == 1) ++tp;
        if (predicted == 1 && sample.label == 0) ++fp;
        if (predicted == 0 && sample.label == 1) ++fn;
    }
    if (tp == 0) return 0.0;
    double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

GridSearchResult grid_search(const std::vector<LabeledVector>& train,
                             const std::vector<LabeledVector>& valid,
                             const EncodingSchema& schema,
                             const std::vector<Hyperparams>& grid, std::uint64_t seed) {
    if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
    auto effective_depth = [](int d) { return d == 0 ? std::numeric_limits<int>::max() : d; };

    GridSearchResult result;
    bool have_best = false;
    for (const auto& hp : grid) {
        RandomForestModel model = RandomForestModel::train(train, schema, hp, seed);
        double f1 = f1_score(model, valid);
        bool better = !have_best || f1 > result.f1 + 1e-12;
        if (!better && have_best && std::abs(f1 - result.f1) <= 1e-12) {
            if (hp.n_trees < result.best.n_trees)
                better = true;
            else if (hp.n_trees == result.best.n_trees &&
                     effective_depth(hp.max_depth) < effective_depth(result.best.max_depth))
                better = true;
        }
        if (better) {
            result.best = hp;
            result.f1 = f1;
            have_best = true;
        }
    }
    return result;
}

std::vector<Hyperparams> default_grid() {
    std::vector<Hyperparams> grid;
    for (int n_trees : {50, 100})
        for (int max_depth : {4, 8, 0})
            for (int min_leaf : {1, 5}) grid.push_back({n_trees, max_depth, min_leaf, 1.0});
    return grid;
}

}  // namespace tracecf
