#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tracecf/declare.hpp"
#include "tracecf/encoding.hpp"
#include "tracecf/predictor.hpp"
#include "tracecf/rng.hpp"

namespace tracecf {

/// The four generation strategies: Baseline/Adapted operators+fitness
/// crossed with Single-/Multi-objective optimization.
enum class GaMode { BOSO, AOSO, BOMO, AOMO };

const char* ga_mode_name(GaMode mode);
GaMode ga_mode_from_name(const std::string& name);
bool mode_is_adapted(GaMode mode);
bool mode_is_multi_objective(GaMode mode);

/// All components are minimized. bk_gap (o5) is present in adapted modes
/// only.
struct ObjectiveVector {
    double validity = 0.0;        // o1: 0 when the prediction already flipped
    double distance = 0.0;        // o2: mean per-feature distance to the query
    double sparsity = 0.0;        // o3: number of changed features
    double implausibility = 0.0;  // o4: distance to the nearest reference vector
    std::optional<double> bk_gap; // o5: fraction of query-satisfied constraints lost

    std::vector<double> components() const {
        std::vector<double> v = {validity, distance, sparsity, implausibility};
        if (bk_gap) v.push_back(*bk_gap);
        return v;
    }

    bool operator==(const ObjectiveVector&) const = default;
};

struct Individual {
    FeatureVector genotype;
    ObjectiveVector objectives;
    bool evaluated = false;
    bool valid = false;  // prediction equals the desired label
};

enum class SurvivalScheme {
    ScoreRatio,        // diversity / proximity-to-ideal, extreme points first
    CrowdingDistance,  // classic crowding-distance truncation
};

struct GaConfig {
    GaMode mode = GaMode::BOSO;
    std::size_t k = 5;
    double alpha = 0.5;  // weight of o2
    double beta = 0.5;   // weight of o3
    double gamma = 0.5;  // weight of o4
    double delta = 0.5;  // weight of o5 (adapted modes)
    double crossover_probability = 0.5;  // p_c
    double mutation_probability = 0.2;   // p_m
    std::size_t population_size = 50;
    std::size_t max_generations = 100;
    std::size_t stall_generations = 10;
    double stall_epsilon = 1e-6;
    std::uint64_t seed = 0;
    bool lock_targets = true;  // exempt T-and-A slots of the query from mutation
    double fraction_neighbors = 0.5;  // share of the population seeded from neighbors
    SurvivalScheme survival_scheme = SurvivalScheme::ScoreRatio;
    bool normalize_distance = true;  // min-max normalize numeric distances
};

struct CounterfactualSet {
    FeatureVector query;
    int desired_label = 1;
    std::size_t requested = 0;  // k
    std::vector<Individual> members;  // valid, pairwise distinct genotypes
    double hit = 0.0;                 // |members| / k
};

// --- objectives ---------------------------------------------------------

/// 0 when the prediction matches the desired label, else the probability
/// gap 1 - p(desired).
double objective_validity(double proba_desired, int predicted, int desired);

/// Mean per-feature distance: indicator for categorical features, |x - c|
/// for numeric ones, divided by the schema range when normalize is set
/// (zero-range features contribute 0).
double objective_distance(const FeatureVector& x, const FeatureVector& c,
                          const EncodingSchema& schema, bool normalize = true);

std::size_t objective_sparsity(const FeatureVector& x, const FeatureVector& c);

/// Distance to the closest reference vector. Throws EmptyDatasetError when
/// the reference population is empty.
double objective_implausibility(const FeatureVector& c,
                                const std::vector<FeatureVector>& reference,
                                const EncodingSchema& schema, bool normalize = true);

/// Fraction of constraints satisfied by dec(x) but broken by dec(c); 0 is
/// full preservation. Vacuous satisfaction counts as satisfaction on both
/// sides.
double objective_bk(const FeatureVector& x, const FeatureVector& c, const DeclareModel& model,
                    const EncodingSchema& schema);

/// Weighted sum o1 + a*o2 + b*o3 + g*o4 (+ d*o5 in adapted modes); lower is
/// better. Throws ConfigError when an adapted mode lacks o5.
double fitness_single(const ObjectiveVector& objectives, const GaConfig& cfg);

// --- selection ----------------------------------------------------------

/// Fast non-dominated sort over the cached objective vectors; fronts and
/// their members are in insertion order.
std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<Individual>& population);

/// Admits whole fronts until the next front overflows, then fills the rest
/// from that front: per-objective extreme points first, remaining slots by
/// descending survival score (diversity over proximity to the per-front
/// ideal point, computed on min-max normalized objectives).
std::vector<std::size_t> survival_select(const std::vector<std::vector<std::size_t>>& fronts,
                                         const std::vector<Individual>& population,
                                         std::size_t n_survivors, SurvivalScheme scheme);

// --- variation operators --------------------------------------------------

/// Uniform crossover: each gene comes from p1 when the draw is below p_c,
/// from p2 otherwise.
FeatureVector crossover_baseline(const FeatureVector& p1, const FeatureVector& p2, double p_c,
                                 Rng& rng);

/// Temporal-knowledge-aware crossover: control-flow slots of the query
/// holding an activation or target activity are copied verbatim; remaining
/// slots come from a parent unless that parent's activity would introduce a
/// new activation, in which case the query gene is used.
FeatureVector crossover_adapted(const FeatureVector& q, const FeatureVector& p1,
                                const FeatureVector& p2, double p_c,
                                const ActivationTargetSets& sets, const EncodingSchema& schema,
                                Rng& rng);

/// Uniform resampling from the feature domain with probability p_m per
/// gene. A control-flow slot may take PAD only when every later slot is
/// already PAD.
FeatureVector mutate_baseline(FeatureVector offspring, double p_m, const EncodingSchema& schema,
                              Rng& rng);

/// As mutate_baseline but control-flow slots sample from the domain minus
/// the activation set; with lock_targets, slots where the query holds an
/// activation or target are exempt. An empty candidate set leaves the slot
/// unchanged and emits a warning.
FeatureVector mutate_adapted(FeatureVector offspring, const FeatureVector& q, double p_m,
                             const ActivationTargetSets& sets, const EncodingSchema& schema,
                             bool lock_targets, Rng& rng,
                             std::vector<std::string>* warnings = nullptr);

/// Hybrid initialization: ceil(fraction * size) nearest training vectors
/// (ties by insertion order), the remainder sampled uniformly from the
/// domains.
std::vector<FeatureVector> init_population(const FeatureVector& x,
                                           const std::vector<FeatureVector>& training,
                                           std::size_t size, double fraction_neighbors,
                                           const EncodingSchema& schema, Rng& rng,
                                           bool normalize_distance = true);

/// Runs the generational loop and extracts up to k valid, distinct
/// counterfactuals. Adapted modes require a Declare model.
CounterfactualSet run(const FeatureVector& x, int desired, const GaConfig& cfg,
                      const Predictor& predictor, const std::vector<FeatureVector>& reference,
                      const DeclareModel* model = nullptr);

}  // namespace tracecf
