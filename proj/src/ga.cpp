#include "tracecf/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tracecf/errors.hpp"

namespace tracecf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly = true;
    }
    return strictly;
}

bool is_pad(const Value& v) {
    return is_categorical(v) && std::get<std::string>(v) == kPadSymbol;
}

bool in_set(const Value& v, const std::set<std::string>& names) {
    return is_categorical(v) && names.count(std::get<std::string>(v)) > 0;
}

bool trailing_pads(const FeatureVector& vec, const EncodingSchema& schema, std::size_t index) {
    for (std::size_t j = index + 1; j < schema.feature_count(); ++j)
        if (!is_pad(vec[j])) return false;
    return true;
}

double l2(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace

const char* ga_mode_name(GaMode mode) {
    switch (mode) {
        case GaMode::BOSO: return "BOSO";
        case GaMode::AOSO: return "AOSO";
        case GaMode::BOMO: return "BOMO";
        case GaMode::AOMO: return "AOMO";
    }
    return "?";
}

GaMode ga_mode_from_name(const std::string& name) {
    for (GaMode m : {GaMode::BOSO, GaMode::AOSO, GaMode::BOMO, GaMode::AOMO})
        if (name == ga_mode_name(m)) return m;
    throw ConfigError("unknown GA mode: " + name);
}

bool mode_is_adapted(GaMode mode) { return mode == GaMode::AOSO || mode == GaMode::AOMO; }
bool mode_is_multi_objective(GaMode mode) { return mode == GaMode::BOMO || mode == GaMode::AOMO; }

double objective_validity(double proba_desired, int predicted, int desired) {
    if (predicted == desired) return 0.0;
    return 1.0 - proba_desired;
}

double objective_distance(const FeatureVector& x, const FeatureVector& c,
                          const EncodingSchema& schema, bool normalize) {
    if (x.size() != c.size() || x.size() != schema.feature_count())
        throw SchemaError("distance over vectors of mismatched shape");
    if (x.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Domain& dom = schema.domain_of(i);
        if (dom.is_categorical()) {
            sum += x[i] == c[i] ? 0.0 : 1.0;
        } else {
            double diff = std::abs(std::get<double>(x[i]) - std::get<double>(c[i]));
            if (normalize) {
                double range = dom.max - dom.min;
                sum += range > 0 ? diff / range : 0.0;
            } else {
                sum += diff;
            }
        }
    }
    return sum / static_cast<double>(x.size());
}

std::size_t objective_sparsity(const FeatureVector& x, const FeatureVector& c) {
    if (x.size() != c.size()) throw SchemaError("sparsity over vectors of mismatched shape");
    std::size_t changed = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] == c[i])) ++changed;
    return changed;
}

double objective_implausibility(const FeatureVector& c,
                                const std::vector<FeatureVector>& reference,
                                const EncodingSchema& schema, bool normalize) {
    if (reference.empty()) throw EmptyDatasetError("implausibility needs a reference population");
    double best = kInf;
    for (const auto& x : reference) best = std::min(best, objective_distance(x, c, schema, normalize));
    return best;
}

double objective_bk(const FeatureVector& x, const FeatureVector& c, const DeclareModel& model,
                    const EncodingSchema& schema) {
    if (model.empty()) throw EmptyModelError("o5 over an empty Declare model");
    auto acts_x = decode_activities(schema, x);
    auto acts_c = decode_activities(schema, c);
    std::size_t broken = 0;
    for (const auto& constraint : model.constraints) {
        if (!is_satisfied(check(constraint, acts_x))) continue;
        if (!is_satisfied(check(constraint, acts_c))) ++broken;
    }
    return static_cast<double>(broken) / static_cast<double>(model.size());
}

double fitness_single(const ObjectiveVector& objectives, const GaConfig& cfg) {
    double fitness = objectives.validity + cfg.alpha * objectives.distance +
                     cfg.beta * objectives.sparsity + cfg.gamma * objectives.implausibility;
    if (mode_is_adapted(cfg.mode)) {
        if (!objectives.bk_gap)
            throw ConfigError("adapted fitness requires the o5 component");
        fitness += cfg.delta * *objectives.bk_gap;
    }
    return fitness;
}

std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<Individual>& population) {
    std::size_t n = population.size();
    std::vector<std::vector<double>> objs(n);
    for (std::size_t i = 0; i < n; ++i) objs[i] = population[i].objectives.components();

    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(objs[i], objs[j])) {
                dominated[i].push_back(j);
                ++domination_count[j];
            } else if (dominates(objs[j], objs[i])) {
                dominated[j].push_back(i);
                ++domination_count[i];
            }
        }
    }
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (domination_count[i] == 0) current.push_back(i);

    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<std::size_t> next;
        for (std::size_t i : current) {
            for (std::size_t j : dominated[i]) {
                if (--domination_count[j] == 0) next.push_back(j);
            }
        }
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

namespace {

std::vector<std::size_t> rank_splitting_front(const std::vector<std::size_t>& front,
                                              const std::vector<Individual>& population,
                                              std::size_t slots, SurvivalScheme scheme) {
    std::size_t n = front.size();
    std::vector<std::vector<double>> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = population[front[i]].objectives.components();
    std::size_t dims = raw.empty() ? 0 : raw[0].size();

    std::vector<std::size_t> chosen;
    std::vector<bool> taken(n, false);
    auto admit = [&](std::size_t i) {
        if (!taken[i] && chosen.size() < slots) {
            taken[i] = true;
            chosen.push_back(front[i]);
        }
    };

    if (scheme == SurvivalScheme::CrowdingDistance) {
        std::vector<double> crowding(n, 0.0);
        for (std::size_t d = 0; d < dims; ++d) {
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return raw[a][d] < raw[b][d]; });
            double lo = raw[order.front()][d], hi = raw[order.back()][d];
            crowding[order.front()] = kInf;
            crowding[order.back()] = kInf;
            if (hi - lo <= 0) continue;
            for (std::size_t i = 1; i + 1 < n; ++i)
                if (crowding[order[i]] != kInf)
                    crowding[order[i]] += (raw[order[i + 1]][d] - raw[order[i - 1]][d]) / (hi - lo);
        }
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return crowding[a] > crowding[b]; });
        for (std::size_t i : order) admit(i);
        return chosen;
    }

    // min-max normalize within the front; the ideal point becomes the origin
    std::vector<double> lo(dims, kInf), hi(dims, -kInf);
    for (const auto& v : raw)
        for (std::size_t d = 0; d < dims; ++d) {
            lo[d] = std::min(lo[d], v[d]);
            hi[d] = std::max(hi[d], v[d]);
        }
    std::vector<std::vector<double>> norm(n, std::vector<double>(dims, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dims; ++d)
            if (hi[d] - lo[d] > 0) norm[i][d] = (raw[i][d] - lo[d]) / (hi[d] - lo[d]);

    std::vector<double> proximity(n, 0.0), diversity(n, 0.0), score(n, 0.0);
    std::vector<double> zero(dims, 0.0);
    for (std::size_t i = 0; i < n; ++i) proximity[i] = l2(norm[i], zero);
    for (std::size_t i = 0; i < n; ++i) {
        double d1 = kInf, d2 = kInf;  // two smallest neighbor distances
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double d = l2(norm[i], norm[j]);
            if (d < d1) {
                d2 = d1;
                d1 = d;
            } else if (d < d2) {
                d2 = d;
            }
        }
        if (d1 == kInf) d1 = 0;
        if (d2 == kInf) d2 = 0;
        diversity[i] = d1 + d2;
        score[i] = proximity[i] > 0 ? diversity[i] / proximity[i] : kInf;
    }

    // per-objective extreme points go first; ties (common on degenerate
    // objectives such as an all-zero validity column) prefer the higher
    // survival score instead of discovery order
    for (std::size_t d = 0; d < dims; ++d) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (raw[i][d] < raw[best][d] ||
                (raw[i][d] == raw[best][d] && score[i] > score[best]))
                best = i;
        }
        admit(best);
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    for (std::size_t i : order) admit(i);
    return chosen;
}

}  // namespace

std::vector<std::size_t> survival_select(const std::vector<std::vector<std::size_t>>& fronts,
                                         const std::vector<Individual>& population,
                                         std::size_t n_survivors, SurvivalScheme scheme) {
    if (n_survivors > population.size())
        throw ConfigError("cannot select more survivors than the population holds");
    std::vector<std::size_t> survivors;
    survivors.reserve(n_survivors);
    for (const auto& front : fronts) {
        if (survivors.size() == n_survivors) break;
        if (survivors.size() + front.size() <= n_survivors) {
            survivors.insert(survivors.end(), front.begin(), front.end());
            continue;
        }
        auto chosen = rank_splitting_front(front, population, n_survivors - survivors.size(), scheme);
        survivors.insert(survivors.end(), chosen.begin(), chosen.end());
        break;
    }
    return survivors;
}

FeatureVector crossover_baseline(const FeatureVector& p1, const FeatureVector& p2, double p_c,
                                 Rng& rng) {
    if (p1.size() != p2.size()) throw SchemaError("crossover over mismatched parents");
    FeatureVector offspring(p1.size());
    for (std::size_t i = 0; i < p1.size(); ++i)
        offspring[i] = rng.uniform01() < p_c ? p1[i] : p2[i];
    return offspring;
}

FeatureVector crossover_adapted(const FeatureVector& q, const FeatureVector& p1,
                                const FeatureVector& p2, double p_c,
                                const ActivationTargetSets& sets, const EncodingSchema& schema,
                                Rng& rng) {
    if (q.size() != p1.size() || q.size() != p2.size() || q.size() != schema.feature_count())
        throw SchemaError("crossover over mismatched vectors");

    FeatureVector offspring(q.size());
    std::vector<bool> open(q.size(), false);
    for (std::size_t i = 0; i < q.size(); ++i) {
        bool locked = schema.is_control_flow(i) && is_categorical(q[i]) &&
                      sets.in_either(std::get<std::string>(q[i]));
        if (locked)
            offspring[i] = q[i];
        else
            open[i] = true;
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
        double p = rng.uniform01();
        if (!open[i]) continue;
        bool cf = schema.is_control_flow(i);
        if (p < p_c && (!cf || !in_set(p1[i], sets.activations)))
            offspring[i] = p1[i];
        else if (p > p_c && (!cf || !in_set(p2[i], sets.activations)))
            offspring[i] = p2[i];
        else
            offspring[i] = q[i];
    }
    return offspring;
}

namespace {

// Candidate activities for a mutation at a control-flow slot. PAD stays in
// the pool only when every later slot already holds PAD, so pads never open
// an interior gap.
std::vector<std::string> cf_mutation_pool(const FeatureVector& current,
                                          const EncodingSchema& schema, std::size_t index,
                                          const std::set<std::string>* excluded) {
    bool pad_allowed = trailing_pads(current, schema, index);
    std::vector<std::string> pool;
    for (const auto& value : schema.activity_domain.values) {
        if (value == kPadSymbol && !pad_allowed) continue;
        if (excluded && excluded->count(value)) continue;
        pool.push_back(value);
    }
    return pool;
}

}  // namespace

FeatureVector mutate_baseline(FeatureVector offspring, double p_m, const EncodingSchema& schema,
                              Rng& rng) {
    for (std::size_t i = 0; i < offspring.size(); ++i) {
        double p = rng.uniform01();
        if (p >= p_m) continue;
        const Domain& dom = schema.domain_of(i);
        if (schema.is_control_flow(i)) {
            auto pool = cf_mutation_pool(offspring, schema, i, nullptr);
            if (!pool.empty()) offspring[i] = pool[rng.index(pool.size())];
        } else if (dom.is_categorical()) {
            offspring[i] = dom.values[rng.index(dom.values.size())];
        } else {
            offspring[i] = rng.uniform(dom.min, dom.max);
        }
    }
    return offspring;
}

FeatureVector mutate_adapted(FeatureVector offspring, const FeatureVector& q, double p_m,
                             const ActivationTargetSets& sets, const EncodingSchema& schema,
                             bool lock_targets, Rng& rng, std::vector<std::string>* warnings) {
    if (q.size() != offspring.size()) throw SchemaError("mutation over mismatched vectors");
    for (std::size_t i = 0; i < offspring.size(); ++i) {
        double p = rng.uniform01();
        if (p >= p_m) continue;
        const Domain& dom = schema.domain_of(i);
        if (schema.is_control_flow(i)) {
            if (lock_targets && is_categorical(q[i]) &&
                sets.in_either(std::get<std::string>(q[i])))
                continue;  // slot pinned by the query's activations/targets
            auto pool = cf_mutation_pool(offspring, schema, i, &sets.activations);
            if (pool.empty()) {
                if (warnings)
                    warnings->push_back("no admissible activity for slot " +
                                        schema.feature_name(i) + "; left unchanged");
                continue;
            }
            offspring[i] = pool[rng.index(pool.size())];
        } else if (dom.is_categorical()) {
            offspring[i] = dom.values[rng.index(dom.values.size())];
        } else {
            offspring[i] = rng.uniform(dom.min, dom.max);
        }
    }
    return offspring;
}

std::vector<FeatureVector> init_population(const FeatureVector& x,
                                           const std::vector<FeatureVector>& training,
                                           std::size_t size, double fraction_neighbors,
                                           const EncodingSchema& schema, Rng& rng,
                                           bool normalize_distance) {
    if (training.empty()) throw EmptyDatasetError("hybrid initialization needs training vectors");

    std::size_t want_neighbors = static_cast<std::size_t>(
        std::ceil(fraction_neighbors * static_cast<double>(size)));
    std::size_t n_neighbors = std::min({want_neighbors, size, training.size()});

    std::vector<std::size_t> order(training.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> dist(training.size());
    for (std::size_t i = 0; i < training.size(); ++i)
        dist[i] = objective_distance(x, training[i], schema, normalize_distance);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

    std::vector<FeatureVector> population;
    population.reserve(size);
    for (std::size_t i = 0; i < n_neighbors; ++i) population.push_back(training[order[i]]);

    while (population.size() < size) {
        FeatureVector vec;
        vec.reserve(schema.feature_count());
        for (const auto& spec : schema.static_features) {
            if (spec.domain.is_categorical())
                vec.emplace_back(spec.domain.values[rng.index(spec.domain.values.size())]);
            else
                vec.emplace_back(rng.uniform(spec.domain.min, spec.domain.max));
        }
        bool padded = false;
        for (std::size_t slot = 0; slot < schema.prefix_length; ++slot) {
            if (padded) {
                vec.emplace_back(std::string(kPadSymbol));
                continue;
            }
            const auto& values = schema.activity_domain.values;
            const std::string& pick = values[rng.index(values.size())];
            if (pick == kPadSymbol) padded = true;
            vec.emplace_back(pick);
        }
        population.push_back(std::move(vec));
    }
    return population;
}

namespace {

class Evaluator {
public:
    Evaluator(const FeatureVector& x, int desired, const GaConfig& cfg, const Predictor& predictor,
              const std::vector<FeatureVector>& reference, const DeclareModel* model)
        : x_(x), desired_(desired), cfg_(cfg), predictor_(predictor), reference_(reference),
          model_(model) {}

    Individual evaluate(FeatureVector genotype) const {
        Individual ind;
        double proba_pos = predictor_.predict_proba(genotype);
        int predicted = proba_pos >= 0.5 ? 1 : 0;
        double proba_desired = desired_ == 1 ? proba_pos : 1.0 - proba_pos;

        ind.objectives.validity = objective_validity(proba_desired, predicted, desired_);
        ind.objectives.distance =
            objective_distance(x_, genotype, predictor_.schema(), cfg_.normalize_distance);
        ind.objectives.sparsity = static_cast<double>(objective_sparsity(x_, genotype));
        ind.objectives.implausibility = objective_implausibility(
            genotype, reference_, predictor_.schema(), cfg_.normalize_distance);
        if (mode_is_adapted(cfg_.mode))
            ind.objectives.bk_gap = objective_bk(x_, genotype, *model_, predictor_.schema());
        ind.valid = predicted == desired_;
        ind.evaluated = true;
        ind.genotype = std::move(genotype);
        return ind;
    }

private:
    const FeatureVector& x_;
    int desired_;
    const GaConfig& cfg_;
    const Predictor& predictor_;
    const std::vector<FeatureVector>& reference_;
    const DeclareModel* model_;
};

double front1_proxy(const std::vector<Individual>& population) {
    auto fronts = nondominated_sort(population);
    if (fronts.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i : fronts.front())
        for (double component : population[i].objectives.components()) sum += component;
    return sum;
}

// Valid candidates seen anywhere in the run, so extraction is not limited to
// whatever survives into the last generation. Single-objective mode keeps
// the k best by fitness; multi-objective mode keeps a capped Pareto set.
class ValidArchive {
public:
    ValidArchive(bool multi, std::size_t k, const GaConfig& cfg)
        : multi_(multi), cap_(multi ? std::max<std::size_t>(4 * k, 64) : k), cfg_(cfg) {}

    void consider(const Individual& ind) {
        if (!ind.valid || genotypes_.count(ind.genotype)) return;
        if (multi_) {
            for (const auto& member : members_)
                if (dominates(member.objectives.components(), ind.objectives.components()))
                    return;
            std::vector<Individual> kept;
            kept.reserve(members_.size() + 1);
            for (auto& member : members_) {
                if (dominates(ind.objectives.components(), member.objectives.components()))
                    genotypes_.erase(member.genotype);
                else
                    kept.push_back(std::move(member));
            }
            members_ = std::move(kept);
            genotypes_.insert(ind.genotype);
            members_.push_back(ind);
            if (members_.size() > cap_) prune();
        } else {
            double fitness = fitness_single(ind.objectives, cfg_);
            auto at = std::upper_bound(members_.begin(), members_.end(), fitness,
                                       [&](double f, const Individual& m) {
                                           return f < fitness_single(m.objectives, cfg_);
                                       });
            genotypes_.insert(ind.genotype);
            members_.insert(at, ind);
            if (members_.size() > cap_) {
                genotypes_.erase(members_.back().genotype);
                members_.pop_back();
            }
        }
    }

    const std::vector<Individual>& members() const { return members_; }
    bool contains(const FeatureVector& genotype) const { return genotypes_.count(genotype) > 0; }

private:
    void prune() {
        std::vector<std::vector<std::size_t>> one_front(1);
        for (std::size_t i = 0; i < members_.size(); ++i) one_front[0].push_back(i);
        auto keep = survival_select(one_front, members_, cap_, SurvivalScheme::ScoreRatio);
        std::sort(keep.begin(), keep.end());
        std::vector<Individual> kept;
        kept.reserve(keep.size());
        genotypes_.clear();
        for (std::size_t i : keep) {
            genotypes_.insert(members_[i].genotype);
            kept.push_back(std::move(members_[i]));
        }
        members_ = std::move(kept);
    }

    bool multi_;
    std::size_t cap_;
    const GaConfig& cfg_;
    std::vector<Individual> members_;
    std::set<FeatureVector> genotypes_;
};

}  // namespace

CounterfactualSet run(const FeatureVector& x, int desired, const GaConfig& cfg,
                      const Predictor& predictor, const std::vector<FeatureVector>& reference,
                      const DeclareModel* model) {
    if (cfg.population_size < 2) throw ConfigError("population_size must be >= 2");
    if (cfg.k < 1) throw ConfigError("k must be >= 1");
    if (cfg.crossover_probability < 0 || cfg.crossover_probability > 1 ||
        cfg.mutation_probability < 0 || cfg.mutation_probability > 1)
        throw ConfigError("p_c and p_m must lie in [0, 1]");
    bool adapted = mode_is_adapted(cfg.mode);
    if (adapted && (!model || model->empty()))
        throw ConfigError(std::string(ga_mode_name(cfg.mode)) + " requires a Declare model");
    const EncodingSchema& schema = predictor.schema();
    validate_vector(schema, x);

    ActivationTargetSets sets;
    if (adapted) sets = activation_target_sets(*model);

    Rng rng(cfg.seed);
    Evaluator evaluator(x, desired, cfg, predictor, reference, model);
    bool multi = mode_is_multi_objective(cfg.mode);
    ValidArchive archive(multi, cfg.k, cfg);

    std::vector<Individual> population;
    population.reserve(cfg.population_size);
    for (auto& vec : init_population(x, reference, cfg.population_size, cfg.fraction_neighbors,
                                     schema, rng, cfg.normalize_distance)) {
        population.push_back(evaluator.evaluate(std::move(vec)));
        archive.consider(population.back());
    }

    auto make_offspring = [&](const FeatureVector& p1, const FeatureVector& p2) {
        FeatureVector child = adapted
                                  ? crossover_adapted(x, p1, p2, cfg.crossover_probability, sets,
                                                      schema, rng)
                                  : crossover_baseline(p1, p2, cfg.crossover_probability, rng);
        return adapted ? mutate_adapted(std::move(child), x, cfg.mutation_probability, sets,
                                        schema, cfg.lock_targets, rng)
                       : mutate_baseline(std::move(child), cfg.mutation_probability, schema, rng);
    };

    double previous_metric = 0.0;
    std::vector<double> fitness;
    auto refresh_fitness = [&] {
        fitness.resize(population.size());
        for (std::size_t i = 0; i < population.size(); ++i)
            fitness[i] = fitness_single(population[i].objectives, cfg);
    };
    if (multi) {
        previous_metric = front1_proxy(population);
    } else {
        refresh_fitness();
        previous_metric = *std::min_element(fitness.begin(), fitness.end());
    }

    std::size_t stall = 0;
    for (std::size_t generation = 0; generation < cfg.max_generations; ++generation) {
        if (multi) {
            // binary tournament on front rank for mating
            std::vector<std::size_t> rank(population.size(), 0);
            {
                auto fronts = nondominated_sort(population);
                for (std::size_t f = 0; f < fronts.size(); ++f)
                    for (std::size_t i : fronts[f]) rank[i] = f;
            }
            auto pick_parent = [&]() -> const FeatureVector& {
                std::size_t a = rng.index(population.size());
                std::size_t b = rng.index(population.size());
                return population[rank[a] <= rank[b] ? a : b].genotype;
            };
            std::vector<Individual> combined = population;
            combined.reserve(population.size() * 2);
            for (std::size_t i = 0; i < cfg.population_size; ++i) {
                const FeatureVector& p1 = pick_parent();
                const FeatureVector& p2 = pick_parent();
                combined.push_back(evaluator.evaluate(make_offspring(p1, p2)));
                archive.consider(combined.back());
            }
            auto fronts = nondominated_sort(combined);
            auto survivors =
                survival_select(fronts, combined, cfg.population_size, cfg.survival_scheme);
            std::vector<Individual> next;
            next.reserve(survivors.size());
            for (std::size_t i : survivors) next.push_back(std::move(combined[i]));
            population = std::move(next);

            // the front sum moves in both directions while the front still
            // evolves; stall once it stops changing
            double proxy = front1_proxy(population);
            if (std::abs(previous_metric - proxy) < cfg.stall_epsilon)
                ++stall;
            else
                stall = 0;
            previous_metric = proxy;
        } else {
            std::vector<std::size_t> order(population.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });

            // top half carries over, the rest is refilled by variation
            std::size_t n_elite = cfg.population_size / 2;
            std::vector<Individual> next;
            next.reserve(cfg.population_size);
            for (std::size_t i = 0; i < n_elite; ++i) next.push_back(population[order[i]]);

            auto tournament = [&]() -> const FeatureVector& {
                std::size_t a = rng.index(population.size());
                std::size_t b = rng.index(population.size());
                return population[fitness[a] <= fitness[b] ? a : b].genotype;
            };
            while (next.size() < cfg.population_size) {
                const FeatureVector& p1 = tournament();
                const FeatureVector& p2 = tournament();
                next.push_back(evaluator.evaluate(make_offspring(p1, p2)));
                archive.consider(next.back());
            }
            population = std::move(next);
            refresh_fitness();

            double best = *std::min_element(fitness.begin(), fitness.end());
            if (previous_metric - best < cfg.stall_epsilon)
                ++stall;
            else
                stall = 0;
            previous_metric = best;
        }
        if (stall >= cfg.stall_generations) break;
    }

    // extraction pool: every valid candidate the run retained, plus the
    // valid members of the final generation
    std::vector<Individual> pool = archive.members();
    {
        std::set<FeatureVector> seen;
        for (const auto& ind : pool) seen.insert(ind.genotype);
        for (const auto& ind : population)
            if (ind.valid && seen.insert(ind.genotype).second) pool.push_back(ind);
    }

    CounterfactualSet result;
    result.query = x;
    result.desired_label = desired;
    result.requested = cfg.k;

    if (multi) {
        // front by front; a splitting front is truncated by survival score
        auto fronts = nondominated_sort(pool);
        auto chosen = survival_select(fronts, pool, std::min(cfg.k, pool.size()),
                                      cfg.survival_scheme);
        for (std::size_t i : chosen) result.members.push_back(pool[i]);
    } else {
        std::vector<std::size_t> ranking(pool.size());
        for (std::size_t i = 0; i < ranking.size(); ++i) ranking[i] = i;
        std::stable_sort(ranking.begin(), ranking.end(), [&](std::size_t a, std::size_t b) {
            return fitness_single(pool[a].objectives, cfg) <
                   fitness_single(pool[b].objectives, cfg);
        });
        for (std::size_t i : ranking) {
            if (result.members.size() == cfg.k) break;
            result.members.push_back(pool[i]);
        }
    }
    result.hit = static_cast<double>(result.members.size()) / static_cast<double>(cfg.k);
    return result;
}

}  // namespace tracecf
