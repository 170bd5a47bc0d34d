#include "tracecf/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "tracecf/errors.hpp"

namespace tracecf {

MetricsReport evaluate_set(const CounterfactualSet& cfs, const DeclareModel& model,
                           const std::vector<FeatureVector>& reference,
                           const EncodingSchema& schema, bool normalize_distance) {
    MetricsReport report;
    report.hit_rate = cfs.requested == 0
                          ? 0.0
                          : static_cast<double>(cfs.members.size()) /
                                static_cast<double>(cfs.requested);
    if (cfs.members.empty()) return report;

    double distance_sum = 0, sparsity_sum = 0, implausibility_sum = 0;
    for (const auto& member : cfs.members) {
        distance_sum += objective_distance(cfs.query, member.genotype, schema, normalize_distance);
        sparsity_sum += static_cast<double>(objective_sparsity(cfs.query, member.genotype));
        implausibility_sum +=
            objective_implausibility(member.genotype, reference, schema, normalize_distance);
    }
    double n = static_cast<double>(cfs.members.size());
    report.distance = distance_sum / n;
    report.sparsity = sparsity_sum / n;
    report.implausibility = implausibility_sum / n;

    if (!model.empty()) {
        auto query_acts = decode_activities(schema, cfs.query);
        std::vector<const DeclareConstraint*> satisfied_by_query;
        for (const auto& constraint : model.constraints)
            if (is_satisfied(check(constraint, query_acts)))
                satisfied_by_query.push_back(&constraint);

        double raw_sum = 0;
        for (const auto& member : cfs.members)
            raw_sum += trace_fitness(model, decode_activities(schema, member.genotype));
        report.trace_fitness_raw = raw_sum / n;

        if (!satisfied_by_query.empty()) {
            double preserved_sum = 0;
            for (const auto& member : cfs.members) {
                auto member_acts = decode_activities(schema, member.genotype);
                std::size_t preserved = 0;
                for (const auto* constraint : satisfied_by_query)
                    if (is_satisfied(check(*constraint, member_acts))) ++preserved;
                preserved_sum += static_cast<double>(preserved) /
                                 static_cast<double>(satisfied_by_query.size());
            }
            report.trace_fitness = preserved_sum / n;
        }
    }

    if (cfs.members.size() >= 2) {
        double pair_sum = 0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < cfs.members.size(); ++i)
            for (std::size_t j = i + 1; j < cfs.members.size(); ++j) {
                pair_sum += objective_distance(cfs.members[i].genotype, cfs.members[j].genotype,
                                               schema, normalize_distance);
                ++pairs;
            }
        report.diversity = pair_sum / static_cast<double>(pairs);
    }
    return report;
}

const std::vector<std::string> kMetricNames = {
    "distance",      "sparsity", "implausibility", "trace_fitness",
    "trace_fitness_raw", "diversity", "hit_rate",  "runtime_seconds",
};

const std::vector<std::string> kGroupFieldNames = {
    "dataset", "encoding", "prefix_length", "k", "method", "seed",
};

std::optional<double> metric_value(const MetricsReport& m, const std::string& name) {
    if (name == "distance") return m.distance;
    if (name == "sparsity") return m.sparsity;
    if (name == "implausibility") return m.implausibility;
    if (name == "trace_fitness") return m.trace_fitness;
    if (name == "trace_fitness_raw") return m.trace_fitness_raw;
    if (name == "diversity") return m.diversity;
    if (name == "hit_rate") return m.hit_rate;
    if (name == "runtime_seconds") return m.runtime_seconds;
    throw ConfigError("unknown metric: " + name);
}

std::string group_field_value(const BenchmarkRow& row, const std::string& field) {
    if (field == "dataset") return row.dataset;
    if (field == "encoding") return encoding_kind_name(row.encoding);
    if (field == "prefix_length") return std::to_string(row.prefix_length);
    if (field == "k") return std::to_string(row.k);
    if (field == "method") return ga_mode_name(row.method);
    if (field == "seed") return std::to_string(row.seed);
    throw ConfigError("unknown group field: " + field);
}

double mean_of(const std::vector<double>& values) {
    double sum = 0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values.front();
    double h = p * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<GroupSummary> aggregate(const std::vector<BenchmarkRow>& rows,
                                    const std::vector<std::string>& group_by) {
    if (rows.empty()) throw EmptyDatasetError("no benchmark rows to aggregate");
    for (const auto& field : group_by)
        if (std::find(kGroupFieldNames.begin(), kGroupFieldNames.end(), field) ==
            kGroupFieldNames.end())
            throw ConfigError("unknown group field: " + field);

    std::map<std::vector<std::string>, GroupSummary> groups;
    for (const auto& row : rows) {
        std::vector<std::string> key;
        for (const auto& field : group_by) key.push_back(group_field_value(row, field));
        GroupSummary& group = groups[key];
        if (group.key.empty())
            for (std::size_t i = 0; i < group_by.size(); ++i) group.key[group_by[i]] = key[i];
        if (!row.error.empty()) continue;
        for (const auto& name : kMetricNames) {
            auto v = metric_value(row.metrics, name);
            if (v) group.values[name].push_back(*v);
        }
    }

    std::vector<GroupSummary> out;
    out.reserve(groups.size());
    for (auto& [key, group] : groups) {
        for (const auto& [name, values] : group.values) {
            MetricSummary summary;
            summary.count = values.size();
            summary.mean = mean_of(values);
            summary.median = quantile(values, 0.5);
            summary.q1 = quantile(values, 0.25);
            summary.q3 = quantile(values, 0.75);
            group.metrics[name] = summary;
        }
        out.push_back(std::move(group));
    }
    return out;
}

}  // namespace tracecf
