#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tracecf/declare.hpp"
#include "tracecf/encoding.hpp"
#include "tracecf/ga.hpp"

namespace tracecf {

/// Per-query evaluation of a counterfactual set. Metrics that are undefined
/// on the set (no members, single member for diversity, no query-satisfied
/// constraints for trace fitness) stay absent rather than zero.
struct MetricsReport {
    std::optional<double> distance;        // mean o2 over members
    std::optional<double> sparsity;        // mean o3
    std::optional<double> implausibility;  // mean o4
    std::optional<double> trace_fitness;   // preservation ratio (canonical)
    std::optional<double> trace_fitness_raw;  // plain trace fitness of dec(c)
    std::optional<double> diversity;       // mean pairwise o2 among members
    double hit_rate = 0.0;
    std::optional<double> runtime_seconds;  // filled by the caller around run()

    bool operator==(const MetricsReport&) const = default;
};

/// Recomputes every metric from scratch; the GA's cached objective vectors
/// are never consulted. trace_fitness is the ratio of constraints satisfied
/// by dec(x) that each member's decode also satisfies, averaged over
/// members.
MetricsReport evaluate_set(const CounterfactualSet& cfs, const DeclareModel& model,
                           const std::vector<FeatureVector>& reference,
                           const EncodingSchema& schema, bool normalize_distance = true);

/// One cell of the benchmark grid.
struct BenchmarkRow {
    std::string dataset;
    EncodingKind encoding = EncodingKind::SimpleIndex;
    std::size_t prefix_length = 0;
    std::size_t k = 0;
    GaMode method = GaMode::BOSO;
    std::uint64_t seed = 0;
    std::size_t n_queries = 0;
    MetricsReport metrics;  // averaged over the cell's query instances
    std::string error;      // non-empty when the cell failed
};

extern const std::vector<std::string> kMetricNames;
extern const std::vector<std::string> kGroupFieldNames;

std::optional<double> metric_value(const MetricsReport& metrics, const std::string& name);
std::string group_field_value(const BenchmarkRow& row, const std::string& field);

struct MetricSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

struct GroupSummary {
    std::map<std::string, std::string> key;                 // group_by field -> value
    std::map<std::string, MetricSummary> metrics;           // absent metrics excluded
    std::map<std::string, std::vector<double>> values;      // raw distributions (plot data)
};

/// Groups rows by the given fields and summarizes each metric over the
/// values present in the group. Rows that carry an error contribute no
/// metric values. Throws EmptyDatasetError on empty input.
std::vector<GroupSummary> aggregate(const std::vector<BenchmarkRow>& rows,
                                    const std::vector<std::string>& group_by);

double mean_of(const std::vector<double>& values);
double quantile(std::vector<double> values, double p);  // linear interpolation

}  // namespace tracecf
