#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tracecf/declare.hpp"
#include "tracecf/encoding.hpp"
#include "tracecf/evaluation.hpp"
#include "tracecf/ga.hpp"
#include "tracecf/predictor.hpp"
#include "tracecf/synthesis.hpp"

namespace tracecf {

using json = nlohmann::json;

json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const json& doc);

/// Attaches {"format": {tool, version, schema}} to a document.
void stamp(json& doc, const std::string& schema_name);

json value_to_json(const Value& v);
Value value_from_json(const json& j);

json constraint_to_json(const DeclareConstraint& c);
DeclareConstraint constraint_from_json(const json& j);

json declare_model_to_json(const DeclareModel& model);
DeclareModel declare_model_from_json(const json& j);

/// JSON array form or ".decl" text form, chosen by file extension.
void save_declare_model(const DeclareModel& model, const std::filesystem::path& path);
DeclareModel load_declare_model(const std::filesystem::path& path);

json schema_to_json(const EncodingSchema& schema);
EncodingSchema schema_from_json(const json& j);

json hyperparams_to_json(const Hyperparams& hp);
Hyperparams hyperparams_from_json(const json& j);

json forest_to_json(const RandomForestModel& model);
RandomForestModel forest_from_json(const json& j);
void save_forest(const RandomForestModel& model, const std::filesystem::path& path);
RandomForestModel load_forest(const std::filesystem::path& path);

json ga_config_to_json(const GaConfig& cfg);
GaConfig ga_config_from_json(const json& j);

SynthesisSpec synthesis_spec_from_json(const json& j);
json synthesis_spec_to_json(const SynthesisSpec& spec);

CsvColumnMap column_map_from_json(const json& j);
json column_map_to_json(const CsvColumnMap& columns);

json metrics_to_json(const MetricsReport& metrics);
MetricsReport metrics_from_json(const json& j);

json counterfactuals_to_json(const CounterfactualSet& cfs, const MetricsReport& metrics);
CounterfactualSet counterfactuals_from_json(const json& j);

/// Benchmark rows CSV (one BenchmarkRow per line; absent metrics are empty
/// cells). The file starts with a version stamp comment.
std::string benchmark_rows_header();
std::string benchmark_row_line(const BenchmarkRow& row);
std::string benchmark_rows_to_csv(const std::vector<BenchmarkRow>& rows);
std::vector<BenchmarkRow> benchmark_rows_from_csv(const std::string& text);

std::string aggregate_to_csv(const std::vector<GroupSummary>& groups,
                             const std::vector<std::string>& group_by);
json aggregate_to_plot_json(const std::vector<GroupSummary>& groups);

}  // namespace tracecf
