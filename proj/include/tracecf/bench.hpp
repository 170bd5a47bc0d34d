#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tracecf/declare.hpp"
#include "tracecf/encoding.hpp"
#include "tracecf/evaluation.hpp"
#include "tracecf/event_log.hpp"
#include "tracecf/ga.hpp"
#include "tracecf/predictor.hpp"

namespace tracecf::bench {

struct ExperimentGrid {
    std::vector<GaMode> methods = {GaMode::BOSO, GaMode::AOSO, GaMode::BOMO, GaMode::AOMO};
    std::vector<std::size_t> k_values = {5, 10, 15, 20};
    std::vector<std::uint64_t> seeds = {0};
    std::size_t sample_size = 15;  // query instances per cell
};

struct PipelineConfig {
    std::string dataset = "dataset";
    std::filesystem::path log_path;
    std::optional<std::filesystem::path> column_map_path;
    std::optional<std::filesystem::path> declare_model_path;  // absent: discover from training
    DeclareConstraint labeling;
    DiscoveryOptions discovery;
    std::vector<EncodingKind> encodings = {EncodingKind::SimpleIndex};
    std::vector<std::size_t> prefix_lengths = {6};
    SplitRatios ratios;
    std::vector<Hyperparams> predictor_grid;
    std::uint64_t predictor_seed = 7;
    GaConfig ga_template;
    /// DiCE-style population sizing: the effective population is
    /// max(ga_template.population_size, population_per_k * k).
    std::size_t population_per_k = 10;
    ExperimentGrid grid;
    std::uint64_t master_seed = 0;
};

PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir);

/// Everything one (encoding, prefix length) combination needs: the trained
/// predictor, the background model, the reference population and the test
/// pool for query sampling.
struct PreparedPipeline {
    EncodingKind kind = EncodingKind::SimpleIndex;
    std::size_t prefix_length = 0;
    EncodingSchema schema;
    RandomForestModel predictor;
    DeclareModel model;
    std::vector<FeatureVector> reference;     // encoded training prefixes
    std::vector<FeatureVector> test_vectors;  // encoded test prefixes
    double validation_f1 = 0.0;
};

/// Labels, prefixes, splits, discovers (or loads) the Declare model,
/// discards non-conformant traces, builds the schema and trains the
/// predictor via grid search.
PreparedPipeline prepare(const EventLog& log, const PipelineConfig& config, EncodingKind kind,
                         std::size_t prefix_length);

EventLog load_log(const PipelineConfig& config);

std::string cell_id(const PipelineConfig& config, EncodingKind kind, std::size_t prefix_length,
                    std::size_t k, GaMode method, std::uint64_t seed);

/// Test-pool indices for one cell's queries; shared across methods and k so
/// the four strategies face identical query instances.
std::vector<std::size_t> sample_queries(const PipelineConfig& config,
                                        const PreparedPipeline& pipeline, std::uint64_t seed);

/// Runs one cell: sample_size queries through the GA, metrics averaged over
/// the queries.
BenchmarkRow run_cell(const PipelineConfig& config, const PreparedPipeline& pipeline,
                      std::size_t k, GaMode method, std::uint64_t seed);

struct GridRunResult {
    std::vector<BenchmarkRow> rows;  // canonical order, including reused rows
    std::size_t cells_run = 0;
    std::size_t cells_skipped = 0;
};

/// Executes the full Cartesian grid. Existing rows in <output_dir>/rows.csv
/// are reused unless force is set; cell failures land in the row's error
/// column. Writes rows.csv, aggregate.csv and plot_data.json.
GridRunResult run_grid(const PipelineConfig& config, const std::filesystem::path& output_dir,
                       std::size_t jobs = 1, bool force = false, std::ostream* progress = nullptr);

}  // namespace tracecf::bench
