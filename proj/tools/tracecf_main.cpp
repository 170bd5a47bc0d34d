// tracecf: counterfactual explanations for process outcome predictions,
// guided by Declare temporal background knowledge.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tracecf/bench.hpp"
#include "tracecf/declare.hpp"
#include "tracecf/encoding.hpp"
#include "tracecf/errors.hpp"
#include "tracecf/evaluation.hpp"
#include "tracecf/event_log.hpp"
#include "tracecf/ga.hpp"
#include "tracecf/io.hpp"
#include "tracecf/predictor.hpp"
#include "tracecf/synthesis.hpp"
#include "tracecf/version.hpp"

namespace {

using namespace tracecf;
namespace fs = std::filesystem;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

CsvColumnMap load_columns(const std::string& path) {
    if (path.empty()) return {};
    return column_map_from_json(load_json_file(path));
}

EventLog load_any_log(const std::string& path, const std::string& columns_path) {
    if (fs::path(path).extension() == ".xes") return parse_xes(path);
    return parse_csv(path, load_columns(columns_path));
}

DeclareConstraint parse_constraint_arg(const std::string& text) {
    return DeclareConstraint::from_text(text);
}

struct TrainPipeline {
    EncodingSchema schema;
    std::vector<LabeledVector> train, valid, test;
    std::vector<LabeledPrefix> test_prefixes;
};

TrainPipeline build_train_pipeline(const EventLog& log, const DeclareConstraint& labeling,
                                   EncodingKind kind, std::size_t prefix_length) {
    auto labels = label_log(log, labeling);
    auto prefixes = prefix_log(log, {prefix_length});
    for (auto& lp : prefixes) lp.label = labels.at(lp.source_case);
    sort_by_source_start(prefixes, log);
    SplitResult split = sequential_split(prefixes, SplitRatios{});

    TrainPipeline out;
    out.schema = build_schema(split.train, kind, prefix_length);
    auto encode_set = [&](const std::vector<LabeledPrefix>& set) {
        std::vector<LabeledVector> vecs;
        vecs.reserve(set.size());
        for (const auto& lp : set) vecs.push_back({encode(out.schema, lp.prefix), lp.label});
        return vecs;
    };
    out.train = encode_set(split.train);
    out.valid = encode_set(split.valid);
    out.test = encode_set(split.test);
    out.test_prefixes = std::move(split.test);
    return out;
}

int cmd_synth(const std::string& spec_path, std::uint64_t seed, const std::string& out_path) {
    SynthesisSpec spec = synthesis_spec_from_json(load_json_file(spec_path));
    EventLog log = synthesize_log(spec, seed);
    CsvColumnMap columns;
    for (const auto& attr : spec.trace_attributes) columns.static_columns.push_back(attr.name);
    write_csv(log, out_path, columns);
    save_json_file(fs::path(out_path).replace_extension(".columns.json"),
                   column_map_to_json(columns));
    std::cout << "wrote " << log.traces.size() << " traces to " << out_path << "\n";
    return 0;
}

int cmd_discover(const std::string& log_path, const std::string& columns_path, double support,
                 bool count_vacuous, const std::string& out_path) {
    EventLog log = load_any_log(log_path, columns_path);
    DeclareModel model = discover(log, {support, count_vacuous});
    if (model.empty())
        std::cerr << "warning: no constraint reaches support " << support << "\n";
    save_declare_model(model, out_path);
    std::cout << "discovered " << model.size() << " constraints at support " << support << "\n";
    return 0;
}

int cmd_label(const std::string& log_path, const std::string& columns_path,
              const std::string& constraint_text, const std::string& out_path) {
    EventLog log = load_any_log(log_path, columns_path);
    auto labels = label_log(log, parse_constraint_arg(constraint_text));
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + out_path);
    out << "# tracecf " << kVersion << " labels-v1\n";
    out << "case_id,label\n";
    for (const auto& [case_id, label] : labels) out << case_id << ',' << label << '\n';
    std::size_t positive = 0;
    for (const auto& [case_id, label] : labels) positive += static_cast<std::size_t>(label);
    std::cout << "labeled " << labels.size() << " cases, " << positive << " positive\n";
    return 0;
}

int cmd_train(const std::string& log_path, const std::string& columns_path,
              const std::string& labeling_text, const std::string& encoding_name,
              std::size_t prefix_length, const std::string& grid_path, std::uint64_t seed,
              const std::string& out_path) {
    EventLog log = load_any_log(log_path, columns_path);
    EncodingKind kind = encoding_kind_from_name(encoding_name);
    TrainPipeline pipeline =
        build_train_pipeline(log, parse_constraint_arg(labeling_text), kind, prefix_length);

    std::vector<Hyperparams> grid = default_grid();
    if (!grid_path.empty()) {
        grid.clear();
        for (const auto& hp : load_json_file(grid_path).at("grid"))
            grid.push_back(hyperparams_from_json(hp));
    }
    auto search = grid_search(pipeline.train, pipeline.valid, pipeline.schema, grid, seed);
    RandomForestModel model =
        RandomForestModel::train(pipeline.train, pipeline.schema, search.best, seed);
    save_forest(model, out_path);
    std::cout << "validation F1 " << format_double(search.f1) << " with n_trees="
              << search.best.n_trees << " max_depth=" << search.best.max_depth
              << " min_leaf=" << search.best.min_leaf << "\n";
    std::cout << "test F1 " << format_double(f1_score(model, pipeline.test)) << "\n";
    return 0;
}

int cmd_explain(const std::string& predictor_path, const std::string& model_path,
                const std::string& log_path, const std::string& columns_path,
                const std::string& query_case, int query_index, int desired_flag,
                const std::string& ga_path, std::uint64_t seed, const std::string& out_path) {
    RandomForestModel predictor = load_forest(predictor_path);
    const EncodingSchema& schema = predictor.schema();

    DeclareModel model;
    if (!model_path.empty()) model = load_declare_model(model_path);

    EventLog log = load_any_log(log_path, columns_path);
    auto prefixes = prefix_log(log, {schema.prefix_length});
    sort_by_source_start(prefixes, log);
    SplitResult split = sequential_split(prefixes, SplitRatios{});

    std::vector<FeatureVector> reference;
    reference.reserve(split.train.size());
    for (const auto& lp : split.train) reference.push_back(encode(schema, lp.prefix));
    if (reference.empty()) throw EmptyDatasetError("empty training split");

    FeatureVector query;
    if (!query_case.empty()) {
        bool found = false;
        for (const auto& lp : split.test)
            if (lp.source_case == query_case) {
                query = encode(schema, lp.prefix);
                found = true;
                break;
            }
        if (!found) {
            for (const auto& trace : log.traces)
                if (trace.case_id == query_case && trace.size() > schema.prefix_length) {
                    query = encode(schema, trace.prefix(schema.prefix_length));
                    found = true;
                    break;
                }
        }
        if (!found) throw ConfigError("no usable prefix for case '" + query_case + "'");
    } else {
        if (split.test.empty()) throw EmptyDatasetError("empty test split");
        std::size_t index = static_cast<std::size_t>(query_index) % split.test.size();
        query = encode(schema, split.test[index].prefix);
    }

    GaConfig cfg;
    if (!ga_path.empty()) cfg = ga_config_from_json(load_json_file(ga_path));
    cfg.seed = seed;
    int desired = desired_flag >= 0 ? desired_flag : 1 - predictor.predict(query);
    if (mode_is_adapted(cfg.mode) && model.empty())
        throw ConfigError("adapted modes need --declare-model");

    auto started = std::chrono::steady_clock::now();
    CounterfactualSet cfs = run(query, desired, cfg, predictor, reference,
                                mode_is_adapted(cfg.mode) ? &model : nullptr);
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

    MetricsReport metrics =
        evaluate_set(cfs, model, reference, schema, cfg.normalize_distance);
    metrics.runtime_seconds = elapsed.count();
    save_json_file(out_path, counterfactuals_to_json(cfs, metrics));
    std::cout << ga_mode_name(cfg.mode) << ": " << cfs.members.size() << "/" << cfs.requested
              << " counterfactuals (hit rate " << format_double(cfs.hit) << ") in "
              << format_double(elapsed.count()) << "s\n";
    return 0;
}

int cmd_evaluate(const std::string& cfs_path, const std::string& predictor_path,
                 const std::string& model_path, const std::string& log_path,
                 const std::string& columns_path, const std::string& out_path) {
    CounterfactualSet cfs = counterfactuals_from_json(load_json_file(cfs_path));
    RandomForestModel predictor = load_forest(predictor_path);
    const EncodingSchema& schema = predictor.schema();

    DeclareModel model;
    if (!model_path.empty()) model = load_declare_model(model_path);

    EventLog log = load_any_log(log_path, columns_path);
    auto prefixes = prefix_log(log, {schema.prefix_length});
    sort_by_source_start(prefixes, log);
    SplitResult split = sequential_split(prefixes, SplitRatios{});
    std::vector<FeatureVector> reference;
    for (const auto& lp : split.train) reference.push_back(encode(schema, lp.prefix));

    MetricsReport metrics = evaluate_set(cfs, model, reference, schema);
    json doc = metrics_to_json(metrics);
    stamp(doc, "metrics-v1");
    if (out_path.empty())
        std::cout << doc.dump(2) << "\n";
    else
        save_json_file(out_path, doc);
    return 0;
}

int cmd_bench(const std::string& config_path, const std::string& output_dir, std::size_t jobs,
              bool force, std::uint64_t seed_override, bool seed_given) {
    auto config = bench::pipeline_config_from_json(load_json_file(config_path),
                                                   fs::path(config_path).parent_path());
    if (seed_given) config.master_seed = seed_override;
    fs::path out = output_dir.empty() ? fs::path("bench_out") : fs::path(output_dir);
    auto result = bench::run_grid(config, out, jobs, force, &std::cout);
    std::size_t failed = 0;
    for (const auto& row : result.rows)
        if (!row.error.empty()) ++failed;
    std::cout << result.cells_run << " cells run, " << result.cells_skipped << " reused, "
              << failed << " failed; results in " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"counterfactual explanations for process outcome predictions"};
    app.set_version_flag("--version", std::string("tracecf ") + tracecf::kVersion);
    app.require_subcommand(1);
    app.fallthrough();  // global flags remain usable after a subcommand name

    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t jobs = 1;
    std::string output_dir;
    bool force = false;
    app.add_flag_callback("--force", [&] { force = true; }, "recompute existing outputs");
    app.add_option("--seed", seed, "master random seed")->each([&](const std::string&) {
        seed_given = true;
    });
    app.add_option("--jobs", jobs, "parallel benchmark cells");
    app.add_option("--output-dir", output_dir, "directory for benchmark outputs");

    std::string spec_path, log_path, columns_path, constraint_text, out_path;
    std::string encoding_name = "simple-index", grid_path, predictor_path, model_path;
    std::string ga_path, query_case, cfs_path, config_path;
    std::size_t prefix_length = 6;
    double support = 0.9;
    bool count_vacuous = false;
    int query_index = 0, desired = -1;

    auto* synth = app.add_subcommand("synth", "generate a synthetic event log");
    synth->add_option("--spec", spec_path, "synthesis spec JSON")->required();
    synth->add_option("--out", out_path, "output CSV path")->required();

    auto* disc = app.add_subcommand("discover", "mine a Declare model from a log");
    disc->add_option("--log", log_path)->required();
    disc->add_option("--column-map", columns_path);
    disc->add_option("--support", support);
    disc->add_flag("--count-vacuous", count_vacuous, "count vacuous satisfaction toward support");
    disc->add_option("--out", out_path, "model file (.json or .decl)")->required();

    auto* label = app.add_subcommand("label", "label cases by a Declare constraint");
    label->add_option("--log", log_path)->required();
    label->add_option("--column-map", columns_path);
    label->add_option("--constraint", constraint_text, "e.g. 'Existence1[A]'")->required();
    label->add_option("--out", out_path)->required();

    auto* train = app.add_subcommand("train", "train the outcome predictor");
    train->add_option("--log", log_path)->required();
    train->add_option("--column-map", columns_path);
    train->add_option("--labeling", constraint_text, "labeling constraint")->required();
    train->add_option("--encoding", encoding_name, "simple-index | simple-trace-index");
    train->add_option("--prefix-length", prefix_length);
    train->add_option("--grid", grid_path, "hyperparameter grid JSON");
    train->add_option("--out", out_path, "predictor file")->required();

    auto* explain = app.add_subcommand("explain", "generate counterfactuals for one query");
    explain->add_option("--predictor", predictor_path)->required();
    explain->add_option("--declare-model", model_path);
    explain->add_option("--log", log_path)->required();
    explain->add_option("--column-map", columns_path);
    explain->add_option("--query-case", query_case, "case id to explain");
    explain->add_option("--query-index", query_index, "index into the test split");
    explain->add_option("--desired", desired, "desired label (default: flip the prediction)");
    explain->add_option("--ga", ga_path, "GA config JSON");
    explain->add_option("--out", out_path)->required();

    auto* evaluate = app.add_subcommand("evaluate", "recompute metrics for a counterfactual file");
    evaluate->add_option("--counterfactuals", cfs_path)->required();
    evaluate->add_option("--predictor", predictor_path)->required();
    evaluate->add_option("--declare-model", model_path);
    evaluate->add_option("--log", log_path)->required();
    evaluate->add_option("--column-map", columns_path);
    evaluate->add_option("--out", out_path);

    auto* bench_cmd = app.add_subcommand("bench", "run the benchmark grid");
    bench_cmd->add_option("--config", config_path, "pipeline config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(spec_path, seed, out_path);
        if (disc->parsed())
            return cmd_discover(log_path, columns_path, support, count_vacuous, out_path);
        if (label->parsed()) return cmd_label(log_path, columns_path, constraint_text, out_path);
        if (train->parsed())
            return cmd_train(log_path, columns_path, constraint_text, encoding_name, prefix_length,
                             grid_path, seed, out_path);
        if (explain->parsed())
            return cmd_explain(predictor_path, model_path, log_path, columns_path, query_case,
                               query_index, desired, ga_path, seed, out_path);
        if (evaluate->parsed())
            return cmd_evaluate(cfs_path, predictor_path, model_path, log_path, columns_path,
                                out_path);
        if (bench_cmd->parsed())
            return cmd_bench(config_path, output_dir, jobs, force, seed, seed_given);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
