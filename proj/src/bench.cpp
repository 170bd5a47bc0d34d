#include "tracecf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "tracecf/errors.hpp"
#include "tracecf/io.hpp"
#include "tracecf/rng.hpp"

namespace tracecf::bench {
namespace {

std::vector<LabeledVector> encode_all(const EncodingSchema& schema,
                                      const std::vector<LabeledPrefix>& prefixes) {
    std::vector<LabeledVector> out;
    out.reserve(prefixes.size());
    for (const auto& lp : prefixes) out.push_back({encode(schema, lp.prefix), lp.label});
    return out;
}

void conformant_filter(std::vector<LabeledPrefix>& prefixes,
                       const std::set<std::string>& conformant_cases) {
    std::vector<LabeledPrefix> kept;
    kept.reserve(prefixes.size());
    for (auto& lp : prefixes)
        if (conformant_cases.count(lp.source_case)) kept.push_back(std::move(lp));
    prefixes = std::move(kept);
}

std::optional<double> average(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    return mean_of(values);
}

struct RowKey {
    std::string dataset;
    std::string encoding;
    std::size_t prefix_length, k;
    std::string method;
    std::uint64_t seed;

    auto tie() const { return std::tie(dataset, encoding, prefix_length, k, method, seed); }
    bool operator<(const RowKey& o) const { return tie() < o.tie(); }
};

RowKey key_of(const BenchmarkRow& row) {
    return {row.dataset, encoding_kind_name(row.encoding), row.prefix_length,
            row.k,       ga_mode_name(row.method),         row.seed};
}

}  // namespace

PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir) {
    PipelineConfig config;
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };

    config.dataset = j.value("dataset", config.dataset);
    const auto& paths = j.at("paths");
    config.log_path = resolve(paths.at("log").get<std::string>());
    if (paths.contains("column_map"))
        config.column_map_path = resolve(paths.at("column_map").get<std::string>());
    if (paths.contains("declare_model"))
        config.declare_model_path = resolve(paths.at("declare_model").get<std::string>());

    config.labeling = constraint_from_json(j.at("labeling"));
    if (j.contains("discovery")) {
        config.discovery.support = j.at("discovery").value("support", config.discovery.support);
        config.discovery.count_vacuous =
            j.at("discovery").value("count_vacuous", config.discovery.count_vacuous);
    }
    if (j.contains("encoding")) {
        const auto& enc = j.at("encoding");
        if (enc.contains("kinds")) {
            config.encodings.clear();
            for (const auto& k : enc.at("kinds"))
                config.encodings.push_back(encoding_kind_from_name(k.get<std::string>()));
        }
        if (enc.contains("prefix_lengths"))
            config.prefix_lengths = enc.at("prefix_lengths").get<std::vector<std::size_t>>();
    }
    if (j.contains("split")) {
        config.ratios.train = j.at("split").value("train", config.ratios.train);
        config.ratios.valid = j.at("split").value("valid", config.ratios.valid);
        config.ratios.test = j.at("split").value("test", config.ratios.test);
    }
    if (j.contains("predictor")) {
        const auto& pred = j.at("predictor");
        config.predictor_seed = pred.value("seed", config.predictor_seed);
        if (pred.contains("grid"))
            for (const auto& hp : pred.at("grid"))
                config.predictor_grid.push_back(hyperparams_from_json(hp));
    }
    if (config.predictor_grid.empty()) config.predictor_grid = default_grid();
    if (j.contains("ga")) config.ga_template = ga_config_from_json(j.at("ga"));
    config.population_per_k = j.value("population_per_k", config.population_per_k);

    if (j.contains("experiments")) {
        const auto& exp = j.at("experiments");
        if (exp.contains("methods")) {
            config.grid.methods.clear();
            for (const auto& m : exp.at("methods"))
                config.grid.methods.push_back(ga_mode_from_name(m.get<std::string>()));
        }
        if (exp.contains("k")) config.grid.k_values = exp.at("k").get<std::vector<std::size_t>>();
        if (exp.contains("seeds"))
            config.grid.seeds = exp.at("seeds").get<std::vector<std::uint64_t>>();
        config.grid.sample_size = exp.value("sample_size", config.grid.sample_size);
    }
    config.master_seed = j.value("seed", config.master_seed);
    if (config.grid.methods.empty() || config.grid.k_values.empty() || config.grid.seeds.empty())
        throw ConfigError("experiment grid must name methods, k values and seeds");
    return config;
}

EventLog load_log(const PipelineConfig& config) {
    if (config.log_path.extension() == ".xes") return parse_xes(config.log_path);
    CsvColumnMap columns;
    if (config.column_map_path)
        columns = column_map_from_json(load_json_file(*config.column_map_path));
    return parse_csv(config.log_path, columns);
}

PreparedPipeline prepare(const EventLog& log, const PipelineConfig& config, EncodingKind kind,
                         std::size_t prefix_length) {
    PreparedPipeline pipeline;
    pipeline.kind = kind;
    pipeline.prefix_length = prefix_length;

    auto labels = label_log(log, config.labeling);
    auto prefixes = prefix_log(log, {prefix_length});
    for (auto& lp : prefixes) lp.label = labels.at(lp.source_case);
    sort_by_source_start(prefixes, log);
    SplitResult split = sequential_split(prefixes, config.ratios);

    if (config.declare_model_path) {
        pipeline.model = load_declare_model(*config.declare_model_path);
    } else {
        // discover from the complete traces behind the training prefixes
        std::set<std::string> train_cases;
        for (const auto& lp : split.train) train_cases.insert(lp.source_case);
        EventLog train_log;
        for (const auto& trace : log.traces)
            if (train_cases.count(trace.case_id)) train_log.traces.push_back(trace);
        train_log.rebuild_alphabet();
        if (train_log.traces.empty()) throw EmptyDatasetError("empty training split");
        pipeline.model = discover(train_log, config.discovery);
    }

    if (!pipeline.model.empty()) {
        std::set<std::string> conformant_cases;
        for (const auto& trace : log.traces)
            if (trace_fitness(pipeline.model, trace) == 1.0) conformant_cases.insert(trace.case_id);
        conformant_filter(split.train, conformant_cases);
        conformant_filter(split.valid, conformant_cases);
        conformant_filter(split.test, conformant_cases);
    }
    if (split.train.empty())
        throw EmptyDatasetError("no conformant training prefixes left after filtering");

    pipeline.schema = build_schema(split.train, kind, prefix_length);
    auto train_set = encode_all(pipeline.schema, split.train);
    auto valid_set = encode_all(pipeline.schema, split.valid);
    auto grid_result = grid_search(train_set, valid_set, pipeline.schema, config.predictor_grid,
                                   config.predictor_seed);
    pipeline.validation_f1 = grid_result.f1;
    pipeline.predictor = RandomForestModel::train(train_set, pipeline.schema, grid_result.best,
                                                  config.predictor_seed);

    pipeline.reference.reserve(train_set.size());
    for (auto& sample : train_set) pipeline.reference.push_back(std::move(sample.features));
    pipeline.test_vectors.reserve(split.test.size());
    for (const auto& lp : split.test)
        pipeline.test_vectors.push_back(encode(pipeline.schema, lp.prefix));
    return pipeline;
}

std::string cell_id(const PipelineConfig& config, EncodingKind kind, std::size_t prefix_length,
                    std::size_t k, GaMode method, std::uint64_t seed) {
    return config.dataset + "|" + encoding_kind_name(kind) + "|" + std::to_string(prefix_length) +
           "|" + std::to_string(k) + "|" + ga_mode_name(method) + "|" + std::to_string(seed);
}

std::vector<std::size_t> sample_queries(const PipelineConfig& config,
                                        const PreparedPipeline& pipeline, std::uint64_t seed) {
    std::size_t pool = pipeline.test_vectors.size();
    if (pool == 0) throw EmptyDatasetError("empty test split, no query instances");
    std::size_t want = std::min(config.grid.sample_size, pool);

    // method- and k-independent tag: all strategies see the same queries
    std::string tag = "queries|" + config.dataset + "|" + encoding_kind_name(pipeline.kind) + "|" +
                      std::to_string(pipeline.prefix_length) + "|" + std::to_string(seed);
    Rng rng(derive_seed(config.master_seed, tag));

    std::vector<std::size_t> indices(pool);
    for (std::size_t i = 0; i < pool; ++i) indices[i] = i;
    for (std::size_t i = 0; i < want; ++i) {
        std::size_t j = i + rng.index(pool - i);
        std::swap(indices[i], indices[j]);
    }
    indices.resize(want);
    return indices;
}

BenchmarkRow run_cell(const PipelineConfig& config, const PreparedPipeline& pipeline,
                      std::size_t k, GaMode method, std::uint64_t seed) {
    BenchmarkRow row;
    row.dataset = config.dataset;
    row.encoding = pipeline.kind;
    row.prefix_length = pipeline.prefix_length;
    row.k = k;
    row.method = method;
    row.seed = seed;

    std::uint64_t cell_seed = derive_seed(
        config.master_seed, cell_id(config, pipeline.kind, pipeline.prefix_length, k, method, seed));

    GaConfig cfg = config.ga_template;
    cfg.mode = method;
    cfg.k = k;
    if (config.population_per_k > 0)
        cfg.population_size = std::max(cfg.population_size, config.population_per_k * k);

    std::vector<double> distances, sparsities, implausibilities, fitnesses, raw_fitnesses,
        diversities, hit_rates, runtimes;
    auto queries = sample_queries(config, pipeline, seed);
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const FeatureVector& x = pipeline.test_vectors[queries[qi]];
        int desired = 1 - pipeline.predictor.predict(x);
        cfg.seed = derive_seed(cell_seed, "query|" + std::to_string(qi));

        auto started = std::chrono::steady_clock::now();
        CounterfactualSet cfs = run(x, desired, cfg, pipeline.predictor, pipeline.reference,
                                    mode_is_adapted(method) ? &pipeline.model : nullptr);
        std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

        MetricsReport metrics = evaluate_set(cfs, pipeline.model, pipeline.reference,
                                             pipeline.schema, cfg.normalize_distance);
        hit_rates.push_back(metrics.hit_rate);
        runtimes.push_back(elapsed.count());
        if (metrics.distance) distances.push_back(*metrics.distance);
        if (metrics.sparsity) sparsities.push_back(*metrics.sparsity);
        if (metrics.implausibility) implausibilities.push_back(*metrics.implausibility);
        if (metrics.trace_fitness) fitnesses.push_back(*metrics.trace_fitness);
        if (metrics.trace_fitness_raw) raw_fitnesses.push_back(*metrics.trace_fitness_raw);
        if (metrics.diversity) diversities.push_back(*metrics.diversity);
    }

    row.n_queries = queries.size();
    row.metrics.distance = average(distances);
    row.metrics.sparsity = average(sparsities);
    row.metrics.implausibility = average(implausibilities);
    row.metrics.trace_fitness = average(fitnesses);
    row.metrics.trace_fitness_raw = average(raw_fitnesses);
    row.metrics.diversity = average(diversities);
    row.metrics.hit_rate = hit_rates.empty() ? 0.0 : mean_of(hit_rates);
    row.metrics.runtime_seconds = average(runtimes);
    return row;
}

GridRunResult run_grid(const PipelineConfig& config, const std::filesystem::path& output_dir,
                       std::size_t jobs, bool force, std::ostream* progress) {
    std::filesystem::create_directories(output_dir);
    auto rows_path = output_dir / "rows.csv";

    std::map<RowKey, BenchmarkRow> existing;
    if (!force && std::filesystem::exists(rows_path)) {
        std::ifstream in(rows_path, std::ios::binary);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        for (auto& row : benchmark_rows_from_csv(text)) existing.emplace(key_of(row), std::move(row));
    }

    struct Cell {
        EncodingKind kind;
        std::size_t prefix_length, k;
        GaMode method;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (EncodingKind kind : config.encodings)
        for (std::size_t m : config.prefix_lengths)
            for (std::size_t k : config.grid.k_values)
                for (GaMode method : config.grid.methods)
                    for (std::uint64_t seed : config.grid.seeds)
                        cells.push_back({kind, m, k, method, seed});

    GridRunResult result;
    std::vector<std::optional<BenchmarkRow>> produced(cells.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        RowKey key = {config.dataset, encoding_kind_name(cells[i].kind), cells[i].prefix_length,
                      cells[i].k,     ga_mode_name(cells[i].method),     cells[i].seed};
        auto it = existing.find(key);
        if (it != existing.end()) {
            produced[i] = it->second;
            ++result.cells_skipped;
        } else {
            pending.push_back(i);
        }
    }

    EventLog log = load_log(config);
    std::map<std::pair<EncodingKind, std::size_t>, PreparedPipeline> pipelines;
    std::map<std::pair<EncodingKind, std::size_t>, std::string> pipeline_errors;
    for (std::size_t i : pending) {
        auto key = std::make_pair(cells[i].kind, cells[i].prefix_length);
        if (pipelines.count(key) || pipeline_errors.count(key)) continue;
        try {
            pipelines.emplace(key, prepare(log, config, key.first, key.second));
            if (progress)
                *progress << "prepared " << encoding_kind_name(key.first) << " m=" << key.second
                          << " (validation F1 " << pipelines.at(key).validation_f1 << ")\n";
        } catch (const std::exception& e) {
            pipeline_errors.emplace(key, e.what());
        }
    }

    std::mutex io_mutex;
    bool fresh_file = force || !std::filesystem::exists(rows_path);
    std::ofstream append(rows_path, force ? std::ios::trunc : std::ios::app);
    if (fresh_file) append << benchmark_rows_header();

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t slot = next.fetch_add(1);
            if (slot >= pending.size()) return;
            std::size_t i = pending[slot];
            const Cell& cell = cells[i];
            BenchmarkRow row;
            auto key = std::make_pair(cell.kind, cell.prefix_length);
            if (pipeline_errors.count(key)) {
                row.dataset = config.dataset;
                row.encoding = cell.kind;
                row.prefix_length = cell.prefix_length;
                row.k = cell.k;
                row.method = cell.method;
                row.seed = cell.seed;
                row.error = pipeline_errors.at(key);
            } else {
                try {
                    row = run_cell(config, pipelines.at(key), cell.k, cell.method, cell.seed);
                } catch (const std::exception& e) {
                    row.dataset = config.dataset;
                    row.encoding = cell.kind;
                    row.prefix_length = cell.prefix_length;
                    row.k = cell.k;
                    row.method = cell.method;
                    row.seed = cell.seed;
                    row.error = e.what();
                }
            }
            std::lock_guard<std::mutex> lock(io_mutex);
            append << benchmark_row_line(row);
            append.flush();
            produced[i] = std::move(row);
            if (progress)
                *progress << "cell "
                          << cell_id(config, cell.kind, cell.prefix_length, cell.k, cell.method,
                                     cell.seed)
                          << (produced[i]->error.empty() ? " done" : " FAILED") << "\n";
        }
    };

    std::size_t n_workers = std::max<std::size_t>(1, std::min(jobs, pending.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    append.close();
    result.cells_run = pending.size();

    for (auto& row : produced)
        if (row) result.rows.push_back(std::move(*row));
    std::sort(result.rows.begin(), result.rows.end(),
              [](const BenchmarkRow& a, const BenchmarkRow& b) { return key_of(a) < key_of(b); });

    // canonical rewrite: deterministic order independent of completion order
    {
        std::ofstream out(rows_path, std::ios::binary | std::ios::trunc);
        out << benchmark_rows_to_csv(result.rows);
    }
    std::vector<std::string> group_by = {"dataset", "encoding", "prefix_length", "k", "method"};
    auto groups = aggregate(result.rows, group_by);
    {
        std::ofstream out(output_dir / "aggregate.csv", std::ios::binary | std::ios::trunc);
        out << aggregate_to_csv(groups, group_by);
    }
    save_json_file(output_dir / "plot_data.json", aggregate_to_plot_json(groups));
    return result;
}

}  // namespace tracecf::bench
