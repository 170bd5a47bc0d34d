#include "tracecf/io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tracecf/errors.hpp"
#include "tracecf/version.hpp"
#include "csv_util.hpp"

namespace tracecf {
namespace {

std::string metric_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::optional<double> metric_from_cell(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    return std::stod(cell);
}

}  // namespace

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("bad JSON in " + path.string() + ": " + e.what());
    }
}

void save_json_file(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path.string());
    out << doc.dump(2) << '\n';
}

void stamp(json& doc, const std::string& schema_name) {
    doc["format"] = {{"tool", "tracecf"}, {"version", kVersion}, {"schema", schema_name}};
}

json value_to_json(const Value& v) {
    if (is_numeric(v)) return std::get<double>(v);
    return std::get<std::string>(v);
}

Value value_from_json(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) return j.get<double>();
    throw ParseError("expected a string or number value");
}

json constraint_to_json(const DeclareConstraint& c) {
    json j = {{"template", template_name(c.tmpl)}, {"activation", c.activation}};
    if (c.target) j["target"] = *c.target;
    return j;
}

DeclareConstraint constraint_from_json(const json& j) {
    if (j.is_string()) return DeclareConstraint::from_text(j.get<std::string>());
    DeclareConstraint c;
    auto t = template_from_name(j.at("template").get<std::string>());
    if (!t) throw ParseError("unknown Declare template: " + j.at("template").dump());
    c.tmpl = *t;
    c.activation = j.at("activation").get<std::string>();
    if (j.contains("target")) c.target = j.at("target").get<std::string>();
    if (is_unary(c.tmpl) && c.target)
        throw ParseError(std::string(template_name(c.tmpl)) + " takes no target");
    if (!is_unary(c.tmpl) && !c.target)
        throw ParseError(std::string(template_name(c.tmpl)) + " needs a target");
    if (c.target && *c.target == c.activation)
        throw ParseError("activation and target must differ");
    return c;
}

json declare_model_to_json(const DeclareModel& model) {
    json arr = json::array();
    for (const auto& c : model.constraints) arr.push_back(constraint_to_json(c));
    return arr;
}

DeclareModel declare_model_from_json(const json& j) {
    const json& arr = j.is_array() ? j : j.at("constraints");
    DeclareModel model;
    for (const auto& item : arr) {
        DeclareConstraint c = constraint_from_json(item);
        if (std::find(model.constraints.begin(), model.constraints.end(), c) !=
            model.constraints.end())
            throw ParseError("duplicate constraint: " + c.to_text());
        model.constraints.push_back(std::move(c));
    }
    return model;
}

void save_declare_model(const DeclareModel& model, const std::filesystem::path& path) {
    if (path.extension() == ".decl") {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ParseError("cannot write file: " + path.string());
        out << "# tracecf " << kVersion << " declare-v1\n";
        for (const auto& c : model.constraints) out << c.to_text() << '\n';
        return;
    }
    json doc;
    stamp(doc, "declare-v1");
    doc["constraints"] = declare_model_to_json(model);
    save_json_file(path, doc);
}

DeclareModel load_declare_model(const std::filesystem::path& path) {
    if (path.extension() == ".decl") {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open file: " + path.string());
        DeclareModel model;
        std::string line;
        while (std::getline(in, line)) {
            auto begin = line.find_first_not_of(" \t\r");
            if (begin == std::string::npos || line[begin] == '#') continue;
            auto end = line.find_last_not_of(" \t\r");
            model.constraints.push_back(
                DeclareConstraint::from_text(line.substr(begin, end - begin + 1)));
        }
        return model;
    }
    return declare_model_from_json(load_json_file(path));
}

json schema_to_json(const EncodingSchema& schema) {
    json features = json::array();
    for (const auto& spec : schema.static_features) {
        json f = {{"name", spec.name}};
        if (spec.domain.is_categorical()) {
            f["type"] = "categorical";
            f["values"] = spec.domain.values;
        } else {
            f["type"] = "numeric";
            f["min"] = spec.domain.min;
            f["max"] = spec.domain.max;
        }
        features.push_back(std::move(f));
    }
    return json{{"kind", encoding_kind_name(schema.kind)},
                {"prefix_length", schema.prefix_length},
                {"static_features", features},
                {"activities", schema.activity_domain.values}};
}

EncodingSchema schema_from_json(const json& j) {
    EncodingSchema schema;
    schema.kind = encoding_kind_from_name(j.at("kind").get<std::string>());
    schema.prefix_length = j.at("prefix_length").get<std::size_t>();
    schema.activity_domain.kind = Domain::Kind::Categorical;
    schema.activity_domain.values = j.at("activities").get<std::vector<std::string>>();
    for (const auto& f : j.at("static_features")) {
        FeatureSpec spec;
        spec.name = f.at("name").get<std::string>();
        if (f.at("type") == "categorical") {
            spec.domain.kind = Domain::Kind::Categorical;
            spec.domain.values = f.at("values").get<std::vector<std::string>>();
        } else {
            spec.domain.kind = Domain::Kind::Numeric;
            spec.domain.min = f.at("min").get<double>();
            spec.domain.max = f.at("max").get<double>();
        }
        schema.static_features.push_back(std::move(spec));
    }
    return schema;
}

json hyperparams_to_json(const Hyperparams& hp) {
    return json{{"n_trees", hp.n_trees},
                {"max_depth", hp.max_depth},
                {"min_leaf", hp.min_leaf},
                {"feature_subsample", hp.feature_subsample}};
}

Hyperparams hyperparams_from_json(const json& j) {
    Hyperparams hp;
    hp.n_trees = j.value("n_trees", hp.n_trees);
    hp.max_depth = j.value("max_depth", hp.max_depth);
    hp.min_leaf = j.value("min_leaf", hp.min_leaf);
    hp.feature_subsample = j.value("feature_subsample", hp.feature_subsample);
    return hp;
}

namespace {

json tree_to_json(const DecisionTree& tree) {
    json nodes = json::array();
    for (const auto& node : tree.nodes) {
        if (node.is_leaf()) {
            nodes.push_back({{"n", node.n_samples}, {"pos", node.n_positive}});
        } else {
            json n = {{"feature", node.feature},
                      {"left", node.left},
                      {"right", node.right},
                      {"n", node.n_samples},
                      {"pos", node.n_positive}};
            if (node.categorical_split)
                n["category"] = node.category;
            else
                n["threshold"] = node.threshold;
            nodes.push_back(std::move(n));
        }
    }
    return nodes;
}

DecisionTree tree_from_json(const json& j) {
    DecisionTree tree;
    for (const auto& n : j) {
        TreeNode node;
        node.n_samples = n.at("n").get<int>();
        node.n_positive = n.at("pos").get<int>();
        if (n.contains("feature")) {
            node.feature = n.at("feature").get<int>();
            node.left = n.at("left").get<int>();
            node.right = n.at("right").get<int>();
            if (n.contains("category")) {
                node.categorical_split = true;
                node.category = n.at("category").get<std::string>();
            } else {
                node.threshold = n.at("threshold").get<double>();
            }
        }
        tree.nodes.push_back(std::move(node));
    }
    return tree;
}

}  // namespace

json forest_to_json(const RandomForestModel& model) {
    json trees = json::array();
    for (const auto& tree : model.trees()) trees.push_back(tree_to_json(tree));
    json doc;
    stamp(doc, "predictor-v1");
    doc["schema"] = schema_to_json(model.schema());
    doc["hyperparams"] = hyperparams_to_json(model.params());
    doc["seed"] = model.seed();
    doc["trees"] = std::move(trees);
    return doc;
}

RandomForestModel forest_from_json(const json& j) {
    std::vector<DecisionTree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t));
    return RandomForestModel(schema_from_json(j.at("schema")),
                             hyperparams_from_json(j.at("hyperparams")),
                             j.value("seed", std::uint64_t{0}), std::move(trees));
}

void save_forest(const RandomForestModel& model, const std::filesystem::path& path) {
    save_json_file(path, forest_to_json(model));
}

RandomForestModel load_forest(const std::filesystem::path& path) {
    return forest_from_json(load_json_file(path));
}

json ga_config_to_json(const GaConfig& cfg) {
    return json{{"mode", ga_mode_name(cfg.mode)},
                {"k", cfg.k},
                {"alpha", cfg.alpha},
                {"beta", cfg.beta},
                {"gamma", cfg.gamma},
                {"delta", cfg.delta},
                {"crossover_probability", cfg.crossover_probability},
                {"mutation_probability", cfg.mutation_probability},
                {"population_size", cfg.population_size},
                {"max_generations", cfg.max_generations},
                {"stall_generations", cfg.stall_generations},
                {"stall_epsilon", cfg.stall_epsilon},
                {"seed", cfg.seed},
                {"lock_targets", cfg.lock_targets},
                {"fraction_neighbors", cfg.fraction_neighbors},
                {"survival_scheme", cfg.survival_scheme == SurvivalScheme::ScoreRatio
                                        ? "score-ratio"
                                        : "crowding-distance"},
                {"normalize_distance", cfg.normalize_distance}};
}

GaConfig ga_config_from_json(const json& j) {
    GaConfig cfg;
    if (j.contains("mode")) cfg.mode = ga_mode_from_name(j.at("mode").get<std::string>());
    cfg.k = j.value("k", cfg.k);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.delta = j.value("delta", cfg.delta);
    cfg.crossover_probability = j.value("crossover_probability", cfg.crossover_probability);
    cfg.mutation_probability = j.value("mutation_probability", cfg.mutation_probability);
    cfg.population_size = j.value("population_size", cfg.population_size);
    cfg.max_generations = j.value("max_generations", cfg.max_generations);
    cfg.stall_generations = j.value("stall_generations", cfg.stall_generations);
    cfg.stall_epsilon = j.value("stall_epsilon", cfg.stall_epsilon);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.lock_targets = j.value("lock_targets", cfg.lock_targets);
    cfg.fraction_neighbors = j.value("fraction_neighbors", cfg.fraction_neighbors);
    if (j.contains("survival_scheme")) {
        std::string scheme = j.at("survival_scheme").get<std::string>();
        if (scheme == "score-ratio")
            cfg.survival_scheme = SurvivalScheme::ScoreRatio;
        else if (scheme == "crowding-distance")
            cfg.survival_scheme = SurvivalScheme::CrowdingDistance;
        else
            throw ParseError("unknown survival scheme: " + scheme);
    }
    cfg.normalize_distance = j.value("normalize_distance", cfg.normalize_distance);
    return cfg;
}

SynthesisSpec synthesis_spec_from_json(const json& j) {
    SynthesisSpec spec;
    spec.alphabet = j.at("alphabet").get<std::vector<std::string>>();
    spec.trace_count = j.at("traces").get<std::size_t>();
    spec.min_length = j.at("min_length").get<std::size_t>();
    spec.max_length = j.at("max_length").get<std::size_t>();
    spec.model = declare_model_from_json(j.at("model"));
    if (j.contains("outcome_constraint"))
        spec.outcome_constraint = constraint_from_json(j.at("outcome_constraint"));
    if (j.contains("rejection_budget"))
        spec.rejection_budget = j.at("rejection_budget").get<std::size_t>();
    for (const auto& a : j.value("trace_attributes", json::array())) {
        AttributeSpec attr;
        attr.name = a.at("name").get<std::string>();
        attr.correlated = a.value("correlated", false);
        if (a.at("type") == "numeric") {
            attr.numeric = true;
            attr.min = a.at("min").get<double>();
            attr.max = a.at("max").get<double>();
        } else {
            attr.numeric = false;
            attr.values = a.at("values").get<std::vector<std::string>>();
        }
        spec.trace_attributes.push_back(std::move(attr));
    }
    return spec;
}

json synthesis_spec_to_json(const SynthesisSpec& spec) {
    json attrs = json::array();
    for (const auto& attr : spec.trace_attributes) {
        json a = {{"name", attr.name}, {"correlated", attr.correlated}};
        if (attr.numeric) {
            a["type"] = "numeric";
            a["min"] = attr.min;
            a["max"] = attr.max;
        } else {
            a["type"] = "categorical";
            a["values"] = attr.values;
        }
        attrs.push_back(std::move(a));
    }
    json doc;
    stamp(doc, "synthesis-v1");
    doc["alphabet"] = spec.alphabet;
    doc["traces"] = spec.trace_count;
    doc["min_length"] = spec.min_length;
    doc["max_length"] = spec.max_length;
    doc["model"] = declare_model_to_json(spec.model);
    if (spec.outcome_constraint)
        doc["outcome_constraint"] = constraint_to_json(*spec.outcome_constraint);
    doc["rejection_budget"] = spec.rejection_budget;
    doc["trace_attributes"] = std::move(attrs);
    return doc;
}

CsvColumnMap column_map_from_json(const json& j) {
    CsvColumnMap columns;
    columns.case_id = j.value("case_id", columns.case_id);
    columns.activity = j.value("activity", columns.activity);
    columns.timestamp = j.value("timestamp", columns.timestamp);
    columns.static_columns = j.value("static_columns", columns.static_columns);
    return columns;
}

json column_map_to_json(const CsvColumnMap& columns) {
    json doc;
    stamp(doc, "columns-v1");
    doc["case_id"] = columns.case_id;
    doc["activity"] = columns.activity;
    doc["timestamp"] = columns.timestamp;
    doc["static_columns"] = columns.static_columns;
    return doc;
}

json metrics_to_json(const MetricsReport& metrics) {
    json j = json::object();
    for (const auto& name : kMetricNames) {
        auto v = metric_value(metrics, name);
        if (v) j[name] = *v;
    }
    return j;
}

MetricsReport metrics_from_json(const json& j) {
    MetricsReport m;
    auto opt = [&](const char* name) -> std::optional<double> {
        if (j.contains(name)) return j.at(name).get<double>();
        return std::nullopt;
    };
    m.distance = opt("distance");
    m.sparsity = opt("sparsity");
    m.implausibility = opt("implausibility");
    m.trace_fitness = opt("trace_fitness");
    m.trace_fitness_raw = opt("trace_fitness_raw");
    m.diversity = opt("diversity");
    m.hit_rate = j.value("hit_rate", 0.0);
    m.runtime_seconds = opt("runtime_seconds");
    return m;
}

json counterfactuals_to_json(const CounterfactualSet& cfs, const MetricsReport& metrics) {
    json members = json::array();
    for (const auto& member : cfs.members) {
        json vec = json::array();
        for (const auto& v : member.genotype) vec.push_back(value_to_json(v));
        json obj = {{"o1", member.objectives.validity},
                    {"o2", member.objectives.distance},
                    {"o3", member.objectives.sparsity},
                    {"o4", member.objectives.implausibility}};
        if (member.objectives.bk_gap) obj["o5"] = *member.objectives.bk_gap;
        members.push_back({{"genotype", std::move(vec)}, {"objectives", std::move(obj)}});
    }
    json query = json::array();
    for (const auto& v : cfs.query) query.push_back(value_to_json(v));
    json doc;
    stamp(doc, "counterfactuals-v1");
    doc["query"] = std::move(query);
    doc["desired_label"] = cfs.desired_label;
    doc["k"] = cfs.requested;
    doc["hit"] = cfs.hit;
    doc["members"] = std::move(members);
    doc["metrics"] = metrics_to_json(metrics);
    return doc;
}

CounterfactualSet counterfactuals_from_json(const json& j) {
    CounterfactualSet cfs;
    for (const auto& v : j.at("query")) cfs.query.push_back(value_from_json(v));
    cfs.desired_label = j.at("desired_label").get<int>();
    cfs.requested = j.at("k").get<std::size_t>();
    cfs.hit = j.at("hit").get<double>();
    for (const auto& m : j.at("members")) {
        Individual ind;
        for (const auto& v : m.at("genotype")) ind.genotype.push_back(value_from_json(v));
        const json& obj = m.at("objectives");
        ind.objectives.validity = obj.at("o1").get<double>();
        ind.objectives.distance = obj.at("o2").get<double>();
        ind.objectives.sparsity = obj.at("o3").get<double>();
        ind.objectives.implausibility = obj.at("o4").get<double>();
        if (obj.contains("o5")) ind.objectives.bk_gap = obj.at("o5").get<double>();
        ind.evaluated = true;
        ind.valid = true;
        cfs.members.push_back(std::move(ind));
    }
    return cfs;
}

std::string benchmark_rows_header() {
    std::string out = "# tracecf ";
    out += kVersion;
    out += " bench-rows-v1\n";
    std::vector<std::string> header = {"dataset", "encoding", "prefix_length", "k",
                                       "method",  "seed",     "n_queries"};
    header.insert(header.end(), kMetricNames.begin(), kMetricNames.end());
    header.push_back("error");
    out += detail::csv_join(header);
    out += '\n';
    return out;
}

std::string benchmark_row_line(const BenchmarkRow& row) {
    std::vector<std::string> cells = {row.dataset,
                                      encoding_kind_name(row.encoding),
                                      std::to_string(row.prefix_length),
                                      std::to_string(row.k),
                                      ga_mode_name(row.method),
                                      std::to_string(row.seed),
                                      std::to_string(row.n_queries)};
    for (const auto& name : kMetricNames)
        cells.push_back(metric_cell(metric_value(row.metrics, name)));
    cells.push_back(row.error);
    return detail::csv_join(cells) + "\n";
}

std::string benchmark_rows_to_csv(const std::vector<BenchmarkRow>& rows) {
    std::string out = benchmark_rows_header();
    for (const auto& row : rows) out += benchmark_row_line(row);
    return out;
}

std::vector<BenchmarkRow> benchmark_rows_from_csv(const std::string& text) {
    auto records = detail::parse_csv_text(text);
    if (records.empty()) return {};
    const auto& header = records.front();
    std::vector<BenchmarkRow> rows;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& cells = records[r];
        if (cells.size() != header.size())
            throw ParseError("bench rows CSV: ragged record " + std::to_string(r + 1));
        BenchmarkRow row;
        MetricsReport& m = row.metrics;
        for (std::size_t c = 0; c < header.size(); ++c) {
            const std::string& name = header[c];
            const std::string& cell = cells[c];
            if (name == "dataset") row.dataset = cell;
            else if (name == "encoding") row.encoding = encoding_kind_from_name(cell);
            else if (name == "prefix_length") row.prefix_length = std::stoull(cell);
            else if (name == "k") row.k = std::stoull(cell);
            else if (name == "method") row.method = ga_mode_from_name(cell);
            else if (name == "seed") row.seed = std::stoull(cell);
            else if (name == "n_queries") row.n_queries = std::stoull(cell);
            else if (name == "distance") m.distance = metric_from_cell(cell);
            else if (name == "sparsity") m.sparsity = metric_from_cell(cell);
            else if (name == "implausibility") m.implausibility = metric_from_cell(cell);
            else if (name == "trace_fitness") m.trace_fitness = metric_from_cell(cell);
            else if (name == "trace_fitness_raw") m.trace_fitness_raw = metric_from_cell(cell);
            else if (name == "diversity") m.diversity = metric_from_cell(cell);
            else if (name == "hit_rate") m.hit_rate = cell.empty() ? 0.0 : std::stod(cell);
            else if (name == "runtime_seconds") m.runtime_seconds = metric_from_cell(cell);
            else if (name == "error") row.error = cell;
            else throw ParseError("bench rows CSV: unknown column " + name);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string aggregate_to_csv(const std::vector<GroupSummary>& groups,
                             const std::vector<std::string>& group_by) {
    std::string out = "# tracecf ";
    out += kVersion;
    out += " bench-aggregate-v1\n";
    std::vector<std::string> header = group_by;
    for (const auto& name : kMetricNames)
        for (const char* stat : {"_count", "_mean", "_median", "_q1", "_q3"})
            header.push_back(name + stat);
    out += detail::csv_join(header);
    out += '\n';
    for (const auto& group : groups) {
        std::vector<std::string> cells;
        for (const auto& field : group_by) cells.push_back(group.key.at(field));
        for (const auto& name : kMetricNames) {
            auto it = group.metrics.find(name);
            if (it == group.metrics.end()) {
                cells.insert(cells.end(), {"0", "", "", "", ""});
            } else {
                cells.push_back(std::to_string(it->second.count));
                cells.push_back(format_double(it->second.mean));
                cells.push_back(format_double(it->second.median));
                cells.push_back(format_double(it->second.q1));
                cells.push_back(format_double(it->second.q3));
            }
        }
        out += detail::csv_join(cells);
        out += '\n';
    }
    return out;
}

json aggregate_to_plot_json(const std::vector<GroupSummary>& groups) {
    json arr = json::array();
    for (const auto& group : groups) {
        json metrics = json::object();
        for (const auto& [name, values] : group.values) metrics[name] = values;
        arr.push_back({{"key", group.key}, {"metrics", std::move(metrics)}});
    }
    json doc;
    stamp(doc, "plot-data-v1");
    doc["groups"] = std::move(arr);
    return doc;
}

}  // namespace tracecf
