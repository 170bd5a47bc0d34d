#include <doctest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "tracecf/errors.hpp"
#include "tracecf/io.hpp"
#include "tracecf/rng.hpp"

using namespace tracecf;
namespace fs = std::filesystem;

namespace {

DeclareModel sample_model() {
    DeclareModel model;
    model.constraints = {DeclareConstraint::make(Template::Init, "A"),
                         DeclareConstraint::make(Template::Response, "B", "C"),
                         DeclareConstraint::make(Template::Precedence, "A", "D")};
    return model;
}

}  // namespace

TEST_CASE("declare models round-trip through JSON and .decl") {
    DeclareModel model = sample_model();
    CHECK(declare_model_from_json(declare_model_to_json(model)) == model);

    fs::path json_path = fs::temp_directory_path() / "model.json";
    save_declare_model(model, json_path);
    CHECK(load_declare_model(json_path) == model);

    fs::path decl_path = fs::temp_directory_path() / "model.decl";
    save_declare_model(model, decl_path);
    CHECK(load_declare_model(decl_path) == model);

    json dup = json::array();
    dup.push_back(constraint_to_json(model.constraints[0]));
    dup.push_back(constraint_to_json(model.constraints[0]));
    CHECK_THROWS_AS(declare_model_from_json(dup), ParseError);
}

TEST_CASE("schemas round-trip through JSON") {
    EncodingSchema schema;
    schema.kind = EncodingKind::SimpleTraceIndex;
    schema.prefix_length = 4;
    schema.activity_domain.kind = Domain::Kind::Categorical;
    schema.activity_domain.values = {"A", "B", "PAD"};
    FeatureSpec num{"amount", {Domain::Kind::Numeric, {}, 10.0, 90.5}};
    FeatureSpec cat{"type", {Domain::Kind::Categorical, {"PAD", "new", "old"}, 0, 0}};
    schema.static_features = {num, cat};
    CHECK(schema_from_json(schema_to_json(schema)) == schema);
}

TEST_CASE("forests round-trip with bit-identical predictions") {
    EncodingSchema schema;
    schema.kind = EncodingKind::SimpleTraceIndex;
    schema.prefix_length = 1;
    schema.activity_domain.kind = Domain::Kind::Categorical;
    schema.activity_domain.values = {"A", "B", "C", "PAD"};
    FeatureSpec num{"x", {Domain::Kind::Numeric, {}, 0.0, 1.0}};
    schema.static_features = {num};

    std::vector<LabeledVector> data;
    Rng rng(17);
    const char* acts[3] = {"A", "B", "C"};
    for (int i = 0; i < 60; ++i) {
        double x = rng.uniform01();
        std::string act = acts[rng.index(3)];
        data.push_back({{Value{x}, Value{act}}, (x > 0.5 || act == "C") ? 1 : 0});
    }
    RandomForestModel model = RandomForestModel::train(data, schema, {30, 6, 1, 1.0}, 23);

    fs::path path = fs::temp_directory_path() / "forest.json";
    save_forest(model, path);
    RandomForestModel loaded = load_forest(path);
    CHECK(loaded == model);

    Rng probe(5);
    for (int i = 0; i < 1000; ++i) {
        FeatureVector x = {Value{probe.uniform01()}, Value{std::string(acts[probe.index(3)])}};
        CHECK(model.predict_proba(x) == loaded.predict_proba(x));
    }
}

TEST_CASE("GA configs round-trip through JSON") {
    GaConfig cfg;
    cfg.mode = GaMode::AOMO;
    cfg.k = 7;
    cfg.alpha = 0.25;
    cfg.population_size = 33;
    cfg.lock_targets = false;
    cfg.survival_scheme = SurvivalScheme::CrowdingDistance;
    cfg.normalize_distance = false;
    GaConfig loaded = ga_config_from_json(ga_config_to_json(cfg));
    CHECK(loaded.mode == cfg.mode);
    CHECK(loaded.k == cfg.k);
    CHECK(loaded.alpha == cfg.alpha);
    CHECK(loaded.population_size == cfg.population_size);
    CHECK(loaded.lock_targets == cfg.lock_targets);
    CHECK(loaded.survival_scheme == cfg.survival_scheme);
    CHECK(loaded.normalize_distance == cfg.normalize_distance);
}

TEST_CASE("synthesis specs round-trip through JSON") {
    SynthesisSpec spec;
    spec.alphabet = {"A", "B", "C"};
    spec.trace_count = 12;
    spec.min_length = 2;
    spec.max_length = 6;
    spec.model = sample_model();
    spec.outcome_constraint = DeclareConstraint::make(Template::Existence1, "B");
    AttributeSpec amount{"amount", true, 10, 500, {}, true};
    AttributeSpec kind{"kind", false, 0, 0, {"x", "y"}, false};
    spec.trace_attributes = {amount, kind};

    SynthesisSpec loaded = synthesis_spec_from_json(synthesis_spec_to_json(spec));
    CHECK(loaded.alphabet == spec.alphabet);
    CHECK(loaded.trace_count == spec.trace_count);
    CHECK(loaded.model == spec.model);
    CHECK(loaded.outcome_constraint == spec.outcome_constraint);
    REQUIRE(loaded.trace_attributes.size() == 2);
    CHECK(loaded.trace_attributes[0].correlated);
    CHECK(loaded.trace_attributes[1].values == std::vector<std::string>{"x", "y"});
}

TEST_CASE("benchmark rows round-trip through CSV including absent cells") {
    BenchmarkRow row;
    row.dataset = "synth,with comma";
    row.encoding = EncodingKind::SimpleTraceIndex;
    row.prefix_length = 6;
    row.k = 10;
    row.method = GaMode::AOMO;
    row.seed = 3;
    row.n_queries = 2;
    row.metrics.distance = 0.125;
    row.metrics.hit_rate = 0.5;
    row.metrics.runtime_seconds = 1.75;
    // sparsity/diversity/trace_fitness left absent

    BenchmarkRow failed;
    failed.dataset = "synth";
    failed.error = "pipeline exploded";

    auto text = benchmark_rows_to_csv({row, failed});
    auto parsed = benchmark_rows_from_csv(text);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].dataset == row.dataset);
    CHECK(parsed[0].method == GaMode::AOMO);
    CHECK(parsed[0].metrics.distance == row.metrics.distance);
    CHECK(!parsed[0].metrics.sparsity.has_value());
    CHECK(parsed[0].metrics.runtime_seconds == row.metrics.runtime_seconds);
    CHECK(parsed[1].error == "pipeline exploded");
    CHECK(benchmark_rows_to_csv(parsed) == text);
}

TEST_CASE("counterfactual sets round-trip through JSON") {
    CounterfactualSet cfs;
    cfs.query = {Value{std::string("A")}, Value{12.5}};
    cfs.desired_label = 1;
    cfs.requested = 5;
    cfs.hit = 0.2;
    Individual member;
    member.genotype = {Value{std::string("B")}, Value{0.1 + 0.2}};
    member.objectives = {0.0, 0.5, 2.0, 0.125, 0.25};
    member.valid = true;
    cfs.members = {member};

    MetricsReport metrics;
    metrics.distance = 0.5;
    metrics.hit_rate = 0.2;

    json doc = counterfactuals_to_json(cfs, metrics);
    CounterfactualSet loaded = counterfactuals_from_json(doc);
    CHECK(loaded.query == cfs.query);
    CHECK(loaded.requested == cfs.requested);
    REQUIRE(loaded.members.size() == 1);
    CHECK(loaded.members[0].genotype == member.genotype);
    CHECK(loaded.members[0].objectives == member.objectives);

    MetricsReport metrics_back = metrics_from_json(doc.at("metrics"));
    CHECK(metrics_back == metrics);
}

TEST_CASE("doubles survive the text round-trip exactly") {
    for (double v : {0.1, 1.0 / 3.0, 123456.789, 1e-12, 2.5e17}) {
        CHECK(std::stod(format_double(v)) == v);
        json j = value_to_json(Value{v});
        CHECK(std::get<double>(value_from_json(json::parse(j.dump()))) == v);
    }
}
