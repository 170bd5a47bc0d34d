#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "tracecf/errors.hpp"
#include "tracecf/evaluation.hpp"

using namespace tracecf;

namespace {

Value S(const char* s) { return Value{std::string(s)}; }

EncodingSchema letters_schema(std::size_t m, std::vector<std::string> acts) {
    EncodingSchema schema;
    schema.kind = EncodingKind::SimpleIndex;
    schema.prefix_length = m;
    schema.activity_domain.kind = Domain::Kind::Categorical;
    acts.push_back(kPadSymbol);
    std::sort(acts.begin(), acts.end());
    schema.activity_domain.values = std::move(acts);
    return schema;
}

Individual member_of(FeatureVector genotype) {
    Individual ind;
    ind.genotype = std::move(genotype);
    ind.valid = true;
    ind.evaluated = true;
    return ind;
}

}  // namespace

TEST_CASE("a member equal to a reference vector has zero implausibility") {
    EncodingSchema schema = letters_schema(2, {"A", "B"});
    CounterfactualSet cfs;
    cfs.query = {S("A"), S("B")};
    cfs.requested = 1;
    cfs.members = {member_of({S("B"), S("A")})};
    cfs.hit = 1.0;
    std::vector<FeatureVector> reference = {{S("B"), S("A")}, {S("A"), S("B")}};

    MetricsReport report = evaluate_set(cfs, DeclareModel{}, reference, schema);
    REQUIRE(report.implausibility.has_value());
    CHECK(*report.implausibility == 0.0);
    CHECK(report.hit_rate == 1.0);
    CHECK(!report.diversity.has_value());      // singleton set
    CHECK(!report.trace_fitness.has_value());  // empty model
}

TEST_CASE("diversity over two members is their pairwise distance") {
    EncodingSchema schema = letters_schema(5, {"A", "B", "C"});
    CounterfactualSet cfs;
    cfs.query = {S("A"), S("A"), S("A"), S("A"), S("A")};
    cfs.requested = 2;
    FeatureVector m1 = {S("A"), S("A"), S("A"), S("B"), S("B")};
    FeatureVector m2 = {S("A"), S("B"), S("A"), S("B"), S("C")};  // differs in 2 of 5
    cfs.members = {member_of(m1), member_of(m2)};
    cfs.hit = 1.0;
    std::vector<FeatureVector> reference = {cfs.query};

    MetricsReport report = evaluate_set(cfs, DeclareModel{}, reference, schema);
    REQUIRE(report.diversity.has_value());
    CHECK(*report.diversity == doctest::Approx(0.4));
}

TEST_CASE("trace fitness is the preservation ratio over query-satisfied constraints") {
    EncodingSchema schema = letters_schema(9, {"a", "b", "c", "d"});
    DeclareModel model;
    model.constraints = {DeclareConstraint::make(Template::Init, "a"),
                         DeclareConstraint::make(Template::ChainResponse, "a", "b")};

    // query decodes to sigma1, the member to sigma2 (ChainResponse broken)
    CounterfactualSet cfs;
    cfs.query = {S("a"), S("b"), S("c"), S("a"), S("b"), S("c"), S("d"), S("a"), S("b")};
    cfs.requested = 1;
    cfs.members = {member_of(
        {S("a"), S("b"), S("c"), S("a"), S("b"), S("c"), S("d"), S("a"), S(kPadSymbol)})};
    cfs.hit = 1.0;
    std::vector<FeatureVector> reference = {cfs.query};

    MetricsReport report = evaluate_set(cfs, model, reference, schema);
    REQUIRE(report.trace_fitness.has_value());
    CHECK(*report.trace_fitness == doctest::Approx(0.5));
    REQUIRE(report.trace_fitness_raw.has_value());
    CHECK(*report.trace_fitness_raw == doctest::Approx(0.5));
}

TEST_CASE("trace fitness is absent when the query satisfies nothing") {
    EncodingSchema schema = letters_schema(2, {"a", "b", "z"});
    DeclareModel model;
    model.constraints = {DeclareConstraint::make(Template::Init, "z")};
    CounterfactualSet cfs;
    cfs.query = {S("a"), S("b")};
    cfs.requested = 1;
    cfs.members = {member_of({S("b"), S("a")})};
    std::vector<FeatureVector> reference = {cfs.query};
    MetricsReport report = evaluate_set(cfs, model, reference, schema);
    CHECK(!report.trace_fitness.has_value());
    CHECK(report.trace_fitness_raw.has_value());  // raw variant stays defined
}

TEST_CASE("empty member sets leave metrics absent") {
    EncodingSchema schema = letters_schema(2, {"a", "b"});
    CounterfactualSet cfs;
    cfs.query = {S("a"), S("b")};
    cfs.requested = 5;
    MetricsReport report = evaluate_set(cfs, DeclareModel{}, {cfs.query}, schema);
    CHECK(report.hit_rate == 0.0);
    CHECK(!report.distance.has_value());
    CHECK(!report.sparsity.has_value());
    CHECK(!report.implausibility.has_value());
    CHECK(!report.diversity.has_value());
}

TEST_CASE("hit rate is exactly members over requested") {
    EncodingSchema schema = letters_schema(2, {"a", "b"});
    CounterfactualSet cfs;
    cfs.query = {S("a"), S("b")};
    cfs.requested = 4;
    cfs.members = {member_of({S("b"), S("a")}), member_of({S("b"), S("b")}),
                   member_of({S("a"), S("a")})};
    MetricsReport report = evaluate_set(cfs, DeclareModel{}, {cfs.query}, schema);
    CHECK(report.hit_rate == 0.75);
}

TEST_CASE("aggregate groups rows and summarizes present metrics") {
    BenchmarkRow row1;
    row1.dataset = "d";
    row1.method = GaMode::BOSO;
    row1.k = 5;
    row1.metrics.distance = 0.2;
    row1.metrics.hit_rate = 1.0;

    // single row: the summary equals the row
    auto single = aggregate({row1}, {"method"});
    REQUIRE(single.size() == 1);
    CHECK(single[0].metrics.at("distance").mean == doctest::Approx(0.2));
    CHECK(single[0].metrics.at("distance").median == doctest::Approx(0.2));
    CHECK(single[0].metrics.at("distance").count == 1);

    BenchmarkRow row2 = row1;
    row2.seed = 1;
    row2.metrics.distance = 0.4;
    auto merged = aggregate({row1, row2}, {"method", "k"});
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].metrics.at("distance").mean == doctest::Approx(0.3));
    CHECK(merged[0].key.at("method") == "BOSO");
    CHECK(merged[0].key.at("k") == "5");

    // diversity absent in all rows: no diversity summary for the group
    CHECK(merged[0].metrics.count("diversity") == 0);

    // rows with errors contribute nothing
    BenchmarkRow failed = row1;
    failed.error = "boom";
    failed.metrics.distance = 99.0;
    auto with_failure = aggregate({row1, row2, failed}, {"method"});
    CHECK(with_failure[0].metrics.at("distance").count == 2);

    CHECK_THROWS_AS(aggregate({}, {"method"}), EmptyDatasetError);
    CHECK_THROWS_AS(aggregate({row1}, {"nope"}), ConfigError);
}

TEST_CASE("quantiles interpolate linearly") {
    std::vector<double> values = {1, 2, 3, 4};
    CHECK(quantile(values, 0.5) == doctest::Approx(2.5));
    CHECK(quantile(values, 0.25) == doctest::Approx(1.75));
    CHECK(quantile(values, 0.75) == doctest::Approx(3.25));
    CHECK(quantile({5}, 0.5) == 5.0);
    CHECK(mean_of({1, 2, 3}) == doctest::Approx(2.0));
}
