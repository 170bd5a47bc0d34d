#include <doctest.h>

#include <algorithm>

#include <nlohmann/json.hpp>

#include "tracecf/errors.hpp"
#include "tracecf/io.hpp"
#include "tracecf/predictor.hpp"
#include "tracecf/rng.hpp"

using namespace tracecf;

namespace {

EncodingSchema numeric_schema(std::size_t features) {
    EncodingSchema schema;
    schema.kind = EncodingKind::SimpleTraceIndex;
    schema.prefix_length = 0;
    for (std::size_t i = 0; i < features; ++i) {
        FeatureSpec spec;
        spec.name = "f" + std::to_string(i);
        spec.domain.kind = Domain::Kind::Numeric;
        spec.domain.min = 0.0;
        spec.domain.max = 1.0;
        schema.static_features.push_back(spec);
    }
    return schema;
}

std::vector<LabeledVector> separable_set() {
    std::vector<LabeledVector> data;
    for (double x : {0.05, 0.15, 0.25, 0.35, 0.45})
        for (double y : {0.2, 0.8}) data.push_back({{Value{x}, Value{y}}, 0});
    for (double x : {0.55, 0.65, 0.75, 0.85, 0.95})
        for (double y : {0.2, 0.8}) data.push_back({{Value{x}, Value{y}}, 1});
    return data;
}

}  // namespace

TEST_CASE("a separable set is fit exactly") {
    auto data = separable_set();
    auto schema = numeric_schema(2);
    Hyperparams hp{20, 2, 1, 1.0};
    RandomForestModel model = RandomForestModel::train(data, schema, hp, 11);
    for (const auto& sample : data) CHECK(model.predict(sample.features) == sample.label);
    CHECK(f1_score(model, data) == 1.0);
}

TEST_CASE("degenerate training data is rejected") {
    auto schema = numeric_schema(1);
    std::vector<LabeledVector> single_class = {{{Value{0.1}}, 1}, {{Value{0.9}}, 1}};
    CHECK_THROWS_AS(RandomForestModel::train(single_class, schema, {}, 1), DegenerateDataError);
    std::vector<LabeledVector> too_small = {{{Value{0.1}}, 1}};
    CHECK_THROWS_AS(RandomForestModel::train(too_small, schema, {}, 1), DegenerateDataError);
}

TEST_CASE("training is deterministic under a fixed seed") {
    auto data = separable_set();
    auto schema = numeric_schema(2);
    Hyperparams hp{10, 4, 1, 0.5};
    auto a = RandomForestModel::train(data, schema, hp, 3);
    auto b = RandomForestModel::train(data, schema, hp, 3);
    CHECK(forest_to_json(a).dump() == forest_to_json(b).dump());
    auto c = RandomForestModel::train(data, schema, hp, 4);
    CHECK(forest_to_json(a).dump() != forest_to_json(c).dump());
}

TEST_CASE("predict_proba averages leaf frequencies over trees") {
    auto schema = numeric_schema(1);
    DecisionTree pure_pos;
    pure_pos.nodes.push_back({-1, false, 0, "", -1, -1, 4, 4});
    DecisionTree pure_neg;
    pure_neg.nodes.push_back({-1, false, 0, "", -1, -1, 4, 0});

    RandomForestModel one(schema, {}, 0, {pure_pos});
    CHECK(one.predict_proba({Value{0.3}}) == 1.0);

    RandomForestModel two(schema, {}, 0, {pure_pos, pure_neg});
    CHECK(two.predict_proba({Value{0.3}}) == 0.5);
    CHECK(two.predict({Value{0.3}}) == 1);  // ties go positive

    CHECK_THROWS_AS(one.predict_proba({Value{0.3}, Value{0.4}}), SchemaError);
}

TEST_CASE("tree order does not change the prediction") {
    auto data = separable_set();
    auto schema = numeric_schema(2);
    RandomForestModel model = RandomForestModel::train(data, schema, {8, 4, 1, 1.0}, 5);
    auto trees = model.trees();
    std::reverse(trees.begin(), trees.end());
    RandomForestModel reversed(schema, model.params(), model.seed(), trees);
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        FeatureVector x = {Value{rng.uniform01()}, Value{rng.uniform01()}};
        CHECK(model.predict_proba(x) == doctest::Approx(reversed.predict_proba(x)).epsilon(1e-15));
    }
}

TEST_CASE("threshold consistency between predict and predict_proba") {
    auto data = separable_set();
    auto schema = numeric_schema(2);
    RandomForestModel model = RandomForestModel::train(data, schema, {5, 3, 1, 1.0}, 6);
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        FeatureVector x = {Value{rng.uniform01()}, Value{rng.uniform01()}};
        CHECK(model.predict(x) == (model.predict_proba(x) >= 0.5 ? 1 : 0));
    }
}

TEST_CASE("categorical features split by equality") {
    EncodingSchema schema;
    schema.kind = EncodingKind::SimpleIndex;
    schema.prefix_length = 1;
    schema.activity_domain.kind = Domain::Kind::Categorical;
    schema.activity_domain.values = {"A", "B", "C", "PAD"};

    std::vector<LabeledVector> data;
    for (int i = 0; i < 6; ++i) data.push_back({{Value{std::string("A")}}, 1});
    for (int i = 0; i < 6; ++i) data.push_back({{Value{std::string("B")}}, 0});
    for (int i = 0; i < 6; ++i) data.push_back({{Value{std::string("C")}}, 0});

    RandomForestModel model = RandomForestModel::train(data, schema, {10, 3, 1, 1.0}, 2);
    CHECK(model.predict({Value{std::string("A")}}) == 1);
    CHECK(model.predict({Value{std::string("B")}}) == 0);
    CHECK(model.predict({Value{std::string("C")}}) == 0);
}

TEST_CASE("grid search picks by validation F1 with deterministic ties") {
    auto data = separable_set();
    auto schema = numeric_schema(2);

    std::vector<Hyperparams> one_point = {{7, 3, 1, 1.0}};
    CHECK(grid_search(data, data, schema, one_point, 1).best == one_point[0]);

    // a stump cannot separate labels that need two split levels
    std::vector<LabeledVector> hard;
    for (double x : {0.1, 0.3, 0.6, 0.9})
        for (double y : {0.1, 0.4, 0.7, 0.9})
            hard.push_back({{Value{x}, Value{y}}, (x > 0.5) != (y > 0.5) ? 1 : 0});
    std::vector<Hyperparams> two = {{5, 1, 1, 1.0}, {5, 4, 1, 1.0}};
    auto picked = grid_search(hard, hard, schema, two, 1);
    CHECK(picked.best.max_depth == 4);

    // identical F1: fewer trees wins, then shallower depth
    std::vector<Hyperparams> tied = {{20, 4, 1, 1.0}, {10, 4, 1, 1.0}, {10, 0, 1, 1.0}};
    auto tie_pick = grid_search(data, data, schema, tied, 1);
    CHECK(tie_pick.best.n_trees == 10);
    CHECK(tie_pick.best.max_depth == 4);

    CHECK_THROWS_AS(grid_search(data, data, schema, {}, 1), ConfigError);
}
