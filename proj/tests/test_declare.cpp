#include <doctest.h>

#include <algorithm>

#include "ltlf_oracle.hpp"
#include "test_util.hpp"
#include "tracecf/declare.hpp"
#include "tracecf/errors.hpp"

using namespace tracecf;
using testutil::make_log;
using testutil::make_trace;

namespace {

DeclareConstraint c(Template t, const std::string& a) { return DeclareConstraint::make(t, a); }
DeclareConstraint c(Template t, const std::string& a, const std::string& b) {
    return DeclareConstraint::make(t, a, b);
}

std::vector<std::string> seq(std::initializer_list<std::string> items) { return items; }

const std::vector<std::string> kSigma1 = {"a", "b", "c", "a", "b", "c", "d", "a", "b"};
const std::vector<std::string> kSigma2 = {"a", "b", "c", "a", "b", "c", "d", "a"};

}  // namespace

TEST_CASE("template semantics on hand-checked traces") {
    CHECK(check(c(Template::Init, "a"), kSigma1) == Verdict::Satisfied);
    CHECK(check(c(Template::ChainResponse, "a", "b"), kSigma1) == Verdict::Satisfied);
    CHECK(check(c(Template::ChainResponse, "a", "b"), kSigma2) == Verdict::Violated);
    CHECK(check(c(Template::Response, "A", "B"), seq({"C", "C"})) == Verdict::VacuouslySatisfied);
    CHECK(check(c(Template::Precedence, "A", "B"), seq({"B"})) == Verdict::Violated);
    CHECK(check(c(Template::Precedence, "A", "B"), seq({"A", "B"})) == Verdict::Satisfied);
    CHECK(check(c(Template::Precedence, "A", "B"), seq({"A"})) == Verdict::VacuouslySatisfied);
    CHECK(check(c(Template::AlternateResponse, "A", "B"), seq({"A", "A", "B"})) == Verdict::Violated);
    CHECK(check(c(Template::AlternateResponse, "A", "B"), seq({"A", "B", "A", "B"})) ==
          Verdict::Satisfied);
    CHECK(check(c(Template::Absence2, "A"), seq({"A"})) == Verdict::Satisfied);
    CHECK(check(c(Template::Absence2, "A"), seq({"B"})) == Verdict::VacuouslySatisfied);
    CHECK(check(c(Template::Absence2, "A"), seq({"A", "B", "A"})) == Verdict::Violated);
    CHECK(check(c(Template::Existence1, "A"), seq({"B", "A"})) == Verdict::Satisfied);
    CHECK(check(c(Template::Existence1, "A"), seq({"B"})) == Verdict::Violated);
    CHECK(check(c(Template::RespondedExistence, "A", "B"), seq({"B", "A"})) == Verdict::Satisfied);
    CHECK(check(c(Template::RespondedExistence, "A", "B"), seq({"A", "C"})) == Verdict::Violated);
}

TEST_CASE("check agrees with the LTLf oracle on short traces") {
    const std::vector<std::string> alphabet = {"a", "b", "c"};
    auto traces = ltlf::enumerate_traces(alphabet, 1, 4);

    std::vector<DeclareConstraint> constraints;
    for (Template t : {Template::Existence1, Template::Absence2, Template::Init})
        for (const auto& a : alphabet) constraints.push_back(c(t, a));
    for (Template t : {Template::RespondedExistence, Template::Response,
                       Template::AlternateResponse, Template::ChainResponse,
                       Template::Precedence})
        for (const auto& a : alphabet)
            for (const auto& b : alphabet)
                if (a != b) constraints.push_back(c(t, a, b));

    std::size_t disagreements = 0;
    for (const auto& constraint : constraints)
        for (const auto& trace : traces)
            if (check(constraint, trace) != ltlf::check(constraint, trace)) ++disagreements;
    CHECK(disagreements == 0);
}

TEST_CASE("trace fitness matches the worked example") {
    DeclareModel model;
    model.constraints = {c(Template::Init, "a"), c(Template::ChainResponse, "a", "b")};
    CHECK(trace_fitness(model, kSigma1) == 1.0);
    CHECK(trace_fitness(model, kSigma2) == 0.5);
    CHECK_THROWS_AS(trace_fitness(DeclareModel{}, kSigma1), EmptyModelError);
}

TEST_CASE("log fitness counts constraints satisfied by every trace") {
    DeclareModel model;
    model.constraints = {c(Template::Init, "a"), c(Template::ChainResponse, "a", "b")};

    EventLog single = make_log({kSigma1});
    CHECK(log_fitness(model, single) == 1.0);

    EventLog both = make_log({kSigma1, kSigma2});
    CHECK(log_fitness(model, both) == 0.5);

    DeclareModel broken;
    broken.constraints = {c(Template::Init, "z")};
    CHECK(log_fitness(broken, both) == 0.0);

    CHECK_THROWS_AS(log_fitness(DeclareModel{}, both), EmptyModelError);
    CHECK_THROWS_AS(log_fitness(model, EventLog{}), EmptyLogError);
}

TEST_CASE("vacuous satisfaction counts toward trace fitness") {
    DeclareModel model;
    model.constraints = {c(Template::Response, "x", "y")};
    CHECK(trace_fitness(model, seq({"a", "b"})) == 1.0);
}

TEST_CASE("removing a violated constraint never lowers fitness") {
    DeclareModel model;
    model.constraints = {c(Template::Init, "a"), c(Template::ChainResponse, "a", "b"),
                         c(Template::Existence1, "z")};
    double before = trace_fitness(model, kSigma1);
    DeclareModel pruned;
    pruned.constraints = {model.constraints[0], model.constraints[1]};
    CHECK(trace_fitness(pruned, kSigma1) >= before);
}

TEST_CASE("discover keeps constraints meeting the support threshold") {
    // 9 of 10 traces satisfy Response(A,B) non-vacuously
    std::vector<std::vector<std::string>> traces(9, {"A", "B"});
    traces.push_back({"A"});
    EventLog log = make_log(traces);

    DeclareModel mined = discover(log, {0.9, false});
    auto target = c(Template::Response, "A", "B");
    CHECK(std::count(mined.constraints.begin(), mined.constraints.end(), target) == 1);

    // at 8 of 10 it is excluded
    traces[8] = {"A"};
    EventLog weaker = make_log(traces);
    DeclareModel mined2 = discover(weaker, {0.9, false});
    CHECK(std::count(mined2.constraints.begin(), mined2.constraints.end(), target) == 0);
}

TEST_CASE("discover finds Init at full support") {
    EventLog log = make_log({{"A", "B"}, {"A", "C"}, {"A", "B", "C"}});
    DeclareModel mined = discover(log, {1.0, false});
    auto init_a = c(Template::Init, "A");
    CHECK(std::count(mined.constraints.begin(), mined.constraints.end(), init_a) == 1);
}

TEST_CASE("non-vacuous support is the default; the flag widens it") {
    // Response(B,C): one activation satisfied, nine vacuous
    std::vector<std::vector<std::string>> traces(9, {"A"});
    traces.push_back({"B", "C"});
    EventLog log = make_log(traces);
    auto target = c(Template::Response, "B", "C");

    DeclareModel strict = discover(log, {0.9, false});
    CHECK(std::count(strict.constraints.begin(), strict.constraints.end(), target) == 0);

    DeclareModel loose = discover(log, {0.9, true});
    CHECK(std::count(loose.constraints.begin(), loose.constraints.end(), target) == 1);
}

TEST_CASE("discovery at support 1.0 followed by filtering is the identity") {
    EventLog log = make_log({{"A", "B", "C"}, {"A", "C"}, {"A", "B", "B"}});
    DeclareModel mined = discover(log, {1.0, false});
    EventLog filtered = filter_conformant(log, mined);
    CHECK(filtered == log);
}

TEST_CASE("filter_conformant drops violating traces") {
    DeclareModel model;
    model.constraints = {c(Template::Init, "A")};
    EventLog log = make_log({{"A", "B"}, {"B", "A"}});
    EventLog filtered = filter_conformant(log, model);
    REQUIRE(filtered.traces.size() == 1);
    CHECK(filtered.traces[0].activities() == std::vector<std::string>{"A", "B"});

    EventLog conformant = make_log({{"A"}, {"A", "B"}});
    CHECK(filter_conformant(conformant, model) == conformant);

    DeclareModel impossible;
    impossible.constraints = {c(Template::Init, "Z")};
    CHECK_THROWS_AS(filter_conformant(log, impossible), EmptyLogError);
}

TEST_CASE("log fitness is 1 exactly when every trace is fully fitting") {
    DeclareModel model;
    model.constraints = {c(Template::Init, "A"), c(Template::Absence2, "B")};
    EventLog log = make_log({{"A", "B"}, {"A", "C"}, {"A"}});
    bool all_fit = true;
    for (const auto& trace : log.traces)
        if (trace_fitness(model, trace) < 1.0) all_fit = false;
    CHECK((log_fitness(model, log) == 1.0) == all_fit);

    EventLog mixed = make_log({{"A", "B", "B"}, {"A"}});
    bool all_fit2 = true;
    for (const auto& trace : mixed.traces)
        if (trace_fitness(model, trace) < 1.0) all_fit2 = false;
    CHECK((log_fitness(model, mixed) == 1.0) == all_fit2);
    CHECK(all_fit2 == false);
}

TEST_CASE("activation and target sets follow the roles") {
    DeclareModel model;
    model.constraints = {c(Template::Init, "Create application"),
                         c(Template::ChainResponse, "Create application", "Submit documents"),
                         c(Template::Absence2, "Receive reminder")};
    auto sets = activation_target_sets(model);
    CHECK(sets.activations ==
          std::set<std::string>{"Create application", "Receive reminder"});
    CHECK(sets.targets == std::set<std::string>{"Submit documents"});

    CHECK(activation_target_sets(DeclareModel{}).activations.empty());
    CHECK(activation_target_sets(DeclareModel{}).targets.empty());

    DeclareModel cross;
    cross.constraints = {c(Template::Response, "A", "B"), c(Template::Response, "B", "A")};
    auto cross_sets = activation_target_sets(cross);
    CHECK(cross_sets.activations == std::set<std::string>{"A", "B"});
    CHECK(cross_sets.targets == std::set<std::string>{"A", "B"});

    // Precedence[A, B]: B activates, A is the target
    DeclareModel prec;
    prec.constraints = {c(Template::Precedence, "A", "B")};
    auto prec_sets = activation_target_sets(prec);
    CHECK(prec_sets.activations == std::set<std::string>{"B"});
    CHECK(prec_sets.targets == std::set<std::string>{"A"});
}

TEST_CASE("constraint text form round-trips") {
    auto chain = c(Template::ChainResponse, "a", "b");
    CHECK(chain.to_text() == "ChainResponse[a, b]");
    CHECK(DeclareConstraint::from_text("ChainResponse[a, b]") == chain);

    auto prec = c(Template::Precedence, "A", "B");
    CHECK(prec.to_text() == "Precedence[A, B]");
    CHECK(DeclareConstraint::from_text(prec.to_text()) == prec);

    CHECK(DeclareConstraint::from_text("Init[x]") == c(Template::Init, "x"));
    CHECK_THROWS_AS(DeclareConstraint::from_text("Nope[a]"), ParseError);
    CHECK_THROWS_AS(DeclareConstraint::from_text("Init[a, b]"), ParseError);
    CHECK_THROWS_AS(DeclareConstraint::from_text("Response[a]"), ParseError);
    CHECK_THROWS_AS(DeclareConstraint::from_text("Response[a, a]"), ParseError);
}
