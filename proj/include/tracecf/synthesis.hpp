#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tracecf/declare.hpp"
#include "tracecf/event_log.hpp"

namespace tracecf {

/// Trace-attribute generator. Correlated attributes are sampled from the
/// label-conditioned half of their domain (upper half / first half of the
/// value list for label 1), which gives the predictor signal beyond the
/// control flow.
struct AttributeSpec {
    std::string name;
    bool numeric = true;
    double min = 0.0;
    double max = 1.0;
    std::vector<std::string> values;  // categorical domains
    bool correlated = false;
};

struct SynthesisSpec {
    std::vector<std::string> alphabet;
    std::size_t trace_count = 0;
    std::size_t min_length = 1;
    std::size_t max_length = 1;
    DeclareModel model;  // generating model; every emitted trace satisfies it
    std::vector<AttributeSpec> trace_attributes;
    std::optional<DeclareConstraint> outcome_constraint;
    std::size_t rejection_budget = 10000;  // attempts per trace
};

/// Rejection-samples traces until they satisfy the generating model.
/// Deterministic under a fixed seed. Throws SynthesisError when the
/// per-trace budget runs out.
EventLog synthesize_log(const SynthesisSpec& spec, std::uint64_t seed);

}  // namespace tracecf
