#include "tracecf/synthesis.hpp"

#include <algorithm>

#include "tracecf/encoding.hpp"
#include "tracecf/errors.hpp"
#include "tracecf/rng.hpp"

namespace tracecf {
namespace {

void validate_spec(const SynthesisSpec& spec) {
    if (spec.alphabet.empty()) throw ConfigError("synthesis alphabet is empty");
    if (spec.trace_count == 0) throw ConfigError("synthesis trace_count must be >= 1");
    if (spec.min_length < 1 || spec.min_length > spec.max_length)
        throw ConfigError("synthesis length bounds are invalid");
    for (const auto& a : spec.alphabet) {
        if (a.empty()) throw ConfigError("synthesis alphabet contains an empty activity");
        if (a == kPadSymbol)
            throw ConfigError("synthesis alphabet collides with the PAD symbol");
    }
    for (const auto& attr : spec.trace_attributes) {
        if (attr.numeric) {
            if (attr.min > attr.max)
                throw ConfigError("attribute '" + attr.name + "' has min > max");
        } else if (attr.values.empty()) {
            throw ConfigError("attribute '" + attr.name + "' has no categorical values");
        }
    }
}

bool conforms(const DeclareModel& model, const std::vector<std::string>& acts) {
    for (const auto& c : model.constraints)
        if (!is_satisfied(check(c, acts))) return false;
    return true;
}

std::string case_name(std::size_t index, std::size_t total) {
    std::size_t width = std::to_string(total).size();
    std::string num = std::to_string(index + 1);
    return "case_" + std::string(width - std::min(width, num.size()), '0') + num;
}

}  // namespace

EventLog synthesize_log(const SynthesisSpec& spec, std::uint64_t seed) {
    validate_spec(spec);
    Rng rng(seed);

    EventLog log;
    for (std::size_t t = 0; t < spec.trace_count; ++t) {
        std::vector<std::string> acts;
        bool accepted = false;
        for (std::size_t attempt = 0; attempt < spec.rejection_budget; ++attempt) {
            std::size_t len = spec.min_length + rng.index(spec.max_length - spec.min_length + 1);
            acts.clear();
            for (std::size_t i = 0; i < len; ++i) acts.push_back(spec.alphabet[rng.index(spec.alphabet.size())]);
            if (conforms(spec.model, acts)) {
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw SynthesisError("rejection budget exhausted after " +
                                 std::to_string(spec.rejection_budget) +
                                 " attempts; the generating model is too restrictive");

        int label = 1;
        if (spec.outcome_constraint)
            label = is_satisfied(check(*spec.outcome_constraint, acts)) ? 1 : 0;

        Trace trace;
        trace.case_id = case_name(t, spec.trace_count);
        for (const auto& attr : spec.trace_attributes) {
            if (attr.numeric) {
                double lo = attr.min, hi = attr.max;
                if (attr.correlated && spec.outcome_constraint) {
                    double mid = 0.5 * (attr.min + attr.max);
                    if (label == 1)
                        lo = mid;
                    else
                        hi = mid;
                }
                trace.trace_attributes.set(attr.name, rng.uniform(lo, hi));
            } else {
                std::size_t n = attr.values.size();
                std::size_t begin = 0, count = n;
                if (attr.correlated && spec.outcome_constraint && n > 1) {
                    std::size_t half = (n + 1) / 2;
                    begin = label == 1 ? 0 : half;
                    count = label == 1 ? half : n - half;
                }
                trace.trace_attributes.set(attr.name, attr.values[begin + rng.index(count)]);
            }
        }

        std::int64_t base = static_cast<std::int64_t>(t) * 100000;
        for (std::size_t i = 0; i < acts.size(); ++i) {
            Event event;
            event.activity = acts[i];
            event.case_id = trace.case_id;
            event.timestamp_ms = base + static_cast<std::int64_t>(i) * 1000;
            trace.events.push_back(std::move(event));
        }
        log.traces.push_back(std::move(trace));
    }
    log.rebuild_alphabet();
    return log;
}

}  // namespace tracecf
