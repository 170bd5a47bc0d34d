#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tracecf/event_log.hpp"

namespace tracecf {

enum class Template {
    Existence1,          // A occurs at least once
    Absence2,            // A occurs at most once
    Init,                // the trace starts with A
    RespondedExistence,  // if A occurs, B occurs
    Response,            // if A occurs, B occurs after A
    AlternateResponse,   // each A is followed by B before the next A
    ChainResponse,       // each A is immediately followed by B
    Precedence,          // B occurs only if preceded by A
};

bool is_unary(Template t);
const char* template_name(Template t);
std::optional<Template> template_from_name(const std::string& name);

/// A Declare constraint instance. For binary templates the activation is
/// the activity that triggers the obligation and the target the activity
/// demanded by it; for Precedence[A, B] ("B only if preceded by A") the
/// activation is B and the target A.
struct DeclareConstraint {
    Template tmpl = Template::Existence1;
    std::string activation;
    std::optional<std::string> target;  // absent for unary templates

    bool operator==(const DeclareConstraint&) const = default;
    bool operator<(const DeclareConstraint& o) const;

    /// Positional text form, e.g. "Response[A, B]" or "Init[A]". Precedence
    /// renders as Precedence[target, activation] per the usual convention.
    std::string to_text() const;
    static DeclareConstraint from_text(const std::string& line);
    static DeclareConstraint make(Template t, std::string first,
                                  std::optional<std::string> second = std::nullopt);
};

struct DeclareModel {
    std::vector<DeclareConstraint> constraints;  // no duplicates

    bool empty() const { return constraints.empty(); }
    std::size_t size() const { return constraints.size(); }

    bool operator==(const DeclareModel&) const = default;
};

enum class Verdict { Satisfied, VacuouslySatisfied, Violated };

inline bool is_satisfied(Verdict v) { return v != Verdict::Violated; }

struct ActivationTargetSets {
    std::set<std::string> activations;  // A
    std::set<std::string> targets;      // T

    bool in_either(const std::string& activity) const {
        return activations.count(activity) > 0 || targets.count(activity) > 0;
    }
};

/// Checks one constraint against the activity sequence of a trace.
/// Binary templates are VacuouslySatisfied when the activation never
/// occurs, as is Absence2; Existence1 and Init only yield
/// Satisfied/Violated.
Verdict check(const DeclareConstraint& constraint, const Trace& trace);
Verdict check(const DeclareConstraint& constraint, const std::vector<std::string>& activities);

/// Fraction of constraints the trace satisfies (vacuous counts).
double trace_fitness(const DeclareModel& model, const Trace& trace);
double trace_fitness(const DeclareModel& model, const std::vector<std::string>& activities);

/// Fraction of constraints satisfied by every trace of the log.
double log_fitness(const DeclareModel& model, const EventLog& log);

struct DiscoveryOptions {
    double support = 0.9;
    bool count_vacuous = false;  // count vacuous satisfaction toward support
};

/// Instantiates every template over the log alphabet (binary templates over
/// ordered pairs of distinct activities) and keeps constraints whose support
/// meets the threshold. Output order is deterministic: template order, then
/// positional parameters lexicographically.
DeclareModel discover(const EventLog& log, const DiscoveryOptions& options);

/// Keeps exactly the traces with trace_fitness 1.0. An empty model filters
/// nothing. Throws EmptyLogError if no trace survives.
EventLog filter_conformant(const EventLog& log, const DeclareModel& model);

ActivationTargetSets activation_target_sets(const DeclareModel& model);

}  // namespace tracecf
