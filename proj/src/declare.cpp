#include "tracecf/declare.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "tracecf/errors.hpp"

namespace tracecf {
namespace {

constexpr std::array<Template, 8> kAllTemplates = {
    Template::Existence1,        Template::Absence2,  Template::Init,
    Template::RespondedExistence, Template::Response, Template::AlternateResponse,
    Template::ChainResponse,      Template::Precedence,
};

std::size_t count_occurrences(const std::vector<std::string>& acts, const std::string& a) {
    return static_cast<std::size_t>(std::count(acts.begin(), acts.end(), a));
}

}  // namespace

bool is_unary(Template t) {
    return t == Template::Existence1 || t == Template::Absence2 || t == Template::Init;
}

const char* template_name(Template t) {
    switch (t) {
        case Template::Existence1: return "Existence1";
        case Template::Absence2: return "Absence2";
        case Template::Init: return "Init";
        case Template::RespondedExistence: return "RespondedExistence";
        case Template::Response: return "Response";
        case Template::AlternateResponse: return "AlternateResponse";
        case Template::ChainResponse: return "ChainResponse";
        case Template::Precedence: return "Precedence";
    }
    return "?";
}

std::optional<Template> template_from_name(const std::string& name) {
    for (Template t : kAllTemplates)
        if (name == template_name(t)) return t;
    return std::nullopt;
}

bool DeclareConstraint::operator<(const DeclareConstraint& o) const {
    return std::tie(tmpl, activation, target) < std::tie(o.tmpl, o.activation, o.target);
}

DeclareConstraint DeclareConstraint::make(Template t, std::string first,
                                          std::optional<std::string> second) {
    DeclareConstraint c;
    c.tmpl = t;
    if (is_unary(t)) {
        if (second) throw ConfigError(std::string(template_name(t)) + " takes one activity");
        c.activation = std::move(first);
        return c;
    }
    if (!second) throw ConfigError(std::string(template_name(t)) + " takes two activities");
    if (first == *second)
        throw ConfigError(std::string(template_name(t)) + " requires distinct activities");
    // Positional convention of the template catalog: Precedence[A, B] reads
    // "B occurs only if preceded by A", so B is the activation and A the
    // target. Every other binary template activates on its first parameter.
    if (t == Template::Precedence) {
        c.activation = std::move(*second);
        c.target = std::move(first);
    } else {
        c.activation = std::move(first);
        c.target = std::move(*second);
    }
    return c;
}

std::string DeclareConstraint::to_text() const {
    std::string out = template_name(tmpl);
    out += '[';
    if (is_unary(tmpl)) {
        out += activation;
    } else if (tmpl == Template::Precedence) {
        out += *target;
        out += ", ";
        out += activation;
    } else {
        out += activation;
        out += ", ";
        out += *target;
    }
    out += ']';
    return out;
}

DeclareConstraint DeclareConstraint::from_text(const std::string& line) {
    auto open = line.find('[');
    auto close = line.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ParseError("bad constraint syntax: " + line);
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string name = trim(line.substr(0, open));
    std::string body = line.substr(open + 1, close - open - 1);
    auto t = template_from_name(name);
    if (!t) throw ParseError("unknown Declare template: " + name);

    auto comma = body.find(',');
    std::string first = trim(comma == std::string::npos ? body : body.substr(0, comma));
    std::optional<std::string> second;
    if (comma != std::string::npos) second = trim(body.substr(comma + 1));
    if (first.empty() || (second && second->empty()))
        throw ParseError("bad constraint parameters: " + line);
    if (is_unary(*t) != !second.has_value())
        throw ParseError("wrong arity for " + name + ": " + line);
    try {
        return make(*t, std::move(first), std::move(second));
    } catch (const ConfigError& e) {
        throw ParseError(e.what());
    }
}

Verdict check(const DeclareConstraint& c, const Trace& trace) {
    return check(c, trace.activities());
}

Verdict check(const DeclareConstraint& c, const std::vector<std::string>& acts) {
    const std::string& a = c.activation;
    switch (c.tmpl) {
        case Template::Existence1:
            return count_occurrences(acts, a) >= 1 ? Verdict::Satisfied : Verdict::Violated;
        case Template::Absence2: {
            std::size_t n = count_occurrences(acts, a);
            if (n == 0) return Verdict::VacuouslySatisfied;
            return n == 1 ? Verdict::Satisfied : Verdict::Violated;
        }
        case Template::Init:
            return !acts.empty() && acts.front() == a ? Verdict::Satisfied : Verdict::Violated;
        default:
            break;
    }

    const std::string& b = *c.target;
    std::size_t activations = count_occurrences(acts, a);
    if (activations == 0) return Verdict::VacuouslySatisfied;

    bool holds = true;
    switch (c.tmpl) {
        case Template::RespondedExistence:
            holds = count_occurrences(acts, b) >= 1;
            break;
        case Template::Response:
            for (std::size_t i = 0; i < acts.size() && holds; ++i) {
                if (acts[i] != a) continue;
                holds = std::find(acts.begin() + i + 1, acts.end(), b) != acts.end();
            }
            break;
        case Template::AlternateResponse:
            for (std::size_t i = 0; i < acts.size() && holds; ++i) {
                if (acts[i] != a) continue;
                bool answered = false;
                for (std::size_t j = i + 1; j < acts.size(); ++j) {
                    if (acts[j] == a) break;  // re-activated before the target
                    if (acts[j] == b) {
                        answered = true;
                        break;
                    }
                }
                holds = answered;
            }
            break;
        case Template::ChainResponse:
            for (std::size_t i = 0; i < acts.size() && holds; ++i) {
                if (acts[i] != a) continue;
                holds = i + 1 < acts.size() && acts[i + 1] == b;
            }
            break;
        case Template::Precedence: {
            // activation = B, target = A: every B needs an earlier A
            bool target_seen = false;
            for (const auto& act : acts) {
                if (act == b) target_seen = true;
                if (act == a && !target_seen) {
                    holds = false;
                    break;
                }
            }
            break;
        }
        default:
            break;
    }
    return holds ? Verdict::Satisfied : Verdict::Violated;
}

double trace_fitness(const DeclareModel& model, const Trace& trace) {
    return trace_fitness(model, trace.activities());
}

double trace_fitness(const DeclareModel& model, const std::vector<std::string>& acts) {
    if (model.empty()) throw EmptyModelError("trace_fitness over an empty Declare model");
    std::size_t satisfied = 0;
    for (const auto& c : model.constraints)
        if (is_satisfied(check(c, acts))) ++satisfied;
    return static_cast<double>(satisfied) / static_cast<double>(model.size());
}

double log_fitness(const DeclareModel& model, const EventLog& log) {
    if (model.empty()) throw EmptyModelError("log_fitness over an empty Declare model");
    if (log.traces.empty()) throw EmptyLogError("log_fitness over an empty log");
    std::size_t satisfied_by_all = 0;
    for (const auto& c : model.constraints) {
        bool all = true;
        for (const auto& trace : log.traces) {
            if (!is_satisfied(check(c, trace))) {
                all = false;
                break;
            }
        }
        if (all) ++satisfied_by_all;
    }
    return static_cast<double>(satisfied_by_all) / static_cast<double>(model.size());
}

DeclareModel discover(const EventLog& log, const DiscoveryOptions& options) {
    if (options.support <= 0.0 || options.support > 1.0)
        throw ConfigError("discovery support must be in (0, 1]");

    std::vector<std::string> alphabet(log.activity_alphabet.begin(), log.activity_alphabet.end());
    std::vector<std::vector<std::string>> traces;
    traces.reserve(log.traces.size());
    for (const auto& trace : log.traces) traces.push_back(trace.activities());

    DeclareModel model;
    if (traces.empty()) return model;

    auto supported = [&](const DeclareConstraint& c) {
        std::size_t hits = 0;
        for (const auto& acts : traces) {
            Verdict v = check(c, acts);
            if (v == Verdict::Satisfied || (options.count_vacuous && v == Verdict::VacuouslySatisfied))
                ++hits;
        }
        double support = static_cast<double>(hits) / static_cast<double>(traces.size());
        return support >= options.support - 1e-12;
    };

    for (Template t : kAllTemplates) {
        if (is_unary(t)) {
            for (const auto& a : alphabet) {
                DeclareConstraint c = DeclareConstraint::make(t, a);
                if (supported(c)) model.constraints.push_back(std::move(c));
            }
        } else {
            for (const auto& first : alphabet) {
                for (const auto& second : alphabet) {
                    if (first == second) continue;
                    DeclareConstraint c = DeclareConstraint::make(t, first, second);
                    if (supported(c)) model.constraints.push_back(std::move(c));
                }
            }
        }
    }
    return model;
}

EventLog filter_conformant(const EventLog& log, const DeclareModel& model) {
    if (model.empty()) return log;
    EventLog out;
    for (const auto& trace : log.traces)
        if (trace_fitness(model, trace) == 1.0) out.traces.push_back(trace);
    if (out.traces.empty()) throw EmptyLogError("no trace conforms to the Declare model");
    out.rebuild_alphabet();
    return out;
}

ActivationTargetSets activation_target_sets(const DeclareModel& model) {
    ActivationTargetSets sets;
    for (const auto& c : model.constraints) {
        sets.activations.insert(c.activation);
        if (c.target) sets.targets.insert(*c.target);
    }
    return sets;
}

}  // namespace tracecf
