#include "tracecf/encoding.hpp"

#include <algorithm>
#include <set>

#include "tracecf/errors.hpp"

namespace tracecf {

const char* encoding_kind_name(EncodingKind k) {
    return k == EncodingKind::SimpleIndex ? "simple-index" : "simple-trace-index";
}

EncodingKind encoding_kind_from_name(const std::string& name) {
    if (name == "simple-index") return EncodingKind::SimpleIndex;
    if (name == "simple-trace-index") return EncodingKind::SimpleTraceIndex;
    throw ConfigError("unknown encoding kind: " + name);
}

bool Domain::contains(const Value& v) const {
    if (is_categorical()) {
        if (!tracecf::is_categorical(v)) return false;
        return std::binary_search(values.begin(), values.end(), std::get<std::string>(v));
    }
    return is_numeric(v);
}

const Domain& EncodingSchema::domain_of(std::size_t index) const {
    if (index < static_features.size()) return static_features[index].domain;
    if (index >= feature_count()) throw SchemaError("feature index out of range");
    return activity_domain;
}

std::string EncodingSchema::feature_name(std::size_t index) const {
    if (index < static_features.size()) return static_features[index].name;
    return "event_" + std::to_string(index - static_features.size() + 1);
}

EncodingSchema build_schema(const std::vector<LabeledPrefix>& training, EncodingKind kind,
                            std::size_t prefix_length) {
    if (training.empty()) throw EmptyDatasetError("cannot build a schema from no prefixes");
    if (prefix_length == 0) throw ConfigError("prefix_length must be >= 1");

    EncodingSchema schema;
    schema.kind = kind;
    schema.prefix_length = prefix_length;

    std::set<std::string> activities;
    for (const auto& lp : training)
        for (const auto& event : lp.prefix.events) {
            if (event.activity == kPadSymbol)
                throw SchemaError("activity name collides with the PAD symbol");
            activities.insert(event.activity);
        }
    schema.activity_domain.kind = Domain::Kind::Categorical;
    activities.insert(kPadSymbol);
    schema.activity_domain.values.assign(activities.begin(), activities.end());

    if (kind == EncodingKind::SimpleTraceIndex) {
        // Static feature order follows first appearance in the training data.
        std::vector<std::string> order;
        for (const auto& lp : training)
            for (const auto& [name, value] : lp.prefix.trace_attributes)
                if (std::find(order.begin(), order.end(), name) == order.end())
                    order.push_back(name);

        for (const auto& name : order) {
            FeatureSpec spec;
            spec.name = name;
            bool saw_string = false, saw_number = false, first = true;
            std::set<std::string> cats;
            double lo = 0, hi = 0;
            for (const auto& lp : training) {
                const Value* v = lp.prefix.trace_attributes.find(name);
                if (!v) continue;
                if (is_numeric(*v)) {
                    saw_number = true;
                    double x = std::get<double>(*v);
                    if (first || x < lo) lo = x;
                    if (first || x > hi) hi = x;
                    first = false;
                } else {
                    saw_string = true;
                    cats.insert(std::get<std::string>(*v));
                }
            }
            if (saw_string && saw_number)
                throw SchemaError("attribute '" + name + "' mixes categorical and numeric values");
            if (saw_number) {
                spec.domain.kind = Domain::Kind::Numeric;
                spec.domain.min = lo;
                spec.domain.max = hi;
            } else {
                spec.domain.kind = Domain::Kind::Categorical;
                cats.insert(kPadSymbol);
                spec.domain.values.assign(cats.begin(), cats.end());
            }
            schema.static_features.push_back(std::move(spec));
        }
    }
    return schema;
}

void validate_vector(const EncodingSchema& schema, const FeatureVector& vector) {
    if (vector.size() != schema.feature_count())
        throw SchemaError("feature vector has " + std::to_string(vector.size()) +
                          " values, schema expects " + std::to_string(schema.feature_count()));
    for (std::size_t i = 0; i < vector.size(); ++i) {
        const Domain& dom = schema.domain_of(i);
        if (dom.is_categorical()) {
            if (!dom.contains(vector[i]))
                throw SchemaError("value '" + to_display(vector[i]) +
                                  "' outside the domain of feature " + schema.feature_name(i));
        } else if (!is_numeric(vector[i])) {
            throw SchemaError("feature " + schema.feature_name(i) + " expects a numeric value");
        }
    }
}

FeatureVector encode(const EncodingSchema& schema, const Trace& prefix,
                     std::vector<std::string>* warnings) {
    if (prefix.size() > schema.prefix_length)
        throw SchemaError("prefix of length " + std::to_string(prefix.size()) +
                          " exceeds the schema prefix length " +
                          std::to_string(schema.prefix_length));
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };

    FeatureVector vec;
    vec.reserve(schema.feature_count());
    for (const auto& spec : schema.static_features) {
        const Value* v = prefix.trace_attributes.find(spec.name);
        if (spec.domain.is_categorical()) {
            if (!v) {
                warn("missing attribute '" + spec.name + "', encoded as PAD");
                vec.emplace_back(std::string(kPadSymbol));
            } else if (!spec.domain.contains(*v)) {
                warn("unseen value '" + to_display(*v) + "' for attribute '" + spec.name +
                     "', encoded as PAD");
                vec.emplace_back(std::string(kPadSymbol));
            } else {
                vec.push_back(*v);
            }
        } else {
            if (!v) {
                warn("missing attribute '" + spec.name + "', encoded as domain minimum");
                vec.emplace_back(spec.domain.min);
            } else if (!is_numeric(*v)) {
                throw SchemaError("attribute '" + spec.name + "' expects a numeric value");
            } else {
                vec.push_back(*v);
            }
        }
    }
    for (std::size_t i = 0; i < schema.prefix_length; ++i) {
        if (i < prefix.size()) {
            const std::string& act = prefix.events[i].activity;
            if (!schema.activity_domain.contains(Value(act))) {
                warn("unseen activity '" + act + "', encoded as PAD");
                vec.emplace_back(std::string(kPadSymbol));
            } else {
                vec.emplace_back(act);
            }
        } else {
            vec.emplace_back(std::string(kPadSymbol));
        }
    }
    return vec;
}

std::vector<std::string> decode_activities(const EncodingSchema& schema,
                                           const FeatureVector& vector) {
    std::vector<std::string> acts;
    for (std::size_t i = schema.static_count(); i < vector.size(); ++i) {
        const std::string& act = std::get<std::string>(vector[i]);
        if (act == kPadSymbol) break;
        acts.push_back(act);
    }
    return acts;
}

Trace decode(const EncodingSchema& schema, const FeatureVector& vector,
             std::vector<std::string>* warnings) {
    validate_vector(schema, vector);

    Trace trace;
    trace.case_id = "decoded";
    for (std::size_t s = 0; s < schema.static_count(); ++s)
        trace.trace_attributes.set(schema.static_features[s].name, vector[s]);

    bool padded = false;
    for (std::size_t i = schema.static_count(); i < vector.size(); ++i) {
        const std::string& act = std::get<std::string>(vector[i]);
        if (act == kPadSymbol) {
            padded = true;
            continue;
        }
        if (padded) {
            if (warnings)
                warnings->push_back("activity '" + act + "' after a PAD slot was dropped");
            continue;
        }
        Event event;
        event.activity = act;
        event.case_id = trace.case_id;
        event.timestamp_ms = static_cast<std::int64_t>(trace.events.size()) * 1000;
        trace.events.push_back(std::move(event));
    }
    return trace;
}

}  // namespace tracecf
