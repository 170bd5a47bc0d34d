#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tracecf/event_log.hpp"
#include "tracecf/value.hpp"

namespace tracecf {

/// Reserved padding symbol for control-flow slots past the prefix end.
/// build_schema rejects logs whose alphabet contains it.
inline constexpr const char* kPadSymbol = "PAD";

enum class EncodingKind { SimpleIndex, SimpleTraceIndex };

const char* encoding_kind_name(EncodingKind k);
EncodingKind encoding_kind_from_name(const std::string& name);

struct Domain {
    enum class Kind { Categorical, Numeric };
    Kind kind = Kind::Categorical;
    std::vector<std::string> values;  // categorical: sorted, unique
    double min = 0.0;                 // numeric
    double max = 0.0;

    bool is_categorical() const { return kind == Kind::Categorical; }
    bool contains(const Value& v) const;

    bool operator==(const Domain&) const = default;
};

struct FeatureSpec {
    std::string name;
    Domain domain;

    bool operator==(const FeatureSpec&) const = default;
};

/// Fixed-length feature layout: static features first (empty for
/// SimpleIndex), then prefix_length control-flow slots sharing one
/// activity domain.
struct EncodingSchema {
    EncodingKind kind = EncodingKind::SimpleIndex;
    std::size_t prefix_length = 0;           // m
    std::vector<FeatureSpec> static_features;  // S, in first-appearance order
    Domain activity_domain;                  // shared across CF slots, includes PAD

    std::size_t static_count() const { return static_features.size(); }
    std::size_t feature_count() const { return static_features.size() + prefix_length; }
    bool is_control_flow(std::size_t index) const { return index >= static_features.size(); }
    const Domain& domain_of(std::size_t index) const;
    std::string feature_name(std::size_t index) const;

    bool operator==(const EncodingSchema&) const = default;
};

using FeatureVector = std::vector<Value>;

/// Extracts domains from the training prefixes: categorical domains are the
/// observed values plus PAD, numeric domains the observed [min, max], and
/// the control-flow domain the activities observed at any position plus
/// PAD. SimpleIndex schemas carry no static features.
EncodingSchema build_schema(const std::vector<LabeledPrefix>& training, EncodingKind kind,
                            std::size_t prefix_length);

/// Throws SchemaError when the vector does not conform to the schema
/// (length, value types, categorical domain membership).
void validate_vector(const EncodingSchema& schema, const FeatureVector& vector);

/// Control-flow slots carry the activity at each position, PAD past the
/// prefix end. Unseen categorical values map to PAD and are reported
/// through the warning channel.
FeatureVector encode(const EncodingSchema& schema, const Trace& prefix,
                     std::vector<std::string>* warnings = nullptr);

/// Inverse of encode: activities are the control-flow values up to the
/// first PAD (later non-PAD values are dropped with a warning), static
/// slots become trace attributes, timestamps are synthetic and evenly
/// spaced.
Trace decode(const EncodingSchema& schema, const FeatureVector& vector,
             std::vector<std::string>* warnings = nullptr);

/// Activity sequence of the decoded trace without materializing events.
std::vector<std::string> decode_activities(const EncodingSchema& schema,
                                           const FeatureVector& vector);

}  // namespace tracecf
