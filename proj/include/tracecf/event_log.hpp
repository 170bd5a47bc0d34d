#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tracecf/value.hpp"

namespace tracecf {

struct DeclareConstraint;

struct Event {
    std::string activity;
    std::string case_id;
    std::int64_t timestamp_ms = 0;  // milliseconds since epoch, >= 0
    AttrMap attributes;

    bool operator==(const Event&) const = default;
};

struct Trace {
    std::string case_id;
    std::vector<Event> events;      // timestamps non-decreasing
    AttrMap trace_attributes;

    std::size_t size() const { return events.size(); }

    std::vector<std::string> activities() const {
        std::vector<std::string> out;
        out.reserve(events.size());
        for (const auto& e : events) out.push_back(e.activity);
        return out;
    }

    std::int64_t start_timestamp_ms() const {
        return events.empty() ? 0 : events.front().timestamp_ms;
    }

    /// First k events; trace attributes are carried over.
    Trace prefix(std::size_t k) const;

    bool operator==(const Trace&) const = default;
};

struct EventLog {
    std::vector<Trace> traces;
    std::set<std::string> activity_alphabet;  // union of activities in traces

    void rebuild_alphabet();

    bool operator==(const EventLog&) const = default;
};

struct LabeledPrefix {
    Trace prefix;
    int label = -1;  // -1 until label_log assigns it
    std::string source_case;

    bool operator==(const LabeledPrefix&) const = default;
};

/// Maps CSV columns onto the event-log schema. Columns listed in
/// static_columns become trace attributes and must be constant per case;
/// all remaining columns become event attributes.
struct CsvColumnMap {
    std::string case_id = "case_id";
    std::string activity = "activity";
    std::string timestamp = "timestamp";
    std::vector<std::string> static_columns;
};

/// Accepts ISO-8601 ("2023-01-27T10:00:00", optional ".sss" and "Z"/"+HH:MM")
/// or a bare integer (epoch milliseconds). Throws ParseError otherwise.
std::int64_t parse_timestamp_ms(const std::string& text);
std::string format_timestamp_iso(std::int64_t ms);

EventLog parse_csv(const std::filesystem::path& path, const CsvColumnMap& columns);
EventLog parse_xes(const std::filesystem::path& path);

/// Canonical CSV: traces sorted by case_id, events by timestamp. Re-parsing
/// with the same column map reproduces the log value-for-value.
void write_csv(const EventLog& log, const std::filesystem::path& path, const CsvColumnMap& columns);
std::string to_csv(const EventLog& log, const CsvColumnMap& columns);

/// All prefixes sigma_k for k in lengths with k < |sigma| (strict), in log
/// order. Labels are left unassigned; fill them via label_log.
std::vector<LabeledPrefix> prefix_log(const EventLog& log, const std::set<std::size_t>& lengths);

/// Label 1 iff the complete trace satisfies the constraint (vacuous
/// satisfaction counts as satisfaction), else 0.
std::map<std::string, int> label_log(const EventLog& log, const DeclareConstraint& constraint);

struct SplitRatios {
    double train = 0.7;
    double valid = 0.1;
    double test = 0.2;
};

struct SplitResult {
    std::vector<LabeledPrefix> train;
    std::vector<LabeledPrefix> valid;
    std::vector<LabeledPrefix> test;
};

/// Contiguous temporal slices. Sizes are floor(ratio * n) for train and
/// valid; the remainder goes to test. The input must already be ordered by
/// source-trace start timestamp.
SplitResult sequential_split(const std::vector<LabeledPrefix>& dataset, const SplitRatios& ratios);

/// Sorts prefixes by source-trace start timestamp (ties by case id), the
/// order sequential_split expects.
void sort_by_source_start(std::vector<LabeledPrefix>& dataset, const EventLog& log);

}  // namespace tracecf
