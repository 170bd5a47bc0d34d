#include "tracecf/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tracecf/declare.hpp"
#include "tracecf/errors.hpp"
#include "tracecf/version.hpp"
#include "csv_util.hpp"

namespace tracecf {
namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Value parse_cell_value(const std::string& s) {
    if (!s.empty()) {
        double d = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
        if (ec == std::errc() && ptr == s.data() + s.size()) return d;
    }
    return s;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = m <= 2 ? yr + 1 : yr;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace

std::int64_t parse_timestamp_ms(const std::string& text) {
    std::string_view s = text;
    if (s.empty()) throw ParseError("empty timestamp");

    bool negative = s.front() == '-';
    if (all_digits(negative ? s.substr(1) : s)) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw ParseError("bad epoch timestamp: " + text);
        if (v < 0) throw ParseError("negative timestamp: " + text);
        return v;
    }

    auto take_int = [&](std::size_t pos, std::size_t len) -> int {
        if (pos + len > s.size()) throw ParseError("bad ISO-8601 timestamp: " + text);
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
        if (ec != std::errc() || ptr != s.data() + pos + len)
            throw ParseError("bad ISO-8601 timestamp: " + text);
        return v;
    };

    // YYYY-MM-DD
    if (s.size() < 10 || s[4] != '-' || s[7] != '-')
        throw ParseError("bad ISO-8601 timestamp: " + text);
    int year = take_int(0, 4), month = take_int(5, 2), day = take_int(8, 2);
    if (month < 1 || month > 12 || day < 1 || day > 31)
        throw ParseError("bad ISO-8601 date: " + text);

    int hour = 0, minute = 0, second = 0;
    std::int64_t frac_ms = 0;
    std::int64_t offset_minutes = 0;
    std::size_t i = 10;
    if (i < s.size()) {
        if (s[i] != 'T' && s[i] != ' ') throw ParseError("bad ISO-8601 timestamp: " + text);
        ++i;
        hour = take_int(i, 2);
        minute = take_int(i + 3, 2);
        second = take_int(i + 6, 2);
        if (s[i + 2] != ':' || s[i + 5] != ':')
            throw ParseError("bad ISO-8601 timestamp: " + text);
        i += 8;
        if (i < s.size() && s[i] == '.') {
            ++i;
            std::size_t start = i;
            while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
            if (i == start) throw ParseError("bad ISO-8601 fraction: " + text);
            // keep millisecond precision
            std::string digits(s.substr(start, std::min<std::size_t>(3, i - start)));
            while (digits.size() < 3) digits += '0';
            frac_ms = std::stoll(digits);
        }
        if (i < s.size()) {
            char sign = s[i];
            if (sign == 'Z') {
                ++i;
            } else if (sign == '+' || sign == '-') {
                ++i;
                int oh = take_int(i, 2);
                i += 2;
                if (i < s.size() && s[i] == ':') ++i;
                int om = i + 2 <= s.size() ? take_int(i, 2) : 0;
                if (i + 2 <= s.size()) i += 2;
                offset_minutes = (sign == '-' ? -1 : 1) * (oh * 60 + om);
            }
        }
        if (i != s.size()) throw ParseError("bad ISO-8601 timestamp: " + text);
    }

    std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    std::int64_t ms = ((days * 24 + hour) * 60 + minute - offset_minutes) * 60000LL +
                      second * 1000LL + frac_ms;
    if (ms < 0) throw ParseError("timestamp before epoch: " + text);
    return ms;
}

std::string format_timestamp_iso(std::int64_t ms) {
    std::int64_t days = ms / 86400000;
    std::int64_t rem = ms % 86400000;
    if (rem < 0) {
        rem += 86400000;
        --days;
    }
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    int hour = static_cast<int>(rem / 3600000);
    int minute = static_cast<int>(rem / 60000 % 60);
    int second = static_cast<int>(rem / 1000 % 60);
    int milli = static_cast<int>(rem % 1000);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<long long>(y), m, d, hour, minute, second, milli);
    return buf;
}

Trace Trace::prefix(std::size_t k) const {
    Trace out;
    out.case_id = case_id;
    out.trace_attributes = trace_attributes;
    out.events.assign(events.begin(), events.begin() + std::min(k, events.size()));
    return out;
}

void EventLog::rebuild_alphabet() {
    activity_alphabet.clear();
    for (const auto& trace : traces)
        for (const auto& event : trace.events) activity_alphabet.insert(event.activity);
}

const Value& AttrMap::at(const std::string& key) const {
    const Value* v = find(key);
    if (!v) throw SchemaError("missing attribute: " + key);
    return *v;
}

EventLog parse_csv(const std::filesystem::path& path, const CsvColumnMap& columns) {
    auto rows = detail::parse_csv_text(read_file(path));
    if (rows.empty()) throw ParseError("CSV has no header row: " + path.string());

    const auto& header = rows.front();
    auto column_index = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ParseError("CSV missing column '" + name + "' in " + path.string());
    };

    std::size_t case_col = column_index(columns.case_id);
    std::size_t act_col = column_index(columns.activity);
    std::size_t ts_col = column_index(columns.timestamp);
    std::vector<std::size_t> static_cols;
    for (const auto& name : columns.static_columns) static_cols.push_back(column_index(name));

    std::vector<bool> is_event_attr(header.size(), true);
    is_event_attr[case_col] = is_event_attr[act_col] = is_event_attr[ts_col] = false;
    for (std::size_t c : static_cols) is_event_attr[c] = false;

    EventLog log;
    std::map<std::string, std::size_t> trace_index;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw ParseError("CSV row " + std::to_string(r + 1) + " has " +
                             std::to_string(row.size()) + " fields, expected " +
                             std::to_string(header.size()));
        Event event;
        event.case_id = row[case_col];
        event.activity = row[act_col];
        if (event.activity.empty())
            throw ParseError("empty activity at CSV row " + std::to_string(r + 1));
        event.timestamp_ms = parse_timestamp_ms(row[ts_col]);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!is_event_attr[c] || row[c].empty()) continue;
            event.attributes.set(header[c], parse_cell_value(row[c]));
        }

        auto [it, inserted] = trace_index.emplace(event.case_id, log.traces.size());
        if (inserted) {
            Trace trace;
            trace.case_id = event.case_id;
            log.traces.push_back(std::move(trace));
        }
        Trace& trace = log.traces[it->second];
        for (std::size_t s = 0; s < static_cols.size(); ++s) {
            const std::string& cell = row[static_cols[s]];
            if (cell.empty()) continue;
            Value v = parse_cell_value(cell);
            const Value* existing = trace.trace_attributes.find(columns.static_columns[s]);
            if (existing && !(*existing == v))
                throw IntegrityError("static attribute '" + columns.static_columns[s] +
                                     "' changes within case '" + trace.case_id + "'");
            if (!existing) trace.trace_attributes.set(columns.static_columns[s], std::move(v));
        }
        trace.events.push_back(std::move(event));
    }

    for (auto& trace : log.traces)
        std::stable_sort(trace.events.begin(), trace.events.end(),
                         [](const Event& a, const Event& b) { return a.timestamp_ms < b.timestamp_ms; });
    log.rebuild_alphabet();
    return log;
}

std::string to_csv(const EventLog& log, const CsvColumnMap& columns) {
    std::vector<std::size_t> order(log.traces.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return log.traces[a].case_id < log.traces[b].case_id;
    });

    std::vector<std::string> static_names = columns.static_columns;
    auto add_unique = [](std::vector<std::string>& names, const std::string& name) {
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    };
    std::vector<std::string> event_attr_names;
    for (std::size_t idx : order) {
        for (const auto& [name, value] : log.traces[idx].trace_attributes) add_unique(static_names, name);
        for (const auto& event : log.traces[idx].events)
            for (const auto& [name, value] : event.attributes) add_unique(event_attr_names, name);
    }

    std::string out = "# tracecf ";
    out += kVersion;
    out += " log-csv v1\n";
    std::vector<std::string> header = {columns.case_id, columns.activity, columns.timestamp};
    header.insert(header.end(), static_names.begin(), static_names.end());
    header.insert(header.end(), event_attr_names.begin(), event_attr_names.end());
    out += detail::csv_join(header);
    out += '\n';

    for (std::size_t idx : order) {
        const Trace& trace = log.traces[idx];
        for (const auto& event : trace.events) {
            std::vector<std::string> row = {trace.case_id, event.activity,
                                            std::to_string(event.timestamp_ms)};
            for (const auto& name : static_names) {
                const Value* v = trace.trace_attributes.find(name);
                row.push_back(v ? to_display(*v) : "");
            }
            for (const auto& name : event_attr_names) {
                const Value* v = event.attributes.find(name);
                row.push_back(v ? to_display(*v) : "");
            }
            out += detail::csv_join(row);
            out += '\n';
        }
    }
    return out;
}

void write_csv(const EventLog& log, const std::filesystem::path& path, const CsvColumnMap& columns) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path.string());
    out << to_csv(log, columns);
}

std::vector<LabeledPrefix> prefix_log(const EventLog& log, const std::set<std::size_t>& lengths) {
    for (std::size_t k : lengths)
        if (k < 1) throw ConfigError("prefix lengths must be >= 1");
    std::vector<LabeledPrefix> out;
    for (const auto& trace : log.traces) {
        for (std::size_t k : lengths) {
            if (k >= trace.size()) continue;  // strict prefixes only
            LabeledPrefix lp;
            lp.prefix = trace.prefix(k);
            lp.source_case = trace.case_id;
            out.push_back(std::move(lp));
        }
    }
    return out;
}

std::map<std::string, int> label_log(const EventLog& log, const DeclareConstraint& constraint) {
    std::map<std::string, int> labels;
    for (const auto& trace : log.traces)
        labels[trace.case_id] = is_satisfied(check(constraint, trace)) ? 1 : 0;
    return labels;
}

SplitResult sequential_split(const std::vector<LabeledPrefix>& dataset, const SplitRatios& ratios) {
    double sum = ratios.train + ratios.valid + ratios.test;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("split ratios must sum to 1, got " + format_double(sum));
    if (dataset.empty()) throw EmptyDatasetError("cannot split an empty dataset");

    std::size_t n = dataset.size();
    auto take = [n](double ratio) {
        return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
    };
    std::size_t n_train = take(ratios.train);
    std::size_t n_valid = take(ratios.valid);
    if (n_train + n_valid > n) n_valid = n - n_train;

    SplitResult result;
    result.train.assign(dataset.begin(), dataset.begin() + n_train);
    result.valid.assign(dataset.begin() + n_train, dataset.begin() + n_train + n_valid);
    result.test.assign(dataset.begin() + n_train + n_valid, dataset.end());
    return result;
}

void sort_by_source_start(std::vector<LabeledPrefix>& dataset, const EventLog& log) {
    std::map<std::string, std::int64_t> start;
    for (const auto& trace : log.traces) start[trace.case_id] = trace.start_timestamp_ms();
    std::stable_sort(dataset.begin(), dataset.end(),
                     [&](const LabeledPrefix& a, const LabeledPrefix& b) {
                         auto sa = start.count(a.source_case) ? start[a.source_case] : 0;
                         auto sb = start.count(b.source_case) ? start[b.source_case] : 0;
                         if (sa != sb) return sa < sb;
                         return a.source_case < b.source_case;
                     });
}

}  // namespace tracecf
