#pragma once

#include <string>
#include <vector>

#include "tracecf/event_log.hpp"

namespace testutil {

inline tracecf::Trace make_trace(const std::vector<std::string>& activities,
                                 const std::string& case_id = "c") {
    tracecf::Trace trace;
    trace.case_id = case_id;
    for (std::size_t i = 0; i < activities.size(); ++i) {
        tracecf::Event event;
        event.activity = activities[i];
        event.case_id = case_id;
        event.timestamp_ms = static_cast<std::int64_t>(i) * 1000;
        trace.events.push_back(std::move(event));
    }
    return trace;
}

inline tracecf::EventLog make_log(const std::vector<std::vector<std::string>>& traces) {
    tracecf::EventLog log;
    for (std::size_t i = 0; i < traces.size(); ++i)
        log.traces.push_back(make_trace(traces[i], "c" + std::to_string(i + 1)));
    log.rebuild_alphabet();
    return log;
}

}  // namespace testutil
