#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "tracecf/errors.hpp"
#include "tracecf/event_log.hpp"

namespace tracecf {
namespace {

namespace pt = boost::property_tree;

// Supported XES attribute tags. Anything else inside a trace or event is
// outside the subset this parser accepts.
bool is_attribute_tag(const std::string& tag) {
    return tag == "string" || tag == "date" || tag == "int" || tag == "float";
}

struct XesAttr {
    std::string key;
    Value value;
    bool is_date = false;
    std::int64_t date_ms = 0;
};

XesAttr read_attribute(const std::string& tag, const pt::ptree& node) {
    XesAttr attr;
    auto key = node.get_optional<std::string>("<xmlattr>.key");
    auto value = node.get_optional<std::string>("<xmlattr>.value");
    if (!key || !value) throw ParseError("XES attribute without key/value");
    attr.key = *key;
    if (tag == "string") {
        attr.value = *value;
    } else if (tag == "date") {
        attr.is_date = true;
        attr.date_ms = parse_timestamp_ms(*value);
        attr.value = static_cast<double>(attr.date_ms);
    } else {  // int, float
        try {
            attr.value = std::stod(*value);
        } catch (const std::exception&) {
            throw ParseError("bad numeric XES attribute '" + attr.key + "': " + *value);
        }
    }
    return attr;
}

}  // namespace

EventLog parse_xes(const std::filesystem::path& path) {
    pt::ptree doc;
    try {
        pt::read_xml(path.string(), doc);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(std::string("malformed XES: ") + e.what());
    }

    auto log_node = doc.get_child_optional("log");
    if (!log_node) throw ParseError("XES file has no <log> element: " + path.string());

    EventLog log;
    for (const auto& [tag, trace_node] : *log_node) {
        if (tag != "trace") continue;  // extensions, classifiers, globals are ignored

        Trace trace;
        bool has_case_id = false;
        for (const auto& [child_tag, child] : trace_node) {
            if (child_tag == "<xmlattr>") continue;
            if (child_tag == "event") {
                Event event;
                bool has_activity = false, has_timestamp = false;
                for (const auto& [attr_tag, attr_node] : child) {
                    if (attr_tag == "<xmlattr>") continue;
                    if (!is_attribute_tag(attr_tag))
                        throw ParseError("unsupported XES event element <" + attr_tag + ">");
                    XesAttr attr = read_attribute(attr_tag, attr_node);
                    if (attr.key == "concept:name") {
                        if (!is_categorical(attr.value))
                            throw ParseError("XES concept:name must be a string");
                        event.activity = std::get<std::string>(attr.value);
                        has_activity = true;
                    } else if (attr.key == "time:timestamp") {
                        if (!attr.is_date) throw ParseError("XES time:timestamp must be a date");
                        event.timestamp_ms = attr.date_ms;
                        has_timestamp = true;
                    } else {
                        event.attributes.set(attr.key, attr.value);
                    }
                }
                if (!has_activity)
                    throw ParseError("XES event without concept:name in " + path.string());
                if (!has_timestamp)
                    throw ParseError("XES event without time:timestamp in " + path.string());
                trace.events.push_back(std::move(event));
                continue;
            }
            if (!is_attribute_tag(child_tag))
                throw ParseError("unsupported XES trace element <" + child_tag + ">");
            XesAttr attr = read_attribute(child_tag, child);
            if (attr.key == "concept:name") {
                if (!is_categorical(attr.value))
                    throw ParseError("XES trace concept:name must be a string");
                trace.case_id = std::get<std::string>(attr.value);
                has_case_id = true;
            } else {
                trace.trace_attributes.set(attr.key, attr.value);
            }
        }
        if (trace.events.empty()) continue;
        if (!has_case_id) throw ParseError("XES trace without concept:name in " + path.string());
        for (auto& event : trace.events) event.case_id = trace.case_id;
        std::stable_sort(trace.events.begin(), trace.events.end(),
                         [](const Event& a, const Event& b) { return a.timestamp_ms < b.timestamp_ms; });
        log.traces.push_back(std::move(trace));
    }
    log.rebuild_alphabet();
    return log;
}

}  // namespace tracecf
