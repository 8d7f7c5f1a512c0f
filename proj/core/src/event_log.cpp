#include "fcrepair/event_log.hpp"

#include <algorithm>
#include <optional>
#include <charconv>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "fcrepair/error.hpp"
#include "io.hpp"

namespace fcrepair {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

void check_label(const Label& label) {
    if (label.empty()) throw PreconditionError("event label must not be empty");
    if (label == kSilentLabel) throw PreconditionError("the silent label τ may not occur in an event log");
}

}  // namespace

void EventLog::add(const Trace& trace, std::size_t count) {
    if (count == 0) throw PreconditionError("trace multiplicity must be positive");
    for (const auto& label : trace) check_label(label);
    traces_[trace] += count;
    alphabet_.insert(trace.begin(), trace.end());
}

std::size_t EventLog::count(const Trace& trace) const {
    const auto it = traces_.find(trace);
    return it == traces_.end() ? 0 : it->second;
}

std::vector<Trace> EventLog::support() const {
    std::vector<Trace> out;
    out.reserve(traces_.size());
    for (const auto& [trace, count] : traces_) out.push_back(trace);
    return out;
}

EventLog parse_traces_text(std::string_view text) {
    EventLog log;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;

        std::size_t count = 1;
        const auto x = line.find("x ");
        if (x != std::string_view::npos && x > 0 &&
            std::all_of(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(x),
                        [](char c) { return c >= '0' && c <= '9'; })) {
            const auto [ptr, ec] = std::from_chars(line.data(), line.data() + x, count);
            if (ec != std::errc{} || count == 0)
                throw ParseError("invalid multiplicity '" + std::string(line.substr(0, x)) + "'", line_no);
            line.remove_prefix(x + 2);
        }

        Trace trace;
        const auto body = trim(line);
        if (body != kEmptyTraceMarker) {
            std::size_t start = 0;
            while (true) {
                const auto comma = body.find(',', start);
                const auto label = trim(body.substr(start, comma == std::string_view::npos ? comma : comma - start));
                if (label.empty()) throw ParseError("empty event label", line_no);
                if (label == kSilentLabel) throw ParseError("the silent label τ may not occur in a log", line_no);
                if (label == kEmptyTraceMarker) throw ParseError("'ε' may only stand alone for the empty trace", line_no);
                trace.emplace_back(label);
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
        }
        log.add(trace, count);
    }
    return log;
}

std::string serialize_traces_text(const EventLog& log) {
    std::ostringstream out;
    for (const auto& [trace, count] : log.traces()) {
        if (count > 1) out << count << "x ";
        if (trace.empty()) {
            out << kEmptyTraceMarker;
        }
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const auto& label = trace[i];
            if (label.find_first_of(",\n\r") != std::string::npos || trim(label) != label ||
                label == kEmptyTraceMarker)
                throw PreconditionError("label '" + label + "' cannot be written in the trace text format");
            if (i > 0) out << ',';
            out << label;
        }
        out << '\n';
    }
    return out.str();
}

EventLog parse_xes(std::string_view xml) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("malformed XES: " + e.message(), e.line());
    }
    const auto root = tree.get_child_optional("log");
    if (!root) throw ParseError("XES document has no <log> root element");

    EventLog log;
    std::size_t trace_index = 0;
    for (const auto& [trace_tag, trace_node] : *root) {
        if (trace_tag != "trace") continue;
        ++trace_index;
        Trace trace;
        for (const auto& [event_tag, event_node] : trace_node) {
            if (event_tag != "event") continue;
            std::optional<std::string> name;
            for (const auto& [attr_tag, attr_node] : event_node) {
                if (attr_tag != "string") continue;
                if (attr_node.get<std::string>("<xmlattr>.key", "") == "concept:name")
                    name = attr_node.get<std::string>("<xmlattr>.value", "");
            }
            if (!name || name->empty())
                throw ParseError("event " + std::to_string(trace.size() + 1) + " of trace " +
                                 std::to_string(trace_index) + " lacks a concept:name");
            if (*name == kSilentLabel) throw ParseError("the silent label τ may not occur in a log");
            trace.push_back(std::move(*name));
        }
        log.add(trace);
    }
    return log;
}

EventLog read_log_file(const std::filesystem::path& path) {
    const auto text = detail::read_file(path);
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    // XML content is read as XES whatever the extension, so that a PNML file
    // passed by mistake fails instead of becoming a log of odd traces.
    const auto first = text.find_first_not_of(" \t\r\n");
    if (ext == ".xes" || (first != std::string::npos && text[first] == '<')) return parse_xes(text);
    return parse_traces_text(text);
}

EventLog filter_top_k(const EventLog& log, std::size_t k) {
    if (k == 0) throw PreconditionError("top-k filter needs k >= 1");
    if (k >= log.distinct_traces()) return log;

    std::vector<std::pair<const Trace*, std::size_t>> ranked;
    ranked.reserve(log.distinct_traces());
    for (const auto& [trace, count] : log.traces()) ranked.emplace_back(&trace, count);
    // The map iterates in lexicographic order, so a stable sort on count
    // alone yields (count desc, trace asc).
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    EventLog out;
    for (std::size_t i = 0; i < k; ++i) out.add(*ranked[i].first, ranked[i].second);
    return out;
}

LogStats log_stats(const EventLog& log) {
    LogStats stats;
    for (const auto& [trace, count] : log.traces()) {
        stats.event_occurrences += count * trace.size();
        stats.trace_occurrences += count;
    }
    stats.unique_events = log.alphabet().size();
    return stats;
}

}  // namespace fcrepair
