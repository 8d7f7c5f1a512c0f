#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fcrepair {

/// Reserved label of silent transitions. Never valid inside a log.
inline constexpr std::string_view kSilentLabel = "τ";

/// Marker for the empty trace in the plain trace text format.
inline constexpr std::string_view kEmptyTraceMarker = "ε";

using Label = std::string;
using Trace = std::vector<Label>;

/// Multiset of traces. The alphabet is always the exact union of the
/// labels that occur in the stored traces.
class EventLog {
public:
    EventLog() = default;

    /// Adds `count` occurrences of `trace`. Throws PreconditionError for an
    /// empty label, the silent label, or a zero count.
    void add(const Trace& trace, std::size_t count = 1);

    const std::map<Trace, std::size_t>& traces() const noexcept { return traces_; }
    const std::set<Label>& alphabet() const noexcept { return alphabet_; }

    std::size_t distinct_traces() const noexcept { return traces_.size(); }
    bool empty() const noexcept { return traces_.empty(); }
    bool contains(const Trace& trace) const { return traces_.contains(trace); }
    std::size_t count(const Trace& trace) const;

    /// The set view of the log that all control-flow semantics use.
    std::vector<Trace> support() const;

    friend bool operator==(const EventLog&, const EventLog&) = default;

private:
    std::map<Trace, std::size_t> traces_;
    std::set<Label> alphabet_;
};

/// Parses the plain trace format: one trace per line, comma-separated
/// labels, optional "<count>x " prefix, "ε" for the empty trace. Blank lines
/// are ignored. Throws ParseError carrying the 1-based line number.
EventLog parse_traces_text(std::string_view text);

/// Canonical text form (traces in lexicographic order, "<n>x " prefix only
/// when n > 1). Throws PreconditionError for labels the grammar cannot carry.
std::string serialize_traces_text(const EventLog& log);

/// Reads the `concept:name` of every event of every trace of an XES document.
EventLog parse_xes(std::string_view xml);

/// Loads a log file, choosing XES for `.xes` and the trace text format
/// otherwise.
EventLog read_log_file(const std::filesystem::path& path);

/// Keeps the k distinct traces with the highest counts; ties go to the
/// lexicographically smaller trace. Throws PreconditionError when k == 0.
EventLog filter_top_k(const EventLog& log, std::size_t k);

struct LogStats {
    std::size_t event_occurrences = 0;
    std::size_t trace_occurrences = 0;
    std::size_t unique_events = 0;

    friend bool operator==(const LogStats&, const LogStats&) = default;
};

LogStats log_stats(const EventLog& log);

}  // namespace fcrepair
