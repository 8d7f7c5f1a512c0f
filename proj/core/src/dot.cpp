#include "fcrepair/dot.hpp"

#include <sstream>

namespace fcrepair {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string to_dot(const TransitionSystem& ts, const std::string& name) {
    std::ostringstream out;
    out << "digraph " << quote(name) << " {\n  rankdir=LR;\n  node [shape=circle];\n";
    out << "  start [shape=point];\n";
    for (StateId s = 0; s < ts.num_states(); ++s) {
        out << "  s" << s + 1;
        if (ts.is_final(s)) out << " [shape=doublecircle]";
        out << ";\n";
    }
    out << "  start -> s" << ts.initial() + 1 << ";\n";
    for (const auto& a : ts.arcs())
        out << "  s" << a.source + 1 << " -> s" << a.target + 1 << " [label="
            << quote(a.event == kTauEvent ? std::string(kSilentLabel) : std::string(ts.event_name(a.event))) << "];\n";
    out << "}\n";
    return out.str();
}

std::string to_dot(const NetSystem& sys, const std::string& name) {
    const auto& net = sys.net;
    std::ostringstream out;
    out << "digraph " << quote(name) << " {\n  rankdir=LR;\n";
    for (PlaceIndex p = 0; p < net.num_places(); ++p) {
        const auto tokens = p < sys.initial.size() ? sys.initial[p] : 0u;
        std::string label;
        for (std::uint32_t k = 0; k < tokens; ++k) label += "&bull;";
        out << "  " << quote("p:" + net.place(p).id) << " [shape=circle, label=\"" << label
            << "\", xlabel=" << quote(net.place(p).id) << "];\n";
    }
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
        const auto& tr = net.transition(t);
        out << "  " << quote("t:" + tr.id) << " [shape=box";
        if (tr.silent()) {
            out << ", style=filled, fillcolor=black, label=\"\"";
        } else {
            out << ", label=" << quote(*tr.label);
        }
        out << "];\n";
    }
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
        for (const auto p : net.inputs(t))
            out << "  " << quote("p:" + net.place(p).id) << " -> " << quote("t:" + net.transition(t).id) << ";\n";
        for (const auto p : net.outputs(t))
            out << "  " << quote("t:" + net.transition(t).id) << " -> " << quote("p:" + net.place(p).id) << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace fcrepair
