#include "fcrepair/petri_net.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fcrepair/error.hpp"

namespace fcrepair {

std::uint64_t Marking::total() const {
    return std::accumulate(tokens_.begin(), tokens_.end(), std::uint64_t{0});
}

bool Marking::covers(const Marking& other) const {
    if (other.size() != size()) return false;
    for (std::size_t p = 0; p < size(); ++p)
        if (other.tokens_[p] > tokens_[p]) return false;
    return true;
}

Marking Marking::extended(std::uint32_t tokens) const {
    auto copy = tokens_;
    copy.push_back(tokens);
    return Marking(std::move(copy));
}

std::size_t MarkingHash::operator()(const Marking& m) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (const auto v : m.tokens()) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

namespace {

void insert_sorted(std::vector<std::size_t>& v, std::size_t x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

}  // namespace

bool PetriNet::id_taken(std::string_view id) const { return find_place(id) || find_transition(id); }

PlaceIndex PetriNet::add_place(std::string id, std::string name) {
    if (id.empty()) throw PreconditionError("place id must not be empty");
    if (id_taken(id)) throw PreconditionError("duplicate node id '" + id + "'");
    places_.push_back({std::move(id), std::move(name)});
    producers_.emplace_back();
    consumers_.emplace_back();
    return places_.size() - 1;
}

TransitionIndex PetriNet::add_transition(std::string id, std::optional<Label> label) {
    if (id.empty()) throw PreconditionError("transition id must not be empty");
    if (id_taken(id)) throw PreconditionError("duplicate node id '" + id + "'");
    if (label) {
        if (label->empty() || *label == kSilentLabel)
            throw PreconditionError("transition '" + id + "' has an invalid label");
        if (find_label(*label))
            throw PreconditionError("label '" + *label + "' is used by more than one non-silent transition");
    }
    transitions_.push_back({std::move(id), std::move(label)});
    pre_.emplace_back();
    post_.emplace_back();
    return transitions_.size() - 1;
}

void PetriNet::add_input_arc(PlaceIndex p, TransitionIndex t) {
    auto& pre = pre_.at(t);
    if (p >= places_.size()) throw PreconditionError("arc from unknown place");
    if (std::binary_search(pre.begin(), pre.end(), p))
        throw PreconditionError("duplicate arc " + places_[p].id + " -> " + transitions_[t].id);
    insert_sorted(pre, p);
    insert_sorted(consumers_[p], t);
    ++num_arcs_;
}

void PetriNet::add_output_arc(TransitionIndex t, PlaceIndex p) {
    auto& post = post_.at(t);
    if (p >= places_.size()) throw PreconditionError("arc to unknown place");
    if (std::binary_search(post.begin(), post.end(), p))
        throw PreconditionError("duplicate arc " + transitions_[t].id + " -> " + places_[p].id);
    insert_sorted(post, p);
    insert_sorted(producers_[p], t);
    ++num_arcs_;
}

std::optional<PlaceIndex> PetriNet::find_place(std::string_view id) const {
    for (std::size_t p = 0; p < places_.size(); ++p)
        if (places_[p].id == id) return p;
    return std::nullopt;
}

std::optional<TransitionIndex> PetriNet::find_transition(std::string_view id) const {
    for (std::size_t t = 0; t < transitions_.size(); ++t)
        if (transitions_[t].id == id) return t;
    return std::nullopt;
}

std::optional<TransitionIndex> PetriNet::find_label(std::string_view label) const {
    for (std::size_t t = 0; t < transitions_.size(); ++t)
        if (transitions_[t].label && *transitions_[t].label == label) return t;
    return std::nullopt;
}

std::vector<Label> PetriNet::labels() const {
    std::vector<Label> out;
    for (const auto& t : transitions_)
        if (t.label) out.push_back(*t.label);
    std::sort(out.begin(), out.end());
    return out;
}

void NetSystem::validate() const {
    const auto n = net.num_places();
    if (initial.size() != n) throw PreconditionError("initial marking does not match the place count");
    for (const auto& f : finals)
        if (f.size() != n) throw PreconditionError("final marking does not match the place count");
}

void NetSystem::add_final(Marking m) {
    const auto it = std::lower_bound(finals.begin(), finals.end(), m);
    if (it == finals.end() || *it != m) finals.insert(it, std::move(m));
}

std::string format_marking(const PetriNet& net, const Marking& m) {
    std::ostringstream out;
    out << '[';
    bool first = true;
    for (std::size_t p = 0; p < m.size(); ++p) {
        if (m[p] == 0) continue;
        if (!first) out << ',';
        first = false;
        out << net.place(p).id;
        if (m[p] > 1) out << ':' << m[p];
    }
    out << ']';
    return out.str();
}

Marking preset(const PetriNet& net, TransitionIndex t) {
    if (t >= net.num_transitions()) throw PreconditionError("unknown transition " + std::to_string(t));
    Marking m(net.num_places());
    for (const auto p : net.inputs(t)) m[p] = 1;
    return m;
}

Marking postset(const PetriNet& net, TransitionIndex t) {
    if (t >= net.num_transitions()) throw PreconditionError("unknown transition " + std::to_string(t));
    Marking m(net.num_places());
    for (const auto p : net.outputs(t)) m[p] = 1;
    return m;
}

bool is_enabled(const PetriNet& net, const Marking& m, TransitionIndex t) {
    for (const auto p : net.inputs(t))
        if (m[p] == 0) return false;
    return true;
}

Marking fire(const PetriNet& net, const Marking& m, TransitionIndex t) {
    if (t >= net.num_transitions()) throw PreconditionError("unknown transition " + std::to_string(t));
    if (m.size() != net.num_places()) throw PreconditionError("marking does not match the place count");
    if (!is_enabled(net, m, t))
        throw PreconditionError("transition '" + net.transition(t).id + "' is not enabled in " + format_marking(net, m));
    Marking next = m;
    for (const auto p : net.inputs(t)) --next[p];
    for (const auto p : net.outputs(t)) ++next[p];
    return next;
}

ReachabilityGraph reachability_graph(const NetSystem& sys, std::size_t max_states) {
    sys.validate();
    const auto& net = sys.net;
    auto labels = net.labels();
    std::vector<EventId> event_of(net.num_transitions(), kTauEvent);
    for (std::size_t t = 0; t < net.num_transitions(); ++t)
        if (const auto& l = net.transition(t).label)
            event_of[t] = static_cast<EventId>(std::lower_bound(labels.begin(), labels.end(), *l) - labels.begin());

    ReachabilityGraph out;
    out.transition_fired.assign(net.num_transitions(), false);
    std::unordered_map<Marking, StateId, MarkingHash> index;
    std::vector<Arc> arcs;

    auto intern = [&](const Marking& m) {
        const auto [it, inserted] = index.try_emplace(m, static_cast<StateId>(out.markings.size()));
        if (inserted) {
            if (out.markings.size() >= max_states)
                throw ResourceLimitError("reachability graph exceeded the state bound", max_states);
            out.markings.push_back(m);
            if (out.safe && std::any_of(m.tokens().begin(), m.tokens().end(), [](auto v) { return v > 1; })) {
                out.safe = false;
                out.first_unsafe = it->second;
            }
        }
        return it->second;
    };

    intern(sys.initial);
    for (std::size_t head = 0; head < out.markings.size(); ++head) {
        for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
            if (!is_enabled(net, out.markings[head], t)) continue;
            out.transition_fired[t] = true;
            const auto target = intern(fire(net, out.markings[head], t));
            arcs.push_back({static_cast<StateId>(head), event_of[t], target});
        }
    }

    std::vector<StateId> finals;
    for (const auto& f : sys.finals)
        if (const auto it = index.find(f); it != index.end()) finals.push_back(it->second);
    out.ts = TransitionSystem(std::move(labels), out.markings.size(), std::move(arcs), 0, finals);
    return out;
}

bool accepts(const NetSystem& sys, const Trace& trace, std::size_t max_states) {
    sys.validate();
    const auto& net = sys.net;
    // Token game on the set of markings reachable by the prefix read so far;
    // works on unbounded nets as long as the silent closures stay finite.
    std::unordered_set<Marking, MarkingHash> current{sys.initial};
    auto close = [&](std::unordered_set<Marking, MarkingHash> set) {
        std::vector<Marking> stack(set.begin(), set.end());
        while (!stack.empty()) {
            const auto m = std::move(stack.back());
            stack.pop_back();
            for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
                if (net.transition(t).label || !is_enabled(net, m, t)) continue;
                auto next = fire(net, m, t);
                if (set.insert(next).second) {
                    if (set.size() > max_states)
                        throw ResourceLimitError("silent closure exceeded the state bound", max_states);
                    stack.push_back(std::move(next));
                }
            }
        }
        return set;
    };
    current = close(std::move(current));
    for (const auto& label : trace) {
        std::unordered_set<Marking, MarkingHash> next;
        for (const auto& m : current)
            for (TransitionIndex t = 0; t < net.num_transitions(); ++t)
                if (net.transition(t).label == label && is_enabled(net, m, t)) next.insert(fire(net, m, t));
        if (next.empty()) return false;
        current = close(std::move(next));
    }
    return std::any_of(sys.finals.begin(), sys.finals.end(), [&](const Marking& f) { return current.count(f) > 0; });
}

FreeChoiceCheck is_free_choice(const PetriNet& net) {
    FreeChoiceCheck out;
    for (TransitionIndex a = 0; a < net.num_transitions(); ++a) {
        for (TransitionIndex b = a + 1; b < net.num_transitions(); ++b) {
            const auto& pa = net.inputs(a);
            const auto& pb = net.inputs(b);
            if (pa == pb) continue;
            std::vector<PlaceIndex> shared;
            std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(shared));
            if (!shared.empty()) out.violations.emplace_back(a, b);
        }
    }
    out.ok = out.violations.empty();
    return out;
}

WorkflowCheck is_workflow_net(const PetriNet& net) {
    WorkflowCheck out;
    for (PlaceIndex p = 0; p < net.num_places(); ++p) {
        if (net.producers(p).empty()) out.source_candidates.push_back(p);
        if (net.consumers(p).empty()) out.sink_candidates.push_back(p);
    }
    auto names = [&](const std::vector<PlaceIndex>& ps) {
        std::string s;
        for (const auto p : ps) s += (s.empty() ? "" : ", ") + net.place(p).id;
        return s;
    };
    if (out.source_candidates.size() == 1) {
        out.source = out.source_candidates.front();
    } else {
        out.diagnostics.push_back("expected exactly one source place, found " +
                                  std::to_string(out.source_candidates.size()) +
                                  (out.source_candidates.empty() ? "" : ": " + names(out.source_candidates)));
    }
    if (out.sink_candidates.size() == 1) {
        out.sink = out.sink_candidates.front();
    } else {
        out.diagnostics.push_back("expected exactly one sink place, found " + std::to_string(out.sink_candidates.size()) +
                                  (out.sink_candidates.empty() ? "" : ": " + names(out.sink_candidates)));
    }

    // Node numbering: places [0, P), transitions [P, P+T).
    const auto np = net.num_places();
    const auto total = np + net.num_transitions();
    auto successors = [&](std::size_t node) {
        if (node < np) return net.consumers(node);
        std::vector<std::size_t> ps = net.outputs(node - np);
        return ps;
    };
    auto predecessors = [&](std::size_t node) {
        if (node < np) return net.producers(node);
        std::vector<std::size_t> ps = net.inputs(node - np);
        return ps;
    };
    auto search = [&](const std::vector<PlaceIndex>& roots, bool forward) {
        std::vector<bool> seen(total, false);
        std::vector<std::size_t> stack(roots.begin(), roots.end());
        for (const auto r : roots) seen[r] = true;
        while (!stack.empty()) {
            const auto n = stack.back();
            stack.pop_back();
            for (auto m : forward ? successors(n) : predecessors(n)) {
                if (n < np) m += np;  // place -> transition index shift
                if (!seen[m]) {
                    seen[m] = true;
                    stack.push_back(m);
                }
            }
        }
        return seen;
    };
    const auto from_source = search(out.source_candidates, true);
    const auto to_sink = search(out.sink_candidates, false);
    auto node_name = [&](std::size_t n) {
        return n < np ? "place " + net.place(n).id : "transition " + net.transition(n - np).id;
    };
    for (std::size_t n = 0; n < total; ++n) {
        const bool isolated = n < np ? net.producers(n).empty() && net.consumers(n).empty()
                                     : net.inputs(n - np).empty() && net.outputs(n - np).empty();
        if (isolated && total > 1) {
            out.diagnostics.push_back(node_name(n) + " is isolated and lies on no source-to-sink path");
        } else if (!from_source[n] || !to_sink[n]) {
            out.diagnostics.push_back(node_name(n) + " is not on a path from the source to the sink");
        }
    }
    out.ok = out.diagnostics.empty();
    return out;
}

namespace {

/// States of `ts` that can reach one of `targets`.
std::vector<bool> can_reach(const TransitionSystem& ts, const std::vector<StateId>& targets) {
    std::vector<bool> seen(ts.num_states(), false);
    std::vector<StateId> stack;
    for (const auto t : targets) {
        seen[t] = true;
        stack.push_back(t);
    }
    const auto arcs = ts.arcs();
    while (!stack.empty()) {
        const auto s = stack.back();
        stack.pop_back();
        for (const auto i : ts.incoming(s))
            if (!seen[arcs[i].source]) {
                seen[arcs[i].source] = true;
                stack.push_back(arcs[i].source);
            }
    }
    return seen;
}

}  // namespace

SoundnessReport check_soundness(const NetSystem& sys, std::size_t max_states) {
    const auto wf = is_workflow_net(sys.net);
    if (!wf.ok) throw PreconditionError("soundness needs a workflow net: " + wf.diagnostics.front());
    Marking source_only(sys.net.num_places());
    source_only[*wf.source] = 1;
    if (sys.initial != source_only)
        throw PreconditionError("soundness needs the initial marking [" + sys.net.place(*wf.source).id + "]");
    Marking sink_only(sys.net.num_places());
    sink_only[*wf.sink] = 1;

    const auto rg = reachability_graph(sys, max_states);
    SoundnessReport report;
    report.safe = rg.safe;
    report.reachable_markings = rg.markings.size();

    std::vector<StateId> sink_states;
    for (StateId s = 0; s < rg.markings.size(); ++s)
        if (rg.markings[s] == sink_only) sink_states.push_back(s);
    const auto reaches_sink = can_reach(rg.ts, sink_states);
    const auto reaches_final = can_reach(rg.ts, rg.ts.finals());

    for (StateId s = 0; s < rg.markings.size(); ++s) {
        const auto& m = rg.markings[s];
        if (!reaches_sink[s]) report.unreachable_final_from.push_back(m);
        if (m[*wf.sink] > 0 && m != sink_only) report.improper_completions.push_back(m);
        if (!reaches_final[s]) report.no_final_reachable_from.push_back(m);
    }
    for (TransitionIndex t = 0; t < sys.net.num_transitions(); ++t)
        if (!rg.transition_fired[t]) report.dead_transitions.push_back(t);

    report.is_sound = report.unreachable_final_from.empty() && report.improper_completions.empty() &&
                      report.dead_transitions.empty();
    report.always_reaches_some_final = report.no_final_reachable_from.empty();
    return report;
}

NetSystem add_place(const NetSystem& sys, const PlaceSpec& spec) {
    sys.validate();
    NetSystem out = sys;
    auto id = spec.id;
    if (id.empty()) {
        for (std::size_t k = 1;; ++k) {
            id = "r" + std::to_string(k);
            if (!out.net.find_place(id) && !out.net.find_transition(id)) break;
        }
    }
    const auto p = out.net.add_place(id, id);
    for (const auto t : spec.entering) out.net.add_output_arc(t, p);
    for (const auto t : spec.exiting) out.net.add_input_arc(p, t);

    out.initial = sys.initial.extended(spec.mark_initial ? 1 : 0);
    out.finals.clear();
    for (const auto& f : sys.finals) {
        out.add_final(f.extended(0));
        if (spec.extend_finals) out.add_final(f.extended(1));
    }
    return out;
}

NetSize net_size(const PetriNet& net) { return {net.num_places(), net.num_transitions(), net.num_arcs()}; }

}  // namespace fcrepair
