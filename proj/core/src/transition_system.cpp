#include "fcrepair/transition_system.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <sstream>

#include "fcrepair/error.hpp"

namespace fcrepair {

TransitionSystem::TransitionSystem(std::vector<Label> events, std::size_t num_states, std::vector<Arc> arcs,
                                   StateId initial, const std::vector<StateId>& finals)
    : events_(std::move(events)), num_states_(num_states), arcs_(std::move(arcs)), initial_(initial) {
    if (num_states_ == 0) throw PreconditionError("a transition system needs at least one state");
    if (!std::is_sorted(events_.begin(), events_.end()) ||
        std::adjacent_find(events_.begin(), events_.end()) != events_.end())
        throw PreconditionError("alphabet must be sorted and free of duplicates");
    for (const auto& e : events_) {
        if (e.empty() || e == kSilentLabel) throw PreconditionError("invalid alphabet label '" + e + "'");
    }
    if (initial_ >= num_states_) throw PreconditionError("initial state out of range");
    finals_.assign(num_states_, false);
    for (const auto f : finals) {
        if (f >= num_states_) throw PreconditionError("final state out of range");
        finals_[f] = true;
    }
    const auto num_events = static_cast<EventId>(events_.size());
    for (const auto& a : arcs_) {
        if (a.source >= num_states_ || a.target >= num_states_)
            throw PreconditionError("arc endpoint out of range");
        if (a.event < kTauEvent || a.event >= num_events) throw PreconditionError("arc label out of range");
    }
    std::sort(arcs_.begin(), arcs_.end());
    arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());

    out_offsets_.assign(num_states_ + 1, 0);
    in_offsets_.assign(num_states_ + 1, 0);
    by_event_.assign(events_.size() + 1, {});
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
        const auto& a = arcs_[i];
        ++out_offsets_[a.source + 1];
        ++in_offsets_[a.target + 1];
        by_event_[static_cast<std::size_t>(a.event + 1)].push_back(i);
        if (a.event == kTauEvent) tau_free_ = false;
        if (i > 0 && arcs_[i - 1].source == a.source && arcs_[i - 1].event == a.event) deterministic_ = false;
    }
    deterministic_ = deterministic_ && tau_free_;
    for (std::size_t s = 0; s < num_states_; ++s) {
        out_offsets_[s + 1] += out_offsets_[s];
        in_offsets_[s + 1] += in_offsets_[s];
    }
    in_arcs_.assign(arcs_.size(), 0);
    auto fill = in_offsets_;
    for (std::size_t i = 0; i < arcs_.size(); ++i) in_arcs_[fill[arcs_[i].target]++] = i;
}

std::optional<EventId> TransitionSystem::event_id(std::string_view label) const {
    const auto it = std::lower_bound(events_.begin(), events_.end(), label);
    if (it == events_.end() || *it != label) return std::nullopt;
    return static_cast<EventId>(it - events_.begin());
}

std::string_view TransitionSystem::event_name(EventId event) const {
    if (event == kTauEvent) return kSilentLabel;
    return events_.at(static_cast<std::size_t>(event));
}

std::span<const Arc> TransitionSystem::outgoing(StateId s) const {
    return std::span<const Arc>(arcs_).subspan(out_offsets_.at(s), out_offsets_[s + 1] - out_offsets_[s]);
}

std::span<const std::size_t> TransitionSystem::incoming(StateId s) const {
    return std::span<const std::size_t>(in_arcs_).subspan(in_offsets_.at(s), in_offsets_[s + 1] - in_offsets_[s]);
}

std::span<const std::size_t> TransitionSystem::arcs_of(EventId event) const {
    return by_event_.at(static_cast<std::size_t>(event + 1));
}

std::vector<StateId> TransitionSystem::finals() const {
    std::vector<StateId> out;
    for (StateId s = 0; s < num_states_; ++s)
        if (finals_[s]) out.push_back(s);
    return out;
}

std::optional<StateId> TransitionSystem::successor(StateId s, EventId event) const {
    const auto out = outgoing(s);
    const auto it = std::lower_bound(out.begin(), out.end(), Arc{s, event, 0});
    if (it == out.end() || it->event != event) return std::nullopt;
    return it->target;
}

TransitionSystem TransitionSystem::with_initial(StateId s) const {
    return TransitionSystem(events_, num_states_, arcs_, s, finals());
}

namespace {

using StateSet = std::vector<StateId>;  // sorted, unique

/// Adds every state reachable through silent arcs.
StateSet silent_closure(const TransitionSystem& ts, StateSet states) {
    if (ts.tau_free()) return states;
    std::vector<bool> seen(ts.num_states(), false);
    std::vector<StateId> stack;
    for (const auto s : states) {
        seen[s] = true;
        stack.push_back(s);
    }
    while (!stack.empty()) {
        const auto s = stack.back();
        stack.pop_back();
        for (const auto& a : ts.outgoing(s)) {
            if (a.event != kTauEvent) break;  // τ sorts first
            if (!seen[a.target]) {
                seen[a.target] = true;
                states.push_back(a.target);
                stack.push_back(a.target);
            }
        }
    }
    std::sort(states.begin(), states.end());
    return states;
}

StateSet step(const TransitionSystem& ts, const StateSet& from, EventId event) {
    StateSet next;
    for (const auto s : from)
        for (const auto& a : ts.outgoing(s))
            if (a.event == event) next.push_back(a.target);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    return silent_closure(ts, std::move(next));
}

bool contains_final(const TransitionSystem& ts, const StateSet& states) {
    return std::any_of(states.begin(), states.end(), [&](StateId s) { return ts.is_final(s); });
}

std::vector<bool> forward_reachable(const TransitionSystem& ts) {
    std::vector<bool> seen(ts.num_states(), false);
    std::vector<StateId> stack{ts.initial()};
    seen[ts.initial()] = true;
    while (!stack.empty()) {
        const auto s = stack.back();
        stack.pop_back();
        for (const auto& a : ts.outgoing(s))
            if (!seen[a.target]) {
                seen[a.target] = true;
                stack.push_back(a.target);
            }
    }
    return seen;
}

std::vector<bool> backward_reachable(const TransitionSystem& ts) {
    std::vector<bool> seen(ts.num_states(), false);
    std::vector<StateId> stack = ts.finals();
    for (const auto s : stack) seen[s] = true;
    const auto arcs = ts.arcs();
    while (!stack.empty()) {
        const auto s = stack.back();
        stack.pop_back();
        for (const auto i : ts.incoming(s)) {
            const auto src = arcs[i].source;
            if (!seen[src]) {
                seen[src] = true;
                stack.push_back(src);
            }
        }
    }
    return seen;
}

/// Rebuilds `ts` restricted to `keep`, numbering kept states in BFS order.
TransitionSystem restrict_bfs(const TransitionSystem& ts, const std::vector<bool>& keep) {
    std::vector<StateId> id(ts.num_states(), 0);
    std::vector<bool> placed(ts.num_states(), false);
    std::vector<StateId> order{ts.initial()};
    placed[ts.initial()] = true;
    for (std::size_t head = 0; head < order.size(); ++head) {
        const auto s = order[head];
        id[s] = static_cast<StateId>(head);
        for (const auto& a : ts.outgoing(s))
            if (keep[a.target] && !placed[a.target]) {
                placed[a.target] = true;
                order.push_back(a.target);
            }
    }
    std::vector<Arc> arcs;
    std::vector<StateId> finals;
    for (const auto s : order) {
        if (ts.is_final(s)) finals.push_back(id[s]);
        for (const auto& a : ts.outgoing(s))
            if (placed[a.target]) arcs.push_back({id[s], a.event, id[a.target]});
    }
    return TransitionSystem(ts.events(), order.size(), std::move(arcs), 0, finals);
}

void require_deterministic(const TransitionSystem& ts, const char* op) {
    if (!ts.deterministic())
        throw PreconditionError(std::string(op) + " needs a deterministic transition system without silent arcs");
}

}  // namespace

TransitionSystem build_prefix_tree(const EventLog& log) {
    std::vector<Label> events(log.alphabet().begin(), log.alphabet().end());
    // children[s] maps label -> child; std::map keeps BFS numbering canonical
    std::vector<std::map<Label, StateId>> children(1);
    std::vector<bool> final_flag(1, false);
    for (const auto& [trace, count] : log.traces()) {
        StateId s = 0;
        for (const auto& label : trace) {
            auto it = children[s].find(label);
            if (it == children[s].end()) {
                const auto child = static_cast<StateId>(children.size());
                children[s].emplace(label, child);
                children.emplace_back();
                final_flag.push_back(false);
                s = child;
            } else {
                s = it->second;
            }
        }
        final_flag[s] = true;
    }
    std::vector<Arc> arcs;
    std::vector<StateId> finals;
    std::vector<StateId> order{0};
    std::vector<StateId> id(children.size(), 0);
    for (std::size_t head = 0; head < order.size(); ++head) {
        id[order[head]] = static_cast<StateId>(head);
        for (const auto& [label, child] : children[order[head]]) order.push_back(child);
    }
    for (const auto s : order) {
        if (final_flag[s]) finals.push_back(id[s]);
        for (const auto& [label, child] : children[s]) {
            const auto e = static_cast<EventId>(std::lower_bound(events.begin(), events.end(), label) - events.begin());
            arcs.push_back({id[s], e, id[child]});
        }
    }
    return TransitionSystem(std::move(events), children.size(), std::move(arcs), 0, finals);
}

TransitionSystem trim(const TransitionSystem& ts) {
    const auto fwd = forward_reachable(ts);
    const auto bwd = backward_reachable(ts);
    if (!bwd[ts.initial()]) return TransitionSystem(ts.events(), 1, {}, 0, {});
    std::vector<bool> keep(ts.num_states());
    for (std::size_t s = 0; s < keep.size(); ++s) keep[s] = fwd[s] && bwd[s];
    return restrict_bfs(ts, keep);
}

TransitionSystem canonical_order(const TransitionSystem& ts) {
    return restrict_bfs(ts, std::vector<bool>(ts.num_states(), true));
}

TransitionSystem minimize(const TransitionSystem& input) {
    require_deterministic(input, "minimize");
    const auto ts = trim(input);
    const auto n = ts.num_states();

    // Moore-style partition refinement; blocks start as final / non-final.
    std::vector<std::uint32_t> block(n);
    for (StateId s = 0; s < n; ++s) block[s] = ts.is_final(s) ? 1 : 0;
    std::size_t num_blocks = 0;
    while (true) {
        std::map<std::vector<std::int64_t>, std::uint32_t> signatures;
        std::vector<std::uint32_t> next(n);
        for (StateId s = 0; s < n; ++s) {
            std::vector<std::int64_t> sig{block[s]};
            for (const auto& a : ts.outgoing(s)) {
                sig.push_back(a.event);
                sig.push_back(block[a.target]);
            }
            next[s] = signatures.try_emplace(std::move(sig), static_cast<std::uint32_t>(signatures.size()))
                          .first->second;
        }
        block = std::move(next);
        if (signatures.size() == num_blocks) break;
        num_blocks = signatures.size();
    }

    std::vector<Arc> arcs;
    std::vector<StateId> finals;
    for (StateId s = 0; s < n; ++s) {
        if (ts.is_final(s)) finals.push_back(block[s]);
        for (const auto& a : ts.outgoing(s)) arcs.push_back({block[s], a.event, block[a.target]});
    }
    std::sort(finals.begin(), finals.end());
    finals.erase(std::unique(finals.begin(), finals.end()), finals.end());
    return canonical_order(TransitionSystem(ts.events(), num_blocks, std::move(arcs), block[ts.initial()], finals));
}

TransitionSystem tau_closure(const TransitionSystem& ts, std::size_t max_subsets) {
    std::map<StateSet, StateId> index;
    std::vector<StateSet> subsets;
    std::vector<Arc> arcs;
    std::vector<StateId> finals;

    auto intern = [&](StateSet set) {
        const auto [it, inserted] = index.try_emplace(set, static_cast<StateId>(subsets.size()));
        if (inserted) {
            if (subsets.size() >= max_subsets)
                throw ResourceLimitError("subset construction exceeded the state bound", max_subsets);
            subsets.push_back(std::move(set));
        }
        return it->second;
    };

    intern(silent_closure(ts, {ts.initial()}));
    for (std::size_t head = 0; head < subsets.size(); ++head) {
        const auto current = static_cast<StateId>(head);
        if (contains_final(ts, subsets[head])) finals.push_back(current);
        std::map<EventId, StateSet> moves;
        for (const auto s : subsets[head])
            for (const auto& a : ts.outgoing(s))
                if (a.event != kTauEvent) moves[a.event].push_back(a.target);
        for (auto& [event, targets] : moves) {
            std::sort(targets.begin(), targets.end());
            targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
            const auto target = intern(silent_closure(ts, std::move(targets)));
            arcs.push_back({current, event, target});
        }
    }
    return minimize(TransitionSystem(ts.events(), subsets.size(), std::move(arcs), 0, finals));
}

TransitionSystem intersect(const TransitionSystem& a, const TransitionSystem& b) {
    require_deterministic(a, "intersect");
    require_deterministic(b, "intersect");
    std::vector<Label> events;
    std::set_intersection(a.events().begin(), a.events().end(), b.events().begin(), b.events().end(),
                          std::back_inserter(events));
    // event id translation a -> (shared, b)
    std::vector<std::pair<EventId, EventId>> translate(a.num_events(), {kTauEvent, kTauEvent});
    for (EventId e = 0; e < static_cast<EventId>(a.num_events()); ++e) {
        const auto& name = a.events()[static_cast<std::size_t>(e)];
        if (const auto in_b = b.event_id(name)) {
            const auto shared = static_cast<EventId>(std::lower_bound(events.begin(), events.end(), name) - events.begin());
            translate[static_cast<std::size_t>(e)] = {shared, *in_b};
        }
    }

    std::map<std::pair<StateId, StateId>, StateId> index;
    std::vector<std::pair<StateId, StateId>> pairs;
    auto intern = [&](std::pair<StateId, StateId> p) {
        const auto [it, inserted] = index.try_emplace(p, static_cast<StateId>(pairs.size()));
        if (inserted) pairs.push_back(p);
        return it->second;
    };
    std::vector<Arc> arcs;
    std::vector<StateId> finals;
    intern({a.initial(), b.initial()});
    for (std::size_t head = 0; head < pairs.size(); ++head) {
        const auto [sa, sb] = pairs[head];
        const auto current = static_cast<StateId>(head);
        if (a.is_final(sa) && b.is_final(sb)) finals.push_back(current);
        for (const auto& arc : a.outgoing(sa)) {
            const auto [shared, eb] = translate[static_cast<std::size_t>(arc.event)];
            if (shared == kTauEvent) continue;
            if (const auto tb = b.successor(sb, eb)) arcs.push_back({current, shared, intern({arc.target, *tb})});
        }
    }
    return minimize(TransitionSystem(std::move(events), pairs.size(), std::move(arcs), 0, finals));
}

bool accepts(const TransitionSystem& ts, const Trace& trace) {
    auto current = silent_closure(ts, {ts.initial()});
    for (const auto& label : trace) {
        const auto e = ts.event_id(label);
        if (!e) return false;
        current = step(ts, current, *e);
        if (current.empty()) return false;
    }
    return contains_final(ts, current);
}

std::set<Trace> language_bounded(const TransitionSystem& ts, std::size_t max_len) {
    std::set<Trace> out;
    Trace prefix;
    std::function<void(const StateSet&)> visit = [&](const StateSet& current) {
        if (contains_final(ts, current)) out.insert(prefix);
        if (prefix.size() == max_len) return;
        for (EventId e = 0; e < static_cast<EventId>(ts.num_events()); ++e) {
            auto next = step(ts, current, e);
            if (next.empty()) continue;
            prefix.emplace_back(ts.event_name(e));
            visit(next);
            prefix.pop_back();
        }
    };
    visit(silent_closure(ts, {ts.initial()}));
    return out;
}

std::set<Label> enabled_events(const TransitionSystem& ts, StateId s) {
    if (s >= ts.num_states()) throw PreconditionError("unknown state " + std::to_string(s));
    if (!ts.tau_free()) throw PreconditionError("enabled_events needs a system without silent arcs");
    std::set<Label> out;
    for (const auto& a : ts.outgoing(s)) out.emplace(ts.event_name(a.event));
    return out;
}

bool language_equal(const TransitionSystem& a, const TransitionSystem& b) {
    auto normal = [](const TransitionSystem& ts) { return ts.deterministic() ? minimize(ts) : tau_closure(ts); };
    const auto ma = normal(a);
    const auto mb = normal(b);
    if (ma.num_states() != mb.num_states() || ma.finals() != mb.finals() || ma.arcs().size() != mb.arcs().size())
        return false;
    // Both are BFS-numbered with arcs visited in alphabetical label order, so
    // equal languages give identical arc lists up to label names.
    for (std::size_t i = 0; i < ma.arcs().size(); ++i) {
        const auto& x = ma.arcs()[i];
        const auto& y = mb.arcs()[i];
        if (x.source != y.source || x.target != y.target || ma.event_name(x.event) != mb.event_name(y.event))
            return false;
    }
    return true;
}

bool language_empty(const TransitionSystem& ts) { return !backward_reachable(ts)[ts.initial()]; }

std::string to_tsv(const TransitionSystem& ts) {
    std::ostringstream out;
    for (const auto& a : ts.arcs()) out << a.source << '\t' << ts.event_name(a.event) << '\t' << a.target << '\n';
    return out.str();
}

}  // namespace fcrepair
