#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcrepair/event_log.hpp"

namespace fcrepair {

using StateId = std::uint32_t;
using EventId = std::int32_t;

/// Event id of silent arcs. Silent arcs are allowed, τ is never part of the
/// alphabet.
inline constexpr EventId kTauEvent = -1;

struct Arc {
    StateId source;
    EventId event;
    StateId target;

    friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Labelled transition system (S, E, B, s_i, S_fin) with dense state ids.
///
/// The alphabet is kept sorted, so event ids order events alphabetically.
/// Arcs are stored sorted by (source, event, target) without duplicates.
class TransitionSystem {
public:
    TransitionSystem() : TransitionSystem({}, 1, {}, 0, {}) {}

    /// Throws PreconditionError when the alphabet is not sorted and unique,
    /// contains τ, or when an arc, the initial state or a final state is out
    /// of range.
    TransitionSystem(std::vector<Label> events, std::size_t num_states, std::vector<Arc> arcs,
                     StateId initial, const std::vector<StateId>& finals);

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t num_events() const noexcept { return events_.size(); }
    const std::vector<Label>& events() const noexcept { return events_; }

    std::optional<EventId> event_id(std::string_view label) const;
    /// Alphabet label, or "τ" for kTauEvent.
    std::string_view event_name(EventId event) const;

    std::span<const Arc> arcs() const noexcept { return arcs_; }
    std::span<const Arc> outgoing(StateId s) const;
    /// Indices into arcs() of the arcs entering `s`.
    std::span<const std::size_t> incoming(StateId s) const;
    /// Indices into arcs() of the arcs labelled `event` (kTauEvent allowed).
    std::span<const std::size_t> arcs_of(EventId event) const;

    StateId initial() const noexcept { return initial_; }
    bool is_final(StateId s) const { return finals_.at(s); }
    std::vector<StateId> finals() const;

    bool tau_free() const noexcept { return tau_free_; }
    /// τ-free and no state has two outgoing arcs with the same label.
    bool deterministic() const noexcept { return deterministic_; }

    /// Target of the `event` arc leaving `s` in a deterministic system.
    std::optional<StateId> successor(StateId s, EventId event) const;

    /// Same graph with a different initial state.
    TransitionSystem with_initial(StateId s) const;

    friend bool operator==(const TransitionSystem&, const TransitionSystem&) = default;

private:
    std::vector<Label> events_;
    std::size_t num_states_ = 0;
    std::vector<Arc> arcs_;
    StateId initial_ = 0;
    std::vector<bool> finals_;
    std::vector<std::size_t> out_offsets_;
    std::vector<std::size_t> in_offsets_;
    std::vector<std::size_t> in_arcs_;
    std::vector<std::vector<std::size_t>> by_event_;  // slot 0 holds τ
    bool tau_free_ = true;
    bool deterministic_ = true;
};

inline constexpr std::size_t kDefaultSubsetBound = 100'000;

/// Tree-shaped system with one state per distinct prefix of the log.
TransitionSystem build_prefix_tree(const EventLog& log);

/// Drops states unreachable from the initial state and states that cannot
/// reach a final state, then renumbers in BFS order. An empty language
/// yields the single-state system without arcs and finals.
TransitionSystem trim(const TransitionSystem& ts);

/// Renumbers reachable states in BFS order from the initial state, visiting
/// arcs in (event, target) order. Unreachable states are dropped.
TransitionSystem canonical_order(const TransitionSystem& ts);

/// Minimal deterministic system accepting the same language (trimmed,
/// partition refinement, BFS numbering). Throws PreconditionError for
/// non-deterministic or silent input.
TransitionSystem minimize(const TransitionSystem& ts);

/// Determinizes via ε-closure and subset construction, then minimizes.
/// Throws ResourceLimitError when more than `max_subsets` subsets appear.
TransitionSystem tau_closure(const TransitionSystem& ts, std::size_t max_subsets = kDefaultSubsetBound);

/// Product of two deterministic τ-free systems over the shared labels;
/// the result is minimized.
TransitionSystem intersect(const TransitionSystem& a, const TransitionSystem& b);

/// Whether `trace` is feasible, possibly taking silent arcs.
bool accepts(const TransitionSystem& ts, const Trace& trace);

/// All feasible traces of length at most `max_len`.
std::set<Trace> language_bounded(const TransitionSystem& ts, std::size_t max_len);

/// Labels of the arcs leaving `s`. Throws PreconditionError for an unknown
/// state or a system with silent arcs.
std::set<Label> enabled_events(const TransitionSystem& ts, StateId s);

/// Whether two systems accept the same language (silent arcs allowed).
bool language_equal(const TransitionSystem& a, const TransitionSystem& b);

/// Whether the language is empty.
bool language_empty(const TransitionSystem& ts);

/// Arc list as `source<TAB>label<TAB>target` lines.
std::string to_tsv(const TransitionSystem& ts);

}  // namespace fcrepair
