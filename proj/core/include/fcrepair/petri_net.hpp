#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fcrepair/event_log.hpp"
#include "fcrepair/transition_system.hpp"

namespace fcrepair {

using PlaceIndex = std::size_t;
using TransitionIndex = std::size_t;

/// Token counts indexed by place.
class Marking {
public:
    Marking() = default;
    explicit Marking(std::size_t num_places) : tokens_(num_places, 0) {}
    explicit Marking(std::vector<std::uint32_t> tokens) : tokens_(std::move(tokens)) {}

    std::size_t size() const noexcept { return tokens_.size(); }
    std::uint32_t operator[](PlaceIndex p) const { return tokens_[p]; }
    std::uint32_t& operator[](PlaceIndex p) { return tokens_[p]; }
    const std::vector<std::uint32_t>& tokens() const noexcept { return tokens_; }

    std::uint64_t total() const;
    /// Multiset inclusion: `other` ⊆ *this.
    bool covers(const Marking& other) const;
    /// Copy with one extra place holding `tokens`.
    Marking extended(std::uint32_t tokens) const;

    friend auto operator<=>(const Marking&, const Marking&) = default;

private:
    std::vector<std::uint32_t> tokens_;
};

struct MarkingHash {
    std::size_t operator()(const Marking& m) const noexcept;
};

struct Place {
    std::string id;
    std::string name;
};

struct Transition {
    std::string id;
    std::optional<Label> label;  ///< nullopt for silent transitions

    bool silent() const noexcept { return !label.has_value(); }
};

/// Labelled Petri net (P, T, F, l) with unweighted arcs. Non-silent labels
/// are unique; node ids are unique across places and transitions.
class PetriNet {
public:
    PlaceIndex add_place(std::string id, std::string name = {});
    TransitionIndex add_transition(std::string id, std::optional<Label> label);
    /// Arc p -> t. Throws PreconditionError on a duplicate arc.
    void add_input_arc(PlaceIndex p, TransitionIndex t);
    /// Arc t -> p. Throws PreconditionError on a duplicate arc.
    void add_output_arc(TransitionIndex t, PlaceIndex p);

    std::size_t num_places() const noexcept { return places_.size(); }
    std::size_t num_transitions() const noexcept { return transitions_.size(); }
    std::size_t num_arcs() const noexcept { return num_arcs_; }

    const Place& place(PlaceIndex p) const { return places_.at(p); }
    const Transition& transition(TransitionIndex t) const { return transitions_.at(t); }
    const std::vector<Place>& places() const noexcept { return places_; }
    const std::vector<Transition>& transitions() const noexcept { return transitions_; }

    /// Input places of t (sorted).
    const std::vector<PlaceIndex>& inputs(TransitionIndex t) const { return pre_.at(t); }
    /// Output places of t (sorted).
    const std::vector<PlaceIndex>& outputs(TransitionIndex t) const { return post_.at(t); }
    /// Transitions producing into p (sorted).
    const std::vector<TransitionIndex>& producers(PlaceIndex p) const { return producers_.at(p); }
    /// Transitions consuming from p (sorted).
    const std::vector<TransitionIndex>& consumers(PlaceIndex p) const { return consumers_.at(p); }

    std::optional<PlaceIndex> find_place(std::string_view id) const;
    std::optional<TransitionIndex> find_transition(std::string_view id) const;
    std::optional<TransitionIndex> find_label(std::string_view label) const;

    /// Sorted non-silent labels.
    std::vector<Label> labels() const;

private:
    bool id_taken(std::string_view id) const;

    std::vector<Place> places_;
    std::vector<Transition> transitions_;
    std::vector<std::vector<PlaceIndex>> pre_;
    std::vector<std::vector<PlaceIndex>> post_;
    std::vector<std::vector<TransitionIndex>> producers_;
    std::vector<std::vector<TransitionIndex>> consumers_;
    std::size_t num_arcs_ = 0;
};

/// Marked net with an explicit set of final markings.
struct NetSystem {
    PetriNet net;
    Marking initial;
    std::vector<Marking> finals;  ///< sorted, unique

    /// Throws PreconditionError when a marking does not match the place count.
    void validate() const;
    void add_final(Marking m);
};

/// Human form of a marking: "[p1,p3]" or "[p1:2]".
std::string format_marking(const PetriNet& net, const Marking& m);

/// Characteristic multiset of the input places of t.
Marking preset(const PetriNet& net, TransitionIndex t);
/// Characteristic multiset of the output places of t.
Marking postset(const PetriNet& net, TransitionIndex t);

bool is_enabled(const PetriNet& net, const Marking& m, TransitionIndex t);
/// m - •t + t•. Throws PreconditionError when t is not enabled.
Marking fire(const PetriNet& net, const Marking& m, TransitionIndex t);

inline constexpr std::size_t kDefaultMaxStates = 1'000'000;

struct ReachabilityGraph {
    /// States are reachable markings in BFS discovery order; arcs carry the
    /// transition label or τ. The alphabet is the net's non-silent labels.
    TransitionSystem ts;
    std::vector<Marking> markings;
    std::vector<bool> transition_fired;
    bool safe = true;
    std::optional<StateId> first_unsafe;
};

/// Explores all reachable markings. Throws ResourceLimitError when more than
/// `max_states` markings are found.
ReachabilityGraph reachability_graph(const NetSystem& sys, std::size_t max_states = kDefaultMaxStates);

/// Replays the trace with the token game, following silent transitions.
/// Does not need a bounded net; throws ResourceLimitError when a silent
/// closure exceeds `max_states` markings.
bool accepts(const NetSystem& sys, const Trace& trace, std::size_t max_states = kDefaultMaxStates);

struct FreeChoiceCheck {
    bool ok = true;
    std::vector<std::pair<TransitionIndex, TransitionIndex>> violations;
};

/// Every pair of transitions has disjoint or equal presets.
FreeChoiceCheck is_free_choice(const PetriNet& net);

struct WorkflowCheck {
    bool ok = false;
    std::optional<PlaceIndex> source;
    std::optional<PlaceIndex> sink;
    std::vector<PlaceIndex> source_candidates;
    std::vector<PlaceIndex> sink_candidates;
    std::vector<std::string> diagnostics;
};

/// Unique source place, unique sink place, every node on a source-sink path.
WorkflowCheck is_workflow_net(const PetriNet& net);

struct SoundnessReport {
    bool is_sound = false;
    /// Reachable markings from which [o] cannot be reached.
    std::vector<Marking> unreachable_final_from;
    /// Reachable markings covering [o] other than [o] itself.
    std::vector<Marking> improper_completions;
    std::vector<TransitionIndex> dead_transitions;
    bool safe = true;
    std::size_t reachable_markings = 0;
    /// Relaxed property for multi-final systems: every reachable marking can
    /// reach some marking of NetSystem::finals.
    bool always_reaches_some_final = false;
    std::vector<Marking> no_final_reachable_from;
};

/// Classic soundness of a workflow net with initial [i] and target [o].
/// Throws PreconditionError when the net is not a workflow net or the
/// initial marking is not [i].
SoundnessReport check_soundness(const NetSystem& sys, std::size_t max_states = kDefaultMaxStates);

struct PlaceSpec {
    std::string id;  ///< empty: choose a fresh "r<k>"
    std::vector<TransitionIndex> entering;
    std::vector<TransitionIndex> exiting;
    bool mark_initial = false;
    bool extend_finals = false;
};

/// Adds a place fed by `entering` and consumed by `exiting`. A transition in
/// both sets gets a self-loop. With `extend_finals`, every final marking
/// m_f is kept and m_f + [p] is added next to it.
NetSystem add_place(const NetSystem& sys, const PlaceSpec& spec);

struct NetSize {
    std::size_t places = 0;
    std::size_t transitions = 0;
    std::size_t arcs = 0;

    std::size_t nodes() const noexcept { return places + transitions; }
};

NetSize net_size(const PetriNet& net);

}  // namespace fcrepair
