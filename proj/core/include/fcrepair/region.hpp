#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcrepair/petri_net.hpp"
#include "fcrepair/transition_system.hpp"

namespace fcrepair {

/// How all arcs of one event relate to a state subset.
enum class Crossing : std::uint8_t { no_cross, enter, exit };

std::string_view to_string(Crossing c);

/// A state subset together with the uniform crossing type of every event.
struct Region {
    std::vector<StateId> states;     ///< sorted
    std::vector<Crossing> crossing;  ///< indexed by EventId

    bool contains(StateId s) const;
    std::vector<EventId> entering() const;
    std::vector<EventId> exiting() const;

    friend bool operator==(const Region&, const Region&) = default;
};

/// Two arcs of the same event that cross the subset differently.
struct RegionViolation {
    EventId event;
    Arc first;
    Arc second;
};

struct RegionCheck {
    std::optional<Region> region;
    std::optional<RegionViolation> violation;

    explicit operator bool() const noexcept { return region.has_value(); }
};

/// Classifies every event against `subset`. Empty and full subsets are
/// (trivial) regions. Throws PreconditionError for silent arcs or states out
/// of range.
RegionCheck is_region(const TransitionSystem& ts, std::span<const StateId> subset);

inline constexpr std::size_t kDefaultBruteForceBound = 16;

/// All minimal non-trivial regions by subset enumeration. Throws
/// ResourceLimitError when the system has more than `max_states` states.
std::vector<Region> enumerate_minimal_regions_bruteforce(const TransitionSystem& ts,
                                                         std::size_t max_states = kDefaultBruteForceBound);

/// All minimal non-trivial regions by best-first expansion from singleton
/// seeds. Throws ResourceLimitError when more than `budget` candidate sets
/// are expanded.
std::vector<Region> minimal_regions(const TransitionSystem& ts, std::size_t budget = 1'000'000);

/// Event/state separation instance produced by a false free-choice relation:
/// at `state` the `witness` label is enabled and `forbidden` is not.
struct EsspProblem {
    StateId state = 0;
    Label forbidden;
    Label witness;
    std::vector<Label> cluster;  ///< labels of the free-choice cluster

    friend bool operator==(const EsspProblem&, const EsspProblem&) = default;
};

enum class EsspStatus { solved, unsolvable, budget_exhausted };

std::string_view to_string(EsspStatus s);

/// One expanded node of the region search, for debug tracing.
struct SearchStep {
    std::size_t node = 0;
    std::vector<StateId> candidate;
    std::optional<EventId> violating_event;
    std::vector<Crossing> branches;  ///< legalizing expansions pushed
    std::string outcome;             ///< "solution", "expanded", "pruned", "dead-end"
};

struct EsspOptions {
    std::size_t budget = 50'000;  ///< expanded nodes
    std::function<void(const SearchStep&)> observer;
};

struct EsspResult {
    EsspStatus status = EsspStatus::unsolvable;
    /// Minimal solutions found, smallest first then lexicographic.
    std::vector<Region> regions;
    std::size_t nodes_expanded = 0;
    /// True when the search space was exhausted, so `regions` holds every
    /// minimal solution.
    bool exhaustive = false;
};

/// Finds regions r with problem.state ∈ r, the witness exiting r and the
/// forbidden label not exiting r. Throws PreconditionError when the system
/// is not deterministic or the problem is malformed.
EsspResult solve_essp(const TransitionSystem& ts, const EsspProblem& problem, const EsspOptions& options = {});

/// The ESSP predicate evaluated literally on a candidate region.
bool solves_essp(const TransitionSystem& ts, const Region& region, const EsspProblem& problem);

struct SynthesisOptions {
    std::size_t region_budget = 1'000'000;
};

/// One transition per event, one place per minimal region. Places of regions
/// containing the initial state are marked; every final state contributes the
/// marking of the regions containing it. Throws PreconditionError for
/// non-deterministic input.
NetSystem synthesize(const TransitionSystem& ts, const SynthesisOptions& options = {});

}  // namespace fcrepair
