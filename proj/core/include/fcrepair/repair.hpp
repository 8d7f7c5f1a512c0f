#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fcrepair/conformance.hpp"
#include "fcrepair/event_log.hpp"
#include "fcrepair/petri_net.hpp"
#include "fcrepair/region.hpp"
#include "fcrepair/transition_system.hpp"

namespace fcrepair {

/// Non-silent transitions sharing one preset.
struct TransitionCluster {
    std::vector<TransitionIndex> transitions;
    std::vector<Label> labels;  ///< in transition order
};

struct FalseFreeChoice {
    std::vector<TransitionCluster> clusters;  ///< clusters of two or more transitions
    std::vector<EsspProblem> problems;
    std::vector<std::size_t> problem_cluster;  ///< cluster index of each problem
    /// Cluster labels that never occur in the system's alphabet.
    std::vector<Label> missing_labels;
};

/// Emits one ESSP problem per (state, disabled cluster label, enabled
/// cluster label). Throws PreconditionError when the net is not free-choice
/// or `ts` is not minimal and deterministic.
FalseFreeChoice find_false_free_choice(const PetriNet& net, const TransitionSystem& ts);

struct RepairOptions {
    std::size_t essp_budget = 50'000;
    std::size_t max_states = kDefaultMaxStates;
    bool compute_metrics = true;
    bool soundness_prediction = false;
    std::function<void(std::size_t problem, const SearchStep&)> observer;
};

struct ProblemOutcome {
    EsspProblem problem;
    std::size_t cluster = 0;
    EsspStatus status = EsspStatus::unsolvable;
    std::vector<std::vector<StateId>> regions;
    std::size_t nodes_expanded = 0;
    std::vector<std::string> places;  ///< places this problem accounts for
};

struct AddedPlace {
    std::string id;
    std::vector<Label> entering;
    std::vector<Label> exiting;
    bool initial = false;
    bool finals_extended = false;
    std::vector<StateId> region;
    std::vector<std::size_t> problems;  ///< indices into RepairReport::problems
};

/// Per-cluster evaluation of the sufficient soundness condition.
struct ClusterSoundness {
    std::vector<Label> labels;
    std::vector<std::string> places;
    bool exits_disjoint = false;
    bool exits_cover_cluster = false;
    /// States (of the τ-closed reachability graph) of a region with the
    /// union entering and exiting sets avoiding initial and final states.
    std::optional<std::vector<StateId>> region;
    bool holds = false;
};

struct SoundnessPrediction {
    bool net_sound = false;
    std::vector<ClusterSoundness> clusters;
    /// true when the condition guarantees soundness of the repaired net;
    /// nullopt when no prediction is made.
    std::optional<bool> predicts_sound;
};

struct RepairReport {
    std::size_t log_traces = 0;
    std::size_t ts_states = 0;
    std::vector<TransitionCluster> clusters;
    std::vector<ProblemOutcome> problems;
    std::vector<AddedPlace> added_places;
    std::size_t regions_matching_existing_places = 0;
    std::vector<Label> missing_labels;
    NetSize size_before;
    NetSize size_after;
    std::optional<ConformanceSummary> metrics_before;
    std::optional<ConformanceSummary> metrics_after;
    /// Set when a metrics computation hit a resource bound, for example on a
    /// repaired net that became unbounded outside the logged behaviour.
    std::optional<std::string> metrics_error;
    std::optional<SoundnessPrediction> soundness;
    double wall_time_ms = 0.0;

    std::size_t solved() const;
    std::size_t unsolvable() const;
    std::size_t budget_exhausted() const;
};

struct RepairResult {
    NetSystem net;
    RepairReport report;
};

/// Adds places from regions of the log's minimal transition system that
/// separate falsely free-choice transitions. Throws PreconditionError when
/// the input is not a free-choice workflow net, and std::logic_error if a
/// log trace accepted by the input is rejected by the result.
RepairResult repair(const NetSystem& sys, const EventLog& log, const RepairOptions& options = {});

/// Evaluates the sufficient soundness condition for the places listed in
/// `report` on every cluster that received some.
SoundnessPrediction predict_soundness(const NetSystem& original, const RepairReport& report,
                                      std::size_t max_states = kDefaultMaxStates);

/// Machine-readable report: one JSON object per line. Wall time is left out
/// so identical inputs give identical bytes.
std::string report_jsonl(const RepairReport& report);

/// Short human-readable summary.
std::string report_summary(const RepairReport& report);

}  // namespace fcrepair
