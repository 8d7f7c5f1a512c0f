#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fcrepair/event_log.hpp"
#include "fcrepair/petri_net.hpp"
#include "fcrepair/transition_system.hpp"

namespace fcrepair {

struct SpectralOptions {
    double tolerance = 1e-9;  ///< relative gap between the Collatz–Wielandt bounds
    std::size_t max_iterations = 10'000;
};

/// Spectral radius of a square non-negative matrix. Each strongly connected
/// block is iterated on (A + I) until its lower and upper bounds meet.
/// Throws ConvergenceError when a block needs more than max_iterations.
double spectral_radius(const std::vector<std::vector<double>>& matrix, const SpectralOptions& options = {});

/// Adjacency matrix (arc counts) of the trimmed automaton with one extra arc
/// from every final state back to the initial state. Empty for an empty
/// language.
std::vector<std::vector<double>> short_circuit_matrix(const TransitionSystem& ts);

/// ln of the spectral radius of short_circuit_matrix(ts); 0 for an empty
/// language. Throws PreconditionError for non-deterministic input.
double entropy(const TransitionSystem& ts, const SpectralOptions& options = {});

/// Share of distinct log traces accepted; 1 for an empty log.
double replay_fitness(const NetSystem& sys, const EventLog& log, std::size_t max_states = kDefaultMaxStates);

/// Share of trace occurrences accepted; 1 for an empty log.
double weighted_replay_fitness(const NetSystem& sys, const EventLog& log,
                               std::size_t max_states = kDefaultMaxStates);

struct ConformanceSummary {
    double replay_fitness = 1.0;
    double weighted_fitness = 1.0;
    double entropy_log = 0.0;
    double entropy_model = 0.0;
    double entropy_intersection = 0.0;
    /// nullopt when the model language is empty.
    std::optional<double> precision;
    /// nullopt when the log is empty.
    std::optional<double> fitness_entropy;
    std::size_t log_states = 0;
    std::size_t model_states = 0;
    std::size_t intersection_states = 0;
};

struct ConformanceOptions {
    std::size_t max_states = kDefaultMaxStates;
    std::size_t max_subsets = kDefaultSubsetBound;
    SpectralOptions spectral;
};

/// Entropy-based precision and fitness of a net against a log. When an
/// entropy denominator is 0 but the language is not empty (a single trace),
/// the ratio is 1 if the intersection language equals that language and 0
/// otherwise.
ConformanceSummary precision(const NetSystem& sys, const EventLog& log, const ConformanceOptions& options = {});

}  // namespace fcrepair
