#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fcrepair/event_log.hpp"
#include "fcrepair/petri_net.hpp"

namespace fcrepair {

struct SimulationOptions {
    std::uint64_t seed = 42;
    std::size_t max_steps = 10'000;  ///< per attempt
    std::size_t max_attempts = 1'000;  ///< per trace, restarting on deadlock or step cap
};

/// Random runs from the initial marking to a final marking. At each step one
/// option is drawn uniformly from the enabled transitions plus "stop" when
/// the current marking is final. Silent firings emit nothing. Throws
/// ResourceLimitError when a trace cannot be completed within the attempts.
std::vector<Trace> simulate(const NetSystem& sys, std::size_t n_traces, const SimulationOptions& options = {});

/// The simulated traces collected into a log.
EventLog simulate_log(const NetSystem& sys, std::size_t n_traces, const SimulationOptions& options = {});

}  // namespace fcrepair
