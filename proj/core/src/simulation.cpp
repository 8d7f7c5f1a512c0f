#include "fcrepair/simulation.hpp"

#include <algorithm>
#include <random>

#include "fcrepair/error.hpp"

namespace fcrepair {

std::vector<Trace> simulate(const NetSystem& sys, std::size_t n_traces, const SimulationOptions& options) {
    sys.validate();
    if (sys.finals.empty()) throw PreconditionError("simulation needs at least one final marking");
    std::mt19937_64 rng(options.seed);
    const auto& net = sys.net;
    std::vector<Trace> out;
    out.reserve(n_traces);
    std::vector<TransitionIndex> enabled;
    for (std::size_t k = 0; k < n_traces; ++k) {
        bool done = false;
        for (std::size_t attempt = 0; attempt < options.max_attempts && !done; ++attempt) {
            Marking m = sys.initial;
            Trace trace;
            for (std::size_t step = 0; step <= options.max_steps; ++step) {
                const bool final = std::binary_search(sys.finals.begin(), sys.finals.end(), m);
                enabled.clear();
                for (TransitionIndex t = 0; t < net.num_transitions(); ++t)
                    if (is_enabled(net, m, t)) enabled.push_back(t);
                const auto options_count = enabled.size() + (final ? 1 : 0);
                if (options_count == 0 || step == options.max_steps) break;
                const auto pick = std::uniform_int_distribution<std::size_t>(0, options_count - 1)(rng);
                if (pick == enabled.size()) {
                    done = true;
                    break;
                }
                const auto t = enabled[pick];
                m = fire(net, m, t);
                if (!net.transition(t).silent()) trace.push_back(*net.transition(t).label);
            }
            if (done) out.push_back(std::move(trace));
        }
        if (!done)
            throw ResourceLimitError("no final marking reached within " + std::to_string(options.max_steps) +
                                         " steps",
                                     options.max_attempts);
    }
    return out;
}

EventLog simulate_log(const NetSystem& sys, std::size_t n_traces, const SimulationOptions& options) {
    EventLog log;
    for (auto& t : simulate(sys, n_traces, options)) log.add(t);
    return log;
}

}  // namespace fcrepair
