#include <doctest.h>

#include "fcrepair/error.hpp"
#include "fcrepair/simulation.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace fcrepair;
using namespace fcrepair::testing;

TEST_CASE("simulating the repaired application net yields only the log traces") {
    const auto log = simulate_log(load_net("application_repaired.pnml"), 100);
    CHECK(log.distinct_traces() == 2);
    CHECK(log_stats(log).trace_occurrences == 100);
    for (const auto& t : log.support()) CHECK(motivating_log().contains(t));
}

TEST_CASE("simulation is reproducible under a seed") {
    SimulationOptions a, b;
    a.seed = b.seed = 99;
    const auto sys = load_net("application.pnml");
    CHECK(simulate(sys, 50, a) == simulate(sys, 50, b));
    b.seed = 100;
    CHECK(simulate(sys, 50, a) != simulate(sys, 50, b));
}

TEST_CASE("simulation fails when no final marking can be reached") {
    NetSystem sys;
    const auto i = sys.net.add_place("i");
    const auto o = sys.net.add_place("o");
    const auto t = sys.net.add_transition("t", "a");
    sys.net.add_input_arc(i, t);
    sys.net.add_output_arc(t, i);
    sys.initial = Marking(2);
    sys.initial[i] = 1;
    Marking f(2);
    f[o] = 1;
    sys.add_final(f);
    SimulationOptions so;
    so.max_steps = 20;
    so.max_attempts = 3;
    CHECK_THROWS_AS(simulate(sys, 1, so), ResourceLimitError);
}

TEST_CASE("property: every simulated trace is accepted") {
    Rng rng(61);
    for (int round = 0; round < 30; ++round) {
        const auto sys = random_tree_net(rng);
        SimulationOptions so;
        so.seed = rng();
        const auto rg = reachability_graph(sys);
        for (const auto& trace : simulate(sys, 20, so)) CHECK(accepts(rg.ts, trace));
    }
}
