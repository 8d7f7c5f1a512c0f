#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "fcrepair/conformance.hpp"
#include "fcrepair/event_log.hpp"
#include "fcrepair/petri_net.hpp"
#include "fcrepair/region.hpp"
#include "fcrepair/repair.hpp"
#include "fcrepair/transition_system.hpp"

using namespace fcrepair;

namespace {

// i -> a_0 | ... | a_{k-1} -> m -> c -> n -> b_0 | ... | b_{k-1} -> o
// The log pairs a_j with b_j, which the free-choice net cannot express.
struct Coupled {
    NetSystem net;
    EventLog log;
};

Coupled coupled(int k) {
    Coupled out;
    auto& net = out.net.net;
    const auto i = net.add_place("i"), m = net.add_place("m"), n = net.add_place("n"), o = net.add_place("o");
    const auto c = net.add_transition("c", std::string("c"));
    net.add_input_arc(m, c);
    net.add_output_arc(c, n);
    for (int j = 0; j < k; ++j) {
        const auto a = net.add_transition("a" + std::to_string(j), "a" + std::to_string(j));
        const auto b = net.add_transition("b" + std::to_string(j), "b" + std::to_string(j));
        net.add_input_arc(i, a);
        net.add_output_arc(a, m);
        net.add_input_arc(n, b);
        net.add_output_arc(b, o);
        out.log.add({"a" + std::to_string(j), "c", "b" + std::to_string(j)});
    }
    out.net.initial = Marking(net.num_places());
    out.net.initial[i] = 1;
    Marking f(net.num_places());
    f[o] = 1;
    out.net.add_final(std::move(f));
    return out;
}

// k concurrent two-step branches between a split and a join: 3^k + 2 markings.
NetSystem parallel(int k) {
    NetSystem sys;
    auto& net = sys.net;
    const auto i = net.add_place("i"), o = net.add_place("o");
    const auto split = net.add_transition("split", std::nullopt);
    const auto join = net.add_transition("join", std::nullopt);
    net.add_input_arc(i, split);
    net.add_output_arc(join, o);
    for (int j = 0; j < k; ++j) {
        const auto s = std::to_string(j);
        const auto p = net.add_place("p" + s), q = net.add_place("q" + s), r = net.add_place("r" + s);
        const auto x = net.add_transition("x" + s, "x" + s), y = net.add_transition("y" + s, "y" + s);
        net.add_output_arc(split, p);
        net.add_input_arc(p, x);
        net.add_output_arc(x, q);
        net.add_input_arc(q, y);
        net.add_output_arc(y, r);
        net.add_input_arc(r, join);
    }
    sys.initial = Marking(net.num_places());
    sys.initial[i] = 1;
    Marking f(net.num_places());
    f[o] = 1;
    sys.add_final(std::move(f));
    return sys;
}

EventLog random_log(std::size_t traces, std::size_t max_len, int letters) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> len(1, max_len);
    std::uniform_int_distribution<int> letter(0, letters - 1);
    EventLog log;
    for (std::size_t t = 0; t < traces; ++t) {
        Trace trace;
        for (auto n = len(rng); n > 0; --n) trace.push_back(std::string(1, static_cast<char>('a' + letter(rng))));
        log.add(trace);
    }
    return log;
}

void BM_MinimizePrefixTree(benchmark::State& state) {
    const auto log = random_log(static_cast<std::size_t>(state.range(0)), 12, 4);
    for (auto _ : state) benchmark::DoNotOptimize(minimize(build_prefix_tree(log)));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MinimizePrefixTree)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_SolveEssp(benchmark::State& state) {
    const auto c = coupled(static_cast<int>(state.range(0)));
    const auto ts = minimize(build_prefix_tree(c.log));
    const auto ffc = find_false_free_choice(c.net.net, ts);
    for (auto _ : state)
        for (const auto& p : ffc.problems) benchmark::DoNotOptimize(solve_essp(ts, p));
    state.counters["problems"] = static_cast<double>(ffc.problems.size());
}
BENCHMARK(BM_SolveEssp)->DenseRange(2, 10, 2);

void BM_RepairCoupled(benchmark::State& state) {
    const auto c = coupled(static_cast<int>(state.range(0)));
    RepairOptions options;
    options.compute_metrics = false;
    for (auto _ : state) benchmark::DoNotOptimize(repair(c.net, c.log, options));
}
BENCHMARK(BM_RepairCoupled)->DenseRange(2, 10, 2);

void BM_RepairWithMetrics(benchmark::State& state) {
    const auto c = coupled(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(repair(c.net, c.log));
}
BENCHMARK(BM_RepairWithMetrics)->DenseRange(2, 10, 4);

void BM_ReachabilityGraph(benchmark::State& state) {
    const auto sys = parallel(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reachability_graph(sys));
}
BENCHMARK(BM_ReachabilityGraph)->DenseRange(2, 8, 2);

void BM_Entropy(benchmark::State& state) {
    const auto ts = tau_closure(reachability_graph(parallel(static_cast<int>(state.range(0)))).ts);
    for (auto _ : state) benchmark::DoNotOptimize(entropy(ts));
}
BENCHMARK(BM_Entropy)->DenseRange(2, 6, 2);

}  // namespace

BENCHMARK_MAIN();
