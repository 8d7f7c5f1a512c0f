#include "generators.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

namespace fcrepair::testing {

namespace {

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

TransitionSystem random_dfa(Rng& rng, std::size_t max_states, std::size_t num_events) {
    const auto n = uniform(rng, 2, max_states);
    std::vector<Label> events;
    for (std::size_t e = 0; e < num_events; ++e) events.emplace_back(1, static_cast<char>('a' + e));
    std::vector<std::vector<bool>> used(n, std::vector<bool>(num_events, false));
    std::vector<Arc> arcs;
    auto add = [&](StateId s, StateId t) {
        std::vector<EventId> free;
        for (std::size_t e = 0; e < num_events; ++e)
            if (!used[s][e]) free.push_back(static_cast<EventId>(e));
        if (free.empty()) return false;
        const auto e = free[uniform(rng, 0, free.size() - 1)];
        used[s][static_cast<std::size_t>(e)] = true;
        arcs.push_back({s, e, t});
        return true;
    };
    for (StateId s = 1; s < n; ++s) {
        // attach to an earlier state that still has a free event
        for (int tries = 0; tries < 32; ++tries)
            if (add(static_cast<StateId>(uniform(rng, 0, s - 1)), s)) break;
    }
    const auto extra = uniform(rng, 0, n);
    for (std::size_t k = 0; k < extra; ++k)
        add(static_cast<StateId>(uniform(rng, 0, n - 1)), static_cast<StateId>(uniform(rng, 0, n - 1)));
    std::vector<StateId> finals;
    for (StateId s = 0; s < n; ++s) {
        const bool sink = std::none_of(arcs.begin(), arcs.end(), [s](const Arc& a) { return a.source == s; });
        if (sink || coin(rng, 0.25)) finals.push_back(s);
    }
    return minimize(TransitionSystem(events, n, arcs, 0, finals));
}

namespace {

struct TreeBuilder {
    Rng& rng;
    const TreeNetOptions& options;
    NetSystem sys;
    std::size_t activities = 0;
    std::size_t places = 0;
    std::size_t transitions = 0;

    PlaceIndex place() { return sys.net.add_place("p" + std::to_string(++places)); }

    TransitionIndex transition(std::optional<Label> label) {
        return sys.net.add_transition("t" + std::to_string(++transitions), std::move(label));
    }

    void activity(PlaceIndex in, PlaceIndex out) {
        const auto t = transition(std::string(1, static_cast<char>('a' + activities++)));
        sys.net.add_input_arc(in, t);
        sys.net.add_output_arc(t, out);
    }

    void silent(PlaceIndex in, PlaceIndex out) {
        const auto t = transition(std::nullopt);
        sys.net.add_input_arc(in, t);
        sys.net.add_output_arc(t, out);
    }

    void build(PlaceIndex in, PlaceIndex out, std::size_t depth) {
        if (depth >= options.max_depth || activities + 2 > options.max_activities || coin(rng, 0.25)) {
            activity(in, out);
            return;
        }
        const auto kind = uniform(rng, 0, 9);
        if (kind < 4) {  // sequence
            const auto mid = place();
            build(in, mid, depth + 1);
            build(mid, out, depth + 1);
        } else if (kind < 7) {  // exclusive choice
            const auto branches = uniform(rng, 2, 3);
            for (std::size_t b = 0; b < branches; ++b) build(in, out, depth + 1);
            if (options.allow_skips && coin(rng, 0.2)) silent(in, out);
        } else if (kind < 9 && options.allow_parallel) {  // parallel
            const auto split = transition(std::nullopt);
            const auto join = transition(std::nullopt);
            sys.net.add_input_arc(in, split);
            sys.net.add_output_arc(join, out);
            for (int b = 0; b < 2; ++b) {
                const auto bin = place(), bout = place();
                sys.net.add_output_arc(split, bin);
                sys.net.add_input_arc(bout, join);
                build(bin, bout, depth + 1);
            }
        } else if (options.allow_loops) {  // loop: body, then redo or leave
            const auto head = place(), tail = place();
            silent(in, head);
            build(head, tail, depth + 1);
            activity(tail, head);
            silent(tail, out);
        } else {
            activity(in, out);
        }
    }
};

}  // namespace

NetSystem random_tree_net(Rng& rng, const TreeNetOptions& options) {
    TreeBuilder b{rng, options, {}};
    const auto i = b.sys.net.add_place("i");
    const auto o = b.sys.net.add_place("o");
    b.build(i, o, 0);
    b.sys.initial = Marking(b.sys.net.num_places());
    b.sys.initial[i] = 1;
    Marking f(b.sys.net.num_places());
    f[o] = 1;
    b.sys.add_final(std::move(f));
    return std::move(b.sys);
}

CoupledNets random_coupled_nets(Rng& rng) {
    // i -> xor(a_1..a_k) -> m1 -> middle -> m2 -> xor(b_1..b_n) -> o. In the
    // ground truth every b has one owning a, linked by a place q_a.
    const auto k = uniform(rng, 2, 3);
    const auto n = uniform(rng, k, k + 1);
    const bool parallel_middle = coin(rng, 0.4);
    std::vector<std::size_t> owner(n);
    std::iota(owner.begin(), owner.begin() + static_cast<std::ptrdiff_t>(k), std::size_t{0});
    for (std::size_t b = k; b < n; ++b) owner[b] = uniform(rng, 0, k - 1);
    std::shuffle(owner.begin(), owner.end(), rng);

    CoupledNets out;
    for (int which = 0; which < 2; ++which) {
        NetSystem sys;
        auto& net = sys.net;
        const auto i = net.add_place("i"), m1 = net.add_place("m1"), m2 = net.add_place("m2"),
                   o = net.add_place("o");
        std::vector<TransitionIndex> as;
        for (std::size_t j = 0; j < k; ++j) {
            as.push_back(net.add_transition("ta" + std::to_string(j), "a" + std::to_string(j)));
            net.add_input_arc(i, as.back());
            net.add_output_arc(as.back(), m1);
        }
        if (parallel_middle) {
            const auto split = net.add_transition("split", std::nullopt);
            const auto join = net.add_transition("join", std::nullopt);
            net.add_input_arc(m1, split);
            net.add_output_arc(join, m2);
            for (const std::string l : {"c", "d"}) {
                const auto pin = net.add_place("in_" + l), pout = net.add_place("out_" + l);
                const auto t = net.add_transition("t" + l, l);
                net.add_output_arc(split, pin);
                net.add_input_arc(pin, t);
                net.add_output_arc(t, pout);
                net.add_input_arc(pout, join);
            }
        } else {
            const auto c = net.add_transition("tc", "c");
            net.add_input_arc(m1, c);
            net.add_output_arc(c, m2);
        }
        std::vector<PlaceIndex> q;
        if (which == 0)
            for (std::size_t j = 0; j < k; ++j) {
                q.push_back(net.add_place("q" + std::to_string(j)));
                net.add_output_arc(as[j], q.back());
            }
        for (std::size_t b = 0; b < n; ++b) {
            const auto t = net.add_transition("tb" + std::to_string(b), "b" + std::to_string(b));
            net.add_input_arc(m2, t);
            net.add_output_arc(t, o);
            if (which == 0) net.add_input_arc(q[owner[b]], t);
        }
        sys.initial = Marking(net.num_places());
        sys.initial[i] = 1;
        Marking f(net.num_places());
        f[o] = 1;
        sys.add_final(std::move(f));
        (which == 0 ? out.ground_truth : out.surrogate) = std::move(sys);
    }
    return out;
}

}  // namespace fcrepair::testing
