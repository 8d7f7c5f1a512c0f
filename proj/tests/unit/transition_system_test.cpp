#include <doctest.h>

#include <random>

#include "fcrepair/error.hpp"
#include "fcrepair/transition_system.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fcrepair;
using namespace fcrepair::testing;

TEST_CASE("prefix tree of the motivating log") {
    const auto tree = build_prefix_tree(motivating_log());
    CHECK(tree.num_states() == 9);
    CHECK(tree.finals().size() == 2);
    CHECK(tree.deterministic());

    const auto empty = build_prefix_tree(EventLog{});
    CHECK(empty.num_states() == 1);
    CHECK(empty.arcs().empty());
    CHECK(empty.finals().empty());

    EventLog eps;
    eps.add({});
    const auto e = build_prefix_tree(eps);
    CHECK(e.num_states() == 1);
    CHECK(e.is_final(e.initial()));
}

TEST_CASE("minimization of the motivating prefix tree yields the hand-built system") {
    const auto min = minimize(build_prefix_tree(motivating_log()));
    CHECK(min.num_states() == 7);
    CHECK(min == canonical_order(motivating_ts()));
    CHECK(minimize(min) == min);
}

TEST_CASE("minimization merges equivalent continuations") {
    EventLog log;
    log.add({"a", "c"});
    log.add({"b", "c"});
    const auto tree = build_prefix_tree(log);
    CHECK(tree.num_states() == 5);
    CHECK(minimize(tree).num_states() == 3);
}

TEST_CASE("minimization rejects non-deterministic input") {
    TransitionSystem nd({"a"}, 3, {{0, 0, 1}, {0, 0, 2}}, 0, {1});
    CHECK_FALSE(nd.deterministic());
    CHECK_THROWS_AS(minimize(nd), PreconditionError);
    TransitionSystem tau({"a"}, 2, {{0, kTauEvent, 1}}, 0, {1});
    CHECK_THROWS_AS(minimize(tau), PreconditionError);
}

TEST_CASE("acceptance on the motivating system") {
    const auto ts = motivating_ts();
    CHECK(accepts(ts, {kSend, kCheck, kNotify, kAccept}));
    CHECK_FALSE(accepts(ts, {kSend, kCheck, kComplete, kAccept}));
    CHECK_FALSE(accepts(ts, {}));
    TransitionSystem tau({"a"}, 2, {{0, kTauEvent, 1}}, 0, {1});
    CHECK(accepts(tau, {}));
}

TEST_CASE("enabled events") {
    const auto ts = motivating_ts();
    CHECK(enabled_events(ts, 3) == std::set<Label>{kNotify});
    CHECK(enabled_events(ts, 0) == std::set<Label>{kSend, kCreate});
    CHECK(enabled_events(ts, 6).empty());
    CHECK_THROWS_AS(enabled_events(ts, 99), PreconditionError);
}

TEST_CASE("bounded language") {
    const auto ts = motivating_ts();
    const auto lang = language_bounded(ts, 4);
    CHECK(lang.size() == 2);
    CHECK(lang.count({kSend, kCheck, kNotify, kAccept}));
    CHECK(language_bounded(ts, 0).empty());
    TransitionSystem eps({}, 1, {}, 0, {0});
    CHECK(language_bounded(eps, 0) == std::set<Trace>{Trace{}});
}

TEST_CASE("tau closure of a single silent arc") {
    TransitionSystem tau({}, 2, {{0, kTauEvent, 1}}, 0, {1});
    const auto closed = tau_closure(tau);
    CHECK(closed.num_states() == 1);
    CHECK(closed.is_final(closed.initial()));
    CHECK(closed.tau_free());
}

TEST_CASE("tau closure subset bound") {
    // a chain of silent choices that blows up the subset construction
    std::vector<Arc> arcs;
    const StateId n = 12;
    for (StateId s = 0; s + 1 < n; ++s) {
        arcs.push_back({s, 0, s + 1});
        arcs.push_back({s, 0, 0});
        arcs.push_back({s, 1, s});
    }
    TransitionSystem nd({"a", "b"}, n, arcs, 0, {n - 1});
    CHECK_THROWS_AS(tau_closure(nd, 3), ResourceLimitError);
}

TEST_CASE("property: minimize and tau_closure preserve bounded languages") {
    Rng rng(11);
    for (int round = 0; round < 60; ++round) {
        const auto dfa = random_dfa(rng, 9, 3);
        // add silent arcs to get a non-deterministic variant
        std::vector<Arc> arcs(dfa.arcs().begin(), dfa.arcs().end());
        std::uniform_int_distribution<StateId> pick(0, static_cast<StateId>(dfa.num_states() - 1));
        for (int k = 0; k < 2; ++k) arcs.push_back({pick(rng), kTauEvent, pick(rng)});
        TransitionSystem noisy(dfa.events(), dfa.num_states(), arcs, dfa.initial(), dfa.finals());
        const auto closed = tau_closure(noisy);
        CHECK(closed.deterministic());
        CHECK(naive_ts_language(closed, 6) == naive_ts_language(noisy, 6));
        CHECK(language_equal(closed, noisy));
        CHECK(naive_ts_language(minimize(dfa), 6) == naive_ts_language(dfa, 6));
        CHECK(language_bounded(noisy, 5) == naive_ts_language(noisy, 5));
    }
}

TEST_CASE("property: minimized states are pairwise inequivalent") {
    Rng rng(12);
    for (int round = 0; round < 40; ++round) {
        const auto m = random_dfa(rng, 8, 2);
        for (StateId a = 0; a < m.num_states(); ++a)
            for (StateId b = a + 1; b < m.num_states(); ++b)
                CHECK_FALSE(language_equal(m.with_initial(a), m.with_initial(b)));
    }
}

TEST_CASE("property: prefix tree accepts exactly the log") {
    Rng rng(13);
    for (int round = 0; round < 40; ++round) {
        EventLog log;
        std::uniform_int_distribution<int> len(0, 4), letter(0, 2);
        for (int t = 0; t < 4; ++t) {
            Trace tr;
            for (int k = len(rng); k > 0; --k) tr.emplace_back(1, static_cast<char>('a' + letter(rng)));
            log.add(tr);
        }
        const auto tree = build_prefix_tree(log);
        const auto lang = naive_ts_language(tree, 5);
        const auto support = log.support();
        CHECK(lang == std::set<Trace>(support.begin(), support.end()));
        CHECK(naive_ts_language(minimize(tree), 5) == lang);
    }
}

TEST_CASE("tsv export") {
    TransitionSystem ts({"a"}, 2, {{0, 0, 1}}, 0, {1});
    CHECK(to_tsv(ts) == "0\ta\t1\n");
}
