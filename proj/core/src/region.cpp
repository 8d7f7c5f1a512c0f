#include "fcrepair/region.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <unordered_set>

#include "fcrepair/error.hpp"

namespace fcrepair {

std::string_view to_string(Crossing c) {
    switch (c) {
        case Crossing::no_cross: return "no-cross";
        case Crossing::enter: return "enter";
        case Crossing::exit: return "exit";
    }
    return "?";
}

std::string_view to_string(EsspStatus s) {
    switch (s) {
        case EsspStatus::solved: return "solved";
        case EsspStatus::unsolvable: return "unsolvable";
        case EsspStatus::budget_exhausted: return "budget_exhausted";
    }
    return "?";
}

bool Region::contains(StateId s) const { return std::binary_search(states.begin(), states.end(), s); }

std::vector<EventId> Region::entering() const {
    std::vector<EventId> out;
    for (std::size_t e = 0; e < crossing.size(); ++e)
        if (crossing[e] == Crossing::enter) out.push_back(static_cast<EventId>(e));
    return out;
}

std::vector<EventId> Region::exiting() const {
    std::vector<EventId> out;
    for (std::size_t e = 0; e < crossing.size(); ++e)
        if (crossing[e] == Crossing::exit) out.push_back(static_cast<EventId>(e));
    return out;
}

namespace {

/// Fixed-size bitset over states.
class StateBits {
public:
    explicit StateBits(std::size_t n) : words_((n + 63) / 64, 0) {}

    void set(StateId s) { words_[s / 64] |= std::uint64_t{1} << (s % 64); }
    bool test(StateId s) const { return (words_[s / 64] >> (s % 64)) & 1u; }

    std::size_t count() const {
        std::size_t c = 0;
        for (const auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool subset_of(const StateBits& other) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i]) return false;
        return true;
    }

    bool intersects(const StateBits& other) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & other.words_[i]) return true;
        return false;
    }

    std::vector<StateId> states() const {
        std::vector<StateId> out;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            auto w = words_[i];
            while (w) {
                out.push_back(static_cast<StateId>(i * 64 + static_cast<std::size_t>(std::countr_zero(w))));
                w &= w - 1;
            }
        }
        return out;
    }

    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    friend bool operator==(const StateBits&, const StateBits&) = default;

private:
    std::vector<std::uint64_t> words_;
};

struct WordsHash {
    std::size_t operator()(const std::vector<std::uint64_t>& w) const noexcept {
        std::size_t h = 0xcbf29ce484222325ull;
        for (const auto x : w) h = (h ^ x) * 0x100000001b3ull;
        return h;
    }
};

constexpr std::uint8_t bit(Crossing c) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c)); }
constexpr std::uint8_t kAnyCrossing = bit(Crossing::no_cross) | bit(Crossing::enter) | bit(Crossing::exit);

struct EventArcs {
    std::vector<StateId> sources;
    std::vector<StateId> targets;
};

std::vector<EventArcs> arcs_by_event(const TransitionSystem& ts) {
    std::vector<EventArcs> out(ts.num_events());
    for (const auto& a : ts.arcs()) {
        auto& ea = out[static_cast<std::size_t>(a.event)];
        ea.sources.push_back(a.source);
        ea.targets.push_back(a.target);
    }
    return out;
}

struct Classification {
    std::uint8_t present = 0;  ///< bits of Crossing found among the arcs
    bool source_inside = false;
    bool target_inside = false;
};

template <class Inside>
Classification classify(const EventArcs& ea, Inside inside) {
    Classification c;
    for (std::size_t i = 0; i < ea.sources.size(); ++i) {
        const bool in_s = inside(ea.sources[i]);
        const bool in_t = inside(ea.targets[i]);
        c.source_inside |= in_s;
        c.target_inside |= in_t;
        if (in_s == in_t) {
            c.present |= bit(Crossing::no_cross);
        } else {
            c.present |= bit(in_s ? Crossing::exit : Crossing::enter);
        }
    }
    return c;
}

Crossing single_crossing(std::uint8_t present) {
    if (present == bit(Crossing::enter)) return Crossing::enter;
    if (present == bit(Crossing::exit)) return Crossing::exit;
    return Crossing::no_cross;
}

bool legal(const Classification& c, std::uint8_t allowed) {
    if (c.present == 0) return true;
    return std::has_single_bit(c.present) && (c.present & allowed);
}

Region make_region(const TransitionSystem& ts, const std::vector<EventArcs>& by_event, std::vector<StateId> states) {
    StateBits bits(ts.num_states());
    for (const auto s : states) bits.set(s);
    Region r;
    r.states = std::move(states);
    r.crossing.reserve(ts.num_events());
    for (const auto& ea : by_event) r.crossing.push_back(single_crossing(classify(ea, [&](StateId s) { return bits.test(s); }).present));
    return r;
}

void require_tau_free(const TransitionSystem& ts) {
    if (!ts.tau_free()) throw PreconditionError("region computations need a system without silent arcs");
}

struct SearchSpec {
    std::vector<std::uint8_t> allowed;  ///< per event
    StateBits excluded;                 ///< states that must stay outside
    std::size_t budget;
    const std::function<void(const SearchStep&)>* observer = nullptr;
};

struct SearchOutcome {
    std::vector<StateBits> solutions;
    std::size_t nodes = 0;
    bool budget_hit = false;
};

/// Best-first expansion over candidate subsets ordered by (size, states).
/// Every expansion is the least superset that legalizes one violating event
/// for one admissible crossing type, so each minimal solution containing a
/// seed is reachable, and because candidate sizes are popped in
/// non-decreasing order a leaf that is not a superset of an earlier solution
/// is minimal.
SearchOutcome best_first(const TransitionSystem& ts, const std::vector<EventArcs>& by_event,
                         const std::vector<StateBits>& seeds, const SearchSpec& spec) {
    const auto n = ts.num_states();
    struct Candidate {
        std::vector<StateId> states;
        StateBits bits;
        bool operator<(const Candidate& o) const {
            if (states.size() != o.states.size()) return states.size() < o.states.size();
            return states < o.states;
        }
    };
    std::set<Candidate> queue;
    std::unordered_set<std::vector<std::uint64_t>, WordsHash> visited;
    auto push = [&](StateBits bits) {
        if (bits.intersects(spec.excluded)) return false;
        auto states = bits.states();
        if (states.empty() || states.size() == n) return false;
        if (!visited.insert(bits.words()).second) return false;
        queue.insert(Candidate{std::move(states), std::move(bits)});
        return true;
    };
    for (const auto& seed : seeds) push(seed);

    SearchOutcome out;
    while (!queue.empty()) {
        if (out.nodes >= spec.budget) {
            out.budget_hit = true;
            break;
        }
        auto node = queue.extract(queue.begin());
        const auto& cand = node.value();
        ++out.nodes;
        SearchStep step;
        const bool tracing = spec.observer && *spec.observer;
        if (tracing) {
            step.node = out.nodes;
            step.candidate = cand.states;
        }

        if (std::any_of(out.solutions.begin(), out.solutions.end(),
                        [&](const StateBits& s) { return s.subset_of(cand.bits); })) {
            if (tracing) {
                step.outcome = "pruned";
                (*spec.observer)(step);
            }
            continue;
        }

        auto inside = [&](StateId s) { return cand.bits.test(s); };
        std::optional<EventId> violating;
        Classification cls;
        for (std::size_t e = 0; e < by_event.size(); ++e) {
            cls = classify(by_event[e], inside);
            if (!legal(cls, spec.allowed[e])) {
                violating = static_cast<EventId>(e);
                break;
            }
        }
        if (!violating) {
            out.solutions.push_back(cand.bits);
            if (tracing) {
                step.outcome = "solution";
                (*spec.observer)(step);
            }
            continue;
        }

        const auto& ea = by_event[static_cast<std::size_t>(*violating)];
        const auto allowed = spec.allowed[static_cast<std::size_t>(*violating)];
        for (const auto type : {Crossing::exit, Crossing::enter, Crossing::no_cross}) {
            if (!(allowed & bit(type))) continue;
            StateBits next = cand.bits;
            if (type == Crossing::exit) {
                if (cls.target_inside) continue;
                for (const auto s : ea.sources) next.set(s);
            } else if (type == Crossing::enter) {
                if (cls.source_inside) continue;
                for (const auto s : ea.targets) next.set(s);
            } else {
                for (std::size_t i = 0; i < ea.sources.size(); ++i) {
                    if (inside(ea.sources[i])) next.set(ea.targets[i]);
                    if (inside(ea.targets[i])) next.set(ea.sources[i]);
                }
            }
            if (push(std::move(next)) && tracing) step.branches.push_back(type);
        }
        if (tracing) {
            step.violating_event = violating;
            step.outcome = step.branches.empty() ? "dead-end" : "expanded";
            (*spec.observer)(step);
        }
    }
    return out;
}

bool region_order(const Region& a, const Region& b) {
    if (a.states.size() != b.states.size()) return a.states.size() < b.states.size();
    return a.states < b.states;
}

}  // namespace

RegionCheck is_region(const TransitionSystem& ts, std::span<const StateId> subset) {
    require_tau_free(ts);
    std::vector<bool> inside(ts.num_states(), false);
    for (const auto s : subset) {
        if (s >= ts.num_states()) throw PreconditionError("state " + std::to_string(s) + " out of range");
        inside[s] = true;
    }
    RegionCheck out;
    Region r;
    for (StateId s = 0; s < ts.num_states(); ++s)
        if (inside[s]) r.states.push_back(s);
    r.crossing.assign(ts.num_events(), Crossing::no_cross);
    std::vector<std::optional<std::size_t>> first_arc(ts.num_events());
    const auto arcs = ts.arcs();
    for (EventId e = 0; e < static_cast<EventId>(ts.num_events()); ++e) {
        for (const auto i : ts.arcs_of(e)) {
            const auto& a = arcs[i];
            const auto type = inside[a.source] == inside[a.target]
                                  ? Crossing::no_cross
                                  : (inside[a.source] ? Crossing::exit : Crossing::enter);
            auto& first = first_arc[static_cast<std::size_t>(e)];
            if (!first) {
                first = i;
                r.crossing[static_cast<std::size_t>(e)] = type;
            } else if (r.crossing[static_cast<std::size_t>(e)] != type) {
                out.violation = RegionViolation{e, arcs[*first], a};
                return out;
            }
        }
    }
    out.region = std::move(r);
    return out;
}

std::vector<Region> enumerate_minimal_regions_bruteforce(const TransitionSystem& ts, std::size_t max_states) {
    require_tau_free(ts);
    const auto n = ts.num_states();
    if (n > max_states || n > 30)
        throw ResourceLimitError("brute-force region enumeration refused: too many states", std::min<std::size_t>(max_states, 30));
    const auto by_event = arcs_by_event(ts);
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;

    std::vector<std::uint64_t> regions;
    for (std::uint64_t mask = 1; mask < full; ++mask) {
        auto inside = [mask](StateId s) { return (mask >> s) & 1u; };
        const bool ok = std::all_of(by_event.begin(), by_event.end(),
                                    [&](const EventArcs& ea) { return legal(classify(ea, inside), kAnyCrossing); });
        if (ok) regions.push_back(mask);
    }
    std::stable_sort(regions.begin(), regions.end(),
                     [](auto a, auto b) { return std::popcount(a) < std::popcount(b); });
    std::vector<std::uint64_t> minimal;
    for (const auto r : regions)
        if (std::none_of(minimal.begin(), minimal.end(), [r](auto m) { return (m & r) == m; })) minimal.push_back(r);

    std::vector<Region> out;
    for (const auto m : minimal) {
        std::vector<StateId> states;
        for (StateId s = 0; s < n; ++s)
            if ((m >> s) & 1u) states.push_back(s);
        out.push_back(make_region(ts, by_event, std::move(states)));
    }
    std::sort(out.begin(), out.end(), region_order);
    return out;
}

std::vector<Region> minimal_regions(const TransitionSystem& ts, std::size_t budget) {
    require_tau_free(ts);
    const auto by_event = arcs_by_event(ts);
    std::vector<StateBits> seeds;
    for (StateId s = 0; s < ts.num_states(); ++s) {
        StateBits b(ts.num_states());
        b.set(s);
        seeds.push_back(std::move(b));
    }
    SearchSpec spec{std::vector<std::uint8_t>(ts.num_events(), kAnyCrossing), StateBits(ts.num_states()), budget};
    const auto outcome = best_first(ts, by_event, seeds, spec);
    if (outcome.budget_hit) throw ResourceLimitError("minimal region search exceeded its budget", budget);
    std::vector<Region> out;
    for (const auto& bits : outcome.solutions) out.push_back(make_region(ts, by_event, bits.states()));
    std::sort(out.begin(), out.end(), region_order);
    return out;
}

EsspResult solve_essp(const TransitionSystem& ts, const EsspProblem& problem, const EsspOptions& options) {
    if (!ts.deterministic()) throw PreconditionError("ESSP solving needs a deterministic system without silent arcs");
    if (problem.state >= ts.num_states()) throw PreconditionError("ESSP state out of range");
    if (problem.witness == problem.forbidden) throw PreconditionError("ESSP witness and forbidden event coincide");
    const auto witness = ts.event_id(problem.witness);
    if (!witness || !ts.successor(problem.state, *witness))
        throw PreconditionError("ESSP witness '" + problem.witness + "' is not enabled at state " +
                                std::to_string(problem.state));
    const auto forbidden = ts.event_id(problem.forbidden);
    if (forbidden && ts.successor(problem.state, *forbidden))
        throw PreconditionError("ESSP forbidden event '" + problem.forbidden + "' is enabled at state " +
                                std::to_string(problem.state));

    const auto by_event = arcs_by_event(ts);
    SearchSpec spec{std::vector<std::uint8_t>(ts.num_events(), kAnyCrossing), StateBits(ts.num_states()),
                    options.budget, &options.observer};
    spec.allowed[static_cast<std::size_t>(*witness)] = bit(Crossing::exit);
    if (forbidden) spec.allowed[static_cast<std::size_t>(*forbidden)] = bit(Crossing::enter) | bit(Crossing::no_cross);

    StateBits seed(ts.num_states());
    seed.set(problem.state);
    const auto& wa = by_event[static_cast<std::size_t>(*witness)];
    for (const auto s : wa.sources) seed.set(s);
    for (const auto t : wa.targets) spec.excluded.set(t);

    const auto outcome = best_first(ts, by_event, {seed}, spec);
    EsspResult result;
    result.nodes_expanded = outcome.nodes;
    result.exhaustive = !outcome.budget_hit;
    for (const auto& bits : outcome.solutions) result.regions.push_back(make_region(ts, by_event, bits.states()));
    std::sort(result.regions.begin(), result.regions.end(), region_order);
    if (!result.regions.empty()) {
        result.status = EsspStatus::solved;
    } else {
        result.status = outcome.budget_hit ? EsspStatus::budget_exhausted : EsspStatus::unsolvable;
    }
    return result;
}

bool solves_essp(const TransitionSystem& ts, const Region& region, const EsspProblem& problem) {
    if (region.states.empty() || region.states.size() >= ts.num_states()) return false;
    const auto check = is_region(ts, region.states);
    if (!check || check.region->crossing != region.crossing) return false;
    if (!region.contains(problem.state)) return false;
    const auto witness = ts.event_id(problem.witness);
    if (!witness || region.crossing[static_cast<std::size_t>(*witness)] != Crossing::exit) return false;
    const auto forbidden = ts.event_id(problem.forbidden);
    return !forbidden || region.crossing[static_cast<std::size_t>(*forbidden)] != Crossing::exit;
}

NetSystem synthesize(const TransitionSystem& ts, const SynthesisOptions& options) {
    if (!ts.deterministic()) throw PreconditionError("synthesis needs a deterministic system without silent arcs");
    const auto regions = minimal_regions(ts, options.region_budget);

    NetSystem sys;
    for (std::size_t e = 0; e < ts.num_events(); ++e) sys.net.add_transition("t" + std::to_string(e + 1), ts.events()[e]);
    for (std::size_t k = 0; k < regions.size(); ++k) {
        const auto p = sys.net.add_place("p" + std::to_string(k + 1));
        for (const auto e : regions[k].entering()) sys.net.add_output_arc(static_cast<TransitionIndex>(e), p);
        for (const auto e : regions[k].exiting()) sys.net.add_input_arc(p, static_cast<TransitionIndex>(e));
    }
    auto marking_of = [&](StateId s) {
        Marking m(regions.size());
        for (std::size_t k = 0; k < regions.size(); ++k) m[k] = regions[k].contains(s) ? 1 : 0;
        return m;
    };
    sys.initial = marking_of(ts.initial());
    for (const auto f : ts.finals()) sys.add_final(marking_of(f));
    return sys;
}

}  // namespace fcrepair
