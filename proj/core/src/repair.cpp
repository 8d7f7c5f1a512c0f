#include "fcrepair/repair.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "fcrepair/error.hpp"

namespace fcrepair {

namespace {

/// (entering labels, exiting labels, initially marked, in some final marking)
using Signature = std::tuple<std::vector<Label>, std::vector<Label>, bool, bool>;

std::vector<Label> sorted_labels(const PetriNet& net, const std::vector<TransitionIndex>& ts, bool& has_silent) {
    std::vector<Label> out;
    for (const auto t : ts) {
        const auto& tr = net.transition(t);
        if (tr.silent()) {
            has_silent = true;
        } else {
            out.push_back(*tr.label);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::set<Signature> existing_signatures(const NetSystem& sys) {
    std::set<Signature> out;
    for (PlaceIndex p = 0; p < sys.net.num_places(); ++p) {
        bool silent = false;
        auto entering = sorted_labels(sys.net, sys.net.producers(p), silent);
        auto exiting = sorted_labels(sys.net, sys.net.consumers(p), silent);
        if (silent) continue;
        const bool in_final =
            std::any_of(sys.finals.begin(), sys.finals.end(), [p](const Marking& f) { return f[p] > 0; });
        out.emplace(std::move(entering), std::move(exiting), sys.initial[p] > 0, in_final);
    }
    return out;
}

std::vector<Label> net_labels_of(const PetriNet& net, const TransitionSystem& ts, const std::vector<EventId>& events) {
    std::vector<Label> out;
    for (const auto e : events) {
        const Label name(ts.event_name(e));
        if (net.find_label(name)) out.push_back(name);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string fresh_place_id(const PetriNet& net, std::size_t& counter) {
    while (true) {
        auto id = "r" + std::to_string(++counter);
        if (!net.find_place(id) && !net.find_transition(id)) return id;
    }
}

void require_free_choice_workflow(const PetriNet& net) {
    const auto fc = is_free_choice(net);
    if (!fc.ok) {
        const auto [a, b] = fc.violations.front();
        throw PreconditionError("net is not free-choice: transitions '" + net.transition(a).id + "' and '" +
                                net.transition(b).id + "' have overlapping but different presets");
    }
    const auto wf = is_workflow_net(net);
    if (!wf.ok) {
        std::string msg = "net is not a workflow net";
        for (const auto& d : wf.diagnostics) msg += "; " + d;
        throw PreconditionError(msg);
    }
}

/// A region of `ts` with exactly `entering` entering, `exiting` exiting and
/// all other events not crossing, avoiding the initial and final states.
/// Solved as a two-colouring with union-find over equality constraints.
std::optional<std::vector<StateId>> constrained_region(const TransitionSystem& ts, const std::set<Label>& entering,
                                                       const std::set<Label>& exiting) {
    for (const auto& l : entering)
        if (exiting.count(l) || !ts.event_id(l)) return std::nullopt;
    for (const auto& l : exiting)
        if (!ts.event_id(l)) return std::nullopt;

    const auto n = ts.num_states();
    std::vector<StateId> parent(n);
    std::iota(parent.begin(), parent.end(), StateId{0});
    auto find = [&](StateId s) {
        while (parent[s] != s) s = parent[s] = parent[parent[s]];
        return s;
    };
    std::vector<std::pair<StateId, int>> fixed;
    for (const auto& a : ts.arcs()) {
        const Label name(ts.event_name(a.event));
        if (entering.count(name)) {
            fixed.emplace_back(a.source, 0);
            fixed.emplace_back(a.target, 1);
        } else if (exiting.count(name)) {
            fixed.emplace_back(a.source, 1);
            fixed.emplace_back(a.target, 0);
        } else {
            parent[find(a.source)] = find(a.target);
        }
    }
    fixed.emplace_back(ts.initial(), 0);
    for (const auto f : ts.finals()) fixed.emplace_back(f, 0);

    std::vector<int> value(n, -1);
    for (const auto& [s, v] : fixed) {
        auto& slot = value[find(s)];
        if (slot != -1 && slot != v) return std::nullopt;
        slot = v;
    }
    std::vector<StateId> region;
    for (StateId s = 0; s < n; ++s)
        if (value[find(s)] == 1) region.push_back(s);
    if (region.empty()) return std::nullopt;
    return region;
}

nlohmann::json metrics_json(const ConformanceSummary& m) {
    nlohmann::json j;
    j["replay_fitness"] = m.replay_fitness;
    j["weighted_fitness"] = m.weighted_fitness;
    j["entropy_log"] = m.entropy_log;
    j["entropy_model"] = m.entropy_model;
    j["entropy_intersection"] = m.entropy_intersection;
    j["precision"] = m.precision ? nlohmann::json(*m.precision) : nlohmann::json(nullptr);
    j["fitness_entropy"] = m.fitness_entropy ? nlohmann::json(*m.fitness_entropy) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json size_json(const NetSize& s) {
    return {{"places", s.places}, {"transitions", s.transitions}, {"arcs", s.arcs}};
}

std::string fixed3(double v) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(3);
    out << v;
    return out.str();
}

std::string join(const std::vector<Label>& labels) {
    std::string out;
    for (const auto& l : labels) out += (out.empty() ? "" : ", ") + l;
    return out.empty() ? "-" : out;
}

}  // namespace

std::size_t RepairReport::solved() const {
    return static_cast<std::size_t>(std::count_if(problems.begin(), problems.end(),
                                                  [](const auto& p) { return p.status == EsspStatus::solved; }));
}

std::size_t RepairReport::unsolvable() const {
    return static_cast<std::size_t>(std::count_if(problems.begin(), problems.end(),
                                                  [](const auto& p) { return p.status == EsspStatus::unsolvable; }));
}

std::size_t RepairReport::budget_exhausted() const {
    return static_cast<std::size_t>(std::count_if(
        problems.begin(), problems.end(), [](const auto& p) { return p.status == EsspStatus::budget_exhausted; }));
}

FalseFreeChoice find_false_free_choice(const PetriNet& net, const TransitionSystem& ts) {
    if (!is_free_choice(net).ok) throw PreconditionError("net is not free-choice");
    if (!ts.deterministic()) throw PreconditionError("transition system is not deterministic and τ-free");
    if (minimize(ts).num_states() != ts.num_states()) throw PreconditionError("transition system is not minimal");

    std::map<std::vector<PlaceIndex>, std::vector<TransitionIndex>> by_preset;
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t)
        if (!net.transition(t).silent() && !net.inputs(t).empty()) by_preset[net.inputs(t)].push_back(t);

    FalseFreeChoice out;
    for (auto& [preset, members] : by_preset) {
        if (members.size() < 2) continue;
        TransitionCluster c;
        c.transitions = members;
        for (const auto t : members) c.labels.push_back(*net.transition(t).label);
        out.clusters.push_back(std::move(c));
    }
    std::sort(out.clusters.begin(), out.clusters.end(),
              [](const auto& a, const auto& b) { return a.transitions.front() < b.transitions.front(); });

    std::set<Label> missing;
    for (std::size_t ci = 0; ci < out.clusters.size(); ++ci) {
        const auto& c = out.clusters[ci];
        std::vector<std::optional<EventId>> events;
        for (const auto& l : c.labels) {
            events.push_back(ts.event_id(l));
            if (!events.back()) missing.insert(l);
        }
        for (StateId s = 0; s < ts.num_states(); ++s) {
            std::vector<bool> enabled;
            for (const auto& e : events) enabled.push_back(e && ts.successor(s, *e));
            for (std::size_t j = 0; j < events.size(); ++j) {
                if (enabled[j]) continue;
                for (std::size_t i = 0; i < events.size(); ++i) {
                    if (!enabled[i]) continue;
                    out.problems.push_back(EsspProblem{s, c.labels[j], c.labels[i], c.labels});
                    out.problem_cluster.push_back(ci);
                }
            }
        }
    }
    out.missing_labels.assign(missing.begin(), missing.end());
    return out;
}

RepairResult repair(const NetSystem& sys, const EventLog& log, const RepairOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    sys.validate();
    require_free_choice_workflow(sys.net);

    const auto ts = minimize(build_prefix_tree(log));
    const auto ffc = find_false_free_choice(sys.net, ts);

    RepairReport report;
    report.log_traces = log.distinct_traces();
    report.ts_states = ts.num_states();
    report.clusters = ffc.clusters;
    report.missing_labels = ffc.missing_labels;

    for (std::size_t i = 0; i < ffc.problems.size(); ++i) {
        EsspOptions eo;
        eo.budget = options.essp_budget;
        if (options.observer) eo.observer = [&, i](const SearchStep& step) { options.observer(i, step); };
        const auto result = solve_essp(ts, ffc.problems[i], eo);
        ProblemOutcome po;
        po.problem = ffc.problems[i];
        po.cluster = ffc.problem_cluster[i];
        po.status = result.status;
        po.nodes_expanded = result.nodes_expanded;
        for (const auto& r : result.regions) po.regions.push_back(r.states);
        report.problems.push_back(std::move(po));

        for (const auto& r : result.regions) {
            auto entering = net_labels_of(sys.net, ts, r.entering());
            auto exiting = net_labels_of(sys.net, ts, r.exiting());
            if (entering.empty() && exiting.empty()) continue;
            const bool initial = r.contains(ts.initial());
            const auto finals = ts.finals();
            const bool in_final = std::any_of(finals.begin(), finals.end(), [&](StateId f) { return r.contains(f); });
            report.added_places.push_back(
                AddedPlace{{}, std::move(entering), std::move(exiting), initial, in_final, r.states, {i}});
        }
    }

    // Deduplicate by signature and drop regions that an existing place already encodes.
    const auto existing = existing_signatures(sys);
    std::map<Signature, std::size_t> kept;
    std::set<Signature> matched_existing;
    std::vector<AddedPlace> places;
    std::size_t counter = 0;
    for (auto& candidate : report.added_places) {
        Signature sig{candidate.entering, candidate.exiting, candidate.initial, candidate.finals_extended};
        const auto problem = candidate.problems.front();
        if (existing.count(sig)) {
            matched_existing.insert(sig);
            continue;
        }
        if (const auto it = kept.find(sig); it != kept.end()) {
            auto& owners = places[it->second].problems;
            if (owners.back() != problem) owners.push_back(problem);
            continue;
        }
        candidate.id = fresh_place_id(sys.net, counter);
        kept.emplace(std::move(sig), places.size());
        places.push_back(std::move(candidate));
    }
    report.added_places = std::move(places);
    report.regions_matching_existing_places = matched_existing.size();
    for (const auto& p : report.added_places)
        for (const auto i : p.problems) report.problems[i].places.push_back(p.id);

    NetSystem out = sys;
    for (const auto& p : report.added_places) {
        PlaceSpec spec;
        spec.id = p.id;
        for (const auto& l : p.entering) spec.entering.push_back(*sys.net.find_label(l));
        for (const auto& l : p.exiting) spec.exiting.push_back(*sys.net.find_label(l));
        spec.mark_initial = p.initial;
        spec.extend_finals = p.finals_extended;
        out = add_place(out, spec);
    }

    if (!report.added_places.empty()) {
        for (const auto& [trace, count] : log.traces())
            if (accepts(sys, trace, options.max_states) && !accepts(out, trace, options.max_states))
                throw std::logic_error("repair rejected a trace the input net accepts");
    }

    report.size_before = net_size(sys.net);
    report.size_after = net_size(out.net);
    if (options.compute_metrics) {
        ConformanceOptions co;
        co.max_states = options.max_states;
        try {
            report.metrics_before = precision(sys, log, co);
            report.metrics_after = precision(out, log, co);
        } catch (const ResourceLimitError& e) {
            report.metrics_error = e.what();
        }
    }
    if (options.soundness_prediction) report.soundness = predict_soundness(sys, report, options.max_states);
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return {std::move(out), std::move(report)};
}

SoundnessPrediction predict_soundness(const NetSystem& original, const RepairReport& report,
                                      std::size_t max_states) {
    SoundnessPrediction out;
    try {
        out.net_sound = check_soundness(original, max_states).is_sound;
    } catch (const PreconditionError&) {
        out.net_sound = false;
    }

    std::map<std::size_t, std::vector<const AddedPlace*>> by_cluster;
    for (const auto& p : report.added_places) {
        std::set<std::size_t> owners;
        for (const auto i : p.problems) owners.insert(report.problems[i].cluster);
        for (const auto c : owners) by_cluster[c].push_back(&p);
    }
    if (by_cluster.empty()) {
        if (out.net_sound) out.predicts_sound = true;
        return out;
    }

    const auto model = tau_closure(reachability_graph(original, max_states).ts);
    for (const auto& [ci, places] : by_cluster) {
        ClusterSoundness cs;
        cs.labels = report.clusters[ci].labels;
        std::set<Label> entering, exiting;
        cs.exits_disjoint = true;
        for (const auto* p : places) {
            cs.places.push_back(p->id);
            for (const auto& l : p->exiting)
                if (!exiting.insert(l).second) cs.exits_disjoint = false;
            entering.insert(p->entering.begin(), p->entering.end());
        }
        cs.exits_cover_cluster = exiting == std::set<Label>(cs.labels.begin(), cs.labels.end());
        cs.region = constrained_region(model, entering, exiting);
        cs.holds = out.net_sound && cs.exits_disjoint && cs.exits_cover_cluster && cs.region.has_value();
        out.clusters.push_back(std::move(cs));
    }
    if (out.clusters.size() == 1 && out.clusters.front().holds) out.predicts_sound = true;
    return out;
}

std::string report_jsonl(const RepairReport& report) {
    using nlohmann::json;
    std::string out;
    auto emit = [&](const json& j) { out += j.dump() + "\n"; };

    emit({{"record", "summary"},
          {"log_traces", report.log_traces},
          {"ts_states", report.ts_states},
          {"clusters", report.clusters.size()},
          {"problems", report.problems.size()},
          {"solved", report.solved()},
          {"unsolvable", report.unsolvable()},
          {"budget_exhausted", report.budget_exhausted()},
          {"new_places", report.added_places.size()},
          {"regions_matching_existing_places", report.regions_matching_existing_places},
          {"missing_labels", report.missing_labels},
          {"size_before", size_json(report.size_before)},
          {"size_after", size_json(report.size_after)}});
    for (std::size_t i = 0; i < report.clusters.size(); ++i)
        emit({{"record", "cluster"}, {"index", i}, {"labels", report.clusters[i].labels}});
    for (std::size_t i = 0; i < report.problems.size(); ++i) {
        const auto& p = report.problems[i];
        emit({{"record", "problem"},
              {"index", i},
              {"state", p.problem.state},
              {"forbidden", p.problem.forbidden},
              {"witness", p.problem.witness},
              {"cluster", p.cluster},
              {"status", std::string(to_string(p.status))},
              {"nodes", p.nodes_expanded},
              {"regions", p.regions},
              {"places", p.places}});
    }
    for (const auto& p : report.added_places)
        emit({{"record", "place"},
              {"id", p.id},
              {"entering", p.entering},
              {"exiting", p.exiting},
              {"initial", p.initial},
              {"finals_extended", p.finals_extended},
              {"region", p.region},
              {"problems", p.problems}});
    if (report.metrics_before) {
        auto j = metrics_json(*report.metrics_before);
        j["record"] = "metrics";
        j["net"] = "before";
        emit(j);
    }
    if (report.metrics_after) {
        auto j = metrics_json(*report.metrics_after);
        j["record"] = "metrics";
        j["net"] = "after";
        emit(j);
    }
    if (report.metrics_error) emit({{"record", "metrics_error"}, {"message", *report.metrics_error}});
    if (report.soundness) {
        const auto& s = *report.soundness;
        json clusters = json::array();
        for (const auto& c : s.clusters)
            clusters.push_back({{"labels", c.labels},
                                {"places", c.places},
                                {"exits_disjoint", c.exits_disjoint},
                                {"exits_cover_cluster", c.exits_cover_cluster},
                                {"region", c.region ? json(*c.region) : json(nullptr)},
                                {"holds", c.holds}});
        emit({{"record", "soundness_prediction"},
              {"net_sound", s.net_sound},
              {"clusters", clusters},
              {"predicts_sound", s.predicts_sound ? json(*s.predicts_sound) : json(nullptr)}});
    }
    return out;
}

std::string report_summary(const RepairReport& report) {
    std::ostringstream out;
    out << "log: " << report.log_traces << " distinct traces, minimal transition system with " << report.ts_states
        << " states\n";
    out << "free-choice clusters: " << report.clusters.size() << "\n";
    out << "separation problems: " << report.problems.size() << " (solved " << report.solved() << ", unsolvable "
        << report.unsolvable() << ", budget exhausted " << report.budget_exhausted() << ")\n";
    if (!report.missing_labels.empty()) out << "cluster labels absent from the log: " << join(report.missing_labels) << "\n";
    out << "new places: " << report.added_places.size() << "\n";
    for (const auto& p : report.added_places) {
        out << "  " << p.id << ": " << join(p.entering) << " -> " << join(p.exiting);
        if (p.initial) out << " [marked]";
        if (p.finals_extended) out << " [in final marking]";
        out << "\n";
    }
    out << "places " << report.size_before.places << " -> " << report.size_after.places << ", transitions "
        << report.size_after.transitions << ", arcs " << report.size_before.arcs << " -> " << report.size_after.arcs
        << "\n";
    if (report.metrics_before && report.metrics_after) {
        auto prec = [](const ConformanceSummary& m) {
            return m.precision ? fixed3(*m.precision) : std::string("undefined");
        };
        out << "fitness " << fixed3(report.metrics_before->replay_fitness) << " -> "
            << fixed3(report.metrics_after->replay_fitness) << ", precision " << prec(*report.metrics_before)
            << " -> " << prec(*report.metrics_after) << "\n";
    }
    if (report.metrics_error) out << "metrics unavailable: " << *report.metrics_error << "\n";
    if (report.soundness) {
        const auto& s = *report.soundness;
        out << "soundness prediction: "
            << (s.predicts_sound ? (*s.predicts_sound ? "sound" : "unsound") : "no prediction") << "\n";
    }
    return out.str();
}

}  // namespace fcrepair
