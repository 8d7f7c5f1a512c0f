#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fcrepair/conformance.hpp"
#include "fcrepair/dot.hpp"
#include "fcrepair/error.hpp"
#include "fcrepair/event_log.hpp"
#include "fcrepair/petri_net.hpp"
#include "fcrepair/pnml.hpp"
#include "fcrepair/region.hpp"
#include "fcrepair/repair.hpp"
#include "fcrepair/simulation.hpp"
#include "fcrepair/transition_system.hpp"

namespace fcrepair::cli {

namespace {

struct RunConfig {
    std::optional<std::size_t> top_k;
    std::size_t max_states = kDefaultMaxStates;
    std::size_t essp_budget = 50'000;
    std::uint64_t seed = 42;
    int verbosity = 0;
    bool strict = false;
    bool soundness_prediction = false;
    std::string dot_out;
    std::string out;
    std::string report;
    std::size_t n_traces = 100;
    std::size_t max_steps = 10'000;
};

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits = 3) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << content;
    if (!f) throw Error("cannot write " + path.string());
}

EventLog load_log(const RunConfig& cfg, const std::string& path) {
    auto log = read_log_file(path);
    if (cfg.top_k) log = filter_top_k(log, *cfg.top_k);
    return log;
}

void write_dot(const RunConfig& cfg, const std::string& file, const std::string& content) {
    if (cfg.dot_out.empty()) return;
    write_file(std::filesystem::path(cfg.dot_out) / file, content);
}

void print_metrics(std::ostream& out, const ConformanceSummary& m, const std::string& prefix = "") {
    out << prefix << "replay_fitness=" << num(m.replay_fitness) << "\n";
    out << prefix << "weighted_fitness=" << num(m.weighted_fitness) << "\n";
    out << prefix << "entropy_log=" << num(m.entropy_log) << "\n";
    out << prefix << "entropy_model=" << num(m.entropy_model) << "\n";
    out << prefix << "entropy_intersection=" << num(m.entropy_intersection) << "\n";
    out << prefix << "precision=" << (m.precision ? num(*m.precision) : "undefined") << "\n";
    out << prefix << "fitness_entropy=" << (m.fitness_entropy ? num(*m.fitness_entropy) : "undefined") << "\n";
}

int cmd_repair(const RunConfig& cfg, const std::string& log_path, const std::string& net_path, std::ostream& out,
               std::ostream& err) {
    const auto log = load_log(cfg, log_path);
    const auto sys = read_pnml_file(net_path);

    RepairOptions options;
    options.essp_budget = cfg.essp_budget;
    options.max_states = cfg.max_states;
    options.soundness_prediction = cfg.soundness_prediction;
    const auto ts = minimize(build_prefix_tree(log));
    if (cfg.verbosity > 0) {
        options.observer = [&](std::size_t problem, const SearchStep& step) {
            nlohmann::json j{{"problem", problem},
                             {"node", step.node},
                             {"candidate", step.candidate},
                             {"outcome", step.outcome}};
            j["violating_event"] =
                step.violating_event ? nlohmann::json(std::string(ts.event_name(*step.violating_event))) : nullptr;
            auto branches = nlohmann::json::array();
            for (const auto b : step.branches) branches.push_back(std::string(to_string(b)));
            j["branches"] = branches;
            err << j.dump() << "\n";
        };
    }
    const auto result = repair(sys, log, options);

    const auto pnml = serialize_pnml(result.net);
    std::ostream& info = cfg.out.empty() ? err : out;
    if (cfg.out.empty()) {
        out << pnml;
    } else {
        write_file(cfg.out, pnml);
    }
    if (!cfg.report.empty()) write_file(cfg.report, report_jsonl(result.report));
    write_dot(cfg, "input.dot", to_dot(sys, "input"));
    write_dot(cfg, "repaired.dot", to_dot(result.net, "repaired"));
    write_dot(cfg, "log_ts.dot", to_dot(ts, "log"));

    info << report_summary(result.report);
    info << "time_ms=" << fixed(result.report.wall_time_ms) << "\n";
    return kOk;
}

int cmd_synthesize(const RunConfig& cfg, const std::string& log_path, std::ostream& out, std::ostream& err) {
    const auto started = Clock::now();
    const auto log = load_log(cfg, log_path);
    const auto ts = minimize(build_prefix_tree(log));
    if (ts.num_states() > cfg.max_states)
        throw ResourceLimitError("minimal transition system too large for synthesis", cfg.max_states);
    const auto sys = synthesize(ts);
    ConformanceOptions co;
    co.max_states = cfg.max_states;
    const auto metrics = precision(sys, log, co);
    const auto size = net_size(sys.net);
    const auto ms = elapsed_ms(started);

    const auto pnml = serialize_pnml(sys, "synthesized");
    std::ostream& info = cfg.out.empty() ? err : out;
    if (cfg.out.empty()) {
        out << pnml;
    } else {
        write_file(cfg.out, pnml);
    }
    write_dot(cfg, "log_ts.dot", to_dot(ts, "log"));
    write_dot(cfg, "synthesized.dot", to_dot(sys, "synthesized"));

    info << "ts_states=" << ts.num_states() << "\n";
    info << "places=" << size.places << "\n";
    info << "transitions=" << size.transitions << "\n";
    info << "arcs=" << size.arcs << "\n";
    print_metrics(info, metrics);
    info << "time_ms=" << fixed(ms) << "\n";
    return kOk;
}

int cmd_check(const RunConfig& cfg, const std::string& net_path, std::ostream& out) {
    const auto sys = read_pnml_file(net_path);
    const auto& net = sys.net;
    const auto size = net_size(net);
    out << "places=" << size.places << "\n";
    out << "transitions=" << size.transitions << "\n";
    out << "arcs=" << size.arcs << "\n";

    const auto wf = is_workflow_net(net);
    out << "workflow_net=" << yes_no(wf.ok) << "\n";
    for (const auto& d : wf.diagnostics) out << "  " << d << "\n";

    const auto fc = is_free_choice(net);
    out << "free_choice=" << yes_no(fc.ok) << "\n";
    for (const auto& [a, b] : fc.violations)
        out << "  transitions " << net.transition(a).id << " and " << net.transition(b).id
            << " share some but not all input places\n";

    const auto rg = reachability_graph(sys, cfg.max_states);
    out << "reachable_markings=" << rg.markings.size() << "\n";
    out << "safe=" << yes_no(rg.safe) << "\n";
    if (rg.first_unsafe) out << "  unsafe marking " << format_marking(net, rg.markings[*rg.first_unsafe]) << "\n";

    bool sound = false;
    if (!wf.ok) {
        out << "sound=not applicable (not a workflow net)\n";
    } else {
        try {
            const auto s = check_soundness(sys, cfg.max_states);
            sound = s.is_sound;
            out << "sound=" << yes_no(s.is_sound) << "\n";
            for (const auto& m : s.unreachable_final_from)
                out << "  completion unreachable from " << format_marking(net, m) << "\n";
            for (const auto& m : s.improper_completions)
                out << "  improper completion " << format_marking(net, m) << "\n";
            for (const auto t : s.dead_transitions) out << "  dead transition " << net.transition(t).id << "\n";
            out << "final_markings_reachable=" << yes_no(s.always_reaches_some_final) << "\n";
            for (const auto& m : s.no_final_reachable_from)
                out << "  no final marking reachable from " << format_marking(net, m) << "\n";
        } catch (const PreconditionError& e) {
            out << "sound=not applicable (" << e.what() << ")\n";
        }
    }
    return cfg.strict && !sound ? kPrecondition : kOk;
}

int cmd_simulate(const RunConfig& cfg, const std::string& net_path, std::ostream& out) {
    const auto sys = read_pnml_file(net_path);
    SimulationOptions so;
    so.seed = cfg.seed;
    so.max_steps = cfg.max_steps;
    const auto text = serialize_traces_text(simulate_log(sys, cfg.n_traces, so));
    if (cfg.out.empty()) {
        out << text;
    } else {
        write_file(cfg.out, text);
    }
    return kOk;
}

int cmd_metrics(const RunConfig& cfg, const std::string& log_path, const std::string& net_path, std::ostream& out) {
    const auto started = Clock::now();
    const auto log = load_log(cfg, log_path);
    const auto sys = read_pnml_file(net_path);
    ConformanceOptions co;
    co.max_states = cfg.max_states;
    const auto m = precision(sys, log, co);
    const auto stats = log_stats(log);
    const auto size = net_size(sys.net);
    const auto ms = elapsed_ms(started);

    out << "distinct_traces=" << log.distinct_traces() << "\n";
    out << "trace_occurrences=" << stats.trace_occurrences << "\n";
    out << "event_occurrences=" << stats.event_occurrences << "\n";
    out << "unique_events=" << stats.unique_events << "\n";
    out << "places=" << size.places << "\n";
    out << "transitions=" << size.transitions << "\n";
    out << "arcs=" << size.arcs << "\n";
    print_metrics(out, m);
    out << "time_ms=" << fixed(ms) << "\n";

    out << "\n";
    out << std::left << std::setw(8) << "Traces" << std::setw(8) << "Events" << std::setw(8) << "Places"
        << std::setw(8) << "Trans" << std::setw(8) << "Arcs" << std::setw(10) << "Fitness" << std::setw(10)
        << "Prec." << "Time (ms)\n";
    out << std::setw(8) << stats.trace_occurrences << std::setw(8) << stats.unique_events << std::setw(8)
        << size.places << std::setw(8) << size.transitions << std::setw(8) << size.arcs << std::setw(10)
        << fixed(m.replay_fitness) << std::setw(10) << (m.precision ? fixed(*m.precision) : "n/a") << fixed(ms, 1)
        << "\n";
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Repair free-choice workflow nets with regions of an event log"};
    app.name("fcrepair");
    app.require_subcommand(1);
    RunConfig cfg;
    std::string log_path, net_path;
    std::size_t top_k = 0;

    std::vector<CLI::Option*> verbose_flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--max-states", cfg.max_states, "Bound on reachable markings / states")
            ->check(CLI::PositiveNumber);
        sub->add_option("--dot-out", cfg.dot_out, "Directory for Graphviz files");
        verbose_flags.push_back(sub->add_flag("-v,--verbose", "Verbose diagnostics on stderr"));
    };
    auto add_log = [&](CLI::App* sub) {
        sub->add_option("log", log_path, "Event log (.xes or trace text)")->required();
        sub->add_option("--top-k", top_k, "Keep only the k most frequent traces")->check(CLI::PositiveNumber);
    };

    auto* repair_cmd = app.add_subcommand("repair", "Add region places that separate falsely free choices");
    add_log(repair_cmd);
    repair_cmd->add_option("net", net_path, "Free-choice workflow net (PNML)")->required();
    repair_cmd->add_option("-o,--out", cfg.out, "Repaired PNML (default: stdout)");
    repair_cmd->add_option("--report", cfg.report, "Machine-readable report (JSON lines)");
    repair_cmd->add_option("--essp-budget", cfg.essp_budget, "Search nodes per separation problem")
        ->check(CLI::PositiveNumber);
    repair_cmd->add_flag("--predict-soundness", cfg.soundness_prediction, "Evaluate the sufficient soundness condition");
    add_common(repair_cmd);

    auto* synth_cmd = app.add_subcommand("synthesize", "Synthesize a net from the minimal regions of a log");
    add_log(synth_cmd);
    synth_cmd->add_option("-o,--out", cfg.out, "Synthesized PNML (default: stdout)");
    add_common(synth_cmd);

    auto* check_cmd = app.add_subcommand("check", "Structural and behavioural checks of a net");
    check_cmd->add_option("net", net_path, "Petri net (PNML)")->required();
    check_cmd->add_flag("--strict", cfg.strict, "Exit with code 3 unless the net is sound");
    add_common(check_cmd);

    auto* sim_cmd = app.add_subcommand("simulate", "Generate a log by random firing");
    sim_cmd->add_option("net", net_path, "Petri net (PNML)")->required();
    sim_cmd->add_option("-n,--traces", cfg.n_traces, "Number of traces")->check(CLI::NonNegativeNumber);
    sim_cmd->add_option("--seed", cfg.seed, "Random seed");
    sim_cmd->add_option("--max-steps", cfg.max_steps, "Firing cap per trace")->check(CLI::PositiveNumber);
    sim_cmd->add_option("-o,--out", cfg.out, "Output trace file (default: stdout)");
    add_common(sim_cmd);

    auto* metrics_cmd = app.add_subcommand("metrics", "Fitness, precision and size of a net against a log");
    add_log(metrics_cmd);
    metrics_cmd->add_option("net", net_path, "Petri net (PNML)")->required();
    add_common(metrics_cmd);

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    if (top_k > 0) cfg.top_k = top_k;
    for (const auto* flag : verbose_flags) cfg.verbosity += static_cast<int>(flag->count());

    try {
        if (repair_cmd->parsed()) return cmd_repair(cfg, log_path, net_path, out, err);
        if (synth_cmd->parsed()) return cmd_synthesize(cfg, log_path, out, err);
        if (check_cmd->parsed()) return cmd_check(cfg, net_path, out);
        if (sim_cmd->parsed()) return cmd_simulate(cfg, net_path, out);
        if (metrics_cmd->parsed()) return cmd_metrics(cfg, log_path, net_path, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kParse;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kPrecondition;
    } catch (const ResourceLimitError& e) {
        err << "error: " << e.what() << "\n";
        return kResource;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return kResource;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kParse;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kParse;
    }
    return kUsage;
}

}  // namespace fcrepair::cli
