#include "fcrepair/conformance.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fcrepair/error.hpp"

namespace fcrepair {

namespace {

using SparseRows = std::vector<std::vector<std::pair<std::size_t, double>>>;

/// Iterative Tarjan; returns the component index of every node.
std::vector<std::size_t> strongly_connected(const SparseRows& rows, std::size_t& count) {
    const auto n = rows.size();
    constexpr auto unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call;  // node, next edge
    std::size_t next_index = 0;
    count = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        call.emplace_back(root, 0);
        while (!call.empty()) {
            auto& [v, edge] = call.back();
            if (edge == 0 && index[v] == unvisited) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (edge < rows[v].size()) {
                const auto w = rows[v][edge++].first;
                if (index[w] == unvisited) {
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
            const auto finished = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[finished]);
        }
    }
    return comp;
}

double block_radius(const SparseRows& rows, const std::vector<std::size_t>& members,
                    const std::vector<std::size_t>& local, const std::vector<std::size_t>& comp, std::size_t id,
                    const SpectralOptions& options) {
    if (members.size() == 1) {
        double loop = 0.0;
        for (const auto& [j, w] : rows[members[0]])
            if (j == members[0]) loop += w;
        return loop;
    }
    const auto m = members.size();
    std::vector<double> x(m, 1.0), y(m);
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            double sum = x[i];
            for (const auto& [j, w] : rows[members[i]])
                if (comp[j] == id) sum += w * x[local[j]];
            y[i] = sum;
        }
        double lo = y[0] / x[0], hi = lo, top = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = y[i] / x[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            top = std::max(top, y[i]);
        }
        if (hi - lo <= options.tolerance * hi) return (lo + hi) / 2.0 - 1.0;
        for (std::size_t i = 0; i < m; ++i) x[i] = y[i] / top;
    }
    throw ConvergenceError("power iteration did not converge within " + std::to_string(options.max_iterations) +
                           " iterations");
}

double sparse_radius(const SparseRows& rows, const SpectralOptions& options) {
    std::size_t count = 0;
    const auto comp = strongly_connected(rows, count);
    std::vector<std::vector<std::size_t>> members(count);
    std::vector<std::size_t> local(rows.size());
    for (std::size_t v = 0; v < rows.size(); ++v) {
        local[v] = members[comp[v]].size();
        members[comp[v]].push_back(v);
    }
    double best = 0.0;
    for (std::size_t c = 0; c < count; ++c)
        best = std::max(best, block_radius(rows, members[c], local, comp, c, options));
    return best;
}

SparseRows short_circuit_rows(const TransitionSystem& ts) {
    if (!ts.deterministic()) throw PreconditionError("entropy needs a deterministic system without silent arcs");
    const auto t = trim(ts);
    const auto finals = t.finals();
    if (finals.empty()) return {};
    SparseRows rows(t.num_states());
    auto add = [&](StateId from, StateId to) {
        auto& row = rows[from];
        const auto it = std::find_if(row.begin(), row.end(), [to](const auto& e) { return e.first == to; });
        if (it == row.end()) {
            row.emplace_back(to, 1.0);
        } else {
            it->second += 1.0;
        }
    };
    for (const auto& a : t.arcs()) add(a.source, a.target);
    for (const auto f : finals) add(f, t.initial());
    return rows;
}

double ratio_or_equality(double numerator, double denominator, const TransitionSystem& part,
                         const TransitionSystem& whole) {
    if (denominator > 0.0) return std::clamp(numerator / denominator, 0.0, 1.0);
    return language_equal(part, whole) ? 1.0 : 0.0;
}

}  // namespace

double spectral_radius(const std::vector<std::vector<double>>& matrix, const SpectralOptions& options) {
    const auto n = matrix.size();
    SparseRows rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (matrix[i].size() != n) throw PreconditionError("spectral radius needs a square matrix");
        for (std::size_t j = 0; j < n; ++j) {
            if (matrix[i][j] < 0.0) throw PreconditionError("spectral radius needs a non-negative matrix");
            if (matrix[i][j] > 0.0) rows[i].emplace_back(j, matrix[i][j]);
        }
    }
    return sparse_radius(rows, options);
}

std::vector<std::vector<double>> short_circuit_matrix(const TransitionSystem& ts) {
    const auto rows = short_circuit_rows(ts);
    std::vector<std::vector<double>> out(rows.size(), std::vector<double>(rows.size(), 0.0));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& [j, w] : rows[i]) out[i][j] = w;
    return out;
}

double entropy(const TransitionSystem& ts, const SpectralOptions& options) {
    const auto rows = short_circuit_rows(ts);
    if (rows.empty()) return 0.0;
    return std::log(sparse_radius(rows, options));
}

double replay_fitness(const NetSystem& sys, const EventLog& log, std::size_t max_states) {
    if (log.empty()) return 1.0;
    const auto rg = reachability_graph(sys, max_states);
    std::size_t accepted = 0;
    for (const auto& [trace, count] : log.traces())
        if (accepts(rg.ts, trace)) ++accepted;
    return static_cast<double>(accepted) / static_cast<double>(log.distinct_traces());
}

double weighted_replay_fitness(const NetSystem& sys, const EventLog& log, std::size_t max_states) {
    if (log.empty()) return 1.0;
    const auto rg = reachability_graph(sys, max_states);
    std::size_t accepted = 0, total = 0;
    for (const auto& [trace, count] : log.traces()) {
        total += count;
        if (accepts(rg.ts, trace)) accepted += count;
    }
    return static_cast<double>(accepted) / static_cast<double>(total);
}

ConformanceSummary precision(const NetSystem& sys, const EventLog& log, const ConformanceOptions& options) {
    ConformanceSummary out;
    const auto rg = reachability_graph(sys, options.max_states);
    const auto model = tau_closure(rg.ts, options.max_subsets);
    const auto log_ts = minimize(build_prefix_tree(log));
    const auto both = intersect(log_ts, model);

    if (!log.empty()) {
        std::size_t accepted = 0, weighted = 0, total = 0;
        for (const auto& [trace, count] : log.traces()) {
            total += count;
            if (accepts(model, trace)) {
                ++accepted;
                weighted += count;
            }
        }
        out.replay_fitness = static_cast<double>(accepted) / static_cast<double>(log.distinct_traces());
        out.weighted_fitness = static_cast<double>(weighted) / static_cast<double>(total);
    }

    out.entropy_log = entropy(log_ts, options.spectral);
    out.entropy_model = entropy(model, options.spectral);
    out.entropy_intersection = entropy(both, options.spectral);
    out.log_states = log_ts.num_states();
    out.model_states = model.num_states();
    out.intersection_states = both.num_states();

    if (!language_empty(model)) out.precision = ratio_or_equality(out.entropy_intersection, out.entropy_model, both, model);
    if (!log.empty())
        out.fitness_entropy = ratio_or_equality(out.entropy_intersection, out.entropy_log, both, log_ts);
    return out;
}

}  // namespace fcrepair
