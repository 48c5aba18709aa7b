#include "islander/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "islander/errors.hpp"
#include "islander/graph.hpp"

namespace islander {

const char* to_string(RunStatus status) noexcept {
    switch (status) {
        case RunStatus::running: return "running";
        case RunStatus::steady: return "steady";
        case RunStatus::disagreement: return "disagreement";
    }
    return "running";
}

const char* to_string(EstimatorMode mode) noexcept {
    switch (mode) {
        case EstimatorMode::simulate: return "simulate";
        case EstimatorMode::closed_form: return "closed-form";
        case EstimatorMode::exact: return "exact";
    }
    return "simulate";
}

bool ConsensusRun::contains(NodeId node) const { return std::binary_search(vertices.begin(), vertices.end(), node); }

double ConsensusRun::rate_at(NodeId node) const {
    const auto it = std::lower_bound(vertices.begin(), vertices.end(), node);
    if (it == vertices.end() || *it != node) throw EstimatorError(fmt::format("node {} is not part of the run", node));
    return xdot[static_cast<std::size_t>(it - vertices.begin())];
}

double ConsensusRun::mean_rate() const {
    double sum = 0.0;
    for (double r : xdot) sum += r;
    return xdot.empty() ? 0.0 : sum / static_cast<double>(xdot.size());
}

AuxiliaryGraph build_auxiliary_graph(const Grid& grid, const Partition& part, IslandId island, NodeId probe) {
    if (island >= part.island_count()) throw InputError(fmt::format("island {} out of range", island));
    AuxiliaryGraph aux;
    aux.island = island;
    aux.probe = probe;
    aux.probe_is_member = part.island_of(probe) == island;
    if (!aux.probe_is_member) {
        const auto nb = grid.neighbors(probe);
        const bool adjacent =
            std::any_of(nb.begin(), nb.end(), [&](NodeId v) { return part.island_of(v) == island; });
        if (!adjacent)
            throw InputError(
                fmt::format("bus {} is neither in nor adjacent to island {}", grid.label(probe), island));
    }
    for (NodeId v = 0; v < grid.size(); ++v) {
        const bool in_island = part.island_of(v) == island;
        if (v == probe ? !aux.probe_is_member : in_island) aux.vertices.push_back(v);
    }
    for (const auto& e : grid.edges()) {
        if (std::binary_search(aux.vertices.begin(), aux.vertices.end(), e.a) &&
            std::binary_search(aux.vertices.begin(), aux.vertices.end(), e.b))
            aux.edges.push_back(e);
    }
    return aux;
}

namespace {

// Induced subgraph in local indices.
struct LocalGraph {
    std::vector<NodeId> vertices;
    std::vector<double> power;
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> adjacency;
    std::vector<std::size_t> component;
    std::size_t components = 0;
    std::size_t max_degree = 0;
};

LocalGraph local_graph(const Grid& grid, std::span<const NodeId> vertices) {
    LocalGraph g;
    g.vertices.assign(vertices.begin(), vertices.end());
    std::sort(g.vertices.begin(), g.vertices.end());
    g.vertices.erase(std::unique(g.vertices.begin(), g.vertices.end()), g.vertices.end());
    if (g.vertices.empty()) throw EstimatorError("consensus run over an empty vertex set");

    const std::size_t n = g.vertices.size();
    g.power.resize(n);
    g.offsets.assign(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const NodeId v = g.vertices[k];
        g.power[k] = grid.power(v);
        for (NodeId w : grid.neighbors(v)) {
            const auto it = std::lower_bound(g.vertices.begin(), g.vertices.end(), w);
            if (it != g.vertices.end() && *it == w)
                g.adjacency.push_back(static_cast<std::size_t>(it - g.vertices.begin()));
        }
        g.offsets[k + 1] = g.adjacency.size();
        g.max_degree = std::max(g.max_degree, g.offsets[k + 1] - g.offsets[k]);
    }

    constexpr auto none = static_cast<std::size_t>(-1);
    g.component.assign(n, none);
    for (std::size_t s = 0; s < n; ++s) {
        if (g.component[s] != none) continue;
        std::deque<std::size_t> queue{s};
        g.component[s] = g.components;
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for (std::size_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
                const std::size_t w = g.adjacency[e];
                if (g.component[w] == none) {
                    g.component[w] = g.components;
                    queue.push_back(w);
                }
            }
        }
        ++g.components;
    }
    return g;
}

// out = p - L x, reading every neighbour's state once.
template <bool Observe>
void rates(const LocalGraph& g, const std::vector<double>& x, std::vector<double>& out,
           const std::function<void(NodeId, NodeId)>& on_read) {
    const std::size_t n = g.vertices.size();
    for (std::size_t k = 0; k < n; ++k) {
        double flow = 0.0;
        const double own = x[k];
        for (std::size_t e = g.offsets[k]; e < g.offsets[k + 1]; ++e) {
            const std::size_t j = g.adjacency[e];
            if constexpr (Observe) on_read(g.vertices[k], g.vertices[j]);
            flow += x[j] - own;
        }
        out[k] = g.power[k] + flow;
    }
}

// Per-component mean rates; returns true when every component is steady.
bool steady(const LocalGraph& g, const std::vector<double>& xdot, double eps, std::vector<double>& means) {
    means.assign(g.components, 0.0);
    std::vector<std::size_t> counts(g.components, 0);
    for (std::size_t k = 0; k < xdot.size(); ++k) {
        means[g.component[k]] += xdot[k];
        ++counts[g.component[k]];
    }
    for (std::size_t c = 0; c < g.components; ++c) means[c] /= static_cast<double>(counts[c]);
    for (std::size_t k = 0; k < xdot.size(); ++k) {
        const double mean = means[g.component[k]];
        if (!(std::abs(xdot[k] - mean) <= eps * (1.0 + std::abs(mean)))) return false;
    }
    return true;
}

RunStatus settle(const std::vector<double>& means, double eps_dis) {
    if (means.size() < 2) return RunStatus::steady;
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    return (*hi - *lo > eps_dis) ? RunStatus::disagreement : RunStatus::steady;
}

}  // namespace

ConsensusRun integrate_consensus(const Grid& grid, std::span<const NodeId> vertices, const IntegratorOptions& opts) {
    const LocalGraph g = local_graph(grid, vertices);
    const std::size_t n = g.vertices.size();

    ConsensusRun run;
    run.vertices = g.vertices;
    run.component = g.component;
    run.dt = opts.dt > 0.0 ? opts.dt : 1.0 / static_cast<double>(g.max_degree + 1);
    run.x.assign(n, 0.0);
    run.xdot.assign(n, 0.0);

    const bool observe = static_cast<bool>(opts.on_read);
    auto eval = [&](const std::vector<double>& x, std::vector<double>& out) {
        if (observe)
            rates<true>(g, x, out, opts.on_read);
        else
            rates<false>(g, x, out, opts.on_read);
    };

    std::size_t trace_id = 0;
    if (opts.trace) trace_id = opts.trace->runs++;
    auto record = [&] {
        if (!opts.trace || opts.trace->every == 0 || run.iterations % opts.trace->every != 0) return;
        for (std::size_t k = 0; k < n; ++k)
            opts.trace->rows.push_back({trace_id, run.t, g.vertices[k], run.x[k], run.xdot[k]});
    };

    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    const std::size_t check_every = std::max<std::size_t>(1, opts.check_every);
    const double dt = run.dt;
    while (true) {
        eval(run.x, run.xdot);
        record();
        if (run.iterations % check_every == 0) {
            for (std::size_t k = 0; k < n; ++k)
                if (!std::isfinite(run.xdot[k]) || !std::isfinite(run.x[k]))
                    throw EstimatorError(fmt::format("consensus diverged at t = {} (dt = {})", run.t, dt));
            if (steady(g, run.xdot, opts.eps_ss, run.component_rates)) break;
        }
        if (run.iterations >= opts.max_iterations)
            throw EstimatorError(fmt::format("consensus not steady after {} iterations", run.iterations));

        if (opts.method == Integrator::euler) {
            for (std::size_t k = 0; k < n; ++k) run.x[k] += dt * run.xdot[k];
        } else {
            k1 = run.xdot;
            for (std::size_t k = 0; k < n; ++k) tmp[k] = run.x[k] + 0.5 * dt * k1[k];
            eval(tmp, k2);
            for (std::size_t k = 0; k < n; ++k) tmp[k] = run.x[k] + 0.5 * dt * k2[k];
            eval(tmp, k3);
            for (std::size_t k = 0; k < n; ++k) tmp[k] = run.x[k] + dt * k3[k];
            eval(tmp, k4);
            for (std::size_t k = 0; k < n; ++k)
                run.x[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
        run.t += dt;
        ++run.iterations;
    }
    run.status = settle(run.component_rates, opts.eps_dis);
    return run;
}

ConsensusRun closed_form_consensus(const Grid& grid, std::span<const NodeId> vertices, const IntegratorOptions& opts) {
    const LocalGraph g = local_graph(grid, vertices);
    ConsensusRun run;
    run.vertices = g.vertices;
    run.component = g.component;
    run.x.assign(g.vertices.size(), 0.0);
    run.component_rates.assign(g.components, 0.0);
    std::vector<std::size_t> counts(g.components, 0);
    for (std::size_t k = 0; k < g.vertices.size(); ++k) {
        run.component_rates[g.component[k]] += g.power[k];
        ++counts[g.component[k]];
    }
    for (std::size_t c = 0; c < g.components; ++c) run.component_rates[c] /= static_cast<double>(counts[c]);
    run.xdot.resize(g.vertices.size());
    for (std::size_t k = 0; k < g.vertices.size(); ++k) run.xdot[k] = run.component_rates[g.component[k]];
    run.status = settle(run.component_rates, opts.eps_dis);
    return run;
}

namespace {

double one_hop_rate(const Grid& grid, const ConsensusRun& run, NodeId probe) {
    if (run.contains(probe)) return run.rate_at(probe);
    for (NodeId v : grid.neighbors(probe))
        if (run.contains(v)) return run.rate_at(v);
    throw EstimatorError(fmt::format("bus {} has no neighbour in the consensus run", grid.label(probe)));
}

}  // namespace

RateEstimate steady_rates(const Grid& grid, const ConsensusRun& island_run, const ConsensusRun& aux_run, NodeId probe,
                          bool member) {
    for (const ConsensusRun* run : {&island_run, &aux_run}) {
        if (run->status == RunStatus::running) throw EstimatorError("rates read before steady state");
        if (run->status == RunStatus::disagreement)
            throw EstimatorError("consensus components disagree; no common rate");
    }
    return {one_hop_rate(grid, island_run, probe), one_hop_rate(grid, aux_run, probe), member ? -1 : 1};
}

ImbalanceEstimate estimate_imbalance(const RateEstimate& rates, double probe_power, double eps_sing) {
    ImbalanceEstimate out;
    const double gap = rates.omega_hat - rates.omega;
    if (!(std::abs(gap) > eps_sing * (1.0 + std::abs(rates.omega)))) {
        out.condition = Condition::singular;
        return out;
    }
    out.size = static_cast<double>(rates.sign) * (probe_power - rates.omega_hat) / gap;
    if (!std::isfinite(out.size) || out.size < 0.5)
        throw EstimatorError(fmt::format("recovered island size {} is not a positive integer", out.size));
    out.size_rounded = static_cast<std::size_t>(std::llround(out.size));
    out.power_formula = rates.omega * out.size;
    out.power = rates.omega * static_cast<double>(out.size_rounded);
    out.condition = Condition::well_posed;
    return out;
}

DecisionEstimate estimate_for_decision(const Grid& grid, const Partition& part, NodeId probe, IslandId island,
                                       EstimatorMode mode, const IntegratorOptions& opts, double eps_sing) {
    const AuxiliaryGraph aux = build_auxiliary_graph(grid, part, island, probe);
    if (aux.vertices.empty())
        throw InputError(fmt::format("bus {} is the only member of island {}", grid.label(probe), island));

    DecisionEstimate out;
    if (mode == EstimatorMode::exact) {
        out.estimate.power = island_imbalance(grid, part, island);
        out.estimate.power_formula = out.estimate.power;
        out.estimate.size_rounded = part.island_size(island);
        out.estimate.size = static_cast<double>(out.estimate.size_rounded);
        out.estimate.condition = Condition::well_posed;
        out.aux_components = induced_components(grid, aux.vertices).size();
        return out;
    }

    const auto members = part.members(island);
    const bool simulate = mode == EstimatorMode::simulate;
    const ConsensusRun island_run =
        simulate ? integrate_consensus(grid, members, opts) : closed_form_consensus(grid, members, opts);
    const ConsensusRun aux_run =
        simulate ? integrate_consensus(grid, aux.vertices, opts) : closed_form_consensus(grid, aux.vertices, opts);
    out.aux_components = aux_run.component_count();
    out.disagreement = aux_run.status == RunStatus::disagreement;
    if (out.disagreement) return out;
    if (out.aux_components > 1)
        spdlog::warn("bus {}: auxiliary graph of island {} split into {} components with equal rates", grid.label(probe),
                     island, out.aux_components);
    out.estimate = estimate_imbalance(steady_rates(grid, island_run, aux_run, probe, aux.probe_is_member),
                                      grid.power(probe), eps_sing);
    return out;
}

}  // namespace islander
