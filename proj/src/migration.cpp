#include "islander/migration.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "islander/analysis.hpp"
#include "islander/errors.hpp"
#include "islander/graph.hpp"

namespace islander {

double migration_gain(double to_power, double from_power, double node_power) {
    return std::min(to_power + node_power, from_power - node_power) - std::min(to_power, from_power);
}

MigrationDecision evaluate_migration(double from_power, double to_power, double node_power, bool source_connected,
                                     double tol) {
    MigrationDecision d;
    d.from_after = from_power - node_power;
    d.to_after = to_power + node_power;
    d.migrate = source_connected && std::min(d.to_after, d.from_after) > std::min(to_power, from_power) + tol;
    return d;
}

MigrationDecision evaluate_migration(const Grid& grid, const Partition& part, NodeId node, IslandId from, IslandId to,
                                     double from_power, double to_power, double tol) {
    if (part.island_of(node) != from) throw InputError(fmt::format("bus {} is not in island {}", grid.label(node), from));
    const auto adjacent = adjacent_islands(grid, part, node);
    if (std::find(adjacent.begin(), adjacent.end(), to) == adjacent.end())
        throw InputError(fmt::format("bus {} does not border island {}", grid.label(node), to));
    const bool connected = part.island_size(from) > 1 && is_connected_without(grid, part, from, node);
    return evaluate_migration(from_power, to_power, grid.power(node), connected, tol);
}

IslandId select_target(std::span<const TargetCandidate> candidates, double from_power, double node_power) {
    if (candidates.empty()) throw InputError("select_target needs at least one candidate");
    const TargetCandidate* best = &candidates.front();
    double best_gain = migration_gain(best->power, from_power, node_power);
    for (const auto& c : candidates.subspan(1)) {
        const double gain = migration_gain(c.power, from_power, node_power);
        if (gain > best_gain || (gain == best_gain && c.island < best->island)) {
            best = &c;
            best_gain = gain;
        }
    }
    return best->island;
}

SchedulerState initial_state(const Grid& grid, const Partition& init) {
    SchedulerState s{init, imbalances(grid, init), {}, 0, init.step()};
    s.history.resize(grid.size());
    for (NodeId i = 0; i < grid.size(); ++i)
        s.history[i].push_back({init.island_of(i), s.imbalance[init.island_of(i)]});
    return s;
}

bool zero_power_eligible(const Grid& grid, const SchedulerState& state, NodeId node, IslandId to, double to_power,
                         double tol) {
    const IslandId from = state.partition.island_of(node);
    if (from == to || state.partition.island_size(from) < 2) return false;
    if (!is_connected_without(grid, state.partition, from, node)) return false;
    return std::none_of(state.history[node].begin(), state.history[node].end(), [&](const HistoryEntry& h) {
        return h.island == to && std::abs(h.power - to_power) <= tol;
    });
}

std::vector<HypothesisTriplet> check_hypothesis(const Grid& grid, const SchedulerState& state, double tol) {
    std::vector<HypothesisTriplet> out;
    const Partition& part = state.partition;
    for (const auto& b : boundary_nodes(grid, part)) {
        const NodeId i = b.node;
        const IslandId m = part.island_of(i);
        if (part.island_size(m) < 2 || !is_connected_without(grid, part, m, i)) continue;
        const double p = grid.power(i);
        const double pm = state.imbalance[m];
        for (IslandId l : b.islands) {
            const double pl = state.imbalance[l];
            const bool signs = (pl > pm + tol && p < -tol) || (pl < pm - tol && p > tol);
            if (signs) out.push_back({l, m, i, std::abs(pm - pl) > std::abs(p) + tol});
        }
    }
    return out;
}

// --- Scheduler ----------------------------------------------------------------

Scheduler::Scheduler(const Grid& grid, const Partition& init, RunOptions opts)
    : grid_(grid), opts_(std::move(opts)), state_(initial_state(grid, init)),
      island_version_(init.island_count(), 0) {}

bool Scheduler::is_zero(double p) const { return std::abs(p) <= opts_.tolerance; }

const ConsensusRun& Scheduler::island_run(IslandId island) {
    auto it = island_runs_.find(island);
    if (it != island_runs_.end() && it->second.first == island_version_[island]) return it->second.second;
    const auto members = state_.partition.members(island);
    ConsensusRun run = opts_.estimator == EstimatorMode::simulate
                           ? integrate_consensus(grid_, members, opts_.integrator)
                           : closed_form_consensus(grid_, members, opts_.integrator);
    ++stats_.consensus_runs;
    auto& slot = island_runs_[island];
    slot = {island_version_[island], std::move(run)};
    return slot.second;
}

const Scheduler::Estimate& Scheduler::estimate(NodeId probe, IslandId island) {
    const auto key = std::make_pair(island, probe);
    auto it = estimates_.find(key);
    if (it != estimates_.end() && it->second.first == island_version_[island]) return it->second.second;

    const Partition& part = state_.partition;
    const bool member = part.island_of(probe) == island;
    Estimate est;
    if (opts_.estimator == EstimatorMode::exact) {
        est.value.power = est.value.power_formula = state_.imbalance[island];
        est.value.size_rounded = part.island_size(island);
        est.value.size = static_cast<double>(est.value.size_rounded);
        est.value.condition = Condition::well_posed;
        est.connected_without = !member || is_connected_without(grid_, part, island, probe);
    } else {
        const AuxiliaryGraph aux = build_auxiliary_graph(grid_, part, island, probe);
        const ConsensusRun aux_run = opts_.estimator == EstimatorMode::simulate
                                         ? integrate_consensus(grid_, aux.vertices, opts_.integrator)
                                         : closed_form_consensus(grid_, aux.vertices, opts_.integrator);
        ++stats_.consensus_runs;
        const ConsensusRun& own_run = island_run(island);
        if (aux_run.status == RunStatus::disagreement) {
            ++stats_.disagreements;
            est.connected_without = false;
        } else {
            if (aux_run.component_count() > 1) {
                // equal component rates hide the split; fall back to the structure seen by the run
                ++stats_.structural_fallbacks;
                spdlog::warn("bus {}: removal splits island {} into parts with equal mean power",
                             grid_.label(probe), island);
                est.connected_without = false;
            }
            est.value = estimate_imbalance(steady_rates(grid_, own_run, aux_run, probe, member), grid_.power(probe),
                                           opts_.eps_sing);
        }
    }
    auto& slot = estimates_[key];
    slot = {island_version_[island], est};
    return slot.second;
}

std::optional<MigrationEvent> Scheduler::sweep(bool zero_power, bool& skipped) {
    const std::size_t n = grid_.size();
    const Partition& part = state_.partition;
    std::vector<std::size_t> sizes(part.island_count(), 0);
    for (NodeId i = 0; i < n; ++i) ++sizes[part.island_of(i)];

    for (std::size_t offset = 0; offset < n; ++offset) {
        const auto i = static_cast<NodeId>((state_.sweep_cursor + offset) % n);
        const double p = grid_.power(i);
        if (is_zero(p) != zero_power) continue;
        const auto adjacent = adjacent_islands(grid_, part, i);
        if (adjacent.empty()) continue;
        const IslandId m = part.island_of(i);
        if (sizes[m] < 2) continue;

        const Estimate& own = estimate(i, m);
        if (!own.connected_without) continue;
        if (!zero_power && !own.value.well_posed()) {
            ++stats_.singular_skips;
            skipped = true;
            continue;
        }

        std::vector<TargetCandidate> candidates;
        for (IslandId l : adjacent) {
            const Estimate& e = estimate(i, l);
            if (!e.value.well_posed()) {
                ++stats_.singular_skips;
                skipped = true;
                continue;
            }
            if (zero_power && !zero_power_eligible(grid_, state_, i, l, e.value.power, opts_.tolerance)) continue;
            candidates.push_back({l, e.value.power});
        }
        if (candidates.empty()) continue;

        if (zero_power) return apply(i, select_target(candidates, 0.0, p), MigrationRule::zero_power);

        const IslandId target = select_target(candidates, own.value.power, p);
        const double target_power =
            std::find_if(candidates.begin(), candidates.end(), [&](const TargetCandidate& c) {
                return c.island == target;
            })->power;
        if (evaluate_migration(own.value.power, target_power, p, true, opts_.tolerance).migrate)
            return apply(i, target, MigrationRule::normal);
    }
    return std::nullopt;
}

std::optional<MigrationEvent> Scheduler::step() {
    bool skipped = false;
    auto event = sweep(false, skipped);
    if (!event && opts_.zero_power_moves) event = sweep(true, skipped);
    incomplete_ = !event && skipped;
    return event;
}

MigrationEvent Scheduler::apply(NodeId node, IslandId to, MigrationRule rule) {
    const IslandId from = state_.partition.island_of(node);
    const double p = grid_.power(node);

    MigrationEvent ev;
    ev.node = node;
    ev.from_island = from;
    ev.to_island = to;
    ev.p = p;
    ev.from_before = state_.imbalance.values[from];
    ev.to_before = state_.imbalance.values[to];
    ev.rule = rule;

    state_.partition = state_.partition.with_move(grid_, node, to);
    state_.imbalance.values[from] -= p;
    state_.imbalance.values[to] += p;
    state_.imbalance.total = 0.0;
    for (double v : state_.imbalance.values) state_.imbalance.total += v;
    ev.from_after = state_.imbalance.values[from];
    ev.to_after = state_.imbalance.values[to];

    const ImbalanceVector truth = imbalances(grid_, state_.partition);
    for (std::size_t l = 0; l < truth.size(); ++l) {
        if (std::abs(truth[l] - state_.imbalance[l]) > 1e-9 * (1.0 + std::abs(truth[l])))
            throw Error(fmt::format("imbalance bookkeeping drifted on island {}: {} vs {}", l, state_.imbalance[l],
                                    truth[l]));
    }

    for (NodeId i = 0; i < grid_.size(); ++i) {
        const IslandId l = state_.partition.island_of(i);
        if (l == from || l == to) state_.history[i].push_back({l, state_.imbalance[l]});
    }
    ++island_version_[from];
    ++island_version_[to];
    ++state_.k;
    state_.sweep_cursor = static_cast<NodeId>((node + 1) % grid_.size());
    ev.step = state_.k;
    spdlog::debug("k={} bus {} island {} -> {} (p = {} MW)", ev.step, grid_.label(node), from, to, p);
    return ev;
}

// --- run ----------------------------------------------------------------------

RunReport run(const Grid& grid, const Partition& init, const RunOptions& opts) {
    if (init.island_count() < 2) throw PartitionError("a run needs at least two islands");
    const std::size_t cap = opts.step_cap.value_or(50 * grid.size());

    Scheduler scheduler(grid, init, opts);
    RunReport report;
    report.island_count = init.island_count();
    report.initial_assignment.assign(init.assignment().begin(), init.assignment().end());
    report.cut_set_initial = cut_set(grid, init);

    auto snapshot = [&] {
        const auto& s = scheduler.state();
        report.trajectory.push_back({s.k, s.imbalance, cost_J(s.imbalance)});
        const auto triplets = check_hypothesis(grid, s, opts.tolerance);
        report.hypothesis.push_back(
            {s.k, triplets.size(),
             static_cast<std::size_t>(std::count_if(triplets.begin(), triplets.end(),
                                                    [](const HypothesisTriplet& t) { return t.margin; }))});
    };
    snapshot();
    report.cost_star = cost_lower_bound(report.trajectory.front().imbalance);

    while (true) {
        if (report.events.size() >= cap) {
            report.termination = Termination::step_cap;
            break;
        }
        auto event = scheduler.step();
        if (!event) {
            report.termination = scheduler.last_sweep_incomplete() ? Termination::stalled : Termination::converged;
            break;
        }
        report.events.push_back(*event);
        snapshot();
    }

    const Partition& final_part = scheduler.state().partition;
    report.final_assignment.assign(final_part.assignment().begin(), final_part.assignment().end());
    report.cut_set_final = cut_set(grid, final_part);
    report.bound = with_gap(gap_bound(grid, report.island_count), report.final_cost(), opts.tolerance);
    report.certificate = neighbor_gap_certificate(grid, final_part, opts.tolerance);
    report.contraction = contraction_trace(report);
    report.estimator = scheduler.stats();
    return report;
}

}  // namespace islander
