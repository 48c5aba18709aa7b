#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "islander/estimator.hpp"
#include "islander/grid.hpp"
#include "islander/partition.hpp"
#include "islander/report.hpp"

namespace islander {

struct RunOptions {
    EstimatorMode estimator = EstimatorMode::simulate;
    IntegratorOptions integrator;
    double eps_sing = 1e-8;
    /// Absolute MW tolerance for every imbalance comparison.
    double tolerance = 1e-6;
    /// Defaults to 50 n.
    std::optional<std::size_t> step_cap;
    bool zero_power_moves = true;
};

struct MigrationDecision {
    bool migrate = false;
    double from_after = 0.0;  // P_m - p_i
    double to_after = 0.0;    // P_l + p_i
};

/// Migration condition: min(P_l, P_m) must strictly rise (by more than tol)
/// and island m must stay connected without node i.
MigrationDecision evaluate_migration(const Grid& grid, const Partition& part, NodeId node, IslandId from,
                                     IslandId to, double from_power, double to_power, double tol = 1e-6);
/// Same, with the connectivity verdict supplied by the caller.
MigrationDecision evaluate_migration(double from_power, double to_power, double node_power, bool source_connected,
                                     double tol = 1e-6);

/// Gain min{P_l + p_i, P_m - p_i} - min{P_l, P_m}.
double migration_gain(double to_power, double from_power, double node_power);

struct TargetCandidate {
    IslandId island = 0;
    double power = 0.0;  // P_l
};

/// Candidate maximising the gain; ties go to the lowest island index.
IslandId select_target(std::span<const TargetCandidate> candidates, double from_power, double node_power);

struct HistoryEntry {
    IslandId island = 0;
    double power = 0.0;
};

struct SchedulerState {
    Partition partition;
    ImbalanceVector imbalance;
    /// Every imbalance value of an island recorded while the node was a member.
    std::vector<std::vector<HistoryEntry>> history;
    NodeId sweep_cursor = 0;
    std::size_t k = 0;
};

SchedulerState initial_state(const Grid& grid, const Partition& init);

/// Zero-power rule: the source island stays connected and P_l differs (by
/// more than tol) from every value recorded for island l while the node
/// belonged to it.
bool zero_power_eligible(const Grid& grid, const SchedulerState& state, NodeId node, IslandId to, double to_power,
                         double tol = 1e-6);

struct HypothesisTriplet {
    IslandId to = 0;    // l
    IslandId from = 0;  // m
    NodeId node = 0;    // i
    bool margin = false;  // |P_m - P_l| > |p_i|
};

/// Triplets with i in V_m adjacent to V_l, V_m \ {i} nonempty and connected,
/// and P_l > P_m with p_i < 0, or P_l < P_m with p_i > 0.
std::vector<HypothesisTriplet> check_hypothesis(const Grid& grid, const SchedulerState& state, double tol = 1e-6);

/// Drives the migration process one accepted move at a time.
class Scheduler {
public:
    Scheduler(const Grid& grid, const Partition& init, RunOptions opts);

    /// Sweeps boundary nodes from the cursor in ascending id order (wrapping)
    /// and applies the first accepted migration. Zero-power moves are tried
    /// only after a sweep finds no regular one. Returns nothing when no node
    /// moves; the state is then unchanged.
    std::optional<MigrationEvent> step();

    const SchedulerState& state() const noexcept { return state_; }
    const EstimatorStats& stats() const noexcept { return stats_; }
    /// True when the last unsuccessful sweep skipped an evaluation.
    bool last_sweep_incomplete() const noexcept { return incomplete_; }
    const RunOptions& options() const noexcept { return opts_; }

private:
    struct Estimate {
        ImbalanceEstimate value;
        bool connected_without = true;  // member probes only
    };

    std::optional<MigrationEvent> sweep(bool zero_power, bool& skipped);
    const Estimate& estimate(NodeId probe, IslandId island);
    const ConsensusRun& island_run(IslandId island);
    MigrationEvent apply(NodeId node, IslandId to, MigrationRule rule);
    bool is_zero(double p) const;

    const Grid& grid_;
    RunOptions opts_;
    SchedulerState state_;
    EstimatorStats stats_;
    bool incomplete_ = false;
    std::vector<std::size_t> island_version_;
    std::map<IslandId, std::pair<std::size_t, ConsensusRun>> island_runs_;
    std::map<std::pair<IslandId, NodeId>, std::pair<std::size_t, Estimate>> estimates_;
};

/// Runs until a sweep finds no migration or the step cap is reached, then
/// fills trajectory, cut-sets and diagnostics. Throws PartitionError for
/// fewer than two islands.
RunReport run(const Grid& grid, const Partition& init, const RunOptions& opts = {});

}  // namespace islander
