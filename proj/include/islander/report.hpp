#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "islander/grid.hpp"
#include "islander/partition.hpp"

namespace islander {

enum class MigrationRule { normal, zero_power };
enum class Termination { converged, step_cap, stalled };

const char* to_string(MigrationRule rule) noexcept;
const char* to_string(Termination termination) noexcept;

struct MigrationEvent {
    std::size_t step = 0;  // k after the move
    NodeId node = 0;
    IslandId from_island = 0;
    IslandId to_island = 0;
    double p = 0.0;
    double from_before = 0.0;  // P_m(k-1)
    double to_before = 0.0;    // P_l(k-1)
    double from_after = 0.0;   // P_m(k) = P_m(k-1) - p_i
    double to_after = 0.0;     // P_l(k) = P_l(k-1) + p_i
    MigrationRule rule = MigrationRule::normal;
};

struct TrajectoryPoint {
    std::size_t k = 0;
    ImbalanceVector imbalance;
    double cost = 0.0;
};

struct BoundReport {
    double p_bar = 0.0;
    double p_star = 0.0;
    std::size_t island_count = 0;
    long l_star = 1;
    double bound = 0.0;
    double gap = 0.0;  // J(K) - J*
    bool satisfied = false;
};

struct GapCertificate {
    double max_gap = 0.0;
    double p_bar = 0.0;
    bool satisfied = true;
};

struct ContractionEntry {
    std::size_t step = 0;
    MigrationRule rule = MigrationRule::normal;
    double distance_before = 0.0;  // ||P(k-1) - P*||_2
    double distance_after = 0.0;
    double delta = 0.0;
    double discriminant = 0.0;  // p_i (P_l - P_m + p_i) before the move
};

struct HypothesisSummary {
    std::size_t k = 0;
    std::size_t triplets = 0;         // premise triplets (l, m, i)
    std::size_t with_margin = 0;      // of those, |P_m - P_l| > |p_i|
};

struct EstimatorStats {
    std::size_t consensus_runs = 0;
    std::size_t singular_skips = 0;
    std::size_t disagreements = 0;
    std::size_t structural_fallbacks = 0;
};

struct RunReport {
    std::size_t island_count = 0;
    std::vector<TrajectoryPoint> trajectory;  // k = 0..K
    std::vector<MigrationEvent> events;
    std::vector<IslandId> initial_assignment;
    std::vector<IslandId> final_assignment;
    std::vector<Edge> cut_set_initial;
    std::vector<Edge> cut_set_final;
    Termination termination = Termination::converged;
    double cost_star = 0.0;  // J*

    BoundReport bound;
    GapCertificate certificate;
    std::vector<ContractionEntry> contraction;
    std::vector<HypothesisSummary> hypothesis;
    EstimatorStats estimator;

    std::size_t steps() const noexcept { return events.size(); }
    double initial_cost() const { return trajectory.front().cost; }
    double final_cost() const { return trajectory.back().cost; }
    const ImbalanceVector& final_imbalance() const { return trajectory.back().imbalance; }
};

inline constexpr int kReportSchemaVersion = 1;

/// Deterministic JSON serialization; bus labels are used for nodes and
/// edges. `options` is embedded verbatim as a JSON object text (may be "{}").
std::string report_to_json(const Grid& grid, const RunReport& report, const std::string& options_json = "{}");

/// CSV with columns k,P_1..P_n,J,J_star
std::string trajectory_csv(const RunReport& report);

}  // namespace islander
