#pragma once

#include <cstddef>
#include <vector>

#include "islander/grid.hpp"
#include "islander/partition.hpp"
#include "islander/report.hpp"

namespace islander {

/// Smallest l with p* + p_bar (l - (n_mu + 1)/2) >= 0, clamped to [1, n_mu].
/// Returns 1 for p_bar <= 0.
long l_star(double p_star, double p_bar, std::size_t island_count);

/// Worst-case J - J* for partitions whose neighbouring islands differ by at
/// most p_bar:
///   (2/n_mu) sum_{l=l*}^{n_mu} [p* + p_bar (l - (n_mu+1)/2)] - (p* + |p*|)
BoundReport gap_bound(double p_star, double p_bar, std::size_t island_count);
BoundReport gap_bound(const Grid& grid, std::size_t island_count);
/// Fills gap = final_cost - J* and satisfied = gap <= bound + tol.
BoundReport with_gap(BoundReport report, double final_cost, double tol = 1e-6);

/// Largest |P_l - P_m| over adjacent islands, checked against max_i |p_i|.
GapCertificate neighbor_gap_certificate(const Grid& grid, const Partition& part, double tol = 1e-6);

std::vector<ContractionEntry> contraction_trace(const RunReport& report);

/// Population standard deviation of the imbalances.
double imbalance_stddev(const ImbalanceVector& imbalance);

struct OracleResult {
    double optimal_cost = 0.0;
    std::vector<Partition> optimal_partitions;  // one per argmin, islands ordered by smallest node
    std::size_t enumerated_count = 0;           // feasible partitions seen
};

/// Exhaustive search over all partitions into exactly n_mu connected islands.
/// Throws InputError when the grid has more than `cap` nodes.
OracleResult brute_force_optimum(const Grid& grid, std::size_t island_count, std::size_t cap = 14);

}  // namespace islander
