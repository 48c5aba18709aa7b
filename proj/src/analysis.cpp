#include "islander/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "islander/errors.hpp"
#include "islander/graph.hpp"

namespace islander {

namespace {

long raw_l_star(double p_star, double p_bar, std::size_t n) {
    return static_cast<long>(std::ceil(-p_star / p_bar + (static_cast<double>(n) + 1.0) / 2.0));
}

}  // namespace

long l_star(double p_star, double p_bar, std::size_t island_count) {
    if (!(p_bar > 0.0) || island_count == 0) return 1;
    return std::clamp(raw_l_star(p_star, p_bar, island_count), 1L, static_cast<long>(island_count));
}

BoundReport gap_bound(double p_star, double p_bar, std::size_t island_count) {
    if (island_count == 0) throw InputError("the bound needs at least one island");
    BoundReport r;
    r.p_star = p_star;
    r.p_bar = p_bar;
    r.island_count = island_count;
    r.l_star = l_star(p_star, p_bar, island_count);

    const auto n = static_cast<long>(island_count);
    // a raw l* beyond n_mu leaves the sum empty
    const long first = p_bar > 0.0 ? std::max(1L, raw_l_star(p_star, p_bar, island_count)) : r.l_star;
    const double mid = (static_cast<double>(n) + 1.0) / 2.0;
    double sum = 0.0;
    for (long l = first; l <= n; ++l) sum += p_star + p_bar * (static_cast<double>(l) - mid);
    r.bound = 2.0 / static_cast<double>(n) * sum - (p_star + std::abs(p_star));
    return r;
}

BoundReport gap_bound(const Grid& grid, std::size_t island_count) {
    return gap_bound(grid.total_power() / static_cast<double>(island_count), grid.max_abs_power(), island_count);
}

BoundReport with_gap(BoundReport report, double final_cost, double tol) {
    report.gap = final_cost - std::abs(report.p_star);
    report.satisfied = report.gap <= report.bound + tol;
    return report;
}

GapCertificate neighbor_gap_certificate(const Grid& grid, const Partition& part, double tol) {
    GapCertificate c;
    c.p_bar = grid.max_abs_power();
    const ImbalanceVector P = imbalances(grid, part);
    for (const auto& [l, m] : condensed_graph(grid, part).links) c.max_gap = std::max(c.max_gap, std::abs(P[l] - P[m]));
    c.satisfied = c.max_gap <= c.p_bar + tol;
    return c;
}

namespace {

double distance_to_mean(const ImbalanceVector& P, double p_star) {
    double s = 0.0;
    for (double v : P.values) s += (v - p_star) * (v - p_star);
    return std::sqrt(s);
}

}  // namespace

std::vector<ContractionEntry> contraction_trace(const RunReport& report) {
    std::vector<ContractionEntry> out;
    if (report.trajectory.empty()) return out;
    const double p_star = report.trajectory.front().imbalance.mean();
    out.reserve(report.events.size());
    for (std::size_t e = 0; e < report.events.size(); ++e) {
        const MigrationEvent& ev = report.events[e];
        ContractionEntry c;
        c.step = ev.step;
        c.rule = ev.rule;
        c.distance_before = distance_to_mean(report.trajectory[e].imbalance, p_star);
        c.distance_after = distance_to_mean(report.trajectory[e + 1].imbalance, p_star);
        c.delta = c.distance_after - c.distance_before;
        c.discriminant = ev.p * (ev.to_before - ev.from_before + ev.p);
        out.push_back(c);
    }
    return out;
}

double imbalance_stddev(const ImbalanceVector& imbalance) {
    if (imbalance.values.empty()) return 0.0;
    const double mean = imbalance.mean();
    double s = 0.0;
    for (double v : imbalance.values) s += (v - mean) * (v - mean);
    return std::sqrt(s / static_cast<double>(imbalance.size()));
}

// --- oracle -------------------------------------------------------------------

namespace {

// Restricted growth strings: node 0 gets island 0, every later node at most
// one past the largest label so far. Each partition appears exactly once with
// islands ordered by smallest member.
class Enumerator {
public:
    Enumerator(const Grid& grid, std::size_t k) : grid_(grid), k_(k), labels_(grid.size(), 0) {}

    OracleResult run() {
        recurse(1, 0);
        return std::move(result_);
    }

private:
    void recurse(NodeId i, IslandId max_label) {
        const std::size_t n = grid_.size();
        if (i == n) {
            if (max_label + 1 == k_) visit();
            return;
        }
        // not enough nodes left to open the remaining islands
        if (n - i < k_ - (max_label + 1)) return;
        const IslandId limit = std::min<IslandId>(max_label + 1, static_cast<IslandId>(k_ - 1));
        for (IslandId l = 0; l <= limit; ++l) {
            labels_[i] = l;
            recurse(i + 1, std::max(max_label, l));
        }
    }

    void visit() {
        std::vector<std::vector<NodeId>> islands(k_);
        for (NodeId v = 0; v < grid_.size(); ++v) islands[labels_[v]].push_back(v);
        for (const auto& members : islands)
            if (!induced_connected(grid_, members)) return;
        ++result_.enumerated_count;

        double J = 0.0;
        for (const auto& members : islands) {
            double P = 0.0;
            for (NodeId v : members) P += grid_.power(v);
            J += std::abs(P);
        }
        J /= static_cast<double>(k_);

        const double tol = 1e-9 * (1.0 + std::abs(J));
        if (result_.optimal_partitions.empty() || J < result_.optimal_cost - tol) {
            result_.optimal_cost = J;
            result_.optimal_partitions.clear();
        } else if (J > result_.optimal_cost + tol) {
            return;
        }
        result_.optimal_partitions.emplace_back(grid_, labels_, k_, 0);
    }

    const Grid& grid_;
    std::size_t k_;
    std::vector<IslandId> labels_;
    OracleResult result_;
};

}  // namespace

OracleResult brute_force_optimum(const Grid& grid, std::size_t island_count, std::size_t cap) {
    if (grid.size() > cap)
        throw InputError(fmt::format("oracle limited to {} nodes, grid has {}", cap, grid.size()));
    if (island_count < 1 || island_count > grid.size())
        throw InputError(fmt::format("cannot split {} nodes into {} islands", grid.size(), island_count));
    OracleResult r = Enumerator(grid, island_count).run();
    if (r.optimal_partitions.empty())
        throw PartitionError(fmt::format("no partition into {} connected islands exists", island_count));
    return r;
}

}  // namespace islander
