#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "islander/grid.hpp"

namespace islander {

/// Assignment of every grid node to one of n_mu connected, nonempty islands,
/// tagged with the migration step k it belongs to. Value type; all
/// constructors that take a Grid validate against it.
class Partition {
public:
    /// Throws PartitionError on size mismatch, out-of-range or unused island
    /// indices, or an island whose induced subgraph is disconnected.
    Partition(const Grid& grid, std::vector<IslandId> assignment, std::size_t step = 0);
    Partition(const Grid& grid, std::vector<IslandId> assignment, std::size_t island_count, std::size_t step);

    /// Builds from member lists; island l gets islands[l].
    static Partition from_islands(const Grid& grid, const std::vector<std::vector<NodeId>>& islands,
                                  std::size_t step = 0);

    IslandId island_of(NodeId node) const { return assignment_[node]; }
    std::span<const IslandId> assignment() const noexcept { return assignment_; }
    std::size_t island_count() const noexcept { return island_count_; }
    std::size_t node_count() const noexcept { return assignment_.size(); }
    std::size_t step() const noexcept { return step_; }

    std::vector<NodeId> members(IslandId island) const;
    std::size_t island_size(IslandId island) const;
    std::vector<std::vector<NodeId>> islands() const;

    /// Moves `node` to island `to`, increments the step, revalidates.
    Partition with_move(const Grid& grid, NodeId node, IslandId to) const;

    friend bool operator==(const Partition& a, const Partition& b) {
        return a.assignment_ == b.assignment_ && a.island_count_ == b.island_count_ && a.step_ == b.step_;
    }

private:
    std::vector<IslandId> assignment_;
    std::size_t island_count_ = 0;
    std::size_t step_ = 0;
};

/// Per-island power imbalances P_l in island order. `total` is their sum
/// taken in island order.
struct ImbalanceVector {
    std::vector<double> values;
    double total = 0.0;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t l) const { return values[l]; }
    /// p* = P_tot / n_mu
    double mean() const noexcept { return values.empty() ? 0.0 : total / static_cast<double>(values.size()); }
};

struct BoundaryNode {
    NodeId node = 0;
    std::vector<IslandId> islands;  // adjacent foreign islands, ascending
};

struct CondensedGraph {
    std::size_t islands = 0;
    std::vector<std::pair<IslandId, IslandId>> links;  // l < m, sorted
};

/// Sum of p_i over island l, in ascending node order.
double island_imbalance(const Grid& grid, const Partition& part, IslandId island);
ImbalanceVector imbalances(const Grid& grid, const Partition& part);

/// Average absolute imbalance (1/n_mu) sum |P_l|.
double cost_J(const ImbalanceVector& imbalance);
double cost_J(const Grid& grid, const Partition& part);
/// Lower bound J* = |P_tot / n_mu|.
double cost_lower_bound(const ImbalanceVector& imbalance);
double cost_lower_bound(const Grid& grid, std::size_t island_count);

std::vector<BoundaryNode> boundary_nodes(const Grid& grid, const Partition& part);
/// Foreign islands adjacent to one node, ascending.
std::vector<IslandId> adjacent_islands(const Grid& grid, const Partition& part, NodeId node);

/// True iff island l minus node i induces a connected subgraph. i must be in l.
bool is_connected_without(const Grid& grid, const Partition& part, IslandId island, NodeId node);

CondensedGraph condensed_graph(const Grid& grid, const Partition& part);

/// Edges whose endpoints lie in different islands, ascending.
std::vector<Edge> cut_set(const Grid& grid, const Partition& part);

}  // namespace islander
