#include "islander/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "islander/errors.hpp"
#include "islander/graph.hpp"

namespace islander {

namespace {

std::size_t infer_island_count(const std::vector<IslandId>& assignment) {
    if (assignment.empty()) return 0;
    return static_cast<std::size_t>(*std::max_element(assignment.begin(), assignment.end())) + 1;
}

}  // namespace

Partition::Partition(const Grid& grid, std::vector<IslandId> assignment, std::size_t step)
    : Partition(grid, assignment, infer_island_count(assignment), step) {}

Partition::Partition(const Grid& grid, std::vector<IslandId> assignment, std::size_t island_count, std::size_t step)
    : assignment_(std::move(assignment)), island_count_(island_count), step_(step) {
    if (assignment_.size() != grid.size())
        throw PartitionError(
            fmt::format("partition covers {} nodes, grid has {}", assignment_.size(), grid.size()));
    if (island_count_ == 0) throw PartitionError("partition has no islands");

    std::vector<std::vector<NodeId>> members(island_count_);
    for (NodeId i = 0; i < assignment_.size(); ++i) {
        if (assignment_[i] >= island_count_)
            throw PartitionError(fmt::format("bus {} assigned to island {} of {}", grid.label(i), assignment_[i],
                                             island_count_));
        members[assignment_[i]].push_back(i);
    }
    for (std::size_t l = 0; l < island_count_; ++l) {
        if (members[l].empty()) throw PartitionError(fmt::format("island {} is empty", l));
        if (!induced_connected(grid, members[l]))
            throw PartitionError(fmt::format("island {} is not connected", l));
    }
}

Partition Partition::from_islands(const Grid& grid, const std::vector<std::vector<NodeId>>& islands,
                                  std::size_t step) {
    constexpr auto unassigned = static_cast<IslandId>(-1);
    std::vector<IslandId> assignment(grid.size(), unassigned);
    for (std::size_t l = 0; l < islands.size(); ++l) {
        for (NodeId i : islands[l]) {
            if (i >= grid.size()) throw PartitionError(fmt::format("node index {} out of range", i));
            if (assignment[i] != unassigned)
                throw PartitionError(fmt::format("bus {} listed in islands {} and {}", grid.label(i), assignment[i], l));
            assignment[i] = static_cast<IslandId>(l);
        }
    }
    for (NodeId i = 0; i < assignment.size(); ++i)
        if (assignment[i] == unassigned) throw PartitionError(fmt::format("bus {} not assigned", grid.label(i)));
    return Partition(grid, std::move(assignment), islands.size(), step);
}

std::vector<NodeId> Partition::members(IslandId island) const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < assignment_.size(); ++i)
        if (assignment_[i] == island) out.push_back(i);
    return out;
}

std::size_t Partition::island_size(IslandId island) const {
    return static_cast<std::size_t>(std::count(assignment_.begin(), assignment_.end(), island));
}

std::vector<std::vector<NodeId>> Partition::islands() const {
    std::vector<std::vector<NodeId>> out(island_count_);
    for (NodeId i = 0; i < assignment_.size(); ++i) out[assignment_[i]].push_back(i);
    return out;
}

Partition Partition::with_move(const Grid& grid, NodeId node, IslandId to) const {
    auto next = assignment_;
    next.at(node) = to;
    return Partition(grid, std::move(next), island_count_, step_ + 1);
}

double island_imbalance(const Grid& grid, const Partition& part, IslandId island) {
    double sum = 0.0;
    for (NodeId i = 0; i < grid.size(); ++i)
        if (part.island_of(i) == island) sum += grid.power(i);
    return sum;
}

ImbalanceVector imbalances(const Grid& grid, const Partition& part) {
    ImbalanceVector out;
    out.values.assign(part.island_count(), 0.0);
    for (NodeId i = 0; i < grid.size(); ++i) out.values[part.island_of(i)] += grid.power(i);
    for (double v : out.values) out.total += v;
    return out;
}

double cost_J(const ImbalanceVector& imbalance) {
    if (imbalance.values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : imbalance.values) sum += std::abs(v);
    return sum / static_cast<double>(imbalance.values.size());
}

double cost_J(const Grid& grid, const Partition& part) { return cost_J(imbalances(grid, part)); }

double cost_lower_bound(const ImbalanceVector& imbalance) { return std::abs(imbalance.mean()); }

double cost_lower_bound(const Grid& grid, std::size_t island_count) {
    return std::abs(grid.total_power() / static_cast<double>(island_count));
}

std::vector<IslandId> adjacent_islands(const Grid& grid, const Partition& part, NodeId node) {
    std::vector<IslandId> out;
    const IslandId own = part.island_of(node);
    for (NodeId v : grid.neighbors(node))
        if (part.island_of(v) != own) out.push_back(part.island_of(v));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<BoundaryNode> boundary_nodes(const Grid& grid, const Partition& part) {
    std::vector<BoundaryNode> out;
    for (NodeId i = 0; i < grid.size(); ++i) {
        auto adj = adjacent_islands(grid, part, i);
        if (!adj.empty()) out.push_back({i, std::move(adj)});
    }
    return out;
}

bool is_connected_without(const Grid& grid, const Partition& part, IslandId island, NodeId node) {
    std::vector<NodeId> rest;
    for (NodeId i = 0; i < grid.size(); ++i)
        if (i != node && part.island_of(i) == island) rest.push_back(i);
    return induced_connected(grid, rest);
}

CondensedGraph condensed_graph(const Grid& grid, const Partition& part) {
    CondensedGraph out;
    out.islands = part.island_count();
    for (const auto& e : grid.edges()) {
        const IslandId l = part.island_of(e.a);
        const IslandId m = part.island_of(e.b);
        if (l != m) out.links.emplace_back(std::min(l, m), std::max(l, m));
    }
    std::sort(out.links.begin(), out.links.end());
    out.links.erase(std::unique(out.links.begin(), out.links.end()), out.links.end());
    return out;
}

std::vector<Edge> cut_set(const Grid& grid, const Partition& part) {
    std::vector<Edge> out;
    for (const auto& e : grid.edges())
        if (part.island_of(e.a) != part.island_of(e.b)) out.push_back(e);
    return out;  // grid edges are already sorted
}

}  // namespace islander
