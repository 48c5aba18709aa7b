#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "islander/grid.hpp"
#include "islander/partition.hpp"

namespace islander {

/// Coherent generator groups, one per island to build.
struct GeneratorGroups {
    std::vector<std::vector<NodeId>> groups;
};

/// Throws InputError unless groups are nonempty, disjoint and in range.
void validate_groups(const Grid& grid, const GeneratorGroups& groups);

/// Grows one hop-shortest-path tree per group (each member joined to the
/// tree by a BFS path), then assigns the remaining nodes by multi-source BFS,
/// islands claiming one layer each in round-robin order. Throws InputError if
/// two trees overlap or fewer than two groups are given.
Partition ssrp_bfs(const Grid& grid, const GeneratorGroups& groups);

/// Seeded random growth from n_mu distinct random roots. Deterministic per
/// seed across platforms.
Partition random_partition(const Grid& grid, std::size_t island_count, std::uint64_t seed);

/// Removes the listed edges and maps connected components to islands in
/// order of smallest node. Throws PartitionError on edges missing from the
/// grid or listed edges that end up inside one island.
Partition from_cut_set(const Grid& grid, std::span<const std::pair<BusLabel, BusLabel>> cut);

/// {"groups": [[<bus>, ...], ...]}
GeneratorGroups parse_groups(const Grid& grid, std::string_view text);

}  // namespace islander
