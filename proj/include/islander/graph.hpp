#pragma once

#include <span>
#include <vector>

#include "islander/grid.hpp"

namespace islander {

// Algorithms on the subgraph of a Grid induced by a vertex subset. Vertex
// lists need not be sorted; results are in ascending id order.

/// Breadth-first connectivity test. The empty set counts as connected.
bool induced_connected(const Grid& grid, std::span<const NodeId> vertices);

/// Connected components, each sorted, ordered by smallest member.
std::vector<std::vector<NodeId>> induced_components(const Grid& grid, std::span<const NodeId> vertices);

/// Articulation vertices of the induced subgraph (Hopcroft-Tarjan lowpoints,
/// iterative DFS). A vertex whose removal disconnects its own component.
std::vector<NodeId> articulation_points(const Grid& grid, std::span<const NodeId> vertices);

/// Components of the whole grid after deleting the given edges.
std::vector<std::vector<NodeId>> components_without_edges(const Grid& grid, std::span<const Edge> removed);

}  // namespace islander
