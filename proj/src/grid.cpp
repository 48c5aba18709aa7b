#include "islander/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fmt/format.h>

#include "islander/errors.hpp"

namespace islander {

const char* to_string(NodeKind kind) noexcept {
    switch (kind) {
        case NodeKind::generator: return "generator";
        case NodeKind::load: return "load";
        case NodeKind::passive: return "passive";
    }
    return "passive";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept {
    if (text == "generator") return NodeKind::generator;
    if (text == "load") return NodeKind::load;
    if (text == "passive") return NodeKind::passive;
    return std::nullopt;
}

NodeKind kind_from_power(double p) noexcept {
    if (p > 0.0) return NodeKind::generator;
    if (p < 0.0) return NodeKind::load;
    return NodeKind::passive;
}

Grid Grid::build(const GridSpec& spec, DuplicateEdges duplicates) {
    if (spec.nodes.empty()) throw GridError("grid has no nodes");

    Grid grid;
    grid.nodes_.reserve(spec.nodes.size());
    for (const auto& n : spec.nodes) {
        if (!std::isfinite(n.p)) throw GridError(fmt::format("bus {}: power is not finite", n.label));
        const auto id = static_cast<NodeId>(grid.nodes_.size());
        if (!grid.index_.emplace(n.label, id).second) throw GridError(fmt::format("duplicate bus {}", n.label));
        const NodeKind kind = n.kind.value_or(kind_from_power(n.p));
        if (kind == NodeKind::generator && n.p < 0.0)
            grid.warnings_.push_back(fmt::format("bus {}: generator with negative injection {} MW", n.label, n.p));
        if (kind == NodeKind::load && n.p > 0.0)
            grid.warnings_.push_back(fmt::format("bus {}: load with positive injection {} MW", n.label, n.p));
        grid.nodes_.push_back({id, n.label, n.p, kind});
    }

    grid.edges_.reserve(spec.edges.size());
    for (const auto& [u, v] : spec.edges) {
        const auto a = grid.find(u);
        const auto b = grid.find(v);
        if (!a || !b) throw GridError(fmt::format("edge {}-{} references an unknown bus", u, v));
        if (*a == *b) throw GridError(fmt::format("self-loop at bus {}", u));
        grid.edges_.push_back(make_edge(*a, *b));
    }
    std::sort(grid.edges_.begin(), grid.edges_.end());
    const auto dup = std::adjacent_find(grid.edges_.begin(), grid.edges_.end());
    if (dup != grid.edges_.end()) {
        if (duplicates == DuplicateEdges::reject)
            throw GridError(fmt::format("duplicate edge {}-{}", grid.label(dup->a), grid.label(dup->b)));
        grid.edges_.erase(std::unique(grid.edges_.begin(), grid.edges_.end()), grid.edges_.end());
    }

    const std::size_t n = grid.nodes_.size();
    std::vector<std::size_t> degree(n, 0);
    for (const auto& e : grid.edges_) {
        ++degree[e.a];
        ++degree[e.b];
    }
    grid.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) grid.offsets_[i + 1] = grid.offsets_[i] + degree[i];
    grid.adjacency_.resize(grid.offsets_[n]);
    std::vector<std::size_t> fill(grid.offsets_.begin(), grid.offsets_.end() - 1);
    for (const auto& e : grid.edges_) {
        grid.adjacency_[fill[e.a]++] = e.b;
        grid.adjacency_[fill[e.b]++] = e.a;
    }
    for (std::size_t i = 0; i < n; ++i)
        std::sort(grid.adjacency_.begin() + static_cast<std::ptrdiff_t>(grid.offsets_[i]),
                  grid.adjacency_.begin() + static_cast<std::ptrdiff_t>(grid.offsets_[i + 1]));

    // connectivity
    std::vector<char> seen(n, 0);
    std::deque<NodeId> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : grid.neighbors(u)) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                queue.push_back(v);
            }
        }
    }
    if (reached != n) {
        const auto missing = static_cast<NodeId>(std::find(seen.begin(), seen.end(), 0) - seen.begin());
        throw GridError(fmt::format("grid is disconnected: bus {} unreachable from bus {}", grid.label(missing),
                                    grid.label(0)));
    }

    for (const auto& node : grid.nodes_) {
        grid.total_power_ += node.p;
        grid.max_abs_power_ = std::max(grid.max_abs_power_, std::abs(node.p));
    }
    return grid;
}

std::optional<NodeId> Grid::find(BusLabel label) const {
    const auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool Grid::has_edge(NodeId u, NodeId v) const {
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::size_t Grid::generator_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const NodeRecord& n) {
        return n.kind == NodeKind::generator;
    }));
}

}  // namespace islander
