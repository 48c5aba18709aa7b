#include "islander/graph.hpp"

#include <algorithm>
#include <deque>

namespace islander {

namespace {

std::vector<char> membership(const Grid& grid, std::span<const NodeId> vertices) {
    std::vector<char> in(grid.size(), 0);
    for (NodeId v : vertices) in[v] = 1;
    return in;
}

}  // namespace

bool induced_connected(const Grid& grid, std::span<const NodeId> vertices) {
    if (vertices.empty()) return true;
    auto in = membership(grid, vertices);
    const std::size_t total = static_cast<std::size_t>(std::count(in.begin(), in.end(), 1));
    std::deque<NodeId> queue{vertices.front()};
    in[vertices.front()] = 2;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : grid.neighbors(u)) {
            if (in[v] == 1) {
                in[v] = 2;
                ++reached;
                queue.push_back(v);
            }
        }
    }
    return reached == total;
}

std::vector<std::vector<NodeId>> induced_components(const Grid& grid, std::span<const NodeId> vertices) {
    auto in = membership(grid, vertices);
    std::vector<NodeId> sorted(vertices.begin(), vertices.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::vector<NodeId>> components;
    for (NodeId start : sorted) {
        if (in[start] != 1) continue;
        auto& comp = components.emplace_back();
        std::deque<NodeId> queue{start};
        in[start] = 2;
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            comp.push_back(u);
            for (NodeId v : grid.neighbors(u)) {
                if (in[v] == 1) {
                    in[v] = 2;
                    queue.push_back(v);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
    }
    return components;
}

std::vector<NodeId> articulation_points(const Grid& grid, std::span<const NodeId> vertices) {
    const auto in = membership(grid, vertices);
    constexpr std::size_t unvisited = 0;
    std::vector<std::size_t> order(grid.size(), unvisited);
    std::vector<std::size_t> low(grid.size(), 0);
    std::vector<char> is_cut(grid.size(), 0);
    std::size_t clock = 0;

    struct Frame {
        NodeId node;
        NodeId parent;
        std::size_t next;  // index into neighbours
    };

    std::vector<NodeId> sorted(vertices.begin(), vertices.end());
    std::sort(sorted.begin(), sorted.end());
    for (NodeId root : sorted) {
        if (order[root] != unvisited) continue;
        std::size_t root_children = 0;
        std::vector<Frame> stack{{root, root, 0}};
        order[root] = low[root] = ++clock;
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto nb = grid.neighbors(f.node);
            if (f.next < nb.size()) {
                const NodeId v = nb[f.next++];
                if (!in[v] || v == f.parent) continue;
                if (order[v] == unvisited) {
                    order[v] = low[v] = ++clock;
                    if (f.node == root) ++root_children;
                    stack.push_back({v, f.node, 0});
                } else {
                    low[f.node] = std::min(low[f.node], order[v]);
                }
                continue;
            }
            const Frame done = f;
            stack.pop_back();
            if (stack.empty()) break;
            const NodeId parent = stack.back().node;
            low[parent] = std::min(low[parent], low[done.node]);
            if (parent != root && low[done.node] >= order[parent]) is_cut[parent] = 1;
        }
        if (root_children > 1) is_cut[root] = 1;
    }

    std::vector<NodeId> result;
    for (NodeId v : sorted)
        if (is_cut[v]) result.push_back(v);
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

std::vector<std::vector<NodeId>> components_without_edges(const Grid& grid, std::span<const Edge> removed) {
    std::vector<Edge> cut(removed.begin(), removed.end());
    std::sort(cut.begin(), cut.end());
    std::vector<char> seen(grid.size(), 0);
    std::vector<std::vector<NodeId>> components;
    for (NodeId start = 0; start < grid.size(); ++start) {
        if (seen[start]) continue;
        auto& comp = components.emplace_back();
        std::deque<NodeId> queue{start};
        seen[start] = 1;
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            comp.push_back(u);
            for (NodeId v : grid.neighbors(u)) {
                if (seen[v] || std::binary_search(cut.begin(), cut.end(), make_edge(u, v))) continue;
                seen[v] = 1;
                queue.push_back(v);
            }
        }
        std::sort(comp.begin(), comp.end());
    }
    return components;
}

}  // namespace islander
