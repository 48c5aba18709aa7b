#pragma once

#include <random>
#include <utility>
#include <vector>

#include "islander/grid.hpp"
#include "islander/partition.hpp"

namespace testkit {

using namespace islander;

/// Buses labelled 1..n in order; edges given by label.
inline Grid make_grid(const std::vector<double>& p, const std::vector<std::pair<BusLabel, BusLabel>>& edges) {
    GridSpec spec;
    for (std::size_t i = 0; i < p.size(); ++i) spec.nodes.push_back({static_cast<BusLabel>(i + 1), p[i], {}});
    spec.edges = edges;
    return Grid::build(spec);
}

inline Grid path_grid(const std::vector<double>& p) {
    std::vector<std::pair<BusLabel, BusLabel>> edges;
    for (std::size_t i = 1; i < p.size(); ++i) edges.emplace_back(i, i + 1);
    return make_grid(p, edges);
}

struct RandomGridShape {
    std::size_t n = 10;
    double extra_edges = 0.3;  // extra edges per node on top of the spanning tree
    double p_max = 600.0;
    double zero_share = 0.0;  // fraction of passive buses
    bool integral = false;    // whole-MW injections
};

/// Random spanning tree plus random chords; powers uniform in [-p_max, p_max].
inline Grid random_grid(std::mt19937_64& rng, const RandomGridShape& shape) {
    std::uniform_real_distribution<double> power(-shape.p_max, shape.p_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> p(shape.n);
    for (auto& v : p) {
        v = unit(rng) < shape.zero_share ? 0.0 : power(rng);
        if (shape.integral) v = std::round(v);
    }
    std::vector<std::pair<BusLabel, BusLabel>> edges;
    auto has = [&](BusLabel a, BusLabel b) {
        for (const auto& [x, y] : edges)
            if ((x == a && y == b) || (x == b && y == a)) return true;
        return false;
    };
    for (std::size_t i = 1; i < shape.n; ++i) {
        std::uniform_int_distribution<std::size_t> parent(0, i - 1);
        edges.emplace_back(parent(rng) + 1, i + 1);
    }
    const auto extra = static_cast<std::size_t>(shape.extra_edges * static_cast<double>(shape.n));
    std::uniform_int_distribution<std::size_t> any(1, shape.n);
    for (std::size_t k = 0; k < extra && shape.n > 2; ++k) {
        const auto a = static_cast<BusLabel>(any(rng));
        const auto b = static_cast<BusLabel>(any(rng));
        if (a != b && !has(a, b)) edges.emplace_back(a, b);
    }
    return make_grid(p, edges);
}

/// Random connected island of a grid grown from a random root.
inline std::vector<NodeId> random_island(std::mt19937_64& rng, const Grid& grid, std::size_t size) {
    std::uniform_int_distribution<NodeId> any(0, static_cast<NodeId>(grid.size() - 1));
    std::vector<NodeId> island{any(rng)};
    std::vector<char> in(grid.size(), 0);
    in[island.front()] = 1;
    while (island.size() < size) {
        std::vector<NodeId> frontier;
        for (NodeId v : island)
            for (NodeId w : grid.neighbors(v))
                if (!in[w] && std::find(frontier.begin(), frontier.end(), w) == frontier.end()) frontier.push_back(w);
        if (frontier.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
        const NodeId w = frontier[pick(rng)];
        in[w] = 1;
        island.push_back(w);
    }
    std::sort(island.begin(), island.end());
    return island;
}

inline std::vector<std::pair<BusLabel, BusLabel>> cut_from_file_lines(
    std::initializer_list<std::pair<BusLabel, BusLabel>> pairs) {
    return {pairs};
}

}  // namespace testkit
