#include "islander/initpart.hpp"

#include <algorithm>
#include <deque>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <random>

#include "islander/errors.hpp"
#include "islander/graph.hpp"
#include "islander/io.hpp"

namespace islander {

namespace {

constexpr IslandId kUnassigned = static_cast<IslandId>(-1);

// Grows every island one BFS layer at a time, islands taking turns in index
// order, until all nodes are claimed.
std::vector<IslandId> round_robin_fill(const Grid& grid, std::vector<IslandId> owner,
                                       std::vector<std::vector<NodeId>> frontier) {
    bool active = true;
    while (active) {
        active = false;
        for (IslandId l = 0; l < frontier.size(); ++l) {
            std::vector<NodeId> next;
            for (NodeId v : frontier[l]) {
                for (NodeId w : grid.neighbors(v)) {
                    if (owner[w] != kUnassigned) continue;
                    owner[w] = l;
                    next.push_back(w);
                }
            }
            std::sort(next.begin(), next.end());
            frontier[l] = std::move(next);
            active = active || !frontier[l].empty();
        }
    }
    return owner;
}

// Hop-shortest path from any node of `tree` to `target`; ties resolved by
// ascending ids through BFS order.
std::vector<NodeId> path_to_tree(const Grid& grid, const std::vector<char>& in_tree, NodeId target) {
    std::vector<NodeId> parent(grid.size(), kUnassigned);
    std::vector<char> seen(grid.size(), 0);
    std::deque<NodeId> queue;
    for (NodeId v = 0; v < grid.size(); ++v) {
        if (in_tree[v]) {
            seen[v] = 1;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const NodeId v = queue.front();
        queue.pop_front();
        if (v == target) break;
        for (NodeId w : grid.neighbors(v)) {
            if (seen[w]) continue;
            seen[w] = 1;
            parent[w] = v;
            queue.push_back(w);
        }
    }
    std::vector<NodeId> path;
    for (NodeId v = target; !in_tree[v]; v = parent[v]) path.push_back(v);
    return path;
}

}  // namespace

void validate_groups(const Grid& grid, const GeneratorGroups& groups) {
    std::vector<int> group_of(grid.size(), -1);
    for (std::size_t g = 0; g < groups.groups.size(); ++g) {
        if (groups.groups[g].empty()) throw InputError(fmt::format("generator group {} is empty", g));
        for (NodeId v : groups.groups[g]) {
            if (v >= grid.size()) throw InputError(fmt::format("generator group {} names node {} outside the grid", g, v));
            if (group_of[v] >= 0)
                throw InputError(fmt::format("bus {} appears in groups {} and {}", grid.label(v), group_of[v], g));
            group_of[v] = static_cast<int>(g);
        }
    }
}

Partition ssrp_bfs(const Grid& grid, const GeneratorGroups& groups) {
    validate_groups(grid, groups);
    const std::size_t k = groups.groups.size();
    if (k < 2) throw InputError("seeding needs at least two generator groups");
    if (k > grid.size()) throw InputError("more groups than nodes");

    std::vector<IslandId> owner(grid.size(), kUnassigned);
    std::vector<std::vector<NodeId>> trees(k);
    for (IslandId g = 0; g < k; ++g) {
        std::vector<char> in_tree(grid.size(), 0);
        const auto& members = groups.groups[g];
        in_tree[members.front()] = 1;
        trees[g].push_back(members.front());
        for (NodeId m : members) {
            for (NodeId v : path_to_tree(grid, in_tree, m)) {
                in_tree[v] = 1;
                trees[g].push_back(v);
            }
        }
        for (NodeId v : trees[g]) {
            if (owner[v] != kUnassigned)
                throw InputError(fmt::format("trees of groups {} and {} share bus {}; choose less entangled groups",
                                             owner[v], g, grid.label(v)));
            owner[v] = g;
        }
        std::sort(trees[g].begin(), trees[g].end());
    }
    return Partition(grid, round_robin_fill(grid, std::move(owner), std::move(trees)), k, 0);
}

Partition random_partition(const Grid& grid, std::size_t island_count, std::uint64_t seed) {
    const std::size_t n = grid.size();
    if (island_count < 1 || island_count > n)
        throw InputError(fmt::format("cannot split {} nodes into {} islands", n, island_count));
    // mt19937_64 output is fixed by the standard; distributions are not, so
    // draws are reduced by modulo
    std::mt19937_64 rng(seed);
    auto draw = [&](std::size_t bound) { return static_cast<std::size_t>(rng() % bound); };

    std::vector<NodeId> order(n);
    for (NodeId v = 0; v < n; ++v) order[v] = v;
    for (std::size_t i = 0; i < island_count; ++i) std::swap(order[i], order[i + draw(n - i)]);

    std::vector<IslandId> owner(n, kUnassigned);
    for (IslandId l = 0; l < island_count; ++l) owner[order[l]] = l;

    // claim one random crossing edge (claimed -> unclaimed) at a time
    std::size_t claimed = island_count;
    std::vector<std::pair<NodeId, IslandId>> options;
    while (claimed < n) {
        options.clear();
        for (NodeId v = 0; v < n; ++v) {
            if (owner[v] != kUnassigned) continue;
            for (NodeId w : grid.neighbors(v))
                if (owner[w] != kUnassigned) options.emplace_back(v, owner[w]);
        }
        const auto [v, l] = options[draw(options.size())];
        owner[v] = l;
        ++claimed;
    }
    return Partition(grid, std::move(owner), island_count, 0);
}

Partition from_cut_set(const Grid& grid, std::span<const std::pair<BusLabel, BusLabel>> cut) {
    std::vector<Edge> removed;
    removed.reserve(cut.size());
    for (const auto& [a, b] : cut) {
        const auto ia = grid.find(a);
        const auto ib = grid.find(b);
        if (!ia || !ib || !grid.has_edge(*ia, *ib))
            throw PartitionError(fmt::format("cut edge {}-{} is not a line of the grid", a, b));
        removed.push_back(make_edge(*ia, *ib));
    }
    const auto components = components_without_edges(grid, removed);
    if (components.size() < 2) throw PartitionError("the cut-set leaves the grid connected");
    Partition part = Partition::from_islands(grid, components);
    for (const Edge& e : removed) {
        if (part.island_of(e.a) == part.island_of(e.b))
            throw PartitionError(fmt::format("cut edge {} lies inside island {}", format_edge(grid, e),
                                             part.island_of(e.a)));
    }
    return part;
}

GeneratorGroups parse_groups(const Grid& grid, std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("groups", 0, "", e.what());
    }
    if (!doc.is_object() || !doc.contains("groups") || !doc["groups"].is_array())
        throw ParseError("groups", 0, "groups", "expected {\"groups\": [[bus, ...], ...]}");
    GeneratorGroups out;
    for (std::size_t g = 0; g < doc["groups"].size(); ++g) {
        const auto& arr = doc["groups"][g];
        const std::string field = fmt::format("groups[{}]", g);
        if (!arr.is_array()) throw ParseError("groups", 0, field, "expected an array of bus ids");
        auto& members = out.groups.emplace_back();
        for (const auto& m : arr) {
            if (!m.is_number_integer()) throw ParseError("groups", 0, field, "expected an integer bus id");
            const auto id = grid.find(m.get<BusLabel>());
            if (!id) throw ParseError("groups", 0, field, fmt::format("unknown bus {}", m.get<BusLabel>()));
            members.push_back(*id);
        }
    }
    validate_groups(grid, out);
    return out;
}

}  // namespace islander
