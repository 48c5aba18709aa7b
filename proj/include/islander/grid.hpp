#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace islander {

/// Dense 0-based node index.
using NodeId = std::uint32_t;
/// Dense 0-based island index.
using IslandId = std::uint32_t;
/// Bus number as it appears in input files.
using BusLabel = std::int64_t;

enum class NodeKind { generator, load, passive };

const char* to_string(NodeKind kind) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept;
/// generator for p > 0, load for p < 0, passive for p == 0.
NodeKind kind_from_power(double p) noexcept;

struct NodeRecord {
    NodeId id = 0;
    BusLabel label = 0;
    double p = 0.0;  // MW, generation positive
    NodeKind kind = NodeKind::passive;
};

/// Undirected edge with a < b.
struct Edge {
    NodeId a = 0;
    NodeId b = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(NodeId u, NodeId v) noexcept { return u < v ? Edge{u, v} : Edge{v, u}; }

enum class DuplicateEdges { reject, collapse };

struct GridSpec {
    struct Node {
        BusLabel label = 0;
        double p = 0.0;
        std::optional<NodeKind> kind;
    };
    std::vector<Node> nodes;
    std::vector<std::pair<BusLabel, BusLabel>> edges;
};

/// Immutable power grid: a simple, connected, undirected graph with one
/// active power injection per node. Node ids are assigned in input order.
class Grid {
public:
    /// Validates and builds. Throws GridError on unknown labels, self-loops,
    /// duplicate labels, duplicate edges (under DuplicateEdges::reject),
    /// non-finite powers, or a disconnected graph.
    static Grid build(const GridSpec& spec, DuplicateEdges duplicates = DuplicateEdges::reject);

    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    const NodeRecord& node(NodeId id) const { return nodes_[id]; }
    std::span<const NodeRecord> nodes() const noexcept { return nodes_; }
    double power(NodeId id) const { return nodes_[id].p; }
    BusLabel label(NodeId id) const { return nodes_[id].label; }
    std::optional<NodeId> find(BusLabel label) const;

    /// Neighbours in ascending id order.
    std::span<const NodeId> neighbors(NodeId id) const {
        return {adjacency_.data() + offsets_[id], adjacency_.data() + offsets_[id + 1]};
    }
    std::size_t degree(NodeId id) const { return offsets_[id + 1] - offsets_[id]; }
    bool has_edge(NodeId u, NodeId v) const;

    /// Sorted ascending.
    std::span<const Edge> edges() const noexcept { return edges_; }

    std::size_t generator_count() const noexcept;
    /// Sum of all injections in node order.
    double total_power() const noexcept { return total_power_; }
    /// max_i |p_i|
    double max_abs_power() const noexcept { return max_abs_power_; }

    /// Sign-convention violations found while building.
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    Grid() = default;

    std::vector<NodeRecord> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> adjacency_;
    std::unordered_map<BusLabel, NodeId> index_;
    std::vector<std::string> warnings_;
    double total_power_ = 0.0;
    double max_abs_power_ = 0.0;
};

}  // namespace islander
