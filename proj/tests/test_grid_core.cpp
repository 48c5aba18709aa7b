#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <set>

#include "islander/errors.hpp"
#include "islander/graph.hpp"
#include "islander/initpart.hpp"
#include "islander/io.hpp"
#include "islander/partition.hpp"
#include "support.hpp"

using namespace islander;
using testkit::make_grid;
using testkit::path_grid;

namespace {

const std::filesystem::path kData = ISLANDER_DATA_DIR;

Grid fig1() { return load_grid(kData / "examples/fig1_grid.json"); }

std::vector<double> sorted_imbalances(const Grid& grid, const Partition& part) {
    auto v = imbalances(grid, part).values;
    std::sort(v.begin(), v.end());
    return v;
}

void check_close(const std::vector<double>& got, std::vector<double> want, double tol) {
    std::sort(want.begin(), want.end());
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        INFO("island ", i, ": ", got[i], " vs ", want[i]);
        CHECK(std::abs(got[i] - want[i]) <= tol);
    }
}

}  // namespace

TEST_SUITE("grid-core") {

TEST_CASE("grid build validates topology") {
    const Grid g = fig1();
    CHECK(g.size() == 6);
    CHECK(g.edge_count() == 7);
    CHECK(g.generator_count() == 2);
    CHECK(g.total_power() == doctest::Approx(-20.0));
    CHECK(g.max_abs_power() == doctest::Approx(30.0));
    CHECK(g.degree(*g.find(4)) == 3);
    CHECK(g.has_edge(*g.find(3), *g.find(4)));
    CHECK_FALSE(g.has_edge(*g.find(1), *g.find(4)));
    CHECK_FALSE(g.find(7).has_value());

    SUBCASE("single node is connected") { CHECK(make_grid({5.0}, {}).size() == 1); }
    SUBCASE("disconnected") { CHECK_THROWS_AS(make_grid({1, 2, 3}, {{1, 2}}), GridError); }
    SUBCASE("self loop") { CHECK_THROWS_AS(make_grid({1, 2}, {{1, 2}, {2, 2}}), GridError); }
    SUBCASE("duplicate edge") { CHECK_THROWS_AS(make_grid({1, 2}, {{1, 2}, {2, 1}}), GridError); }
    SUBCASE("unknown bus") { CHECK_THROWS_AS(make_grid({1, 2}, {{1, 3}}), GridError); }
    SUBCASE("non-finite power") {
        CHECK_THROWS_AS(make_grid({1, std::numeric_limits<double>::quiet_NaN()}, {{1, 2}}), GridError);
    }
    SUBCASE("duplicate edges collapse on request") {
        GridSpec spec{{{1, 1.0, {}}, {2, -1.0, {}}}, {{1, 2}, {2, 1}}};
        CHECK(Grid::build(spec, DuplicateEdges::collapse).edge_count() == 1);
    }
    SUBCASE("sign violations warn") {
        GridSpec spec{{{1, -3.0, NodeKind::generator}, {2, 3.0, NodeKind::load}}, {{1, 2}}};
        const Grid w = Grid::build(spec);
        CHECK(w.warnings().size() == 2);
        CHECK(w.node(0).kind == NodeKind::generator);
    }
}

TEST_CASE("matpower import") {
    const std::string text = R"(function mpc = tiny
mpc.baseMVA = 100;
% bus_i type Pd Qd
mpc.bus = [
  10 3 0   0;
  20 1 50  0;
  30 1 25  0;   % trailing comment
  40 1 0   0
];
mpc.gen = [
  10 60 0 0 0 0 0 1;
  30 10 0 0 0 0 0 1;
  30 99 0 0 0 0 0 0;
];
mpc.branch = [
  10 20 0 0 0 0 0 0 0 0 1;
  20 30 0 0 0 0 0 0 0 0 1;
  30 20 0 0 0 0 0 0 0 0 1;
  30 40 0 0 0 0 0 0 0 0 1;
  10 40 0 0 0 0 0 0 0 0 0;
];
)";
    const Grid g = parse_matpower(text, "tiny.m");
    CHECK(g.size() == 4);
    CHECK(g.power(*g.find(10)) == 60.0);
    CHECK(g.power(*g.find(20)) == -50.0);
    CHECK(g.power(*g.find(30)) == -15.0);
    CHECK_FALSE(std::signbit(g.power(*g.find(40))));
    CHECK(g.node(*g.find(30)).kind == NodeKind::generator);
    CHECK(g.node(*g.find(40)).kind == NodeKind::passive);
    // parallel 20-30 collapses, out-of-service 10-40 dropped
    CHECK(g.edge_count() == 3);
    CHECK_FALSE(g.has_edge(*g.find(10), *g.find(40)));

    SUBCASE("malformed row names the line") {
        std::string bad = text;
        bad.replace(bad.find("20 1 50  0;"), 11, "20 1 5x0 0;");
        try {
            parse_matpower(bad, "bad.m");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 6);
            CHECK(std::string(e.what()).find("bad.m:6") == 0);
        }
    }
    SUBCASE("missing matrix") { CHECK_THROWS_AS(parse_matpower("mpc.bus = [1 1 0 0];", "x.m"), ParseError); }
}

TEST_CASE("IEEE cases carry the dispatched injections") {
    const Grid g118 = load_grid(kData / "ieee118_opf.m");
    CHECK(g118.size() == 118);
    CHECK(g118.generator_count() == 19);
    CHECK(std::abs(g118.max_abs_power() - 542.78) <= 0.01);
    CHECK(std::abs(cost_lower_bound(g118, 2) - 58.25) <= 0.01);
    CHECK(std::abs(cost_lower_bound(g118, 3) - 38.83) <= 0.01);

    const Grid g300 = load_grid(kData / "ieee300_opf.m");
    CHECK(g300.size() == 300);
    CHECK(std::abs(cost_lower_bound(g300, 3) - 102.92) <= 0.01);
    CHECK(std::abs(cost_lower_bound(g300, 4) - 77.187) <= 0.001);
}

TEST_CASE("native format round-trips byte for byte") {
    const Grid g = load_grid(kData / "ieee118_opf.m");
    const std::string once = dump_native_grid(g);
    const Grid back = parse_native_grid(once);
    CHECK(dump_native_grid(back) == once);
    CHECK(back.total_power() == g.total_power());

    const std::string fig = read_text_file(kData / "examples/fig1_grid.json");
    CHECK(dump_native_grid(parse_native_grid(fig)) == dump_native_grid(fig1()));

    SUBCASE("errors carry the field") {
        CHECK_THROWS_AS(parse_native_grid(R"({"nodes": [{"id": 1}], "edges": []})"), ParseError);
        CHECK_THROWS_AS(parse_native_grid(R"({"nodes": [{"id": 1, "p": 0}], "edges": [[1]]})"), ParseError);
        CHECK_THROWS_AS(parse_native_grid("{\"nodes\": [\n{\"id\": 1, \"p\": }]}"), ParseError);
    }
}

TEST_CASE("imbalance and cost") {
    const Grid g = fig1();
    const Partition part = load_partition(g, kData / "examples/fig1_partition.json");
    CHECK(island_imbalance(g, part, 0) == 40.0);
    CHECK(island_imbalance(g, part, 1) == -60.0);
    CHECK(cost_J(g, part) == 50.0);
    CHECK(cost_lower_bound(g, 2) == 10.0);

    const Grid balanced = path_grid({1, -1, 2, -2});
    CHECK(cost_J(balanced, Partition(balanced, {0, 0, 1, 1})) == 0.0);
    CHECK(island_imbalance(balanced, Partition(balanced, {0, 1, 1, 1}), 0) == 1.0);
}

TEST_CASE("island sums and cost bound over random partitions") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Grid g = testkit::random_grid(rng, {.n = 10 + static_cast<std::size_t>(trial % 20)});
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 4);
        const Partition part = random_partition(g, k, static_cast<std::uint64_t>(trial));
        const ImbalanceVector P = imbalances(g, part);
        double direct_total = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            double s = 0.0;
            for (NodeId v = 0; v < g.size(); ++v)
                if (part.island_of(v) == l) s += g.power(v);
            CHECK(P[l] == s);
            direct_total += s;
        }
        CHECK(P.total == direct_total);
        CHECK(std::abs(P.total - g.total_power()) <= 1e-9 * (1.0 + std::abs(g.total_power())));
        CHECK(cost_J(P) >= cost_lower_bound(P) - 1e-12);
    }
}

TEST_CASE("partition validation") {
    const Grid g = fig1();
    CHECK_THROWS_AS(Partition(g, {0, 0, 0, 1, 1}), PartitionError);        // size
    CHECK_THROWS_AS(Partition(g, {0, 0, 0, 2, 2, 2}), PartitionError);     // gap in indices
    CHECK_THROWS_AS(Partition(g, {0, 1, 0, 1, 0, 1}), PartitionError);     // {1,3,5} disconnected
    CHECK_THROWS_AS(Partition(g, {0, 0, 0, 0, 0, 0}, 2, 0), PartitionError);  // empty island
    CHECK(Partition(g, {0, 0, 0, 0, 0, 0}).island_count() == 1);

    CHECK_THROWS_AS(parse_partition(g, R"({"0": [1, 2, 3], "1": [4, 5]})"), PartitionError);
    CHECK_THROWS_AS(parse_partition(g, R"({"0": [1, 2, 3, 5], "1": [4, 6]})"), PartitionError);
    CHECK_THROWS_AS(parse_partition(g, R"({"0": [1, 2, 3], "2": [4, 5, 6]})"), ParseError);

    const Partition part = load_partition(g, kData / "examples/fig1_partition.json");
    CHECK(parse_partition(g, dump_partition(g, part)) == part);

    const Partition moved = part.with_move(g, 2, 1);
    CHECK(moved.step() == 1);
    CHECK(moved.island_of(2) == 1);
    CHECK_THROWS_AS(part.with_move(g, 0, 1), PartitionError);  // bus 1 is not adjacent to {4,5,6}
}

TEST_CASE("boundary nodes, condensed graph and cut-set on the six-bus example") {
    const Grid g = fig1();
    const Partition part = load_partition(g, kData / "examples/fig1_partition.json");
    const auto boundary = boundary_nodes(g, part);
    REQUIRE(boundary.size() == 2);
    CHECK(g.label(boundary[0].node) == 3);
    CHECK(boundary[0].islands == std::vector<IslandId>{1});
    CHECK(g.label(boundary[1].node) == 4);

    const CondensedGraph cg = condensed_graph(g, part);
    CHECK(cg.islands == 2);
    CHECK(cg.links.size() == 1);
    CHECK(format_cut_set(g, cut_set(g, part)) == "3-4\n");

    const Partition whole(g, {0, 0, 0, 0, 0, 0});
    CHECK(boundary_nodes(g, whole).empty());
    CHECK(cut_set(g, whole).empty());
    CHECK(condensed_graph(g, whole).links.empty());
}

TEST_CASE("boundary, condensed graph and cut-set match edge scans") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Grid g = testkit::random_grid(rng, {.n = 25, .extra_edges = 0.5});
        const Partition part = random_partition(g, 2 + static_cast<std::size_t>(trial % 5), trial);

        std::set<std::pair<NodeId, IslandId>> want_boundary;
        std::set<std::pair<IslandId, IslandId>> want_links;
        std::vector<Edge> want_cut;
        for (const Edge& e : g.edges()) {
            const IslandId a = part.island_of(e.a), b = part.island_of(e.b);
            if (a == b) continue;
            want_boundary.insert({e.a, b});
            want_boundary.insert({e.b, a});
            want_links.insert({std::min(a, b), std::max(a, b)});
            want_cut.push_back(e);
        }
        std::set<std::pair<NodeId, IslandId>> got_boundary;
        std::set<NodeId> boundary_set;
        for (const auto& b : boundary_nodes(g, part)) {
            CHECK(std::is_sorted(b.islands.begin(), b.islands.end()));
            CHECK(b.islands == adjacent_islands(g, part, b.node));
            for (IslandId l : b.islands) got_boundary.insert({b.node, l});
            boundary_set.insert(b.node);
        }
        CHECK(got_boundary == want_boundary);
        const auto links = condensed_graph(g, part).links;
        CHECK(std::set<std::pair<IslandId, IslandId>>(links.begin(), links.end()) == want_links);
        CHECK(cut_set(g, part) == want_cut);

        std::set<NodeId> endpoints;
        for (const Edge& e : want_cut) endpoints.insert({e.a, e.b});
        CHECK(endpoints == boundary_set);
    }
}

TEST_CASE("connectivity without a node agrees with BFS and articulation points") {
    const Grid path = path_grid({1, 0, -1});
    const Partition one(path, {0, 0, 0});
    CHECK_FALSE(is_connected_without(path, one, 0, 1));
    CHECK(is_connected_without(path, one, 0, 0));
    CHECK(is_connected_without(path, one, 0, 2));
    CHECK(is_connected_without(path, Partition(path, {0, 1, 1}), 0, 0));  // empty remainder

    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const Grid g = testkit::random_grid(rng, {.n = 30, .extra_edges = 0.2});
        const Partition part = random_partition(g, 3, trial);
        for (IslandId l = 0; l < 3; ++l) {
            const auto members = part.members(l);
            const auto cut_vertices = articulation_points(g, members);
            for (NodeId i : members) {
                std::vector<NodeId> rest;
                for (NodeId v : members)
                    if (v != i) rest.push_back(v);
                // BFS from scratch over rest
                bool bfs_connected = true;
                if (!rest.empty()) {
                    std::set<NodeId> seen{rest.front()};
                    std::vector<NodeId> stack{rest.front()};
                    while (!stack.empty()) {
                        const NodeId v = stack.back();
                        stack.pop_back();
                        for (NodeId w : g.neighbors(v))
                            if (w != i && part.island_of(w) == l && seen.insert(w).second) stack.push_back(w);
                    }
                    bfs_connected = seen.size() == rest.size();
                }
                const bool fast = is_connected_without(g, part, l, i);
                CHECK(fast == bfs_connected);
                const bool articulation = std::binary_search(cut_vertices.begin(), cut_vertices.end(), i);
                CHECK(fast == !articulation);
            }
        }
    }
}

TEST_CASE("graph helpers") {
    const Grid g = fig1();
    const std::vector<NodeId> split{0, 1, 4, 5};
    const auto comps = induced_components(g, split);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == std::vector<NodeId>{0, 1});
    CHECK(comps[1] == std::vector<NodeId>{4, 5});
    CHECK(induced_connected(g, std::vector<NodeId>{}));
    CHECK_FALSE(induced_connected(g, split));
    CHECK(articulation_points(g, std::vector<NodeId>{0, 1, 2, 3, 4, 5}) == std::vector<NodeId>{2, 3});
    const std::vector<Edge> removed{make_edge(2, 3)};
    CHECK(components_without_edges(g, removed).size() == 2);
}

TEST_CASE("cut-set files") {
    const auto pairs = parse_cut_set("# header\n1-2, 3-4\n 5-6\n\n7-8 # tail\n", "t");
    CHECK(pairs == std::vector<std::pair<BusLabel, BusLabel>>{{1, 2}, {3, 4}, {5, 6}, {7, 8}});
    CHECK_THROWS_AS(parse_cut_set("1-x\n", "t"), ParseError);
    CHECK_THROWS_AS(parse_cut_set("12\n", "t"), ParseError);
    CHECK_THROWS_AS(parse_cut_set("5 - 6\n", "t"), ParseError);

    const Grid g = fig1();
    const std::vector<std::pair<BusLabel, BusLabel>> cut{{3, 4}};
    const Partition part = from_cut_set(g, cut);
    CHECK(part == load_partition(g, kData / "examples/fig1_partition.json"));
    const std::vector<std::pair<BusLabel, BusLabel>> missing{{1, 4}};
    CHECK_THROWS_AS(from_cut_set(g, missing), PartitionError);
    const std::vector<std::pair<BusLabel, BusLabel>> inside{{3, 4}, {1, 2}};
    CHECK_THROWS_AS(from_cut_set(g, inside), PartitionError);
}

TEST_CASE("published cut-sets reproduce the published island imbalances") {
    struct Row {
        const char* grid;
        const char* file;
        std::vector<double> P;
    };
    const std::vector<Row> rows{
        {"ieee118_opf.m", "ieee118_n2_ssrp_init.txt", {-74.26, 190.75}},
        {"ieee118_opf.m", "ieee118_n2_ssrp_final.txt", {53.74, 62.75}},
        {"ieee118_opf.m", "ieee118_n2_cris_init.txt", {-258.25, 374.74}},
        {"ieee118_opf.m", "ieee118_n2_cris_final.txt", {65.75, 50.74}},
        {"ieee118_opf.m", "ieee118_n3_ssrp_init.txt", {-74.26, 1.98, 188.77}},
        {"ieee118_opf.m", "ieee118_n3_ssrp_final.txt", {53.74, 1.98, 60.77}},
        {"ieee118_opf.m", "ieee118_n3_kyriacou_init.txt", {-199.26, 313.77, 1.98}},
        {"ieee118_opf.m", "ieee118_n3_kyriacou_final.txt", {83.66, 30.86, 1.98}},
        {"ieee300_opf.m", "ieee300_n3_ssrp_init.txt", {6.11, 129.98, 172.65}},
        {"ieee300_opf.m", "ieee300_n3_ssrp_final.txt", {6.11, 145.98, 156.65}},
        {"ieee300_opf.m", "ieee300_n3_arbitrary_init.txt", {-639.87, 775.96, 172.65}},
        {"ieee300_opf.m", "ieee300_n3_arbitrary_final.txt", {129.21, 18.89, 160.65}},
        {"ieee300_opf.m", "ieee300_n4_ssrp_init.txt", {19.76, 6.11, 205.98, 76.9}},
        {"ieee300_opf.m", "ieee300_n4_ssrp_final.txt", {114.76, 6.11, 110.98, 76.9}},
        {"ieee300_opf.m", "ieee300_n4_kyriacou_init.txt", {145.98, 79.76, 6.11, 76.9}},
        {"ieee300_opf.m", "ieee300_n4_kyriacou_final.txt", {110.98, 114.76, 6.11, 76.9}},
    };
    for (const auto& row : rows) {
        INFO(row.file);
        const Grid g = load_grid(kData / row.grid);
        const Partition part = from_cut_set(g, load_cut_set(kData / "cutsets" / row.file));
        check_close(sorted_imbalances(g, part), row.P, 0.006);
        // the file lists exactly the crossing edges
        std::set<std::pair<BusLabel, BusLabel>> listed;
        for (auto [a, b] : load_cut_set(kData / "cutsets" / row.file)) listed.insert({std::min(a, b), std::max(a, b)});
        std::set<std::pair<BusLabel, BusLabel>> crossing;
        for (const Edge& e : cut_set(g, part))
            crossing.insert({std::min(g.label(e.a), g.label(e.b)), std::max(g.label(e.a), g.label(e.b))});
        CHECK(listed == crossing);
    }
}

}  // TEST_SUITE
