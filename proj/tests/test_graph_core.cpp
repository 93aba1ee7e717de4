#include <doctest.h>

#include <random>

#include "brute.hpp"
#include "sforest/errors.hpp"
#include "sforest/gw_forest.hpp"
#include "sforest/instance_gen.hpp"

using namespace sforest;

namespace {

WeightedGraph path_graph(std::vector<Length> lengths) {
    std::vector<Edge> es;
    for (std::size_t i = 0; i < lengths.size(); ++i)
        es.push_back({static_cast<Vertex>(i), static_cast<Vertex>(i + 1), lengths[i]});
    return WeightedGraph(static_cast<int>(lengths.size()) + 1, es);
}

long long as_ll(Cost c) { return c.is_infinite() ? brute::kInf : c.value(); }

}  // namespace

TEST_CASE("path distances") {
    WeightedGraph g = path_graph({2, 3});
    CHECK(shortest_dist(g, 0, 2) == Cost(5));
    CHECK(shortest_dist(g, 1, 1) == Cost(0));
}

TEST_CASE("unreachable vertex has infinite distance") {
    WeightedGraph g(3, {{0, 1, 4}});
    CHECK(shortest_dist(g, 0, 2).is_infinite());
}

TEST_CASE("distances agree with cubic relaxation on random graphs") {
    for (int seed = 0; seed < 40; ++seed) {
        auto inst = gen_random(8, 7 + seed % 10, 0, seed);
        auto fw = brute::floyd_warshall(inst.graph);
        auto apsp = all_pairs_distances(inst.graph);
        auto serial = all_pairs_distances_serial(inst.graph);
        for (Vertex a = 0; a < 8; ++a)
            for (Vertex b = 0; b < 8; ++b) {
                CHECK(as_ll(shortest_dist(inst.graph, a, b)) == fw[a][b]);
                CHECK(as_ll(apsp.at(a, b)) == fw[a][b]);
                CHECK(serial.at(a, b) == apsp.at(a, b));
            }
    }
}

TEST_CASE("triangle inequality and symmetry") {
    for (int seed = 0; seed < 20; ++seed) {
        auto inst = gen_random(9, 14, 0, 500 + seed);
        auto d = all_pairs_distances_serial(inst.graph);
        for (Vertex a = 0; a < 9; ++a)
            for (Vertex b = 0; b < 9; ++b) {
                CHECK(d.at(a, b) == d.at(b, a));
                for (Vertex c = 0; c < 9; ++c) CHECK(d.at(a, c) <= d.at(a, b) + d.at(b, c));
            }
    }
}

TEST_CASE("contracting one triangle edge keeps the shorter parallel edge") {
    WeightedGraph g(3, {{0, 1, 1}, {0, 2, 5}, {1, 2, 2}});
    Contraction c = contract_edges(g, {0});
    REQUIRE(c.graph.num_vertices() == 2);
    REQUIRE(c.graph.num_edges() == 1);
    CHECK(c.graph.edge(0).length == 2);
    CHECK(c.map.provenance[0] == 2);
    CHECK(c.map.vertex_map[0] == c.map.vertex_map[1]);
}

TEST_CASE("parallel-edge ties go to the smallest original id") {
    WeightedGraph g(3, {{0, 1, 1}, {0, 2, 3}, {1, 2, 3}});
    Contraction c = contract_edges(g, {0});
    REQUIRE(c.graph.num_edges() == 1);
    CHECK(c.map.provenance[0] == 1);
}

TEST_CASE("contracting nothing is the identity") {
    auto inst = gen_random(7, 10, 0, 3);
    Contraction c = contract_edges(inst.graph, {});
    CHECK(c.graph.num_vertices() == 7);
    CHECK(c.graph.num_edges() == 10);
    for (Vertex v = 0; v < 7; ++v) CHECK(c.map.vertex_map[v] == v);
    for (EdgeId e = 0; e < 10; ++e) {
        CHECK(c.map.provenance[e] == e);
        CHECK(c.graph.edge(e).length == inst.graph.edge(e).length);
    }
}

TEST_CASE("contracting a spanning tree leaves one vertex") {
    auto inst = gen_random(8, 12, 0, 4);
    std::vector<EdgeId> tree;
    UnionFind uf(8);
    for (EdgeId e = 0; e < inst.graph.num_edges(); ++e)
        if (uf.unite(inst.graph.edge(e).u, inst.graph.edge(e).v)) tree.push_back(e);
    Contraction c = contract_edges(inst.graph, tree);
    CHECK(c.graph.num_vertices() == 1);
    CHECK(c.graph.num_edges() == 0);
}

TEST_CASE("lifting a contracted forest keeps its cost") {
    std::mt19937_64 rng(9);
    for (int seed = 0; seed < 30; ++seed) {
        auto inst = gen_random(10, 16, 0, 100 + seed);
        std::vector<EdgeId> es;
        for (EdgeId e = 0; e < inst.graph.num_edges(); ++e)
            if (rng() % 4 == 0) es.push_back(e);
        Contraction c = contract_edges(inst.graph, es);
        std::vector<EdgeId> sub;
        UnionFind uf(c.graph.num_vertices());
        for (EdgeId e = 0; e < c.graph.num_edges(); ++e)
            if (rng() % 2 == 0 && uf.unite(c.graph.edge(e).u, c.graph.edge(e).v)) sub.push_back(e);
        Length small = 0, big = 0;
        for (EdgeId e : sub) small += c.graph.edge(e).length;
        for (EdgeId e : c.map.lift(sub)) big += inst.graph.edge(e).length;
        CHECK(small == big);
    }
}

TEST_CASE("validate_solution basics") {
    WeightedGraph g = path_graph({1, 1, 1});
    Validation v = validate_solution(g, DemandSet(4, {}), Forest(g, {}));
    CHECK(v.feasible);
    CHECK(v.cost == 0);
    DemandSet d(4, {{0, 3}});
    CHECK_FALSE(validate_solution(g, d, Forest(g, {0, 2})).feasible);
    Validation ok = validate_solution(g, d, Forest(g, {0, 1, 2}));
    CHECK(ok.feasible);
    CHECK(ok.cost == 3);
}

TEST_CASE("forest rejects unknown edge ids") {
    WeightedGraph g = path_graph({1});
    CHECK_THROWS_AS(Forest(g, {3}), InvalidInput);
}

TEST_CASE("gw output is feasible by independent component labelling") {
    for (int seed = 0; seed < 100; ++seed) {
        int n = 6 + seed % 7;
        auto inst = gen_random(n, n + 3 + seed % 3, 1 + seed % 4, 700 + seed);
        GwResult r = gw_steiner_forest(inst.graph, inst.demands);
        brute::Dsu dsu(inst.graph.num_vertices());
        for (EdgeId e : r.forest.edges()) dsu.unite(inst.graph.edge(e).u, inst.graph.edge(e).v);
        for (auto [s, t] : inst.demands.pairs()) CHECK(dsu.find(s) == dsu.find(t));
    }
}

TEST_CASE("bfs levels on a path alternate between two classes") {
    WeightedGraph g = path_graph({1, 1, 1, 1});
    auto cls = bfs_level_partition(g, 0, 2);
    REQUIRE(cls.size() == 2);
    CHECK(cls[0] == std::vector<EdgeId>{0, 2});
    CHECK(cls[1] == std::vector<EdgeId>{1, 3});
}

TEST_CASE("with k above the edge count every class is one level") {
    for (int seed = 0; seed < 10; ++seed) {
        auto inst = gen_random(9, 13, 0, 40 + seed);
        const WeightedGraph& g = inst.graph;
        int k = g.num_edges() + 1;
        auto cls = bfs_level_partition(g, 0, k);
        auto lv = bfs_levels(g, 0);
        for (const auto& c : cls) {
            if (c.empty()) continue;
            int level = std::min(lv[g.edge(c[0]).u], lv[g.edge(c[0]).v]);
            for (EdgeId e : c) CHECK(std::min(lv[g.edge(e).u], lv[g.edge(e).v]) == level);
        }
    }
}

TEST_CASE("bfs classes on a 4x4 grid are disjoint and cover all edges") {
    auto grid = gen_grid(4, 4, 0, 1);
    const WeightedGraph& g = grid.graph;
    auto cls = bfs_level_partition(g, 0, 3);
    REQUIRE(cls.size() == 3);
    // Recount levels by a plain queue.
    std::vector<int> level(16, -1);
    std::vector<Vertex> q{0};
    level[0] = 0;
    for (std::size_t i = 0; i < q.size(); ++i)
        for (Vertex w : g.neighbours(q[i]))
            if (level[w] < 0) {
                level[w] = level[q[i]] + 1;
                q.push_back(w);
            }
    std::vector<int> seen(static_cast<std::size_t>(g.num_edges()), 0);
    for (int c = 0; c < 3; ++c)
        for (EdgeId e : cls[c]) {
            ++seen[e];
            CHECK(std::min(level[g.edge(e).u], level[g.edge(e).v]) % 3 == c);
        }
    for (int s : seen) CHECK(s == 1);
}

TEST_CASE("demand sets normalise and deduplicate") {
    DemandSet d(4, {{3, 1}, {1, 3}, {0, 2}});
    REQUIRE(d.size() == 2);
    CHECK(d.pairs()[0] == std::pair<Vertex, Vertex>{1, 3});
    CHECK(d.contains(3, 1));
    CHECK(d.terminals() == std::vector<Vertex>{0, 1, 2, 3});
    CHECK_THROWS_AS(DemandSet(3, {{1, 1}}), InvalidInput);
    CHECK_THROWS_AS(DemandSet(3, {{0, 5}}), InvalidInput);
}

TEST_CASE("negative lengths are rejected") {
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, -1}}), InvalidInput);
}

TEST_CASE("cost infinity arithmetic") {
    Cost inf = Cost::infinity();
    CHECK((inf + Cost(3)).is_infinite());
    CHECK(Cost(3) < inf);
    CHECK(min(inf, Cost(2)) == Cost(2));
    CHECK(inf == Cost::infinity());
    CHECK_THROWS(inf.value());
}
