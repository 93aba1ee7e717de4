#include <doctest.h>

#include <random>

#include "brute.hpp"
#include "sforest/errors.hpp"
#include "sforest/exact_oracle.hpp"
#include "sforest/instance_gen.hpp"
#include "sforest/sp_exact.hpp"

using namespace sforest;

namespace {

long long as_ll(Cost c) { return c.is_infinite() ? brute::kInf : c.value(); }

std::vector<Cost> lengths_of(const WeightedGraph& g) {
    std::vector<Cost> out;
    for (const auto& e : g.edges()) out.push_back(Cost(e.length));
    return out;
}

WeightedGraph bridge_graph() {
    return WeightedGraph(5, {{0, 2, 1}, {0, 4, 1}, {1, 2, 1}, {1, 4, 1}, {2, 3, 1}, {3, 4, 1}});
}

std::vector<Vertex> subset_of(const std::vector<Vertex>& A, unsigned mask) {
    std::vector<Vertex> S;
    for (std::size_t j = 0; j < A.size(); ++j)
        if (mask >> j & 1u) S.push_back(A[j]);
    return S;
}

// Expected node values from the standalone subgraph by brute force.
struct Expected {
    long long a, b;
    std::vector<long long> f;  // indexed by subset mask over active vertices
};

Expected brute_values(const SpSubInstance& sub) {
    Expected e;
    brute::Constraints ca;
    std::vector<Vertex> all{sub.x, sub.y};
    all.insert(all.end(), sub.active.begin(), sub.active.end());
    ca.link = {all};
    e.a = brute::opt_subset(sub.graph, sub.demands, ca);
    brute::Constraints cb;
    cb.identify = {{sub.x, sub.y}};
    std::vector<Vertex> ax{sub.x};
    ax.insert(ax.end(), sub.active.begin(), sub.active.end());
    cb.link = {ax};
    e.b = brute::opt_subset(sub.graph, sub.demands, cb);
    const unsigned A = static_cast<unsigned>(sub.active.size());
    for (unsigned mask = 0; mask < (1u << A); ++mask) {
        std::vector<Vertex> xs{sub.x}, ys{sub.y};
        for (unsigned j = 0; j < A; ++j) (mask >> j & 1u ? xs : ys).push_back(sub.active[j]);
        brute::Constraints cf;
        cf.link = {xs, ys};
        cf.separate = {{sub.x, sub.y}};
        e.f.push_back(brute::opt_subset(sub.graph, sub.demands, cf));
    }
    return e;
}

long long add(long long a, long long b) { return a >= brute::kInf || b >= brute::kInf ? brute::kInf : a + b; }

}  // namespace

TEST_CASE("single edge decomposes to a leaf") {
    WeightedGraph g(2, {{0, 1, 4}});
    SpTree t = sp_decompose(g, 0, 1);
    REQUIRE(t.nodes.size() == 1);
    CHECK(t.nodes[0].kind == SpKind::edge);
    CHECK(t.nodes[0].edge == 0);
}

TEST_CASE("two parallel edges decompose to a parallel node over two leaves") {
    WeightedGraph g(2, {{0, 1, 2}, {0, 1, 5}});
    SpTree t = sp_decompose(g, 0, 1);
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[2].kind == SpKind::parallel);
    CHECK(t.nodes[t.nodes[2].left].kind == SpKind::edge);
    CHECK(t.nodes[t.nodes[2].right].kind == SpKind::edge);
}

TEST_CASE("bridge graph is series-parallel and adding xy is not") {
    WeightedGraph g = bridge_graph();
    CHECK_NOTHROW(sp_decompose(g).check(g));
    CHECK_THROWS_AS(sp_decompose(g, 0, 1), NotSeriesParallel);
    CHECK_FALSE(brute::has_k4_minor(g));
    std::vector<Edge> es = g.edges();
    es.push_back({0, 1, 1});
    WeightedGraph h(5, es);
    CHECK(brute::has_k4_minor(h));
    try {
        sp_decompose(h);
        FAIL("expected rejection");
    } catch (const NotSeriesParallel& e) {
        CHECK(e.core_vertices.size() >= 4);
        CHECK_FALSE(e.core_edges.empty());
    }
}

TEST_CASE("decomposable graphs have no K4 minor") {
    for (int seed = 0; seed < 300; ++seed) {
        int n = 5 + seed % 4;
        auto inst = gen_random(n, n - 1 + seed % 5, 0, 1000 + seed, 9);
        bool sp = true;
        try {
            sp_decompose(inst.graph).check(inst.graph);
        } catch (const NotSeriesParallel&) {
            sp = false;
        }
        // Only one direction: a tree with a branch vertex has no K4 minor either.
        if (sp) CHECK_FALSE(brute::has_k4_minor(inst.graph));
    }
}

TEST_CASE("decomposition of generated instances") {
    for (int seed = 0; seed < 300; ++seed) {
        auto inst = gen_random_sp(1 + seed % 20, seed);
        SpTree t = sp_decompose(inst.graph, inst.tree.nodes.back().x, inst.tree.nodes.back().y);
        CHECK_NOTHROW(t.check(inst.graph));
        CHECK_NOTHROW(reverse_sp_tree(t).check(inst.graph));
        TreeDecomposition td = td_from_sp_tree(inst.graph, t);
        TdValidation v = validate(inst.graph, td);
        CHECK(v.valid());
        CHECK(v.width <= 2);
    }
}

TEST_CASE("min cut examples") {
    CutGraph c;
    c.s = c.add_vertex("s");
    c.t = c.add_vertex("t");
    c.add_arc(c.s, c.t, 7);
    CHECK(min_cut(c, {c.s}, {c.t}).value == Cost(7));
    c.add_arc(c.s, c.t, Cost::infinity());
    CHECK(min_cut(c, {c.s}, {c.t}).value.is_infinite());
    CutGraph back;
    back.s = back.add_vertex("s");
    back.t = back.add_vertex("t");
    back.add_arc(back.t, back.s, 3);
    CHECK(min_cut(back, {back.s}, {back.t}).value == Cost(0));
}

TEST_CASE("min cut agrees with enumeration") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + static_cast<int>(rng() % 9);
        CutGraph c;
        for (int v = 0; v < n; ++v) c.add_vertex("v");
        std::vector<brute::DArc> arcs;
        int m = static_cast<int>(rng() % 20);
        for (int i = 0; i < m; ++i) {
            int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
            if (a == b) continue;
            bool inf = rng() % 6 == 0;
            Length cap = static_cast<Length>(rng() % 10);
            c.add_arc(a, b, inf ? Cost::infinity() : Cost(cap));
            arcs.push_back({a, b, inf ? brute::kInf : cap});
        }
        std::vector<int> src, snk;
        for (int v = 0; v < n; ++v) {
            int r = static_cast<int>(rng() % 4);
            if (r == 0 || v == 0) src.push_back(v);
            else if (r == 1 || v == 1) snk.push_back(v);
        }
        MinCut got = min_cut(c, src, snk);
        CHECK(as_ll(got.value) == brute::min_cut_enum(n, arcs, src, snk));
        if (got.value.is_finite()) {
            long long side_cost = 0;
            auto in = [&](int v) { return std::find(got.side.begin(), got.side.end(), v) != got.side.end(); };
            for (int s : src) CHECK(in(s));
            for (int t : snk) CHECK_FALSE(in(t));
            for (const auto& a : arcs)
                if (in(a.from) && !in(a.to)) side_cost = add(side_cost, a.cap);
            CHECK(side_cost == got.value.value());
        }
    }
}

TEST_CASE("leaf values for a demand edge") {
    WeightedGraph g(2, {{0, 1, 5}});
    SpTree t = sp_decompose(g, 0, 1);
    auto vals = sp_node_values(g, t, DemandSet(2, {{0, 1}}), lengths_of(g));
    CHECK(vals[0].a == Cost(5));
    CHECK(vals[0].b == Cost(0));
    CHECK(vals[0].cut.evaluate({}).is_infinite());
}

TEST_CASE("leaf values without demands") {
    WeightedGraph g(2, {{0, 1, 5}});
    SpTree t = sp_decompose(g, 0, 1);
    auto vals = sp_node_values(g, t, DemandSet(2, {}), lengths_of(g));
    CHECK(vals[0].a == Cost(5));
    CHECK(vals[0].b == Cost(0));
    CHECK(vals[0].cut.evaluate({}) == Cost(0));
}

TEST_CASE("node values match brute force on every node") {
    int nodes = 0;
    for (int seed = 0; seed < 120; ++seed) {
        auto inst = gen_random_sp(3 + seed % 10, 2000 + seed);
        auto vals = sp_node_values(inst.graph, inst.tree, inst.demands, lengths_of(inst.graph));
        for (int i = 0; i < static_cast<int>(inst.tree.nodes.size()); ++i) {
            auto sub = sp_sub_instance(inst.graph, inst.tree, i, inst.demands);
            if (sub.graph.num_edges() > 14 || sub.active.size() > 4) continue;
            ++nodes;
            Expected e = brute_values(sub);
            CHECK(as_ll(vals[i].a) == e.a);
            CHECK(as_ll(vals[i].b) == e.b);
            for (unsigned mask = 0; mask < e.f.size(); ++mask) {
                std::vector<Vertex> S;
                for (Vertex v : subset_of(sub.active, mask)) S.push_back(sub.to_original[v]);
                CHECK(as_ll(vals[i].cut.evaluate(S)) == e.f[mask]);
            }
        }
    }
    CHECK(nodes >= 500);
}

TEST_CASE("cut functions are submodular") {
    for (int seed = 0; seed < 60; ++seed) {
        auto inst = gen_random_sp(4 + seed % 12, 3000 + seed);
        auto vals = sp_node_values(inst.graph, inst.tree, inst.demands, lengths_of(inst.graph));
        for (const auto& v : vals) {
            const auto& A = v.cut.active;
            if (A.size() > 4) continue;
            const unsigned full = 1u << A.size();
            std::vector<long long> f;
            for (unsigned m = 0; m < full; ++m) f.push_back(as_ll(v.cut.evaluate(subset_of(A, m))));
            for (unsigned s = 0; s < full; ++s)
                for (unsigned t = 0; t < full; ++t) CHECK(add(f[s], f[t]) >= add(f[s | t], f[s & t]));
        }
    }
}

TEST_CASE("reversal swaps the sides of the cut function") {
    for (int seed = 0; seed < 60; ++seed) {
        auto inst = gen_random_sp(3 + seed % 12, 4000 + seed);
        auto fwd = sp_node_values(inst.graph, inst.tree, inst.demands, lengths_of(inst.graph));
        auto rev = sp_node_values(inst.graph, reverse_sp_tree(inst.tree), inst.demands, lengths_of(inst.graph));
        const auto& A = fwd.back().cut.active;
        REQUIRE(rev.back().cut.active == A);
        CHECK(fwd.back().a == rev.back().a);
        CHECK(fwd.back().b == rev.back().b);
        if (A.size() > 6) continue;
        const unsigned full = (1u << A.size()) - 1;
        for (unsigned m = 0; m <= full; ++m)
            CHECK(fwd.back().cut.evaluate(subset_of(A, m)) == rev.back().cut.evaluate(subset_of(A, full ^ m)));
    }
}

TEST_CASE("sp_solve small examples") {
    WeightedGraph par(2, {{0, 1, 2}, {0, 1, 5}});
    SpSolveResult r = sp_solve(par, DemandSet(2, {{0, 1}}));
    CHECK(r.cost == Cost(2));
    CHECK(r.edges == std::vector<EdgeId>{0});
    WeightedGraph ser(3, {{0, 1, 1}, {1, 2, 2}});
    CHECK(sp_solve(ser, DemandSet(3, {{0, 2}})).cost == Cost(3));
    CHECK(sp_solve(ser, DemandSet(3, {})).cost == Cost(0));
}

TEST_CASE("sp_solve matches the exact oracle") {
    for (int seed = 0; seed < 200; ++seed) {
        auto inst = gen_random_sp(2 + seed % 14, 5000 + seed);
        SpSolveResult r = sp_solve_with_tree(inst.graph, inst.tree, inst.demands);
        CHECK(r.cost == opt_forest(inst.graph, inst.demands).cost);
        CHECK(is_feasible(inst.graph, inst.demands, r.edges));
        Length sum = 0;
        for (EdgeId e : r.edges) sum += inst.graph.edge(e).length;
        CHECK(Cost(sum) == r.cost);
        CHECK(sp_solve(inst.graph, inst.demands).cost == r.cost);
    }
}

TEST_CASE("sp_solve handles terminals in several pairs") {
    for (int seed = 0; seed < 60; ++seed) {
        auto inst = gen_random_sp(4 + seed % 10, 6000 + seed, 0);
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        const int n = inst.graph.num_vertices();
        std::vector<std::pair<Vertex, Vertex>> pairs;
        for (int i = 0; i < 3; ++i) {
            Vertex a = static_cast<Vertex>(rng() % n), b = static_cast<Vertex>(rng() % n);
            if (a != b) pairs.emplace_back(0, a), pairs.emplace_back(a, b);
        }
        std::erase_if(pairs, [](auto p) { return p.first == p.second; });
        DemandSet d(n, pairs);
        CHECK(sp_solve(inst.graph, d).cost == opt_forest(inst.graph, d).cost);
    }
}

TEST_CASE("swapping parallel children leaves the optimum unchanged") {
    for (int seed = 0; seed < 80; ++seed) {
        auto inst = gen_random_sp(3 + seed % 12, 7000 + seed);
        SpTree swapped = inst.tree;
        for (auto& nd : swapped.nodes)
            if (nd.kind == SpKind::parallel) std::swap(nd.left, nd.right);
        CHECK(sp_solve_with_tree(inst.graph, swapped, inst.demands).cost ==
              sp_solve_with_tree(inst.graph, inst.tree, inst.demands).cost);
    }
}

TEST_CASE("bare series gadget misses some node values") {
    SpOptions bare;
    bare.corrected_series = false;
    int mismatches = 0;
    for (int seed = 0; seed < 40 && mismatches == 0; ++seed) {
        auto inst = gen_random_sp(6 + seed % 8, seed);
        auto vals = sp_node_values(inst.graph, inst.tree, inst.demands, lengths_of(inst.graph), bare);
        for (int i = 0; i < static_cast<int>(inst.tree.nodes.size()); ++i) {
            auto sub = sp_sub_instance(inst.graph, inst.tree, i, inst.demands);
            if (sub.graph.num_edges() > 14 || sub.active.size() > 4) continue;
            Expected e = brute_values(sub);
            if (as_ll(vals[i].a) != e.a || as_ll(vals[i].b) != e.b) ++mismatches;
        }
    }
    CHECK(mismatches > 0);
}

TEST_CASE("sp_solve rejects bad input") {
    WeightedGraph g = bridge_graph();
    std::vector<Edge> es = g.edges();
    es.push_back({0, 1, 1});
    CHECK_THROWS_AS(sp_solve(WeightedGraph(5, es), DemandSet(5, {{0, 3}})), NotSeriesParallel);
    WeightedGraph split(4, {{0, 1, 1}, {2, 3, 1}});
    CHECK_THROWS_AS(sp_solve(split, DemandSet(4, {{0, 3}})), NotSeriesParallel);
    auto inst = gen_random_sp(5, 3);
    CHECK_THROWS_AS(sp_node_values(inst.graph, inst.tree, inst.demands, {}), InvalidInput);
}
