#include <doctest.h>

#include <functional>
#include <random>
#include <set>

#include "brute.hpp"
#include "sforest/errors.hpp"
#include "sforest/exact_oracle.hpp"
#include "sforest/instance_gen.hpp"
#include "sforest/pc_clustering.hpp"

using namespace sforest;

namespace {

// Fixed-step moat growth: every active cluster grows by dt per step, shared
// evenly among its live vertices.
struct SimResult {
    std::vector<Rational> merge_times;
    std::vector<Rational> death_times;  // per vertex, -1 if never live
    std::vector<EdgeId> f1;
    Rational total_y = 0;
};

SimResult simulate(const WeightedGraph& g, const std::vector<Rational>& phi, Rational dt = Rational(1, 1024)) {
    const int n = g.num_vertices();
    SimResult r;
    r.death_times.assign(static_cast<std::size_t>(n), Rational(-1));
    std::vector<Rational> own(n), reach(n);
    brute::Dsu dsu(n);
    auto live = [&](Vertex v) { return own[v] < phi[v]; };
    auto merge_all = [&](const Rational& t) {
        bool again = true;
        while (again) {
            again = false;
            for (EdgeId e = 0; e < g.num_edges(); ++e) {
                const Edge& ed = g.edge(e);
                if (dsu.find(ed.u) == dsu.find(ed.v)) continue;
                if (reach[ed.u] + reach[ed.v] >= to_rational(ed.length)) {
                    dsu.unite(ed.u, ed.v);
                    r.f1.push_back(e);
                    r.merge_times.push_back(t);
                    again = true;
                }
            }
        }
    };
    Rational t = 0;
    merge_all(t);
    for (int step = 0; step < 1'000'000; ++step) {
        std::map<int, int> kappa;
        for (Vertex v = 0; v < n; ++v)
            if (live(v)) ++kappa[dsu.find(v)];
        if (kappa.empty()) break;
        t += dt;
        for (Vertex v = 0; v < n; ++v) {
            auto it = kappa.find(dsu.find(v));
            if (it == kappa.end()) continue;
            reach[v] += dt;
            if (live(v)) {
                Rational share = std::min<Rational>(dt / it->second, phi[v] - own[v]);
                own[v] += share;
                r.total_y += share;
                if (!live(v)) r.death_times[v] = t;
            }
        }
        merge_all(t);
    }
    return r;
}

Rational total_y(const DualState& d) {
    Rational s = 0;
    for (const auto& [k, v] : d.y) s += v;
    return s;
}

std::vector<Rational> death_times(const GrowthResult& r, int n) {
    std::vector<Rational> out(static_cast<std::size_t>(n), Rational(-1));
    for (const auto& ev : r.trace)
        if (ev.kind == EventKind::vertex_death) out[ev.args[0]] = ev.time;
    return out;
}

// Tight clusters by the nested-sum definition, recomputed from scratch.
std::vector<int> tight_clusters(const DualState& d) {
    std::vector<int> out;
    for (int c = 0; c < static_cast<int>(d.clusters.size()); ++c) {
        const auto& mem = d.clusters[c].members;
        std::set<Vertex> S(mem.begin(), mem.end());
        Rational nested = 0;
        for (const auto& [key, val] : d.y) {
            const auto& sub = d.clusters[key.first].members;
            if (std::all_of(sub.begin(), sub.end(), [&](Vertex v) { return S.count(v) > 0; })) nested += val;
        }
        Rational ps = 0;
        for (Vertex v : mem) ps += d.phi[v];
        if (nested == ps) out.push_back(c);
    }
    return out;
}

// Every fixpoint reachable by applying the pruning rule in any order.
std::set<std::vector<EdgeId>> all_pruning_outcomes(const WeightedGraph& g, const std::vector<EdgeId>& f1,
                                                   const DualState& d) {
    auto tight = tight_clusters(d);
    std::set<std::vector<EdgeId>> seen, fix;
    std::function<void(std::vector<EdgeId>)> go = [&](std::vector<EdgeId> f) {
        std::sort(f.begin(), f.end());
        if (!seen.insert(f).second) return;
        bool any = false;
        for (int c : tight) {
            std::vector<EdgeId> cross;
            for (EdgeId e : f)
                if (d.contains(c, g.edge(e).u) != d.contains(c, g.edge(e).v)) cross.push_back(e);
            if (cross.size() == 1) {
                any = true;
                std::vector<EdgeId> next;
                for (EdgeId e : f)
                    if (e != cross[0]) next.push_back(e);
                go(next);
            }
        }
        if (!any) fix.insert(f);
    };
    go(f1);
    return fix;
}

std::vector<Rational> random_phi(std::mt19937_64& rng, int n) {
    std::vector<Rational> phi;
    for (int v = 0; v < n; ++v) {
        Rational p(static_cast<long>(rng() % 12) + 1, 2);
        p.canonicalize();
        phi.push_back(rng() % 3 == 0 ? Rational(0) : p);
    }
    return phi;
}

}  // namespace

TEST_CASE("no demands gives no trees") {
    auto inst = gen_random(6, 8, 0, 3);
    ClusteringResult r = pc_clustering(inst.graph, inst.demands, Rational(1));
    CHECK(r.trees.empty());
    CHECK(r.demand_parts.empty());
    CHECK(r.f2.empty());
    CHECK(r.trace.empty());
    CHECK(r.dual.y.empty());
}

TEST_CASE("single demand on a single edge") {
    WeightedGraph g(2, {{0, 1, 6}});
    DemandSet d(2, {{0, 1}});
    ClusteringResult r = pc_clustering(g, d, Rational(1, 2));
    CHECK(r.contracted.graph.num_vertices() == 1);
    CHECK(r.contracted.graph.num_edges() == 0);
    REQUIRE(r.trees.size() == 1);
    CHECK(r.trees[0] == std::vector<EdgeId>{0});
    REQUIRE(r.demand_parts.size() == 1);
    CHECK(r.demand_parts[0].pairs() == d.pairs());
    REQUIRE(r.trace.size() == 2);
    CHECK(r.trace[0].kind == EventKind::vertex_death);
    CHECK(r.trace[0].time == Rational(12));
}

TEST_CASE("two unit components merge exactly when growth reaches their distance") {
    // s1-t1 and s2-t2 are unit edges, t1-s2 has length D.
    for (int den : {1, 3, 4}) {
        Rational eps(1, den);
        for (Length D = 1; D <= 12; ++D) {
            if (Rational(D) == 2 * den) continue;  // tie between merge and death
            WeightedGraph g(4, {{0, 1, 1}, {2, 3, 1}, {1, 2, D}});
            DemandSet d(4, {{0, 1}, {2, 3}});
            ClusteringResult r = pc_clustering(g, d, eps);
            REQUIRE(r.contracted.graph.num_vertices() == 2);
            SimResult sim = simulate(r.contracted.graph, r.dual.phi);
            bool merged = !sim.f1.empty();
            CHECK(r.trees.size() == (merged ? 1u : 2u));
            CHECK(r.f1.size() == sim.f1.size());
        }
    }
}

TEST_CASE("zero potentials do nothing") {
    WeightedGraph g(3, {{0, 1, 2}, {1, 2, 3}});
    GrowthResult r = growth_phase(g, {Rational(0), Rational(0), Rational(0)});
    CHECK(r.f1.empty());
    CHECK(r.dual.y.empty());
    CHECK(r.trace.empty());
}

TEST_CASE("two equal potentials merge at time one") {
    WeightedGraph g(2, {{0, 1, 2}});
    std::vector<Rational> phi{Rational(5), Rational(5)};
    GrowthResult r = growth_phase(g, phi);
    CHECK(r.f1 == std::vector<EdgeId>{0});
    REQUIRE(!r.trace.empty());
    CHECK(r.trace[0].kind == EventKind::merge);
    CHECK(r.trace[0].time == Rational(1));
    // Each vertex owns 1 at the merge; the merged cluster then grows at rate 1
    // split between two live vertices, so both die when the total reaches 10.
    auto dt = death_times(r, 2);
    CHECK(dt[0] == Rational(9));
    CHECK(dt[1] == Rational(9));
    CHECK(total_y(r.dual) == Rational(10));
    SimResult sim = simulate(g, phi);
    REQUIRE(sim.merge_times.size() == 1);
    CHECK(sim.merge_times[0] == Rational(1));
    CHECK(sim.death_times[0] == Rational(9));
    CHECK(sim.total_y == Rational(10));
}

TEST_CASE("one dead endpoint: only the live side grows") {
    WeightedGraph g(2, {{0, 1, 2}});
    std::vector<Rational> phi{Rational(5), Rational(0)};
    GrowthResult r = growth_phase(g, phi);
    CHECK(r.f1 == std::vector<EdgeId>{0});
    CHECK(r.trace[0].kind == EventKind::merge);
    CHECK(r.trace[0].time == Rational(2));
    CHECK(death_times(r, 2)[0] == Rational(5));
    CHECK(total_y(r.dual) == Rational(5));
    SimResult sim = simulate(g, phi);
    CHECK(sim.merge_times[0] == Rational(2));
    CHECK(sim.death_times[0] == Rational(5));
}

TEST_CASE("growth agrees with the fixed-step simulator on random small graphs") {
    std::mt19937_64 rng(21);
    for (int seed = 0; seed < 25; ++seed) {
        auto inst = gen_random(5, 6, 0, 50 + seed, 8);
        auto phi = random_phi(rng, 5);
        GrowthResult r = growth_phase(inst.graph, phi);
        SimResult sim = simulate(inst.graph, phi, Rational(1, 64));
        CHECK(total_y(r.dual) == sim.total_y);
        auto dt = death_times(r, 5);
        // Each event can drift by at most one step of the simulator.
        for (Vertex v = 0; v < 5; ++v)
            if (phi[v] > 0) {
                Rational gap = dt[v] - sim.death_times[v];
                CHECK(abs(gap) <= Rational(10, 64));
            }
    }
}

TEST_CASE("no tight clusters leaves the forest unchanged") {
    WeightedGraph g(3, {{0, 1, 1}, {1, 2, 1}});
    DualState d;
    d.phi = {Rational(1), Rational(1), Rational(1)};
    for (Vertex v = 0; v < 3; ++v) {
        d.clusters.push_back({{v}, -1, -1, -1, -1});
        d.current.push_back(v);
    }
    PruningResult p = pruning_phase(g, {0, 1}, d);
    CHECK(p.tight_set.empty());
    CHECK(p.f2 == std::vector<EdgeId>{0, 1});
}

TEST_CASE("a dead leaf cluster loses its only edge") {
    WeightedGraph g(2, {{0, 1, 4}});
    GrowthResult r = growth_phase(g, {Rational(1), Rational(10)});
    REQUIRE(r.f1 == std::vector<EdgeId>{0});
    PruningResult p = pruning_phase(g, r.f1, r.dual);
    CHECK(p.f2.empty());
}

TEST_CASE("pruning outcome does not depend on rule order") {
    {
        WeightedGraph g(3, {{0, 1, 4}, {1, 2, 4}});
        GrowthResult r = growth_phase(g, {Rational(10), Rational(1), Rational(10)});
        PruningResult p = pruning_phase(g, r.f1, r.dual);
        auto outcomes = all_pruning_outcomes(g, r.f1, r.dual);
        REQUIRE(outcomes.size() == 1);
        CHECK(*outcomes.begin() == p.f2);
        CHECK(p.tight_set == tight_clusters(r.dual));
    }
    std::mt19937_64 rng(8);
    for (int seed = 0; seed < 40; ++seed) {
        int n = 4 + seed % 3;
        auto inst = gen_random(n, n + 1, 0, 300 + seed, 9);
        GrowthResult r = growth_phase(inst.graph, random_phi(rng, n));
        PruningResult p = pruning_phase(inst.graph, r.f1, r.dual);
        auto outcomes = all_pruning_outcomes(inst.graph, r.f1, r.dual);
        REQUIRE(outcomes.size() == 1);
        CHECK(*outcomes.begin() == p.f2);
    }
}

TEST_CASE("verify_dual on zero, final, and mutated duals") {
    WeightedGraph g(2, {{0, 1, 2}});
    GrowthResult r = growth_phase(g, {Rational(5), Rational(5)});
    DualReport ok = verify_dual(g, r.dual, true);
    CHECK(ok.feasible);
    CHECK(ok.tight);
    CHECK(ok.violations.empty());

    DualState zero = r.dual;
    zero.y.clear();
    DualReport z = verify_dual(g, zero, true);
    CHECK(z.feasible);
    CHECK_FALSE(z.tight);
    CHECK(verify_dual(g, zero, false).violations.empty());

    auto names = [](const DualReport& rep, const std::string& what) {
        return std::any_of(rep.violations.begin(), rep.violations.end(),
                           [&](const std::string& s) { return s.find(what) != std::string::npos; });
    };
    DualState bumped = r.dual;
    bumped.y.begin()->second += 1;
    DualReport b = verify_dual(g, bumped, true);
    CHECK_FALSE(b.feasible);
    CHECK(names(b, "potential bound"));

    // Singleton {u} crosses the edge, which is already tight.
    DualState crossing = r.dual;
    int singleton_u = -1;
    for (int c = 0; c < static_cast<int>(crossing.clusters.size()); ++c)
        if (crossing.clusters[c].members == std::vector<Vertex>{0}) singleton_u = c;
    REQUIRE(singleton_u >= 0);
    crossing.y[{singleton_u, 0}] += 1;
    crossing.phi[0] += 1;
    DualReport c = verify_dual(g, crossing, true);
    CHECK_FALSE(c.feasible);
    CHECK(names(c, "edge packing"));

    DualState negative = r.dual;
    negative.y.begin()->second = -1;
    CHECK(names(verify_dual(g, negative, false), "nonnegativity"));
}

TEST_CASE("final duals are feasible and tight on random instances") {
    for (int seed = 0; seed < 40; ++seed) {
        int n = 5 + seed % 8;
        auto inst = gen_random(n, std::min(n * (n - 1) / 2, n + 4), 1 + seed % 4, 1000 + seed);
        Rational eps = seed % 2 ? Rational(1) : Rational(1, 2);
        ClusteringResult r = pc_clustering(inst.graph, inst.demands, eps);
        DualReport rep = verify_dual(r.contracted.graph, r.dual, true);
        CHECK(rep.feasible);
        CHECK(rep.tight);
    }
}

TEST_CASE("clustering invariants on random instances") {
    for (int seed = 0; seed < 60; ++seed) {
        int n = 5 + seed % 8;
        auto inst = gen_random(n, std::min(n * (n - 1) / 2, n + 3 + seed % 4), 1 + seed % 4, 2000 + seed);
        Rational eps = seed % 3 == 0 ? Rational(1, 2) : Rational(1);
        ClusteringResult r = pc_clustering(inst.graph, inst.demands, eps);
        const WeightedGraph& h = r.contracted.graph;
        const DualState& d = r.dual;

        // Laminar family.
        for (std::size_t a = 0; a < d.clusters.size(); ++a)
            for (std::size_t b = a + 1; b < d.clusters.size(); ++b) {
                const auto& A = d.clusters[a].members;
                const auto& B = d.clusters[b].members;
                std::vector<Vertex> common;
                std::set_intersection(A.begin(), A.end(), B.begin(), B.end(), std::back_inserter(common));
                CHECK((common.empty() || common == A || common == B));
            }

        // Pruned forest bound and the combined bound on the trees.
        Rational phi_sum = 0;
        for (const auto& p : d.phi) phi_sum += p;
        Length f2 = 0;
        for (EdgeId e : r.f2) f2 += h.edge(e).length;
        CHECK(to_rational(f2) <= 2 * phi_sum);
        Length trees = 0;
        for (const auto& t : r.trees)
            for (EdgeId e : t) trees += inst.graph.edge(e).length;
        CHECK(to_rational(trees) <= (2 / eps + 1) * to_rational(r.seed_cost));

        // Demand parts partition the demands and live in their trees.
        std::vector<std::pair<Vertex, Vertex>> all;
        for (std::size_t i = 0; i < r.trees.size(); ++i) {
            std::set<Vertex> tv;
            for (EdgeId e : r.trees[i]) {
                tv.insert(inst.graph.edge(e).u);
                tv.insert(inst.graph.edge(e).v);
            }
            for (auto p : r.demand_parts[i].pairs()) {
                all.push_back(p);
                CHECK(tv.count(p.first));
                CHECK(tv.count(p.second));
            }
        }
        std::sort(all.begin(), all.end());
        auto want = inst.demands.pairs();
        std::sort(want.begin(), want.end());
        CHECK(all == want);

        // Trace times never decrease; growth steps are bounded.
        for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i - 1].time <= r.trace[i].time);
        CHECK(r.trace.size() <= 3 * static_cast<std::size_t>(h.num_vertices()));

        // Two vertices that each paid into a cluster holding both end up together.
        brute::Dsu comp(h.num_vertices());
        for (EdgeId e : r.f2) comp.unite(h.edge(e).u, h.edge(e).v);
        for (Vertex u = 0; u < h.num_vertices(); ++u)
            for (Vertex v = u + 1; v < h.num_vertices(); ++v) {
                bool sv = false, su = false;
                for (const auto& [key, val] : d.y) {
                    if (val <= 0 || !d.contains(key.first, u) || !d.contains(key.first, v)) continue;
                    if (key.second == v) sv = true;
                    if (key.second == u) su = true;
                }
                if (sv && su) CHECK(comp.find(u) == comp.find(v));
            }
    }
}

TEST_CASE("growth step count is at most twice the vertex count") {
    std::mt19937_64 rng(4);
    for (int seed = 0; seed < 30; ++seed) {
        int n = 4 + seed % 6;
        auto inst = gen_random(n, n + 2, 0, 3000 + seed, 9);
        GrowthResult r = growth_phase(inst.graph, random_phi(rng, n));
        CHECK(r.iterations <= 2 * n);
    }
}

TEST_CASE("exhausted colours pay their potentials") {
    for (int seed = 0; seed < 20; ++seed) {
        int n = 6 + seed % 5;
        auto inst = gen_random(n, std::min(n * (n - 1) / 2, n + 4), 2 + seed % 3, 4000 + seed, 20);
        ClusteringResult r = pc_clustering(inst.graph, inst.demands, Rational(1, 2));
        const WeightedGraph& h = r.contracted.graph;
        const DualState& d = r.dual;
        if (h.num_edges() > 12) continue;
        for (std::uint32_t mask = 0; mask < (1u << h.num_edges()); ++mask) {
            Length len = 0;
            for (EdgeId e = 0; e < h.num_edges(); ++e)
                if (mask >> e & 1u) len += h.edge(e).length;
            Rational paid = 0;
            for (Vertex u = 0; u < h.num_vertices(); ++u) {
                bool exhausted = true;
                for (const auto& [key, val] : d.y) {
                    if (key.second != u || val <= 0) continue;
                    bool crossed = false;
                    for (EdgeId e = 0; e < h.num_edges(); ++e)
                        if ((mask >> e & 1u) && d.contains(key.first, h.edge(e).u) != d.contains(key.first, h.edge(e).v))
                            crossed = true;
                    if (!crossed) exhausted = false;
                }
                if (exhausted) paid += d.phi[u];
            }
            CHECK(to_rational(len) >= paid);
        }
    }
}

TEST_CASE("demand parts cost at most twice the optimum for eps one") {
    for (int seed = 0; seed < 20; ++seed) {
        int n = 5 + seed % 7;
        auto inst = gen_random(n, std::min(n * (n - 1) / 2, n + 3), 1 + seed % 4, 5000 + seed);
        ClusteringResult r = pc_clustering(inst.graph, inst.demands, Rational(1));
        Length sum = 0;
        for (const auto& part : r.demand_parts) sum += opt_forest(inst.graph, part).cost.value();
        CHECK(sum <= 2 * opt_forest(inst.graph, inst.demands).cost.value());
    }
}

TEST_CASE("bad inputs") {
    WeightedGraph g(2, {{0, 1, 1}});
    CHECK_THROWS_AS(pc_clustering(g, DemandSet(2, {{0, 1}}), Rational(0)), InvalidInput);
    CHECK_THROWS_AS(growth_phase(g, {Rational(-1), Rational(0)}), InvalidInput);
    WeightedGraph split(3, {{0, 1, 1}});
    CHECK_THROWS_AS(pc_clustering(split, DemandSet(3, {{0, 2}}), Rational(1)), Infeasible);
}
