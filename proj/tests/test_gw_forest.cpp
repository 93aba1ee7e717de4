#include <doctest.h>

#include "sforest/errors.hpp"
#include "sforest/exact_oracle.hpp"
#include "sforest/gw_forest.hpp"
#include "sforest/instance_gen.hpp"

using namespace sforest;

TEST_CASE("no demands gives an empty forest") {
    auto inst = gen_random(6, 8, 0, 1);
    GwResult r = gw_steiner_forest(inst.graph, inst.demands);
    CHECK(r.forest.size() == 0);
    CHECK(r.tree_components.empty());
}

TEST_CASE("single edge demand") {
    WeightedGraph g(2, {{0, 1, 7}});
    GwResult r = gw_steiner_forest(g, DemandSet(2, {{0, 1}}));
    CHECK(r.forest.edges() == std::vector<EdgeId>{0});
    CHECK(r.forest.cost(g) == 7);
}

TEST_CASE("unconnectable demand is infeasible") {
    WeightedGraph g(4, {{0, 1, 1}, {2, 3, 1}});
    CHECK_THROWS_AS(gw_steiner_forest(g, DemandSet(4, {{0, 3}})), Infeasible);
}

TEST_CASE("gw is feasible, minimal, and within twice the optimum") {
    for (int seed = 0; seed < 200; ++seed) {
        int n = 4 + seed % 9;
        int m = std::min({16, n * (n - 1) / 2, n - 1 + seed % 7});
        auto inst = gen_random(n, m, 1 + seed % 4, 10'000 + seed);
        GwResult r = gw_steiner_forest(inst.graph, inst.demands);
        auto v = validate_solution(inst.graph, inst.demands, r.forest);
        REQUIRE(v.feasible);
        Cost opt = opt_forest(inst.graph, inst.demands).cost;
        CHECK(Cost(v.cost) <= opt + opt);
        const auto& es = r.forest.edges();
        for (std::size_t i = 0; i < es.size(); ++i) {
            std::vector<EdgeId> less = es;
            less.erase(less.begin() + static_cast<long>(i));
            CHECK_FALSE(is_feasible(inst.graph, inst.demands, less));
        }
    }
}

TEST_CASE("tree components partition the forest edges") {
    for (int seed = 0; seed < 30; ++seed) {
        auto grid = gen_grid(4, 3, 3, seed);
        GwResult r = gw_steiner_forest(grid.graph, grid.demands);
        std::size_t total = 0;
        for (const auto& tc : r.tree_components) {
            total += tc.edges.size();
            CHECK(tc.vertices.size() == tc.edges.size() + 1);
        }
        CHECK(total == r.forest.size());
    }
}
