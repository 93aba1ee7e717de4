#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sforest/graph.hpp"
#include "sforest/sp_exact.hpp"
#include "sforest/tree_decomposition.hpp"

namespace sforest {

// All generators draw from std::mt19937_64 seeded with the given seed and map
// to a range [0, n) by rng() % n, so corpora are reproducible anywhere.

struct GeneratedInstance {
    WeightedGraph graph;
    DemandSet demands;
};

// Random spanning tree plus m - n + 1 extra simple edges, lengths in [1, max_len].
GeneratedInstance gen_random(int n, int m, int demand_count, std::uint64_t seed, Length max_len = 100);

GeneratedInstance gen_grid(int w, int h, int demand_count, std::uint64_t seed, Length max_len = 100);

struct SpInstance {
    WeightedGraph graph;
    SpTree tree;
    DemandSet demands;
};

// n_ops leaves; every step expands a random leaf in series or in parallel.
// Demand endpoints are distinct vertices; demand_count < 0 draws a count.
SpInstance gen_random_sp(int n_ops, std::uint64_t seed, int demand_count = -1);

// Random graph of treewidth at most k together with its decomposition.
struct KTreeInstance {
    WeightedGraph graph;
    DemandSet demands;
    TreeDecomposition td;
};
KTreeInstance gen_partial_ktree(int n, int k, int demand_count, std::uint64_t seed, Length max_len = 20);

struct Literal {
    enum Kind { variable, zero, one } kind = variable;
    int var = 0;
    static Literal of(int v) { return {variable, v}; }
    static Literal constant(bool b) { return {b ? one : zero, 0}; }
};

// Conjunction of R(a, b, c) = (a = c) or (b = c).
struct RFormula {
    int num_vars = 0;
    std::vector<std::array<Literal, 3>> clauses;
    bool holds(const std::vector<bool>& assignment) const;
};

// Positive NAE clauses over variables 0..n-1; clause j gets fresh variable n + j.
RFormula nae_to_rsat(int n, const std::vector<std::array<int, 3>>& nae);

// Variables are renumbered so that every variable occurs in some clause.
RFormula random_rformula(int max_vars, int m, std::uint64_t seed);

struct HardnessInstance {
    WeightedGraph graph;
    DemandSet demands;
    Length threshold = 0;
    TreeDecomposition td;
    Vertex v0 = 0;
    Vertex v1 = 1;
};

// Vertices: v0 = 0, v1 = 1, x_i = 2 + i, clause j uses a_j, b_j, c_j after them.
HardnessInstance gen_hardness(const RFormula& f);

}  // namespace sforest
