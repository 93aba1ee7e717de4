#pragma once

#include <vector>

#include "sforest/graph.hpp"

namespace sforest {

struct OracleConfig {
    int max_terminals = 10;
    // Above the terminal cap a tree is found by trying every set of Steiner
    // vertices, allowed when the non-terminals number at most this.
    int max_steiner_vertices = 16;
    // Edge cap for the enumeration used when must_separate constraints are present.
    int max_enum_edges = 30;
};

struct ExactResult {
    Cost cost;
    std::vector<EdgeId> edges;  // empty when cost is infinite
};

struct ConstraintSpec {
    std::vector<std::vector<Vertex>> must_link;
    std::vector<std::pair<Vertex, Vertex>> must_separate;
};

ExactResult steiner_tree(const WeightedGraph& g, const std::vector<Vertex>& terminals,
                         const OracleConfig& cfg = {});

ExactResult opt_forest(const WeightedGraph& g, const DemandSet& d, const OracleConfig& cfg = {});

Cost opt_forest_constrained(const WeightedGraph& g, const DemandSet& d, const ConstraintSpec& cs,
                            const OracleConfig& cfg = {});

// Optimal forest where the given vertex groups each form a connected block
// (groups that share a vertex merge) together with the demands.
ExactResult opt_forest_with_groups(const WeightedGraph& g, const std::vector<std::vector<Vertex>>& groups,
                                   const OracleConfig& cfg = {});

}  // namespace sforest
