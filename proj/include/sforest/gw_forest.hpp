#pragma once

#include <vector>

#include "sforest/graph.hpp"

namespace sforest {

struct TreeComponent {
    std::vector<Vertex> vertices;  // sorted
    std::vector<EdgeId> edges;     // sorted
};

struct GwResult {
    Forest forest;
    std::vector<TreeComponent> tree_components;  // components with at least one edge
    int growth_events = 0;
};

GwResult gw_steiner_forest(const WeightedGraph& g, const DemandSet& d);

// Components of an edge set that contain at least one edge, ordered by smallest vertex.
std::vector<TreeComponent> tree_components_of(const WeightedGraph& g, const std::vector<EdgeId>& edges);

}  // namespace sforest
