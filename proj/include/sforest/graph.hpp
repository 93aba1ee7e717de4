#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sforest/cost.hpp"

namespace sforest {

using Vertex = int;
using EdgeId = int;

struct Edge {
    Vertex u;
    Vertex v;
    Length length;
};

struct Incidence {
    EdgeId edge;
    Vertex other;
};

// Undirected multigraph on vertices 0..n-1. Immutable after construction.
class WeightedGraph {
public:
    WeightedGraph() = default;
    WeightedGraph(int num_vertices, std::vector<Edge> edges);

    int num_vertices() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const Edge& edge(EdgeId e) const { return edges_.at(static_cast<std::size_t>(e)); }
    const std::vector<Edge>& edges() const { return edges_; }
    std::span<const Incidence> incident(Vertex v) const;
    int degree(Vertex v) const { return static_cast<int>(incident(v).size()); }
    // Sorted distinct neighbours.
    std::vector<Vertex> neighbours(Vertex v) const;
    Vertex other(EdgeId e, Vertex v) const;
    bool valid_vertex(Vertex v) const { return v >= 0 && v < n_; }
    Length total_length() const;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offset_;
    std::vector<Incidence> adj_;
};

class UnionFind {
public:
    explicit UnionFind(int n = 0);
    int find(int x);
    bool unite(int a, int b);
    bool same(int a, int b) { return find(a) == find(b); }
    int size() const { return static_cast<int>(parent_.size()); }

private:
    std::vector<int> parent_;
    std::vector<int> rank_;
};

// Unordered demand pairs, stored as (min, max) in first-appearance order.
class DemandSet {
public:
    DemandSet() = default;
    DemandSet(int num_vertices, const std::vector<std::pair<Vertex, Vertex>>& pairs);

    const std::vector<std::pair<Vertex, Vertex>>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    bool contains(Vertex a, Vertex b) const;
    // Sorted distinct endpoints.
    std::vector<Vertex> terminals() const;
    // Image under a vertex map; pairs that collapse to one vertex are dropped.
    DemandSet mapped(const std::vector<Vertex>& vertex_map, int new_num_vertices) const;

private:
    std::vector<std::pair<Vertex, Vertex>> pairs_;
};

class Forest {
public:
    Forest() = default;
    // Throws InvalidInput on unknown ids, or on a cycle when require_acyclic.
    Forest(const WeightedGraph& g, std::vector<EdgeId> edges, bool require_acyclic = false);

    const std::vector<EdgeId>& edges() const { return edges_; }
    std::size_t size() const { return edges_.size(); }
    Length cost(const WeightedGraph& g) const;
    // Component label per vertex (smallest vertex of its component).
    std::vector<Vertex> component_labels(const WeightedGraph& g) const;

private:
    std::vector<EdgeId> edges_;  // sorted, distinct
};

struct ContractionMap {
    std::vector<Vertex> vertex_map;   // old vertex -> new vertex
    std::vector<EdgeId> provenance;   // new edge -> original edge
    std::vector<EdgeId> lift(const std::vector<EdgeId>& new_edges) const;
};

struct Contraction {
    WeightedGraph graph;
    ContractionMap map;
};

struct Validation {
    bool feasible = false;
    Length cost = 0;
};

Cost shortest_dist(const WeightedGraph& g, Vertex u, Vertex v);
std::vector<Cost> single_source_distances(const WeightedGraph& g, Vertex source);
// Multi-source variant: distance to the nearest source.
std::vector<Cost> multi_source_distances(const WeightedGraph& g, const std::vector<Vertex>& sources);

// Row-major n*n distance matrix.
struct DistanceMatrix {
    int n = 0;
    std::vector<Cost> d;
    Cost at(Vertex a, Vertex b) const { return d[static_cast<std::size_t>(a) * n + b]; }
};
DistanceMatrix all_pairs_distances_serial(const WeightedGraph& g);
// One Dijkstra per source, sources distributed over OpenMP threads.
DistanceMatrix all_pairs_distances(const WeightedGraph& g);

Contraction contract_edges(const WeightedGraph& g, const std::vector<EdgeId>& es);

// Keeps one shortest edge per vertex pair (ties: smallest id).
Contraction simplify_parallel_edges(const WeightedGraph& g);

Validation validate_solution(const WeightedGraph& g, const DemandSet& d, const Forest& f);
bool is_feasible(const WeightedGraph& g, const DemandSet& d, const std::vector<EdgeId>& edges);

// Removes edges (longest first, ties larger id first) while feasibility is kept,
// after reducing the edge set to a spanning forest.
std::vector<EdgeId> prune_to_minimal_forest(const WeightedGraph& g, const DemandSet& d,
                                            std::vector<EdgeId> edges);

// Hop levels from root; unreached components restart at their smallest vertex
// with level 0. Edge with endpoint levels (a, b) goes to class min(a, b) mod k.
std::vector<std::vector<EdgeId>> bfs_level_partition(const WeightedGraph& g, Vertex root, int k);
std::vector<int> bfs_levels(const WeightedGraph& g, Vertex root);

bool is_connected(const WeightedGraph& g);

// Subgraph induced by a vertex list (ascending order defines new ids).
struct Subgraph {
    WeightedGraph graph;
    std::vector<Vertex> to_original;  // new vertex -> old
    std::vector<Vertex> from_original;  // old vertex -> new or -1
    std::vector<EdgeId> edge_to_original;
};
Subgraph induced_subgraph(const WeightedGraph& g, const std::vector<Vertex>& vertices);
Subgraph edge_subgraph(const WeightedGraph& g, const std::vector<Vertex>& vertices,
                       const std::vector<EdgeId>& edges);

}  // namespace sforest
