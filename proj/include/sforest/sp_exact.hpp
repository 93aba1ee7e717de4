#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sforest/graph.hpp"
#include "sforest/tree_decomposition.hpp"

namespace sforest {

enum class SpKind { edge, series, parallel };

struct SpNode {
    SpKind kind = SpKind::edge;
    int left = -1;
    int right = -1;
    Vertex x = -1;   // terminals of G_i
    Vertex y = -1;
    Vertex mid = -1;  // series: the identified vertex
    EdgeId edge = -1;  // leaf: edge of the host graph
};

// Nodes are stored children-first; the last node is the root.
struct SpTree {
    std::vector<SpNode> nodes;
    int root() const { return static_cast<int>(nodes.size()) - 1; }
    // Checks terminal identification rules and that leaves match graph edges.
    void check(const WeightedGraph& g) const;
    std::vector<std::vector<Vertex>> vertex_sets() const;
};

class NotSeriesParallel : public std::runtime_error {
public:
    NotSeriesParallel(const std::string& msg, std::vector<Vertex> core_vertices, std::vector<std::pair<Vertex, Vertex>> core_edges)
        : std::runtime_error(msg), core_vertices(std::move(core_vertices)), core_edges(std::move(core_edges)) {}
    std::vector<Vertex> core_vertices;              // irreducible core left by the reductions
    std::vector<std::pair<Vertex, Vertex>> core_edges;
};

SpTree sp_decompose(const WeightedGraph& g, Vertex x, Vertex y);
// Tries every terminal pair.
SpTree sp_decompose(const WeightedGraph& g);

// Reversed copy: terminals swapped, series children swapped.
SpTree reverse_sp_tree(const SpTree& t);

// Bags {x,y,mid} for series nodes and {x,y} otherwise, on the tree's shape.
TreeDecomposition td_from_sp_tree(const WeightedGraph& g, const SpTree& t);

struct Arc {
    int from;
    int to;
    Cost cap;
};

struct CutGraph {
    int num_vertices = 0;
    std::vector<Arc> arcs;
    int s = -1;
    int t = -1;
    std::vector<Vertex> active;                 // A_i, sorted graph vertices
    std::map<Vertex, int> vertex_of;            // graph vertex -> cut-graph vertex
    std::vector<std::string> tag;               // per cut-graph vertex, provenance label
    int gamma1 = -1;
    int gamma2 = -1;

    int add_vertex(std::string label);
    void add_arc(int a, int b, Cost c) { arcs.push_back({a, b, c}); }
    // lambda(S + s, (A \ S) + t) for S a subset of the active set.
    Cost evaluate(const std::vector<Vertex>& S) const;
};

struct MinCut {
    Cost value;
    std::vector<int> side;  // cut-graph vertices on the source side
};

MinCut min_cut(const CutGraph& d, const std::vector<int>& sources, const std::vector<int>& sinks);

struct SpNodeValues {
    Cost a;
    Cost b;
    CutGraph cut;
};

struct SpOptions {
    // Adds the two gadget arcs that tie the series identification to the side
    // of gamma vertices, and evaluates b for series nodes over all connection
    // regimes. Without them the series rule is the bare eight-arc gadget.
    bool corrected_series = true;
};

// Values for every node of the tree, bottom-up. lengths overrides edge lengths
// (may contain infinity); demands must use each vertex in at most one pair.
std::vector<SpNodeValues> sp_node_values(const WeightedGraph& g, const SpTree& t, const DemandSet& d,
                                         const std::vector<Cost>& lengths, const SpOptions& opts = {});

struct SpSolveResult {
    Cost cost;
    std::vector<EdgeId> edges;
    SpTree tree;
    int solves = 0;
};

SpSolveResult sp_solve(const WeightedGraph& g, const DemandSet& d, const SpOptions& opts = {});
SpSolveResult sp_solve_with_tree(const WeightedGraph& g, const SpTree& t, const DemandSet& d,
                                 const SpOptions& opts = {});

// Standalone instance of the subgraph G_i with its demand subset D_i.
struct SpSubInstance {
    WeightedGraph graph;
    DemandSet demands;
    Vertex x;
    Vertex y;
    std::vector<Vertex> active;     // in local ids, sorted by original id
    std::vector<Vertex> to_original;
};
SpSubInstance sp_sub_instance(const WeightedGraph& g, const SpTree& t, int node, const DemandSet& d);

}  // namespace sforest
