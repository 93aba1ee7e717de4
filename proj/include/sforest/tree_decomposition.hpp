#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sforest/graph.hpp"

namespace sforest {

struct TreeDecomposition {
    std::vector<std::vector<Vertex>> bags;
    std::vector<std::pair<int, int>> tree_edges;
    std::optional<int> root;
};

enum class TdViolation { none, not_a_tree, bad_bag, vertex_coverage, edge_coverage, connectivity, not_nice };

struct TdValidation {
    TdViolation violation = TdViolation::none;
    int width = -1;
    Vertex witness_vertex = -1;
    EdgeId witness_edge = -1;
    std::string message;
    bool valid() const { return violation == TdViolation::none; }
};

TdValidation validate(const WeightedGraph& g, const TreeDecomposition& td);

enum class NiceKind { leaf, join, introduce, forget };

struct NiceNode {
    NiceKind kind = NiceKind::leaf;
    std::vector<Vertex> bag;   // sorted
    std::vector<int> children;
    Vertex vertex = -1;        // introduced or forgotten vertex
};

// Nodes are stored children-first; the root is the last node.
struct NiceTreeDecomposition {
    std::vector<NiceNode> nodes;
    int root = -1;
    int width() const;
    TreeDecomposition as_tree_decomposition() const;
};

TdValidation validate_nice(const WeightedGraph& g, const NiceTreeDecomposition& ntd);

NiceTreeDecomposition make_nice(const WeightedGraph& g, const TreeDecomposition& td, std::optional<int> root = {});

// Min-degree elimination ordering, ties to the smallest vertex id.
TreeDecomposition heuristic_decomposition(const WeightedGraph& g);

struct TerminalGadget {
    WeightedGraph graph;
    DemandSet demands;
    NiceTreeDecomposition ntd;
    std::vector<EdgeId> edge_back;    // new edge -> original edge, -1 for added zero-length edges
    std::vector<Vertex> vertex_back;  // new vertex -> original vertex
    std::vector<EdgeId> to_original(const std::vector<EdgeId>& edges) const;
};

// Moves every terminal to a fresh degree-1 vertex via a zero-length pendant edge
// and builds a nice decomposition in which degree-1 vertices only appear as
// leaves hanging off a dedicated join. With split_multi_pair, a terminal in k > 1
// pairs is first split along a chain of k-1 zero-length edges.
TerminalGadget nicer_for_terminals(const WeightedGraph& g, const DemandSet& d,
                                   const std::optional<TreeDecomposition>& td = {}, bool split_multi_pair = false);

struct NicerReport {
    bool ok = true;
    std::string message;
};
// Checks that no introduce node introduces a terminal of degree 1, and that
// join-node bags contain no degree-1 vertex.
NicerReport check_nicer_properties(const WeightedGraph& g, const DemandSet& d, const NiceTreeDecomposition& ntd);

// Splits terminals that occur in several pairs: the terminal v with pairs
// p_1..p_k keeps p_1, and a chain v - n_1 - ... - n_{k-1} of zero-length edges
// carries the others.
struct SplitInstance {
    WeightedGraph graph;
    DemandSet demands;
    std::vector<EdgeId> edge_back;
    std::vector<Vertex> vertex_back;
};
SplitInstance split_multi_pair_terminals(const WeightedGraph& g, const DemandSet& d);

std::string violation_name(TdViolation v);

}  // namespace sforest
