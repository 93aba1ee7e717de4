#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sforest/graph.hpp"
#include "sforest/partition.hpp"
#include "sforest/rational.hpp"
#include "sforest/tree_decomposition.hpp"

namespace sforest {

std::vector<Vertex> group(const WeightedGraph& g, const std::vector<Vertex>& X, const std::vector<Vertex>& S,
                          const Rational& r);

// Greedy scan of X in ascending order; keeps x when its distance to every kept
// center exceeds eps * W.
std::vector<Vertex> greedy_centers(const WeightedGraph& g, const std::vector<Vertex>& X, Length W,
                                   const Rational& eps);

enum class PartitionMode { exhaustive, pruned };
enum class DistanceScope { subtree, whole_graph };

struct PartitionOptions {
    PartitionMode mode = PartitionMode::exhaustive;
    DistanceScope scope = DistanceScope::subtree;
    long long enumeration_bound = 2'000'000;  // exhaustive: transitions per node before failing
    long long pruned_cap = 200'000;           // pruned: transitions per node before stopping
};

struct NodeSets {
    std::vector<Vertex> subtree_vertices;  // V_i, sorted
    std::vector<Vertex> active;            // A_i, sorted
};

std::vector<NodeSets> node_sets(const WeightedGraph& g, const NiceTreeDecomposition& ntd, const DemandSet& d);

struct PartitionCollection {
    std::vector<NodeSets> nodes;
    // Per node: allowed partitions of A_i keyed by encode(); unrestricted nodes
    // accept every partition.
    std::vector<std::set<std::string>> allowed;
    std::vector<char> unrestricted;
    long long transitions = 0;

    bool accepts(int node, const Partition& p) const;
    std::size_t size(int node) const { return allowed.at(static_cast<std::size_t>(node)).size(); }
};

PartitionCollection full_partition_collection(const WeightedGraph& g, const NiceTreeDecomposition& ntd,
                                              const DemandSet& d);

PartitionCollection build_partition_collection(const WeightedGraph& g, const NiceTreeDecomposition& ntd,
                                               const DemandSet& d, const Rational& eps,
                                               const PartitionOptions& opts = {});

// Partition of A_i into components of the forest.
Partition induced_partition(const WeightedGraph& g, const std::vector<EdgeId>& forest, const std::vector<Vertex>& A);

bool conforms(const WeightedGraph& g, const std::vector<EdgeId>& forest, const NiceTreeDecomposition& ntd,
              const DemandSet& d, const PartitionCollection& pc);

struct DpStats {
    long long states = 0;           // states kept over all nodes
    long long generated = 0;        // candidate states produced by transitions
    long long pruned_by_collection = 0;
    long long max_node_states = 0;
};

struct DpOptions {
    long long state_cap = 5'000'000;
};

struct DpResult {
    bool feasible = false;
    Cost cost = Cost::infinity();
    std::vector<EdgeId> edges;
    DpStats stats;
};

// Requires a decomposition from nicer_for_terminals and a simple graph.
DpResult conforming_dp(const WeightedGraph& g, const NiceTreeDecomposition& ntd, const DemandSet& d,
                       const PartitionCollection& pc, const DpOptions& opts = {});

struct PtasOptions {
    PartitionOptions partitions;
    DpOptions dp;
    bool full_collection = false;  // skip the construction and allow every partition
};

struct PtasResult {
    Cost cost = Cost::infinity();
    std::vector<EdgeId> edges;
    int width = 0;
    Rational internal_eps;
    DpStats stats;
    long long partitions = 0;
};

PtasResult tw_ptas(const WeightedGraph& g, const DemandSet& d, const Rational& eps,
                   const std::optional<TreeDecomposition>& td = {}, const PtasOptions& opts = {});

struct PipelineResult {
    Cost cost = Cost::infinity();
    std::vector<EdgeId> edges;
    int chosen_class = 0;
    Length chosen_class_length = 0;
    int contracted_width = 0;
    PtasResult inner;
};

PipelineResult psf_pipeline(const WeightedGraph& g, const DemandSet& d, const Rational& eps, int k,
                            const PtasOptions& opts = {});

}  // namespace sforest
