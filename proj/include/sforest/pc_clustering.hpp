#pragma once

#include <map>
#include <string>
#include <vector>

#include "sforest/graph.hpp"
#include "sforest/gw_forest.hpp"
#include "sforest/rational.hpp"

namespace sforest {

struct Cluster {
    std::vector<Vertex> members;  // sorted
    int parent = -1;              // enclosing cluster created by a merge, -1 while maximal
    int left = -1;                // children (merged clusters), -1 for singletons
    int right = -1;
    EdgeId merge_edge = -1;
};

struct DualState {
    std::vector<Rational> phi;                   // per vertex
    std::vector<Cluster> clusters;               // laminar family; ids are indices
    std::map<std::pair<int, Vertex>, Rational> y;  // sparse y_{S,v}
    std::vector<int> current;                    // vertex -> maximal cluster id

    Rational y_at(int cluster, Vertex v) const;
    // Sum of y_{S',v} over S' nested in S (S included) and v in S'.
    Rational nested_sum(int cluster) const;
    Rational flat_sum(int cluster) const;
    Rational phi_sum(int cluster) const;
    // Sum over clusters containing v of y_{S,v}.
    Rational vertex_load(Vertex v) const;
    // Sum over clusters S crossing e of sum_{v in S} y_{S,v}.
    Rational edge_load(const WeightedGraph& g, EdgeId e) const;
    bool contains(int cluster, Vertex v) const;
};

enum class EventKind { merge, vertex_death, cluster_deactivation };

struct GrowthEvent {
    Rational time;
    EventKind kind;
    std::vector<long> args;  // merge: edge, cluster, cluster, new cluster; death: vertex; deactivation: cluster
};

struct GrowthResult {
    std::vector<EdgeId> f1;
    DualState dual;
    std::vector<GrowthEvent> trace;
    int iterations = 0;  // growth steps
};

struct PruningResult {
    std::vector<EdgeId> f2;
    std::vector<int> tight_set;  // cluster ids, ascending
    int flat_sum_disagreements = 0;
};

struct DualReport {
    bool feasible = true;
    bool tight = true;
    std::vector<std::string> violations;
};

struct ClusteringResult {
    std::vector<std::vector<EdgeId>> trees;  // edge sets in g_in
    std::vector<DemandSet> demand_parts;
    GwResult seed;
    Contraction contracted;
    std::vector<EdgeId> f1;  // in contracted graph
    std::vector<EdgeId> f2;  // in contracted graph
    DualState dual;
    std::vector<int> tight_set;
    std::vector<GrowthEvent> trace;
    int flat_sum_disagreements = 0;
    Length seed_cost = 0;
};

GrowthResult growth_phase(const WeightedGraph& g, const std::vector<Rational>& phi);
PruningResult pruning_phase(const WeightedGraph& g, const std::vector<EdgeId>& f1, const DualState& dual);
DualReport verify_dual(const WeightedGraph& g, const DualState& dual, bool require_tight);
ClusteringResult pc_clustering(const WeightedGraph& g_in, const DemandSet& d, const Rational& eps);

std::string event_kind_name(EventKind k);

}  // namespace sforest
