#include "sforest/gw_forest.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "sforest/errors.hpp"
#include "sforest/rational.hpp"

namespace sforest {

std::vector<TreeComponent> tree_components_of(const WeightedGraph& g, const std::vector<EdgeId>& edges) {
    UnionFind uf(g.num_vertices());
    for (EdgeId e : edges) uf.unite(g.edge(e).u, g.edge(e).v);
    std::map<int, TreeComponent> by_root;
    for (EdgeId e : edges) by_root[uf.find(g.edge(e).u)].edges.push_back(e);
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        auto it = by_root.find(uf.find(v));
        if (it != by_root.end()) it->second.vertices.push_back(v);
    }
    std::vector<TreeComponent> out;
    for (auto& [r, c] : by_root) {
        std::sort(c.edges.begin(), c.edges.end());
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(),
              [](const TreeComponent& a, const TreeComponent& b) { return a.vertices[0] < b.vertices[0]; });
    return out;
}

GwResult gw_steiner_forest(const WeightedGraph& g, const DemandSet& d) {
    const int n = g.num_vertices();
    {
        UnionFind reach(n);
        for (const auto& e : g.edges()) reach.unite(e.u, e.v);
        for (auto [s, t] : d.pairs())
            if (!reach.same(s, t))
                throw Infeasible("demand (" + std::to_string(s) + "," + std::to_string(t) + ") is disconnected");
    }
    std::vector<std::vector<Vertex>> mates(static_cast<std::size_t>(n));
    for (auto [s, t] : d.pairs()) {
        mates[s].push_back(t);
        mates[t].push_back(s);
    }
    UnionFind clusters(n);
    std::vector<Rational> load(static_cast<std::size_t>(n));
    std::vector<EdgeId> added;
    GwResult result;

    auto active_roots = [&]() {
        std::vector<char> active(static_cast<std::size_t>(n), 0);
        for (Vertex v = 0; v < n; ++v)
            for (Vertex w : mates[v])
                if (!clusters.same(v, w)) active[clusters.find(v)] = 1;
        return active;
    };

    while (true) {
        auto active = active_roots();
        if (std::none_of(active.begin(), active.end(), [](char c) { return c != 0; })) break;
        std::optional<Rational> best;
        EdgeId best_edge = -1;
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            const Edge& ed = g.edge(e);
            int ru = clusters.find(ed.u), rv = clusters.find(ed.v);
            if (ru == rv) continue;
            int rate = active[ru] + active[rv];
            if (rate == 0) continue;
            Rational t = (to_rational(ed.length) - load[ed.u] - load[ed.v]) / rate;
            if (!best || t < *best) {
                best = t;
                best_edge = e;
            }
        }
        if (best_edge < 0) throw Infeasible("active cluster has no outgoing edge");
        for (Vertex v = 0; v < n; ++v)
            if (active[clusters.find(v)]) load[v] += *best;
        clusters.unite(g.edge(best_edge).u, g.edge(best_edge).v);
        added.push_back(best_edge);
        ++result.growth_events;
    }

    std::vector<char> keep(added.size(), 1);
    for (std::size_t i = added.size(); i-- > 0;) {
        keep[i] = 0;
        std::vector<EdgeId> trial;
        for (std::size_t j = 0; j < added.size(); ++j)
            if (keep[j]) trial.push_back(added[j]);
        if (!is_feasible(g, d, trial)) keep[i] = 1;
    }
    std::vector<EdgeId> final_edges;
    for (std::size_t j = 0; j < added.size(); ++j)
        if (keep[j]) final_edges.push_back(added[j]);
    result.forest = Forest(g, final_edges, true);
    result.tree_components = tree_components_of(g, result.forest.edges());
    return result;
}

}  // namespace sforest
