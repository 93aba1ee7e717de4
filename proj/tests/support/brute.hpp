#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sforest/graph.hpp"

namespace brute {

using sforest::DemandSet;
using sforest::Vertex;
using sforest::WeightedGraph;

constexpr long long kInf = std::numeric_limits<long long>::max() / 4;

struct Dsu {
    std::vector<int> p;
    explicit Dsu(int n) : p(static_cast<std::size_t>(n)) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

struct Constraints {
    std::vector<std::vector<Vertex>> link;
    std::vector<std::pair<Vertex, Vertex>> separate;
    std::vector<std::pair<Vertex, Vertex>> identify;  // merged before any edge is chosen
};

// Minimum over all 2^|E| edge subsets; kInf when nothing qualifies.
inline long long opt_subset(const WeightedGraph& g, const DemandSet& d, const Constraints& c = {}) {
    const int m = g.num_edges();
    if (m > 24) throw std::runtime_error("brute force limited to 24 edges");
    long long best = kInf;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        long long cost = 0;
        Dsu u(g.num_vertices());
        for (auto [a, b] : c.identify) u.unite(a, b);
        for (int e = 0; e < m; ++e)
            if (mask >> e & 1u) {
                cost += g.edge(e).length;
                u.unite(g.edge(e).u, g.edge(e).v);
            }
        if (cost >= best) continue;
        bool ok = true;
        for (auto [s, t] : d.pairs()) ok = ok && u.find(s) == u.find(t);
        for (const auto& grp : c.link)
            for (Vertex v : grp) ok = ok && u.find(v) == u.find(grp.front());
        for (auto [a, b] : c.separate) ok = ok && u.find(a) != u.find(b);
        if (ok) best = cost;
    }
    return best;
}

inline std::vector<std::vector<long long>> floyd_warshall(const WeightedGraph& g) {
    const int n = g.num_vertices();
    std::vector<std::vector<long long>> d(n, std::vector<long long>(n, kInf));
    for (int v = 0; v < n; ++v) d[v][v] = 0;
    for (const auto& e : g.edges()) {
        d[e.u][e.v] = std::min<long long>(d[e.u][e.v], e.length);
        d[e.v][e.u] = std::min<long long>(d[e.v][e.u], e.length);
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (d[i][k] < kInf && d[k][j] < kInf) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

// Directed cut by enumeration: min over X containing sources and avoiding sinks.
struct DArc {
    int from, to;
    long long cap;  // kInf for infinite
};
inline long long min_cut_enum(int n, const std::vector<DArc>& arcs, const std::vector<int>& src,
                              const std::vector<int>& snk) {
    if (n > 22) throw std::runtime_error("cut enumeration limited to 22 vertices");
    long long best = kInf;
    for (std::uint32_t x = 0; x < (1u << n); ++x) {
        bool ok = true;
        for (int s : src) ok = ok && (x >> s & 1u);
        for (int t : snk) ok = ok && !(x >> t & 1u);
        if (!ok) continue;
        long long c = 0;
        for (const auto& a : arcs)
            if ((x >> a.from & 1u) && !(x >> a.to & 1u)) c = (a.cap >= kInf || c >= kInf) ? kInf : c + a.cap;
        best = std::min(best, c);
    }
    return best;
}

// No K4 minor iff the graph reduces to nothing under deleting vertices of degree
// at most one, suppressing degree-two vertices and merging parallel edges.
inline bool has_k4_minor(const WeightedGraph& g) {
    const int n = g.num_vertices();
    std::vector<std::map<int, int>> adj(static_cast<std::size_t>(n));
    for (const auto& e : g.edges())
        if (e.u != e.v) adj[e.u][e.v] = adj[e.v][e.u] = 1;
    std::vector<char> gone(static_cast<std::size_t>(n), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < n; ++v) {
            if (gone[v]) continue;
            if (adj[v].size() <= 1) {
                for (auto [w, _] : adj[v]) adj[w].erase(v);
                adj[v].clear();
                gone[v] = 1;
                changed = true;
            } else if (adj[v].size() == 2) {
                int a = adj[v].begin()->first, b = std::next(adj[v].begin())->first;
                adj[a].erase(v);
                adj[b].erase(v);
                adj[a][b] = adj[b][a] = 1;
                adj[v].clear();
                gone[v] = 1;
                changed = true;
            }
        }
    }
    for (int v = 0; v < n; ++v)
        if (!gone[v]) return true;
    return false;
}

// R(a, b, c) = (a == c) or (b == c); literal codes: -1 is 0, -2 is 1, else variable.
inline bool r_satisfiable(int nvars, const std::vector<std::array<int, 3>>& clauses) {
    if (nvars > 20) throw std::runtime_error("too many variables");
    for (std::uint32_t a = 0; a < (1u << nvars); ++a) {
        auto val = [&](int l) { return l == -1 ? 0 : l == -2 ? 1 : static_cast<int>(a >> l & 1u); };
        bool ok = true;
        for (const auto& c : clauses) ok = ok && (val(c[0]) == val(c[2]) || val(c[1]) == val(c[2]));
        if (ok) return true;
    }
    return false;
}

}  // namespace brute
