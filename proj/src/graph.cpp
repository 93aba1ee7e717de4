#include "sforest/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

#include "sforest/errors.hpp"

namespace sforest {

WeightedGraph::WeightedGraph(int num_vertices, std::vector<Edge> edges)
    : n_(num_vertices), edges_(std::move(edges)) {
    if (n_ < 0) throw InvalidInput("negative vertex count");
    std::vector<std::size_t> deg(static_cast<std::size_t>(n_), 0);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (!valid_vertex(e.u) || !valid_vertex(e.v))
            throw InvalidInput("edge " + std::to_string(i) + " has an unknown endpoint");
        if (e.u == e.v) throw InvalidInput("edge " + std::to_string(i) + " is a self-loop");
        if (e.length < 0) throw InvalidInput("edge " + std::to_string(i) + " has negative length");
        ++deg[static_cast<std::size_t>(e.u)];
        ++deg[static_cast<std::size_t>(e.v)];
    }
    offset_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (int v = 0; v < n_; ++v) offset_[v + 1] = offset_[v] + deg[v];
    adj_.resize(offset_.back());
    std::vector<std::size_t> pos(offset_.begin(), offset_.end() - 1);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        adj_[pos[e.u]++] = {static_cast<EdgeId>(i), e.v};
        adj_[pos[e.v]++] = {static_cast<EdgeId>(i), e.u};
    }
}

std::span<const Incidence> WeightedGraph::incident(Vertex v) const {
    if (!valid_vertex(v)) throw InvalidInput("unknown vertex " + std::to_string(v));
    return {adj_.data() + offset_[v], offset_[v + 1] - offset_[v]};
}

std::vector<Vertex> WeightedGraph::neighbours(Vertex v) const {
    std::vector<Vertex> out;
    for (const auto& inc : incident(v)) out.push_back(inc.other);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Vertex WeightedGraph::other(EdgeId e, Vertex v) const {
    const Edge& ed = edge(e);
    return ed.u == v ? ed.v : ed.u;
}

Length WeightedGraph::total_length() const {
    Length s = 0;
    for (const auto& e : edges_) s += e.length;
    return s;
}

UnionFind::UnionFind(int n) : parent_(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
}

int UnionFind::find(int x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool UnionFind::unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
}

DemandSet::DemandSet(int num_vertices, const std::vector<std::pair<Vertex, Vertex>>& pairs) {
    for (auto [s, t] : pairs) {
        if (s < 0 || s >= num_vertices || t < 0 || t >= num_vertices)
            throw InvalidInput("demand endpoint out of range");
        if (s == t) throw InvalidInput("demand endpoints must differ");
        auto p = std::minmax(s, t);
        std::pair<Vertex, Vertex> q{p.first, p.second};
        if (std::find(pairs_.begin(), pairs_.end(), q) == pairs_.end()) pairs_.push_back(q);
    }
}

bool DemandSet::contains(Vertex a, Vertex b) const {
    auto p = std::minmax(a, b);
    return std::find(pairs_.begin(), pairs_.end(), std::pair<Vertex, Vertex>{p.first, p.second}) !=
           pairs_.end();
}

std::vector<Vertex> DemandSet::terminals() const {
    std::vector<Vertex> out;
    for (auto [s, t] : pairs_) {
        out.push_back(s);
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

DemandSet DemandSet::mapped(const std::vector<Vertex>& vertex_map, int new_num_vertices) const {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (auto [s, t] : pairs_) {
        Vertex a = vertex_map.at(s), b = vertex_map.at(t);
        if (a != b) out.emplace_back(a, b);
    }
    return DemandSet(new_num_vertices, out);
}

Forest::Forest(const WeightedGraph& g, std::vector<EdgeId> edges, bool require_acyclic)
    : edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (EdgeId e : edges_)
        if (e < 0 || e >= g.num_edges()) throw InvalidInput("unknown edge id " + std::to_string(e));
    if (require_acyclic) {
        UnionFind uf(g.num_vertices());
        for (EdgeId e : edges_)
            if (!uf.unite(g.edge(e).u, g.edge(e).v))
                throw InvalidInput("edge set contains a cycle through edge " + std::to_string(e));
    }
}

Length Forest::cost(const WeightedGraph& g) const {
    Length s = 0;
    for (EdgeId e : edges_) s += g.edge(e).length;
    return s;
}

std::vector<Vertex> Forest::component_labels(const WeightedGraph& g) const {
    UnionFind uf(g.num_vertices());
    for (EdgeId e : edges_) uf.unite(g.edge(e).u, g.edge(e).v);
    std::vector<Vertex> label(static_cast<std::size_t>(g.num_vertices()), -1);
    std::vector<Vertex> root_label(static_cast<std::size_t>(g.num_vertices()), -1);
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        int r = uf.find(v);
        if (root_label[r] < 0) root_label[r] = v;
        label[v] = root_label[r];
    }
    return label;
}

std::vector<EdgeId> ContractionMap::lift(const std::vector<EdgeId>& new_edges) const {
    std::vector<EdgeId> out;
    out.reserve(new_edges.size());
    for (EdgeId e : new_edges) out.push_back(provenance.at(static_cast<std::size_t>(e)));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Cost> multi_source_distances(const WeightedGraph& g, const std::vector<Vertex>& sources) {
    const int n = g.num_vertices();
    std::vector<Length> dist(static_cast<std::size_t>(n), 0);
    std::vector<char> reached(static_cast<std::size_t>(n), 0), done(static_cast<std::size_t>(n), 0);
    using Item = std::pair<Length, Vertex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (Vertex s : sources) {
        if (!g.valid_vertex(s)) throw InvalidInput("unknown vertex " + std::to_string(s));
        if (!reached[s]) {
            reached[s] = 1;
            dist[s] = 0;
            pq.push({0, s});
        }
    }
    while (!pq.empty()) {
        auto [du, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (const auto& inc : g.incident(u)) {
            Length nd = du + g.edge(inc.edge).length;
            if (!reached[inc.other] || nd < dist[inc.other]) {
                reached[inc.other] = 1;
                dist[inc.other] = nd;
                pq.push({nd, inc.other});
            }
        }
    }
    std::vector<Cost> out(static_cast<std::size_t>(n), Cost::infinity());
    for (Vertex v = 0; v < n; ++v)
        if (reached[v]) out[v] = Cost(dist[v]);
    return out;
}

std::vector<Cost> single_source_distances(const WeightedGraph& g, Vertex source) {
    return multi_source_distances(g, {source});
}

Cost shortest_dist(const WeightedGraph& g, Vertex u, Vertex v) {
    if (!g.valid_vertex(u) || !g.valid_vertex(v)) throw InvalidInput("unknown vertex");
    return single_source_distances(g, u)[v];
}

DistanceMatrix all_pairs_distances_serial(const WeightedGraph& g) {
    DistanceMatrix m;
    m.n = g.num_vertices();
    m.d.resize(static_cast<std::size_t>(m.n) * m.n);
    for (Vertex s = 0; s < m.n; ++s) {
        auto row = single_source_distances(g, s);
        std::copy(row.begin(), row.end(), m.d.begin() + static_cast<std::ptrdiff_t>(s) * m.n);
    }
    return m;
}

DistanceMatrix all_pairs_distances(const WeightedGraph& g) {
    DistanceMatrix m;
    m.n = g.num_vertices();
    m.d.resize(static_cast<std::size_t>(m.n) * m.n);
#pragma omp parallel for schedule(dynamic)
    for (Vertex s = 0; s < m.n; ++s) {
        auto row = single_source_distances(g, s);
        std::copy(row.begin(), row.end(), m.d.begin() + static_cast<std::ptrdiff_t>(s) * m.n);
    }
    return m;
}

namespace {

Contraction quotient(const WeightedGraph& g, UnionFind& uf, const std::vector<char>& removed) {
    const int n = g.num_vertices();
    Contraction out;
    out.map.vertex_map.assign(static_cast<std::size_t>(n), -1);
    std::vector<Vertex> root_id(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (Vertex v = 0; v < n; ++v) {
        int r = uf.find(v);
        if (root_id[r] < 0) root_id[r] = next++;
        out.map.vertex_map[v] = root_id[r];
    }
    // Best surviving edge per new vertex pair.
    std::map<std::pair<Vertex, Vertex>, EdgeId> best;
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        if (removed[e]) continue;
        Vertex a = out.map.vertex_map[g.edge(e).u], b = out.map.vertex_map[g.edge(e).v];
        if (a == b) continue;
        auto key = std::minmax(a, b);
        auto it = best.find({key.first, key.second});
        if (it == best.end()) {
            best[{key.first, key.second}] = e;
        } else if (g.edge(e).length < g.edge(it->second).length) {
            it->second = e;
        }
    }
    std::vector<EdgeId> kept;
    for (auto& [k, e] : best) kept.push_back(e);
    std::sort(kept.begin(), kept.end());
    std::vector<Edge> edges;
    for (EdgeId e : kept) {
        edges.push_back({out.map.vertex_map[g.edge(e).u], out.map.vertex_map[g.edge(e).v], g.edge(e).length});
        out.map.provenance.push_back(e);
    }
    out.graph = WeightedGraph(next, std::move(edges));
    return out;
}

}  // namespace

Contraction contract_edges(const WeightedGraph& g, const std::vector<EdgeId>& es) {
    UnionFind uf(g.num_vertices());
    std::vector<char> removed(static_cast<std::size_t>(g.num_edges()), 0);
    for (EdgeId e : es) {
        if (e < 0 || e >= g.num_edges()) throw InvalidInput("unknown edge id " + std::to_string(e));
        uf.unite(g.edge(e).u, g.edge(e).v);
        removed[e] = 1;
    }
    return quotient(g, uf, removed);
}

Contraction simplify_parallel_edges(const WeightedGraph& g) {
    UnionFind uf(g.num_vertices());
    std::vector<char> removed(static_cast<std::size_t>(g.num_edges()), 0);
    return quotient(g, uf, removed);
}

bool is_feasible(const WeightedGraph& g, const DemandSet& d, const std::vector<EdgeId>& edges) {
    UnionFind uf(g.num_vertices());
    for (EdgeId e : edges) uf.unite(g.edge(e).u, g.edge(e).v);
    for (auto [s, t] : d.pairs())
        if (!uf.same(s, t)) return false;
    return true;
}

Validation validate_solution(const WeightedGraph& g, const DemandSet& d, const Forest& f) {
    Validation r;
    r.cost = f.cost(g);
    auto label = f.component_labels(g);
    r.feasible = true;
    for (auto [s, t] : d.pairs())
        if (label[s] != label[t]) r.feasible = false;
    return r;
}

std::vector<EdgeId> prune_to_minimal_forest(const WeightedGraph& g, const DemandSet& d,
                                            std::vector<EdgeId> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::sort(edges.begin(), edges.end(), [&](EdgeId a, EdgeId b) {
        return std::pair(g.edge(a).length, a) < std::pair(g.edge(b).length, b);
    });
    UnionFind uf(g.num_vertices());
    std::vector<EdgeId> forest;
    for (EdgeId e : edges)
        if (uf.unite(g.edge(e).u, g.edge(e).v)) forest.push_back(e);
    for (auto it = forest.rbegin(); it != forest.rend(); ++it) {
        EdgeId e = *it;
        std::vector<EdgeId> trial;
        for (EdgeId f : forest)
            if (f != e && f >= 0) trial.push_back(f);
        if (is_feasible(g, d, trial)) *it = -1;
    }
    std::vector<EdgeId> out;
    for (EdgeId e : forest)
        if (e >= 0) out.push_back(e);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> bfs_levels(const WeightedGraph& g, Vertex root) {
    const int n = g.num_vertices();
    if (n > 0 && !g.valid_vertex(root)) throw InvalidInput("unknown root vertex");
    std::vector<int> level(static_cast<std::size_t>(n), -1);
    auto run = [&](Vertex start) {
        std::queue<Vertex> q;
        level[start] = 0;
        q.push(start);
        while (!q.empty()) {
            Vertex u = q.front();
            q.pop();
            for (const auto& inc : g.incident(u))
                if (level[inc.other] < 0) {
                    level[inc.other] = level[u] + 1;
                    q.push(inc.other);
                }
        }
    };
    if (n > 0) run(root);
    for (Vertex v = 0; v < n; ++v)
        if (level[v] < 0) run(v);
    return level;
}

std::vector<std::vector<EdgeId>> bfs_level_partition(const WeightedGraph& g, Vertex root, int k) {
    if (k < 1) throw InvalidInput("k must be positive");
    auto level = bfs_levels(g, root);
    std::vector<std::vector<EdgeId>> classes(static_cast<std::size_t>(k));
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        int l = std::min(level[g.edge(e).u], level[g.edge(e).v]);
        classes[static_cast<std::size_t>(l % k)].push_back(e);
    }
    return classes;
}

bool is_connected(const WeightedGraph& g) {
    if (g.num_vertices() == 0) return true;
    auto d = single_source_distances(g, 0);
    return std::all_of(d.begin(), d.end(), [](Cost c) { return c.is_finite(); });
}

Subgraph edge_subgraph(const WeightedGraph& g, const std::vector<Vertex>& vertices,
                       const std::vector<EdgeId>& edges) {
    Subgraph s;
    s.to_original = vertices;
    std::sort(s.to_original.begin(), s.to_original.end());
    s.to_original.erase(std::unique(s.to_original.begin(), s.to_original.end()), s.to_original.end());
    s.from_original.assign(static_cast<std::size_t>(g.num_vertices()), -1);
    for (std::size_t i = 0; i < s.to_original.size(); ++i) s.from_original[s.to_original[i]] = static_cast<Vertex>(i);
    std::vector<Edge> es;
    for (EdgeId e : edges) {
        Vertex a = s.from_original.at(g.edge(e).u), b = s.from_original.at(g.edge(e).v);
        if (a < 0 || b < 0) throw InvalidInput("subgraph edge leaves the vertex set");
        es.push_back({a, b, g.edge(e).length});
        s.edge_to_original.push_back(e);
    }
    s.graph = WeightedGraph(static_cast<int>(s.to_original.size()), std::move(es));
    return s;
}

Subgraph induced_subgraph(const WeightedGraph& g, const std::vector<Vertex>& vertices) {
    std::vector<char> in(static_cast<std::size_t>(g.num_vertices()), 0);
    for (Vertex v : vertices) in.at(v) = 1;
    std::vector<EdgeId> es;
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        if (in[g.edge(e).u] && in[g.edge(e).v]) es.push_back(e);
    return edge_subgraph(g, vertices, es);
}

}  // namespace sforest
