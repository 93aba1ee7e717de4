#include "sforest/sp_exact.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <set>

#include "sforest/errors.hpp"

namespace sforest {

std::vector<std::vector<Vertex>> SpTree::vertex_sets() const {
    std::vector<std::vector<Vertex>> out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const SpNode& nd = nodes[i];
        std::vector<Vertex> vs{nd.x, nd.y};
        if (nd.kind != SpKind::edge) {
            vs.insert(vs.end(), out[nd.left].begin(), out[nd.left].end());
            vs.insert(vs.end(), out[nd.right].begin(), out[nd.right].end());
        }
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        out[i] = std::move(vs);
    }
    return out;
}

void SpTree::check(const WeightedGraph& g) const {
    if (nodes.empty()) throw InvalidInput("empty series-parallel tree");
    auto vs = vertex_sets();
    std::vector<int> used(static_cast<std::size_t>(g.num_edges()), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const SpNode& nd = nodes[i];
        std::string where = "series-parallel node " + std::to_string(i);
        if (nd.x == nd.y) throw InvalidInput(where + ": terminals coincide");
        if (nd.kind == SpKind::edge) {
            if (nd.edge < 0 || nd.edge >= g.num_edges()) throw InvalidInput(where + ": unknown edge");
            const Edge& e = g.edge(nd.edge);
            if (!((e.u == nd.x && e.v == nd.y) || (e.u == nd.y && e.v == nd.x)))
                throw InvalidInput(where + ": leaf terminals do not match its edge");
            ++used[nd.edge];
            continue;
        }
        if (nd.left < 0 || nd.right < 0 || nd.left >= static_cast<int>(i) || nd.right >= static_cast<int>(i))
            throw InvalidInput(where + ": children must precede the node");
        const SpNode& l = nodes[nd.left];
        const SpNode& r = nodes[nd.right];
        std::vector<Vertex> common;
        std::set_intersection(vs[nd.left].begin(), vs[nd.left].end(), vs[nd.right].begin(), vs[nd.right].end(),
                              std::back_inserter(common));
        if (nd.kind == SpKind::series) {
            if (l.x != nd.x || l.y != nd.mid || r.x != nd.mid || r.y != nd.y)
                throw InvalidInput(where + ": series terminals do not chain");
            if (common != std::vector<Vertex>{nd.mid})
                throw InvalidInput(where + ": series parts share more than the middle vertex");
        } else {
            if (l.x != nd.x || l.y != nd.y || r.x != nd.x || r.y != nd.y)
                throw InvalidInput(where + ": parallel parts have different terminals");
            std::vector<Vertex> want{std::min(nd.x, nd.y), std::max(nd.x, nd.y)};
            if (common != want) throw InvalidInput(where + ": parallel parts share a non-terminal vertex");
        }
    }
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        if (used[e] != 1) throw InvalidInput("edge " + std::to_string(e) + " is not used exactly once by the tree");
    if (static_cast<int>(vs.back().size()) != g.num_vertices())
        throw InvalidInput("series-parallel tree does not cover every vertex");
    std::vector<int> parents(nodes.size(), 0);
    for (const auto& nd : nodes)
        if (nd.kind != SpKind::edge) {
            ++parents[nd.left];
            ++parents[nd.right];
        }
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        if (parents[i] != 1) throw InvalidInput("series-parallel tree node " + std::to_string(i) + " is not used once");
}

namespace {

struct Arena {
    std::vector<SpNode> nodes;
    std::map<int, int> reversed;

    int add(SpNode nd) {
        nodes.push_back(nd);
        return static_cast<int>(nodes.size()) - 1;
    }

    int reverse(int id) {
        auto it = reversed.find(id);
        if (it != reversed.end()) return it->second;
        SpNode nd = nodes[id];
        SpNode out = nd;
        std::swap(out.x, out.y);
        if (nd.kind == SpKind::series) {
            out.left = reverse(nd.right);
            out.right = reverse(nd.left);
        } else if (nd.kind == SpKind::parallel) {
            out.left = reverse(nd.left);
            out.right = reverse(nd.right);
        }
        int r = add(out);
        reversed[id] = r;
        reversed[r] = id;
        return r;
    }

    int oriented(int id, Vertex x) { return nodes[id].x == x ? id : reverse(id); }

    SpTree extract(int root) const {
        SpTree t;
        std::map<int, int> new_id;
        std::function<int(int)> rec = [&](int id) -> int {
            SpNode nd = nodes[id];
            if (nd.kind != SpKind::edge) {
                nd.left = rec(nd.left);
                nd.right = rec(nd.right);
            }
            t.nodes.push_back(nd);
            return static_cast<int>(t.nodes.size()) - 1;
        };
        rec(root);
        return t;
    }
};

}  // namespace

SpTree sp_decompose(const WeightedGraph& g, Vertex x, Vertex y) {
    if (!g.valid_vertex(x) || !g.valid_vertex(y) || x == y) throw InvalidInput("invalid series-parallel terminals");
    Arena arena;
    struct Live {
        Vertex a, b;
        int node;
        bool alive;
    };
    std::vector<Live> live;
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        SpNode nd;
        nd.kind = SpKind::edge;
        nd.x = g.edge(e).u;
        nd.y = g.edge(e).v;
        nd.edge = e;
        live.push_back({nd.x, nd.y, arena.add(nd), true});
    }
    const int n = g.num_vertices();
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<std::pair<Vertex, Vertex>, int> first;
        for (std::size_t i = 0; i < live.size(); ++i) {
            if (!live[i].alive) continue;
            auto key = std::minmax(live[i].a, live[i].b);
            auto it = first.find({key.first, key.second});
            if (it == first.end()) {
                first[{key.first, key.second}] = static_cast<int>(i);
                continue;
            }
            Live& keep = live[it->second];
            SpNode p;
            p.kind = SpKind::parallel;
            p.x = keep.a;
            p.y = keep.b;
            p.left = keep.node;
            p.right = arena.oriented(live[i].node, keep.a);
            keep.node = arena.add(p);
            live[i].alive = false;
            changed = true;
        }
        std::vector<std::vector<int>> inc(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < live.size(); ++i)
            if (live[i].alive) {
                inc[live[i].a].push_back(static_cast<int>(i));
                inc[live[i].b].push_back(static_cast<int>(i));
            }
        for (Vertex w = 0; w < n; ++w) {
            if (w == x || w == y || inc[w].size() != 2) continue;
            int e1 = inc[w][0], e2 = inc[w][1];
            if (!live[e1].alive || !live[e2].alive) continue;
            Vertex a = live[e1].a == w ? live[e1].b : live[e1].a;
            Vertex b = live[e2].a == w ? live[e2].b : live[e2].a;
            if (a == b || a == w || b == w) continue;
            SpNode s;
            s.kind = SpKind::series;
            s.x = a;
            s.y = b;
            s.mid = w;
            s.left = arena.oriented(live[e1].node, a);
            s.right = arena.oriented(live[e2].node, w);
            live[e1] = {a, b, arena.add(s), true};
            live[e2].alive = false;
            changed = true;
            // Incidence lists are stale now; recompute in the next round.
            break;
        }
    }
    std::vector<int> rest;
    for (std::size_t i = 0; i < live.size(); ++i)
        if (live[i].alive) rest.push_back(static_cast<int>(i));
    bool covers = true;
    if (rest.size() == 1) {
        const Live& l = live[rest[0]];
        if (!((l.a == x && l.b == y) || (l.a == y && l.b == x))) covers = false;
    }
    if (rest.size() != 1 || !covers || n < 2) {
        std::vector<Vertex> cv;
        std::vector<std::pair<Vertex, Vertex>> ce;
        for (int i : rest) {
            ce.emplace_back(live[i].a, live[i].b);
            cv.push_back(live[i].a);
            cv.push_back(live[i].b);
        }
        std::sort(cv.begin(), cv.end());
        cv.erase(std::unique(cv.begin(), cv.end()), cv.end());
        throw NotSeriesParallel("graph is not series-parallel with terminals " + std::to_string(x) + "," +
                                    std::to_string(y) + "; irreducible core has " + std::to_string(cv.size()) +
                                    " vertices and " + std::to_string(ce.size()) + " edges",
                                cv, ce);
    }
    int root = arena.oriented(live[rest[0]].node, x);
    SpTree t = arena.extract(root);
    if (static_cast<int>(t.vertex_sets().back().size()) != n) {
        throw NotSeriesParallel("graph has vertices outside the series-parallel structure", {}, {});
    }
    return t;
}

SpTree sp_decompose(const WeightedGraph& g) {
    const int n = g.num_vertices();
    if (n < 2 || g.num_edges() == 0) throw NotSeriesParallel("graph needs at least one edge", {}, {});
    if (!is_connected(g)) throw NotSeriesParallel("graph is disconnected", {}, {});
    std::optional<NotSeriesParallel> smallest;
    for (Vertex x = 0; x < n; ++x)
        for (Vertex y = x + 1; y < n; ++y) {
            try {
                return sp_decompose(g, x, y);
            } catch (const NotSeriesParallel& e) {
                if (!smallest || e.core_edges.size() < smallest->core_edges.size()) smallest = e;
            }
        }
    throw NotSeriesParallel("graph is not series-parallel for any terminal pair; smallest irreducible core has " +
                                std::to_string(smallest->core_vertices.size()) + " vertices and " +
                                std::to_string(smallest->core_edges.size()) + " edges",
                            smallest->core_vertices, smallest->core_edges);
}

SpTree reverse_sp_tree(const SpTree& t) {
    Arena arena;
    arena.nodes = t.nodes;
    return arena.extract(arena.reverse(t.root()));
}

TreeDecomposition td_from_sp_tree(const WeightedGraph& g, const SpTree& t) {
    t.check(g);
    TreeDecomposition td;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const SpNode& nd = t.nodes[i];
        std::vector<Vertex> bag{nd.x, nd.y};
        if (nd.kind == SpKind::series) bag.push_back(nd.mid);
        std::sort(bag.begin(), bag.end());
        td.bags.push_back(bag);
        if (nd.kind != SpKind::edge) {
            td.tree_edges.emplace_back(nd.left, static_cast<int>(i));
            td.tree_edges.emplace_back(nd.right, static_cast<int>(i));
        }
    }
    td.root = t.root();
    return td;
}

int CutGraph::add_vertex(std::string label) {
    tag.push_back(std::move(label));
    return num_vertices++;
}

MinCut min_cut(const CutGraph& d, const std::vector<int>& sources, const std::vector<int>& sinks) {
    const int n = d.num_vertices;
    std::vector<char> is_src(static_cast<std::size_t>(n), 0), is_sink(static_cast<std::size_t>(n), 0);
    for (int s : sources) is_src.at(s) = 1;
    for (int t : sinks) is_sink.at(t) = 1;
    for (int v = 0; v < n; ++v)
        if (is_src[v] && is_sink[v]) return {Cost::infinity(), {}};
    // A path of infinite arcs from a source to a sink forces an infinite cut.
    std::vector<std::vector<int>> inf_adj(static_cast<std::size_t>(n));
    Length finite_sum = 0;
    for (const Arc& a : d.arcs) {
        if (a.cap.is_infinite()) inf_adj[a.from].push_back(a.to);
        else finite_sum += a.cap.value();
    }
    {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::queue<int> q;
        for (int s : sources)
            if (!seen[s]) {
                seen[s] = 1;
                q.push(s);
            }
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            if (is_sink[u]) return {Cost::infinity(), {}};
            for (int w : inf_adj[u])
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push(w);
                }
        }
    }
    // Every finite cut is below big, so replacing infinity by big is exact.
    const Length big = finite_sum + 1;
    struct FArc {
        int to;
        Length cap;
    };
    const int S = n, T = n + 1, N = n + 2;
    std::vector<FArc> arcs;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(N));
    auto add = [&](int a, int b, Length c) {
        adj[a].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({b, c});
        adj[b].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({a, 0});
    };
    for (const Arc& a : d.arcs) add(a.from, a.to, a.cap.is_infinite() ? big : a.cap.value());
    for (int s : sources) add(S, s, big);
    for (int t : sinks) add(t, T, big);
    Length flow = 0;
    std::vector<int> level(static_cast<std::size_t>(N)), it(static_cast<std::size_t>(N));
    auto bfs = [&]() {
        std::fill(level.begin(), level.end(), -1);
        std::queue<int> q;
        level[S] = 0;
        q.push(S);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int id : adj[u])
                if (arcs[id].cap > 0 && level[arcs[id].to] < 0) {
                    level[arcs[id].to] = level[u] + 1;
                    q.push(arcs[id].to);
                }
        }
        return level[T] >= 0;
    };
    std::function<Length(int, Length)> dfs = [&](int u, Length f) -> Length {
        if (u == T) return f;
        for (int& i = it[u]; i < static_cast<int>(adj[u].size()); ++i) {
            int id = adj[u][i];
            int v = arcs[id].to;
            if (arcs[id].cap <= 0 || level[v] != level[u] + 1) continue;
            Length got = dfs(v, std::min(f, arcs[id].cap));
            if (got > 0) {
                arcs[id].cap -= got;
                arcs[id ^ 1].cap += got;
                return got;
            }
        }
        return 0;
    };
    while (bfs()) {
        std::fill(it.begin(), it.end(), 0);
        while (Length f = dfs(S, std::numeric_limits<Length>::max())) flow += f;
    }
    if (flow >= big) throw std::logic_error("min_cut: finite cut bound violated");
    MinCut out;
    out.value = Cost(flow);
    std::vector<char> seen(static_cast<std::size_t>(N), 0);
    std::queue<int> q;
    seen[S] = 1;
    q.push(S);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int id : adj[u])
            if (arcs[id].cap > 0 && !seen[arcs[id].to]) {
                seen[arcs[id].to] = 1;
                q.push(arcs[id].to);
            }
    }
    for (int v = 0; v < n; ++v)
        if (seen[v]) out.side.push_back(v);
    return out;
}

Cost CutGraph::evaluate(const std::vector<Vertex>& S) const {
    std::vector<int> src{s}, snk{t};
    for (Vertex v : active) {
        bool in = std::find(S.begin(), S.end(), v) != S.end();
        (in ? src : snk).push_back(vertex_of.at(v));
    }
    for (Vertex v : S)
        if (!std::binary_search(active.begin(), active.end(), v))
            throw InvalidInput("evaluate: vertex outside the active set");
    return min_cut(*this, src, snk).value;
}

namespace {

// Disjoint copy of b appended to a, with b's s and t identified with a's s and t
// when identify is set.
CutGraph join_graphs(const CutGraph& a, const CutGraph& b, bool identify_terminals, std::vector<int>& b_map) {
    CutGraph out = a;
    b_map.assign(static_cast<std::size_t>(b.num_vertices), -1);
    for (int v = 0; v < b.num_vertices; ++v) {
        if (identify_terminals && v == b.s) b_map[v] = a.s;
        else if (identify_terminals && v == b.t) b_map[v] = a.t;
        else b_map[v] = out.add_vertex(b.tag[v]);
    }
    for (const Arc& arc : b.arcs) out.add_arc(b_map[arc.from], b_map[arc.to], arc.cap);
    for (const auto& [gv, dv] : b.vertex_of)
        if (!out.vertex_of.count(gv)) out.vertex_of[gv] = b_map[dv];
    out.gamma1 = out.gamma2 = -1;
    return out;
}

// Swapping the roles of s and t turns out-cuts into in-cuts, so arcs flip too.
CutGraph reversed(const CutGraph& c) {
    CutGraph r = c;
    std::swap(r.s, r.t);
    for (Arc& a : r.arcs) std::swap(a.from, a.to);
    return r;
}

}  // namespace

std::vector<SpNodeValues> sp_node_values(const WeightedGraph& g, const SpTree& t, const DemandSet& d,
                                         const std::vector<Cost>& lengths, const SpOptions& opts) {
    if (static_cast<int>(lengths.size()) != g.num_edges()) throw InvalidInput("length vector size mismatch");
    const int n = g.num_vertices();
    std::vector<Vertex> mate(static_cast<std::size_t>(n), -1);
    for (auto [s, u] : d.pairs()) {
        if (mate[s] >= 0 || mate[u] >= 0) throw InvalidInput("a vertex occurs in more than one demand pair");
        mate[s] = u;
        mate[u] = s;
    }
    auto vs = t.vertex_sets();
    auto inside = [&](int node, Vertex v) { return std::binary_search(vs[node].begin(), vs[node].end(), v); };
    auto active_of = [&](int node) {
        std::vector<Vertex> a;
        for (Vertex v : vs[node])
            if (mate[v] >= 0 && !inside(node, mate[v])) a.push_back(v);
        return a;
    };
    std::vector<SpNodeValues> vals(t.nodes.size());
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const SpNode& nd = t.nodes[i];
        SpNodeValues& out = vals[i];
        const std::string id = std::to_string(i);
        if (nd.kind == SpKind::edge) {
            CutGraph c;
            c.s = c.add_vertex("s" + id);
            c.t = c.add_vertex("t" + id);
            c.vertex_of[nd.x] = c.s;
            c.vertex_of[nd.y] = c.t;
            if (mate[nd.x] == nd.y) c.add_arc(c.s, c.t, Cost::infinity());
            c.active = active_of(static_cast<int>(i));
            out.a = lengths[nd.edge];
            out.b = Cost(0);
            out.cut = std::move(c);
            continue;
        }
        const int j1 = nd.left, j2 = nd.right;
        const SpNodeValues& v1 = vals[j1];
        const SpNodeValues& v2 = vals[j2];
        // Pairs inside G_i split across the two parts (shared vertices excluded).
        auto only1 = [&](Vertex v) { return inside(j1, v) && !inside(j2, v); };
        auto only2 = [&](Vertex v) { return inside(j2, v) && !inside(j1, v); };
        std::vector<std::pair<Vertex, Vertex>> cross;
        for (auto [s, u] : d.pairs()) {
            if (only1(s) && only2(u)) cross.emplace_back(s, u);
            if (only2(s) && only1(u)) cross.emplace_back(u, s);
        }
        if (nd.kind == SpKind::parallel) {
            std::vector<int> map2;
            CutGraph c = join_graphs(v1.cut, v2.cut, true, map2);
            for (auto [u, w] : cross) {
                c.add_arc(c.vertex_of.at(u), c.vertex_of.at(w), Cost::infinity());
                c.add_arc(c.vertex_of.at(w), c.vertex_of.at(u), Cost::infinity());
            }
            c.active = active_of(static_cast<int>(i));
            out.a = min(v1.a + v2.b, v1.b + v2.a);
            out.b = v1.b + v2.b;
            out.cut = std::move(c);
            continue;
        }
        // Series node with middle vertex mu.
        const Vertex mu = nd.mid;
        std::vector<Vertex> t1, t2;
        for (auto [u, w] : cross) {
            t1.push_back(u);
            t2.push_back(w);
        }
        std::sort(t1.begin(), t1.end());
        std::sort(t2.begin(), t2.end());
        const std::vector<Vertex> a_here = active_of(static_cast<int>(i));
        const bool mu_active_here = std::binary_search(a_here.begin(), a_here.end(), mu);
        // Sides of mu when mu is isolated from both terminals.
        std::vector<Vertex> s1;  // part of A_{j1} on the x side
        for (Vertex v : v1.cut.active) {
            if (std::binary_search(t1.begin(), t1.end(), v)) continue;
            if (opts.corrected_series && v == mu && !mu_active_here) continue;
            s1.push_back(v);
        }
        std::vector<Vertex> s2 = t2;  // part of A_{j2} on the mu side
        if (opts.corrected_series && !mu_active_here &&
            std::binary_search(v2.cut.active.begin(), v2.cut.active.end(), mu))
            s2.push_back(mu);
        Cost middle = v1.cut.evaluate(s1) + v2.cut.evaluate(s2);

        std::vector<int> map2;
        CutGraph c = join_graphs(v1.cut, v2.cut, false, map2);
        const int t1v = v1.cut.t;
        const int s2v = map2[v2.cut.s];
        c.add_arc(t1v, s2v, Cost(0));
        c.s = v1.cut.s;
        c.t = map2[v2.cut.t];
        const int g1 = c.add_vertex("gamma1@" + id);
        const int g2 = c.add_vertex("gamma2@" + id);
        c.gamma1 = g1;
        c.gamma2 = g2;
        c.add_arc(c.s, g1, v2.a);
        c.add_arc(g1, g2, middle);
        c.add_arc(g2, c.t, v1.a);
        c.add_arc(g2, g1, Cost::infinity());
        for (int v = 0; v < v1.cut.num_vertices; ++v) c.add_arc(g1, v, Cost::infinity());
        for (int v = 0; v < v2.cut.num_vertices; ++v) c.add_arc(map2[v], g2, Cost::infinity());
        for (Vertex v : t1) c.add_arc(v1.cut.vertex_of.at(v), g1, Cost::infinity());
        for (Vertex v : t2) c.add_arc(g2, map2[v2.cut.vertex_of.at(v)], Cost::infinity());
        if (opts.corrected_series) {
            c.add_arc(g2, s2v, Cost::infinity());
            c.add_arc(t1v, g1, Cost::infinity());
        }
        c.active = a_here;
        out.a = v1.a + v2.a;
        // x and y identified: parallel connection of j1 and reversed j2.
        std::vector<int> rmap;
        CutGraph prime = join_graphs(v1.cut, reversed(v2.cut), true, rmap);
        for (auto [u, w] : cross) {
            prime.add_arc(prime.vertex_of.at(u), prime.vertex_of.at(w), Cost::infinity());
            prime.add_arc(prime.vertex_of.at(w), prime.vertex_of.at(u), Cost::infinity());
        }
        prime.active = a_here;
        Cost b = prime.evaluate(a_here);
        if (opts.corrected_series) b = min(b, min(v1.a + v2.b, v1.b + v2.a));
        out.b = b;
        out.cut = std::move(c);
    }
    return vals;
}

SpSubInstance sp_sub_instance(const WeightedGraph& g, const SpTree& t, int node, const DemandSet& d) {
    auto vs = t.vertex_sets();
    std::vector<EdgeId> edges;
    std::vector<int> stack{node};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        const SpNode& nd = t.nodes[v];
        if (nd.kind == SpKind::edge) edges.push_back(nd.edge);
        else {
            stack.push_back(nd.left);
            stack.push_back(nd.right);
        }
    }
    std::sort(edges.begin(), edges.end());
    Subgraph sub = edge_subgraph(g, vs[node], edges);
    SpSubInstance out;
    out.graph = sub.graph;
    out.to_original = sub.to_original;
    out.x = sub.from_original[t.nodes[node].x];
    out.y = sub.from_original[t.nodes[node].y];
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (auto [s, u] : d.pairs()) {
        bool si = sub.from_original[s] >= 0, ui = sub.from_original[u] >= 0;
        if (si && ui) pairs.emplace_back(sub.from_original[s], sub.from_original[u]);
        else if (si) out.active.push_back(sub.from_original[s]);
        else if (ui) out.active.push_back(sub.from_original[u]);
    }
    std::sort(out.active.begin(), out.active.end());
    out.demands = DemandSet(sub.graph.num_vertices(), pairs);
    return out;
}

namespace {

Cost solve_value(const WeightedGraph& g, const SpTree& t, const DemandSet& d, const std::vector<Cost>& lengths,
                 const SpOptions& opts) {
    auto vals = sp_node_values(g, t, d, lengths, opts);
    const SpNodeValues& r = vals.back();
    return min(r.a, r.cut.evaluate({}));
}

}  // namespace

SpSolveResult sp_solve_with_tree(const WeightedGraph& g, const SpTree& tree, const DemandSet& d,
                                 const SpOptions& opts) {
    tree.check(g);
    SpSolveResult out;
    SplitInstance split = split_multi_pair_terminals(g, d);
    SpTree t = split.graph.num_vertices() == g.num_vertices()
                   ? tree
                   : sp_decompose(split.graph, tree.nodes.back().x, tree.nodes.back().y);
    const WeightedGraph& h = split.graph;
    std::vector<Cost> lengths;
    for (const auto& e : h.edges()) lengths.push_back(Cost(e.length));
    Cost best = solve_value(h, t, split.demands, lengths, opts);
    ++out.solves;
    if (best.is_infinite()) throw Infeasible("no feasible forest");
    // Self-reduction: drop every edge whose removal keeps the optimum.
    std::vector<EdgeId> order(static_cast<std::size_t>(h.num_edges()));
    for (EdgeId e = 0; e < h.num_edges(); ++e) order[e] = e;
    std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
        return std::pair(h.edge(a).length, a) > std::pair(h.edge(b).length, b);
    });
    for (EdgeId e : order) {
        Cost saved = lengths[e];
        lengths[e] = Cost::infinity();
        Cost c = solve_value(h, t, split.demands, lengths, opts);
        ++out.solves;
        if (c != best) lengths[e] = saved;
    }
    std::vector<EdgeId> kept;
    for (EdgeId e = 0; e < h.num_edges(); ++e)
        if (lengths[e].is_finite()) kept.push_back(e);
    Forest f(h, kept);
    auto val = validate_solution(h, split.demands, f);
    if (!val.feasible || Cost(val.cost) != best)
        throw std::logic_error("series-parallel witness failed verification");
    for (EdgeId e : kept)
        if (split.edge_back[e] >= 0) out.edges.push_back(split.edge_back[e]);
    std::sort(out.edges.begin(), out.edges.end());
    Length c = 0;
    for (EdgeId e : out.edges) c += g.edge(e).length;
    if (Cost(c) != best || !is_feasible(g, d, out.edges))
        throw std::logic_error("series-parallel witness failed verification after mapping back");
    out.cost = best;
    out.tree = tree;
    return out;
}

SpSolveResult sp_solve(const WeightedGraph& g, const DemandSet& d, const SpOptions& opts) {
    SpTree t = sp_decompose(g);
    return sp_solve_with_tree(g, t, d, opts);
}

}  // namespace sforest
