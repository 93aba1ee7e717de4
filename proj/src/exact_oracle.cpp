#include "sforest/exact_oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>

#include "sforest/errors.hpp"

namespace sforest {

namespace {

constexpr Length kInf = std::numeric_limits<Length>::max() / 4;

// Dreyfus-Wagner table over all terminal subsets.
struct SubsetDp {
    int k = 0;
    int n = 0;
    std::vector<Length> cost;        // [mask * n + v]
    std::vector<int> split;          // submask for a merge, 0 if none
    std::vector<EdgeId> pred_edge;   // -1 if none

    Length at(unsigned mask, Vertex v) const { return cost[static_cast<std::size_t>(mask) * n + v]; }
};

SubsetDp run_dreyfus_wagner(const WeightedGraph& g, const std::vector<Vertex>& terms) {
    SubsetDp dp;
    dp.k = static_cast<int>(terms.size());
    dp.n = g.num_vertices();
    const std::size_t masks = std::size_t{1} << dp.k;
    dp.cost.assign(masks * dp.n, kInf);
    dp.split.assign(masks * dp.n, 0);
    dp.pred_edge.assign(masks * dp.n, -1);
    using Item = std::pair<Length, Vertex>;
    for (unsigned mask = 1; mask < masks; ++mask) {
        Length* row = dp.cost.data() + static_cast<std::size_t>(mask) * dp.n;
        int* srow = dp.split.data() + static_cast<std::size_t>(mask) * dp.n;
        EdgeId* prow = dp.pred_edge.data() + static_cast<std::size_t>(mask) * dp.n;
        if ((mask & (mask - 1)) == 0) {
            int i = __builtin_ctz(mask);
            row[terms[i]] = 0;
        } else {
            for (unsigned sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
                if (sub < (mask ^ sub)) continue;  // each split once
                const Length* a = dp.cost.data() + static_cast<std::size_t>(sub) * dp.n;
                const Length* b = dp.cost.data() + static_cast<std::size_t>(mask ^ sub) * dp.n;
                for (Vertex v = 0; v < dp.n; ++v) {
                    if (a[v] >= kInf || b[v] >= kInf) continue;
                    if (a[v] + b[v] < row[v]) {
                        row[v] = a[v] + b[v];
                        srow[v] = static_cast<int>(sub);
                    }
                }
            }
        }
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        for (Vertex v = 0; v < dp.n; ++v)
            if (row[v] < kInf) pq.push({row[v], v});
        std::vector<char> done(static_cast<std::size_t>(dp.n), 0);
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (done[u] || du != row[u]) continue;
            done[u] = 1;
            for (const auto& inc : g.incident(u)) {
                Length nd = du + g.edge(inc.edge).length;
                if (nd < row[inc.other]) {
                    row[inc.other] = nd;
                    srow[inc.other] = 0;
                    prow[inc.other] = inc.edge;
                    pq.push({nd, inc.other});
                }
            }
        }
    }
    return dp;
}

void collect(const SubsetDp& dp, const WeightedGraph& g, unsigned mask, Vertex v, std::vector<EdgeId>& out) {
    while (true) {
        std::size_t idx = static_cast<std::size_t>(mask) * dp.n + v;
        if (dp.pred_edge[idx] >= 0) {
            EdgeId e = dp.pred_edge[idx];
            out.push_back(e);
            v = g.other(e, v);
            continue;
        }
        if (dp.split[idx] != 0) {
            unsigned sub = static_cast<unsigned>(dp.split[idx]);
            collect(dp, g, sub, v, out);
            mask ^= sub;
            continue;
        }
        return;  // singleton base
    }
}

std::vector<EdgeId> spanning_forest_of(const WeightedGraph& g, std::vector<EdgeId> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::sort(edges.begin(), edges.end(), [&](EdgeId a, EdgeId b) {
        return std::pair(g.edge(a).length, a) < std::pair(g.edge(b).length, b);
    });
    UnionFind uf(g.num_vertices());
    std::vector<EdgeId> out;
    for (EdgeId e : edges)
        if (uf.unite(g.edge(e).u, g.edge(e).v)) out.push_back(e);
    std::sort(out.begin(), out.end());
    return out;
}

void check_vertices(const WeightedGraph& g, const std::vector<Vertex>& vs) {
    for (Vertex v : vs)
        if (!g.valid_vertex(v)) throw InvalidInput("unknown vertex " + std::to_string(v));
}

}  // namespace

namespace {

// Minimum spanning tree of G[K + W] over all W outside K.
ExactResult steiner_by_vertex_sets(const WeightedGraph& g, const std::vector<Vertex>& terms) {
    const int n = g.num_vertices();
    std::vector<char> is_term(static_cast<std::size_t>(n), 0);
    for (Vertex v : terms) is_term[v] = 1;
    std::vector<Vertex> others;
    for (Vertex v = 0; v < n; ++v)
        if (!is_term[v]) others.push_back(v);
    std::vector<EdgeId> order(static_cast<std::size_t>(g.num_edges()));
    for (EdgeId e = 0; e < g.num_edges(); ++e) order[e] = e;
    std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
        return std::pair(g.edge(a).length, a) < std::pair(g.edge(b).length, b);
    });
    Length best = kInf;
    std::vector<EdgeId> best_edges;
    std::vector<char> in(static_cast<std::size_t>(n));
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << others.size()); ++w) {
        for (Vertex v = 0; v < n; ++v) in[v] = is_term[v];
        int want = static_cast<int>(terms.size());
        for (std::size_t i = 0; i < others.size(); ++i)
            if (w >> i & 1u) {
                in[others[i]] = 1;
                ++want;
            }
        UnionFind uf(n);
        Length cost = 0;
        std::vector<EdgeId> chosen;
        for (EdgeId e : order) {
            const Edge& ed = g.edge(e);
            if (!in[ed.u] || !in[ed.v] || !uf.unite(ed.u, ed.v)) continue;
            cost += ed.length;
            chosen.push_back(e);
            if (cost >= best) break;
        }
        if (cost >= best || static_cast<int>(chosen.size()) != want - 1) continue;
        best = cost;
        best_edges = chosen;
    }
    if (best >= kInf) return {Cost::infinity(), {}};
    std::sort(best_edges.begin(), best_edges.end());
    return {Cost(best), best_edges};
}

ExactResult tree_for(const WeightedGraph& g, const std::vector<Vertex>& terms, const OracleConfig& cfg) {
    if (terms.size() <= 1) return {Cost(0), {}};
    if (static_cast<int>(terms.size()) <= cfg.max_terminals) {
        auto dp = run_dreyfus_wagner(g, terms);
        unsigned full = (1u << terms.size()) - 1;
        Length best = dp.at(full, terms[0]);
        if (best >= kInf) return {Cost::infinity(), {}};
        std::vector<EdgeId> edges;
        collect(dp, g, full, terms[0], edges);
        return {Cost(best), spanning_forest_of(g, edges)};
    }
    const int others = g.num_vertices() - static_cast<int>(terms.size());
    if (others > cfg.max_steiner_vertices)
        throw LimitExceeded("steiner_tree: " + std::to_string(terms.size()) + " terminals exceed cap " +
                            std::to_string(cfg.max_terminals) + " and " + std::to_string(others) +
                            " other vertices exceed cap " + std::to_string(cfg.max_steiner_vertices));
    return steiner_by_vertex_sets(g, terms);
}

}  // namespace

ExactResult steiner_tree(const WeightedGraph& g, const std::vector<Vertex>& terminals, const OracleConfig& cfg) {
    std::vector<Vertex> terms = terminals;
    check_vertices(g, terms);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return tree_for(g, terms, cfg);
}

ExactResult opt_forest_with_groups(const WeightedGraph& g, const std::vector<std::vector<Vertex>>& groups,
                                   const OracleConfig& cfg) {
    std::vector<Vertex> terms;
    for (const auto& grp : groups) {
        check_vertices(g, grp);
        terms.insert(terms.end(), grp.begin(), grp.end());
    }
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    if (terms.size() > 31) throw LimitExceeded("opt_forest: more than 31 terminals");
    const bool shared_table = static_cast<int>(terms.size()) <= cfg.max_terminals;
    if (!shared_table && g.num_vertices() - static_cast<int>(terms.size()) > cfg.max_steiner_vertices)
        throw LimitExceeded("opt_forest: " + std::to_string(terms.size()) + " terminals exceed cap " +
                            std::to_string(cfg.max_terminals));
    auto index = [&](Vertex v) {
        return static_cast<int>(std::lower_bound(terms.begin(), terms.end(), v) - terms.begin());
    };
    const int k = static_cast<int>(terms.size());
    UnionFind uf(k);
    for (const auto& grp : groups)
        for (std::size_t j = 1; j < grp.size(); ++j) uf.unite(index(grp[0]), index(grp[j]));
    // Terminal masks of the merged groups (singletons dropped: they need nothing).
    std::vector<unsigned> block_mask;
    {
        std::vector<unsigned> by_root(static_cast<std::size_t>(k), 0);
        for (int i = 0; i < k; ++i) by_root[uf.find(i)] |= 1u << i;
        for (unsigned m : by_root)
            if (m != 0 && (m & (m - 1)) != 0) block_mask.push_back(m);
    }
    if (block_mask.empty()) return {Cost(0), {}};
    const int q = static_cast<int>(block_mask.size());
    if (q > 20) throw LimitExceeded("opt_forest: too many terminal groups");
    const std::size_t gm = std::size_t{1} << q;
    std::vector<Length> best(gm, kInf);
    std::vector<unsigned> choice(gm, 0);
    best[0] = 0;
    std::vector<Length> merged_cost(gm, kInf);
    std::vector<Vertex> merged_root(gm, -1);
    std::vector<std::vector<EdgeId>> merged_edges(shared_table ? 0 : gm);
    SubsetDp dp;
    if (shared_table) dp = run_dreyfus_wagner(g, terms);
    for (unsigned s = 1; s < gm; ++s) {
        unsigned tm = 0;
        for (int i = 0; i < q; ++i)
            if (s & (1u << i)) tm |= block_mask[i];
        if (shared_table) {
            for (Vertex v = 0; v < g.num_vertices(); ++v)
                if (dp.at(tm, v) < merged_cost[s]) {
                    merged_cost[s] = dp.at(tm, v);
                    merged_root[s] = v;
                }
            continue;
        }
        std::vector<Vertex> block;
        for (int i = 0; i < k; ++i)
            if (tm >> i & 1u) block.push_back(terms[i]);
        ExactResult r = tree_for(g, block, cfg);
        if (r.cost.is_finite()) {
            merged_cost[s] = r.cost.value();
            merged_edges[s] = std::move(r.edges);
        }
    }
    for (unsigned s = 1; s < gm; ++s) {
        unsigned low = s & (~s + 1);
        unsigned rest = s ^ low;
        for (unsigned sub = rest;; sub = (sub - 1) & rest) {
            unsigned part = sub | low;
            if (merged_cost[part] < kInf && best[s ^ part] < kInf &&
                merged_cost[part] + best[s ^ part] < best[s]) {
                best[s] = merged_cost[part] + best[s ^ part];
                choice[s] = part;
            }
            if (sub == 0) break;
        }
    }
    unsigned all = static_cast<unsigned>(gm - 1);
    if (best[all] >= kInf) return {Cost::infinity(), {}};
    std::vector<EdgeId> edges;
    for (unsigned s = all; s != 0; s ^= choice[s]) {
        unsigned part = choice[s];
        unsigned tm = 0;
        for (int i = 0; i < q; ++i)
            if (part & (1u << i)) tm |= block_mask[i];
        if (shared_table) collect(dp, g, tm, merged_root[part], edges);
        else edges.insert(edges.end(), merged_edges[part].begin(), merged_edges[part].end());
    }
    return {Cost(best[all]), spanning_forest_of(g, edges)};
}

ExactResult opt_forest(const WeightedGraph& g, const DemandSet& d, const OracleConfig& cfg) {
    std::vector<std::vector<Vertex>> groups;
    for (auto [s, t] : d.pairs()) groups.push_back({s, t});
    return opt_forest_with_groups(g, groups, cfg);
}

namespace {

// Union-find with undo, for the constrained enumeration.
class RollbackUf {
public:
    explicit RollbackUf(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
        for (int i = 0; i < n; ++i) parent_[i] = i;
    }
    int find(int x) const {
        while (parent_[x] != x) x = parent_[x];
        return x;
    }
    void unite_roots(int a, int b) {
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        history_.push_back(b);
    }
    void undo() {
        int b = history_.back();
        history_.pop_back();
        int a = parent_[b];
        size_[a] -= size_[b];
        parent_[b] = b;
    }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
    std::vector<int> history_;
};

struct ConstrainedSearch {
    const WeightedGraph& g;
    std::vector<std::pair<Vertex, Vertex>> need;
    std::vector<std::pair<Vertex, Vertex>> apart;
    RollbackUf uf;
    Length best = kInf;

    ConstrainedSearch(const WeightedGraph& graph) : g(graph), uf(graph.num_vertices()) {}

    bool still_reachable(int from) const {
        UnionFind tmp(g.num_vertices());
        for (Vertex v = 0; v < g.num_vertices(); ++v) tmp.unite(v, uf.find(v));
        for (EdgeId e = from; e < g.num_edges(); ++e) tmp.unite(g.edge(e).u, g.edge(e).v);
        for (auto [a, b] : need)
            if (!tmp.same(a, b)) return false;
        return true;
    }

    void dfs(int i, Length cost) {
        if (cost >= best) return;
        if (!still_reachable(i)) return;
        if (i == g.num_edges()) {
            best = cost;  // reachability with no edges left means all needs met
            return;
        }
        const Edge& e = g.edge(i);
        int ru = uf.find(e.u), rv = uf.find(e.v);
        if (ru != rv) {
            bool ok = true;
            for (auto [a, b] : apart) {
                int ra = uf.find(a), rb = uf.find(b);
                if ((ra == ru && rb == rv) || (ra == rv && rb == ru)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                uf.unite_roots(ru, rv);
                dfs(i + 1, cost + e.length);
                uf.undo();
            }
        }
        dfs(i + 1, cost);
    }
};

}  // namespace

Cost opt_forest_constrained(const WeightedGraph& g, const DemandSet& d, const ConstraintSpec& cs,
                            const OracleConfig& cfg) {
    for (const auto& grp : cs.must_link) {
        if (grp.empty()) throw InvalidInput("must_link group is empty");
        check_vertices(g, grp);
    }
    for (auto [a, b] : cs.must_separate) check_vertices(g, {a, b});
    if (cs.must_separate.empty()) {
        std::vector<std::vector<Vertex>> groups = cs.must_link;
        for (auto [s, t] : d.pairs()) groups.push_back({s, t});
        return opt_forest_with_groups(g, groups, cfg).cost;
    }
    for (auto [a, b] : cs.must_separate)
        if (a == b) return Cost::infinity();
    if (g.num_edges() > cfg.max_enum_edges)
        throw LimitExceeded("opt_forest_constrained: " + std::to_string(g.num_edges()) +
                            " edges exceed enumeration cap " + std::to_string(cfg.max_enum_edges));
    ConstrainedSearch search(g);
    for (auto [s, t] : d.pairs()) search.need.emplace_back(s, t);
    for (const auto& grp : cs.must_link)
        for (std::size_t j = 1; j < grp.size(); ++j) search.need.emplace_back(grp[0], grp[j]);
    search.apart = cs.must_separate;
    // A required pair that is also separated can never be satisfied.
    {
        UnionFind req(g.num_vertices());
        for (auto [a, b] : search.need) req.unite(a, b);
        for (auto [a, b] : search.apart)
            if (req.same(a, b)) return Cost::infinity();
    }
    search.dfs(0, 0);
    return search.best >= kInf ? Cost::infinity() : Cost(search.best);
}

}  // namespace sforest
