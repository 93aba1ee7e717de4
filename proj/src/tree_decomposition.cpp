#include "sforest/tree_decomposition.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "sforest/errors.hpp"

namespace sforest {

std::string violation_name(TdViolation v) {
    switch (v) {
        case TdViolation::none: return "none";
        case TdViolation::not_a_tree: return "not_a_tree";
        case TdViolation::bad_bag: return "bad_bag";
        case TdViolation::vertex_coverage: return "vertex_coverage";
        case TdViolation::edge_coverage: return "edge_coverage";
        case TdViolation::connectivity: return "connectivity";
        case TdViolation::not_nice: return "not_nice";
    }
    return "unknown";
}

namespace {

TdValidation violation(TdViolation kind, std::string msg, Vertex v = -1, EdgeId e = -1) {
    TdValidation r;
    r.violation = kind;
    r.message = std::move(msg);
    r.witness_vertex = v;
    r.witness_edge = e;
    return r;
}

bool bag_has(const std::vector<Vertex>& bag, Vertex v) { return std::find(bag.begin(), bag.end(), v) != bag.end(); }

}  // namespace

TdValidation validate(const WeightedGraph& g, const TreeDecomposition& td) {
    const int nodes = static_cast<int>(td.bags.size());
    if (nodes == 0) return violation(TdViolation::not_a_tree, "decomposition has no nodes");
    if (static_cast<int>(td.tree_edges.size()) != nodes - 1)
        return violation(TdViolation::not_a_tree, "tree has " + std::to_string(td.tree_edges.size()) +
                                                      " edges for " + std::to_string(nodes) + " nodes");
    UnionFind uf(nodes);
    for (auto [a, b] : td.tree_edges) {
        if (a < 0 || a >= nodes || b < 0 || b >= nodes)
            return violation(TdViolation::not_a_tree, "tree edge references unknown node");
        if (!uf.unite(a, b)) return violation(TdViolation::not_a_tree, "tree edges contain a cycle");
    }
    if (td.root && (*td.root < 0 || *td.root >= nodes))
        return violation(TdViolation::not_a_tree, "root is not a node");
    for (int i = 0; i < nodes; ++i) {
        std::set<Vertex> seen;
        for (Vertex v : td.bags[i]) {
            if (!g.valid_vertex(v)) return violation(TdViolation::bad_bag, "bag " + std::to_string(i) + " has unknown vertex", v);
            if (!seen.insert(v).second)
                return violation(TdViolation::bad_bag, "bag " + std::to_string(i) + " repeats a vertex", v);
        }
    }
    const int n = g.num_vertices();
    std::vector<int> occurrences(static_cast<std::size_t>(n), 0);
    for (const auto& bag : td.bags)
        for (Vertex v : bag) ++occurrences[v];
    for (Vertex v = 0; v < n; ++v)
        if (occurrences[v] == 0)
            return violation(TdViolation::vertex_coverage, "vertex " + std::to_string(v) + " is in no bag", v);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        const Edge& ed = g.edge(e);
        bool covered = std::any_of(td.bags.begin(), td.bags.end(),
                                   [&](const auto& bag) { return bag_has(bag, ed.u) && bag_has(bag, ed.v); });
        if (!covered)
            return violation(TdViolation::edge_coverage, "edge " + std::to_string(e) + " is in no bag", -1, e);
    }
    std::vector<int> inner(static_cast<std::size_t>(n), 0);
    for (auto [a, b] : td.tree_edges)
        for (Vertex v : td.bags[a])
            if (bag_has(td.bags[b], v)) ++inner[v];
    for (Vertex v = 0; v < n; ++v)
        if (inner[v] != occurrences[v] - 1)
            return violation(TdViolation::connectivity,
                             "bags containing vertex " + std::to_string(v) + " are not connected", v);
    TdValidation ok;
    std::size_t mx = 0;
    for (const auto& bag : td.bags) mx = std::max(mx, bag.size());
    ok.width = static_cast<int>(mx) - 1;
    return ok;
}

int NiceTreeDecomposition::width() const {
    std::size_t mx = 0;
    for (const auto& nd : nodes) mx = std::max(mx, nd.bag.size());
    return static_cast<int>(mx) - 1;
}

TreeDecomposition NiceTreeDecomposition::as_tree_decomposition() const {
    TreeDecomposition td;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        td.bags.push_back(nodes[i].bag);
        for (int c : nodes[i].children) td.tree_edges.emplace_back(c, static_cast<int>(i));
    }
    if (root >= 0) td.root = root;
    return td;
}

TdValidation validate_nice(const WeightedGraph& g, const NiceTreeDecomposition& ntd) {
    const int nn = static_cast<int>(ntd.nodes.size());
    if (nn == 0 || ntd.root < 0 || ntd.root >= nn) return violation(TdViolation::not_a_tree, "missing root");
    std::vector<int> parents(static_cast<std::size_t>(nn), 0);
    for (int i = 0; i < nn; ++i) {
        const NiceNode& nd = ntd.nodes[i];
        if (!std::is_sorted(nd.bag.begin(), nd.bag.end()))
            return violation(TdViolation::not_nice, "bag of node " + std::to_string(i) + " is not sorted");
        for (int c : nd.children) {
            if (c < 0 || c >= i) return violation(TdViolation::not_nice, "child must precede node " + std::to_string(i));
            ++parents[c];
        }
        auto expect_children = [&](std::size_t k) { return nd.children.size() == k; };
        std::string where = "node " + std::to_string(i);
        switch (nd.kind) {
            case NiceKind::leaf:
                if (!expect_children(0) || nd.bag.size() > 1)
                    return violation(TdViolation::not_nice, where + ": leaf must be childless with at most one vertex");
                break;
            case NiceKind::join:
                if (!expect_children(2) || ntd.nodes[nd.children[0]].bag != nd.bag ||
                    ntd.nodes[nd.children[1]].bag != nd.bag)
                    return violation(TdViolation::not_nice, where + ": join children must share its bag");
                break;
            case NiceKind::introduce: {
                if (!expect_children(1)) return violation(TdViolation::not_nice, where + ": introduce needs one child");
                auto expect = ntd.nodes[nd.children[0]].bag;
                if (bag_has(expect, nd.vertex))
                    return violation(TdViolation::not_nice, where + ": introduced vertex already in child", nd.vertex);
                expect.push_back(nd.vertex);
                std::sort(expect.begin(), expect.end());
                if (expect != nd.bag) return violation(TdViolation::not_nice, where + ": introduce bag mismatch", nd.vertex);
                break;
            }
            case NiceKind::forget: {
                if (!expect_children(1)) return violation(TdViolation::not_nice, where + ": forget needs one child");
                auto expect = ntd.nodes[nd.children[0]].bag;
                auto it = std::find(expect.begin(), expect.end(), nd.vertex);
                if (it == expect.end())
                    return violation(TdViolation::not_nice, where + ": forgotten vertex not in child", nd.vertex);
                expect.erase(it);
                if (expect != nd.bag) return violation(TdViolation::not_nice, where + ": forget bag mismatch", nd.vertex);
                break;
            }
        }
    }
    for (int i = 0; i < nn; ++i) {
        int want = i == ntd.root ? 0 : 1;
        if (parents[i] != want)
            return violation(TdViolation::not_a_tree, "node " + std::to_string(i) + " has " + std::to_string(parents[i]) + " parents");
    }
    if (ntd.nodes[ntd.root].bag.size() > 1) return violation(TdViolation::not_nice, "root bag larger than one vertex");
    return validate(g, ntd.as_tree_decomposition());
}

namespace {

struct NiceBuilder {
    NiceTreeDecomposition out;

    int add(NiceKind kind, std::vector<Vertex> bag, std::vector<int> children, Vertex v) {
        std::sort(bag.begin(), bag.end());
        out.nodes.push_back({kind, std::move(bag), std::move(children), v});
        return static_cast<int>(out.nodes.size()) - 1;
    }

    // Chain from node `from` to a node whose bag is `target`.
    int transition(int from, const std::vector<Vertex>& target) {
        std::vector<Vertex> cur = out.nodes[from].bag;
        int node = from;
        for (Vertex x : std::vector<Vertex>(cur)) {
            if (bag_has(target, x)) continue;
            cur.erase(std::find(cur.begin(), cur.end(), x));
            node = add(NiceKind::forget, cur, {node}, x);
        }
        std::vector<Vertex> sorted_target = target;
        std::sort(sorted_target.begin(), sorted_target.end());
        for (Vertex x : sorted_target) {
            if (bag_has(cur, x)) continue;
            cur.push_back(x);
            node = add(NiceKind::introduce, cur, {node}, x);
        }
        return node;
    }

    int from_leaf(const std::vector<Vertex>& target) {
        std::vector<Vertex> sorted_target = target;
        std::sort(sorted_target.begin(), sorted_target.end());
        if (sorted_target.empty()) return add(NiceKind::leaf, {}, {}, -1);
        int node = add(NiceKind::leaf, {sorted_target[0]}, {}, sorted_target[0]);
        return transition(node, sorted_target);
    }
};

// Rebuilds node order children-first from a root, dropping unreachable nodes.
NiceTreeDecomposition reorder(const NiceTreeDecomposition& ntd) {
    NiceTreeDecomposition out;
    std::vector<int> new_id(ntd.nodes.size(), -1);
    std::vector<std::pair<int, bool>> stack{{ntd.root, false}};
    while (!stack.empty()) {
        auto [v, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
            NiceNode nd = ntd.nodes[v];
            for (int& c : nd.children) c = new_id[c];
            out.nodes.push_back(std::move(nd));
            new_id[v] = static_cast<int>(out.nodes.size()) - 1;
            continue;
        }
        stack.push_back({v, true});
        const auto& ch = ntd.nodes[v].children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back({*it, false});
    }
    out.root = static_cast<int>(out.nodes.size()) - 1;
    return out;
}

}  // namespace

NiceTreeDecomposition make_nice(const WeightedGraph& g, const TreeDecomposition& td, std::optional<int> root) {
    auto check = validate(g, td);
    if (!check.valid()) throw InvalidInput("make_nice: invalid decomposition: " + check.message);
    const int nodes = static_cast<int>(td.bags.size());
    int r = root ? *root : (td.root ? *td.root : 0);
    if (r < 0 || r >= nodes) throw InvalidInput("make_nice: root out of range");
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
    for (auto [a, b] : td.tree_edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    NiceBuilder nb;
    std::function<int(int, int)> build = [&](int t, int parent) -> int {
        std::vector<int> parts;
        for (int c : adj[t]) {
            if (c == parent) continue;
            int sub = build(c, t);
            parts.push_back(nb.transition(sub, td.bags[t]));
        }
        if (parts.empty()) return nb.from_leaf(td.bags[t]);
        int acc = parts[0];
        for (std::size_t i = 1; i < parts.size(); ++i)
            acc = nb.add(NiceKind::join, nb.out.nodes[acc].bag, {acc, parts[i]}, -1);
        return acc;
    };
    int top = build(r, -1);
    std::vector<Vertex> bag = nb.out.nodes[top].bag;
    while (bag.size() > 1) {
        Vertex x = bag.back();
        bag.pop_back();
        top = nb.add(NiceKind::forget, bag, {top}, x);
    }
    nb.out.root = top;
    return nb.out;
}

TreeDecomposition heuristic_decomposition(const WeightedGraph& g) {
    const int n = g.num_vertices();
    TreeDecomposition td;
    if (n == 0) {
        td.bags.push_back({});
        td.root = 0;
        return td;
    }
    std::vector<std::set<Vertex>> adj(static_cast<std::size_t>(n));
    for (const auto& e : g.edges()) {
        adj[e.u].insert(e.v);
        adj[e.v].insert(e.u);
    }
    std::vector<char> gone(static_cast<std::size_t>(n), 0);
    std::vector<int> pos(static_cast<std::size_t>(n), -1);
    std::vector<Vertex> order;
    std::vector<std::vector<Vertex>> nbrs;
    for (int step = 0; step < n; ++step) {
        Vertex best = -1;
        for (Vertex v = 0; v < n; ++v)
            if (!gone[v] && (best < 0 || adj[v].size() < adj[best].size())) best = v;
        std::vector<Vertex> nb(adj[best].begin(), adj[best].end());
        for (Vertex a : nb)
            for (Vertex b : nb)
                if (a != b) adj[a].insert(b);
        for (Vertex a : nb) adj[a].erase(best);
        gone[best] = 1;
        pos[best] = step;
        order.push_back(best);
        nbrs.push_back(nb);
        std::vector<Vertex> bag = nb;
        bag.push_back(best);
        std::sort(bag.begin(), bag.end());
        td.bags.push_back(bag);
    }
    for (int i = 0; i + 1 < n; ++i) {
        int parent = i + 1;
        if (!nbrs[i].empty()) {
            parent = n;
            for (Vertex w : nbrs[i]) parent = std::min(parent, pos[w]);
        }
        td.tree_edges.emplace_back(i, parent);
    }
    td.root = n - 1;
    return td;
}

std::vector<EdgeId> TerminalGadget::to_original(const std::vector<EdgeId>& edges) const {
    std::vector<EdgeId> out;
    for (EdgeId e : edges)
        if (edge_back.at(static_cast<std::size_t>(e)) >= 0) out.push_back(edge_back[e]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SplitInstance split_multi_pair_terminals(const WeightedGraph& g, const DemandSet& d) {
    SplitInstance cur;
    std::vector<Edge> edges = g.edges();
    std::vector<EdgeId> back(edges.size());
    for (std::size_t i = 0; i < back.size(); ++i) back[i] = static_cast<EdgeId>(i);
    int n = g.num_vertices();
    std::vector<Vertex> vback(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) vback[v] = v;
    std::vector<std::pair<Vertex, Vertex>> pairs = d.pairs();
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        std::vector<std::size_t> uses;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (pairs[i].first == v || pairs[i].second == v) uses.push_back(i);
        if (uses.size() <= 1) continue;
        std::size_t pick = edges.size();
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (edges[i].u == v || edges[i].v == v) {
                pick = i;
                break;
            }
        if (pick == edges.size()) throw Infeasible("terminal " + std::to_string(v) + " has no incident edge");
        Vertex w = edges[pick].u == v ? edges[pick].v : edges[pick].u;
        Length len = edges[pick].length;
        Vertex prev = v;
        std::vector<Vertex> chain;
        for (std::size_t j = 1; j < uses.size(); ++j) {
            Vertex nv = n++;
            vback.push_back(v);
            chain.push_back(nv);
            edges.push_back({prev, nv, 0});
            back.push_back(-1);
            prev = nv;
        }
        // The original edge now runs from the end of the chain.
        edges[pick] = {prev, w, len};
        for (std::size_t j = 1; j < uses.size(); ++j) {
            auto& p = pairs[uses[j]];
            if (p.first == v) p.first = chain[j - 1];
            else p.second = chain[j - 1];
        }
    }
    cur.graph = WeightedGraph(n, edges);
    cur.demands = DemandSet(n, pairs);
    cur.edge_back = back;
    cur.vertex_back = vback;
    return cur;
}

TerminalGadget nicer_for_terminals(const WeightedGraph& g_in, const DemandSet& d_in,
                                   const std::optional<TreeDecomposition>& td_in, bool split_multi_pair) {
    SplitInstance base_inst;
    bool changed = false;
    if (split_multi_pair) {
        base_inst = split_multi_pair_terminals(g_in, d_in);
        changed = base_inst.graph.num_vertices() != g_in.num_vertices();
    } else {
        base_inst.graph = g_in;
        base_inst.demands = d_in;
        base_inst.edge_back.resize(static_cast<std::size_t>(g_in.num_edges()));
        for (EdgeId e = 0; e < g_in.num_edges(); ++e) base_inst.edge_back[e] = e;
        base_inst.vertex_back.resize(static_cast<std::size_t>(g_in.num_vertices()));
        for (Vertex v = 0; v < g_in.num_vertices(); ++v) base_inst.vertex_back[v] = v;
    }
    const WeightedGraph& g = base_inst.graph;
    const int n = g.num_vertices();
    auto terms = base_inst.demands.terminals();

    TerminalGadget out;
    std::vector<Edge> edges = g.edges();
    out.edge_back = base_inst.edge_back;
    out.vertex_back = base_inst.vertex_back;
    std::vector<Vertex> pendant(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        Vertex t = terms[i];
        Vertex tp = n + static_cast<Vertex>(i);
        pendant[t] = tp;
        edges.push_back({t, tp, 0});
        out.edge_back.push_back(-1);
        out.vertex_back.push_back(out.vertex_back[t]);
    }
    const int n2 = n + static_cast<int>(terms.size());
    out.graph = WeightedGraph(n2, edges);
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (auto [s, t] : base_inst.demands.pairs()) pairs.emplace_back(pendant[s], pendant[t]);
    out.demands = DemandSet(n2, pairs);
    const WeightedGraph& g2 = out.graph;

    // Degree-1 vertices to hang off dedicated leaves; pendants (highest ids) first.
    std::vector<char> treated(static_cast<std::size_t>(n2), 0);
    std::vector<Vertex> anchor(static_cast<std::size_t>(n2), -1);
    for (Vertex v = n2 - 1; v >= 0; --v) {
        if (g2.degree(v) != 1) continue;
        Vertex w = g2.incident(v)[0].other;
        if (treated[w]) continue;
        treated[v] = 1;
        anchor[v] = w;
    }
    std::vector<Vertex> base_vertices;
    for (Vertex v = 0; v < n2; ++v)
        if (!treated[v]) base_vertices.push_back(v);
    Subgraph base = induced_subgraph(g2, base_vertices);

    TreeDecomposition base_td;
    if (td_in && !changed) {
        for (const auto& bag : td_in->bags) {
            std::vector<Vertex> nb;
            for (Vertex v : bag) {
                if (!g.valid_vertex(v)) throw InvalidInput("decomposition references unknown vertex");
                if (base.from_original[v] >= 0) nb.push_back(base.from_original[v]);
            }
            base_td.bags.push_back(nb);
        }
        base_td.tree_edges = td_in->tree_edges;
        base_td.root = td_in->root;
        auto chk = validate(g, *td_in);
        if (!chk.valid()) throw InvalidInput("supplied decomposition is invalid: " + chk.message);
    } else {
        base_td = heuristic_decomposition(base.graph);
    }
    NiceTreeDecomposition ntd = make_nice(base.graph, base_td);
    for (auto& nd : ntd.nodes) {
        for (Vertex& v : nd.bag) v = base.to_original[v];
        if (nd.vertex >= 0) nd.vertex = base.to_original[nd.vertex];
    }

    // Attach the gadget for each treated vertex.
    std::vector<int> parent(ntd.nodes.size(), -1);
    for (std::size_t i = 0; i < ntd.nodes.size(); ++i)
        for (int c : ntd.nodes[i].children) parent[c] = static_cast<int>(i);
    auto add = [&](NiceKind k, std::vector<Vertex> bag, std::vector<int> ch, Vertex v) {
        std::sort(bag.begin(), bag.end());
        ntd.nodes.push_back({k, std::move(bag), std::move(ch), v});
        parent.push_back(-1);
        int id = static_cast<int>(ntd.nodes.size()) - 1;
        for (int c : ntd.nodes[id].children) parent[c] = id;
        return id;
    };
    for (Vertex v = 0; v < n2; ++v) {
        if (!treated[v]) continue;
        Vertex w = anchor[v];
        int host = -1;
        for (std::size_t i = 0; i < ntd.nodes.size(); ++i)
            if (bag_has(ntd.nodes[i].bag, w)) {
                host = static_cast<int>(i);
                break;
            }
        if (host < 0) throw std::logic_error("nicer_for_terminals: anchor vertex missing from decomposition");
        const std::vector<Vertex> target = ntd.nodes[host].bag;
        int node = add(NiceKind::leaf, {v}, {}, v);
        node = add(NiceKind::introduce, {v, w}, {node}, w);
        node = add(NiceKind::forget, {w}, {node}, v);
        std::vector<Vertex> cur{w};
        for (Vertex x : target) {
            if (x == w) continue;
            cur.push_back(x);
            node = add(NiceKind::introduce, cur, {node}, x);
        }
        int old_parent = parent[host];
        int join = add(NiceKind::join, target, {host, node}, -1);
        if (old_parent < 0) {
            ntd.root = join;
        } else {
            for (int& c : ntd.nodes[old_parent].children)
                if (c == host) c = join;
            parent[join] = old_parent;
        }
    }
    out.ntd = reorder(ntd);
    auto chk = validate_nice(out.graph, out.ntd);
    if (!chk.valid()) throw std::logic_error("nicer_for_terminals produced an invalid decomposition: " + chk.message);
    return out;
}

NicerReport check_nicer_properties(const WeightedGraph& g, const DemandSet& d, const NiceTreeDecomposition& ntd) {
    NicerReport r;
    auto terms = d.terminals();
    for (std::size_t i = 0; i < ntd.nodes.size(); ++i) {
        const NiceNode& nd = ntd.nodes[i];
        if (nd.kind == NiceKind::introduce && g.degree(nd.vertex) == 1 &&
            std::binary_search(terms.begin(), terms.end(), nd.vertex)) {
            r.ok = false;
            r.message = "node " + std::to_string(i) + " introduces degree-1 terminal " + std::to_string(nd.vertex);
            return r;
        }
        if (nd.kind == NiceKind::join)
            for (Vertex v : nd.bag)
                if (g.degree(v) == 1) {
                    r.ok = false;
                    r.message = "join node " + std::to_string(i) + " holds degree-1 vertex " + std::to_string(v);
                    return r;
                }
    }
    for (Vertex t : terms)
        if (g.degree(t) != 1) {
            r.ok = false;
            r.message = "terminal " + std::to_string(t) + " does not have degree 1";
            return r;
        }
    return r;
}

}  // namespace sforest
