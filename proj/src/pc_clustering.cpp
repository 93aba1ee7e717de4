#include "sforest/pc_clustering.hpp"

#include <algorithm>
#include <optional>

#include "sforest/errors.hpp"

namespace sforest {

std::string event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::merge: return "merge";
        case EventKind::vertex_death: return "vertex_death";
        case EventKind::cluster_deactivation: return "cluster_deactivation";
    }
    return "unknown";
}

Rational DualState::y_at(int cluster, Vertex v) const {
    auto it = y.find({cluster, v});
    return it == y.end() ? Rational(0) : it->second;
}

bool DualState::contains(int cluster, Vertex v) const {
    const auto& m = clusters.at(static_cast<std::size_t>(cluster)).members;
    return std::binary_search(m.begin(), m.end(), v);
}

Rational DualState::flat_sum(int cluster) const {
    Rational s = 0;
    for (auto it = y.lower_bound({cluster, -1}); it != y.end() && it->first.first == cluster; ++it) s += it->second;
    return s;
}

Rational DualState::nested_sum(int cluster) const {
    const Cluster& c = clusters.at(static_cast<std::size_t>(cluster));
    Rational s = flat_sum(cluster);
    if (c.left >= 0) s += nested_sum(c.left);
    if (c.right >= 0) s += nested_sum(c.right);
    return s;
}

Rational DualState::phi_sum(int cluster) const {
    Rational s = 0;
    for (Vertex v : clusters.at(static_cast<std::size_t>(cluster)).members) s += phi.at(static_cast<std::size_t>(v));
    return s;
}

Rational DualState::vertex_load(Vertex v) const {
    Rational s = 0;
    for (const auto& [key, val] : y)
        if (key.second == v) s += val;
    return s;
}

Rational DualState::edge_load(const WeightedGraph& g, EdgeId e) const {
    const Edge& ed = g.edge(e);
    Rational s = 0;
    for (const auto& [key, val] : y) {
        bool cu = contains(key.first, ed.u), cv = contains(key.first, ed.v);
        if (cu != cv) s += val;
    }
    return s;
}

namespace {

int new_cluster(DualState& st, std::vector<Vertex> members, int left, int right, EdgeId e) {
    Cluster c;
    c.members = std::move(members);
    std::sort(c.members.begin(), c.members.end());
    c.left = left;
    c.right = right;
    c.merge_edge = e;
    st.clusters.push_back(std::move(c));
    return static_cast<int>(st.clusters.size()) - 1;
}

}  // namespace

GrowthResult growth_phase(const WeightedGraph& g, const std::vector<Rational>& phi) {
    const int n = g.num_vertices();
    if (static_cast<int>(phi.size()) != n) throw InvalidInput("potential vector size mismatch");
    for (const auto& p : phi)
        if (p < 0) throw InvalidInput("negative potential");
    GrowthResult res;
    DualState& st = res.dual;
    st.phi = phi;
    st.current.resize(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) st.current[v] = new_cluster(st, {v}, -1, -1, -1);

    std::vector<Rational> own(static_cast<std::size_t>(n));    // sum_S y_{S,v}
    std::vector<Rational> reach(static_cast<std::size_t>(n));  // sum_{S ni v} y_S
    Rational time = 0;

    auto live = [&](Vertex v) { return own[v] < st.phi[v]; };
    auto kappa = [&](int c) {
        int k = 0;
        for (Vertex v : st.clusters[c].members)
            if (live(v)) ++k;
        return k;
    };

    auto merge_tight = [&]() {
        while (true) {
            EdgeId found = -1;
            for (EdgeId e = 0; e < g.num_edges(); ++e) {
                const Edge& ed = g.edge(e);
                if (st.current[ed.u] == st.current[ed.v]) continue;
                if (reach[ed.u] + reach[ed.v] == to_rational(ed.length)) {
                    found = e;
                    break;
                }
            }
            if (found < 0) return;
            const Edge& ed = g.edge(found);
            int a = st.current[ed.u], b = st.current[ed.v];
            std::vector<Vertex> m = st.clusters[a].members;
            m.insert(m.end(), st.clusters[b].members.begin(), st.clusters[b].members.end());
            int c = new_cluster(st, std::move(m), a, b, found);
            st.clusters[a].parent = c;
            st.clusters[b].parent = c;
            for (Vertex v : st.clusters[c].members) st.current[v] = c;
            res.f1.push_back(found);
            res.trace.push_back({time, EventKind::merge, {found, a, b, c}});
        }
    };

    merge_tight();
    while (true) {
        std::vector<int> roots;
        for (Vertex v = 0; v < n; ++v)
            if (st.current[v] != -1 && live(v)) roots.push_back(st.current[v]);
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        if (roots.empty()) break;
        std::vector<int> kap(st.clusters.size(), 0);
        for (int c : roots) kap[c] = kappa(c);

        std::optional<Rational> eta;
        auto consider = [&](const Rational& t) {
            if (!eta || t < *eta) eta = t;
        };
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            const Edge& ed = g.edge(e);
            int cu = st.current[ed.u], cv = st.current[ed.v];
            if (cu == cv) continue;
            int rate = (kap[cu] > 0) + (kap[cv] > 0);
            if (rate == 0) continue;
            consider((to_rational(ed.length) - reach[ed.u] - reach[ed.v]) / rate);
        }
        for (Vertex v = 0; v < n; ++v)
            if (live(v)) consider((st.phi[v] - own[v]) * kap[st.current[v]]);

        const Rational step = *eta;
        std::vector<Vertex> was_live;
        for (Vertex v = 0; v < n; ++v)
            if (live(v)) was_live.push_back(v);
        for (int c : roots) {
            const Rational share = step / kap[c];
            for (Vertex v : st.clusters[c].members) {
                reach[v] += step;
                if (live(v)) {
                    own[v] += share;
                    st.y[{c, v}] += share;
                }
            }
        }
        time += step;
        ++res.iterations;
        for (Vertex v : was_live)
            if (!live(v)) res.trace.push_back({time, EventKind::vertex_death, {v}});
        for (int c : roots)
            if (kappa(c) == 0) res.trace.push_back({time, EventKind::cluster_deactivation, {c}});
        merge_tight();
    }
    // Drop explicit zero entries so the map only stores positive values.
    for (auto it = st.y.begin(); it != st.y.end();) {
        if (it->second == 0)
            it = st.y.erase(it);
        else
            ++it;
    }
    return res;
}

PruningResult pruning_phase(const WeightedGraph& g, const std::vector<EdgeId>& f1, const DualState& dual) {
    PruningResult out;
    const int nc = static_cast<int>(dual.clusters.size());
    std::vector<Rational> nested(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) {  // children precede parents
        const Cluster& cl = dual.clusters[c];
        nested[c] = dual.flat_sum(c);
        if (cl.left >= 0) nested[c] += nested[cl.left];
        if (cl.right >= 0) nested[c] += nested[cl.right];
    }
    for (int c = 0; c < nc; ++c) {
        Rational ps = dual.phi_sum(c);
        bool by_nested = nested[c] == ps;
        bool by_flat = dual.flat_sum(c) == ps;
        if (by_nested) out.tight_set.push_back(c);
        if (by_nested != by_flat) ++out.flat_sum_disagreements;
    }
    std::vector<EdgeId> f2 = f1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int c : out.tight_set) {
            EdgeId only = -1;
            int count = 0;
            for (EdgeId e : f2) {
                if (dual.contains(c, g.edge(e).u) != dual.contains(c, g.edge(e).v)) {
                    ++count;
                    only = e;
                }
            }
            if (count == 1) {
                f2.erase(std::find(f2.begin(), f2.end(), only));
                changed = true;
            }
        }
    }
    std::sort(f2.begin(), f2.end());
    out.f2 = std::move(f2);
    return out;
}

DualReport verify_dual(const WeightedGraph& g, const DualState& dual, bool require_tight) {
    DualReport r;
    auto fail = [&](std::string msg) {
        r.feasible = false;
        r.violations.push_back(std::move(msg));
    };
    const int n = g.num_vertices();
    if (static_cast<int>(dual.phi.size()) != n) {
        fail("potential vector size mismatch");
        r.tight = false;
        return r;
    }
    const int nc = static_cast<int>(dual.clusters.size());
    for (const auto& [key, val] : dual.y) {
        if (key.first < 0 || key.first >= nc) {
            fail("y entry references unknown cluster " + std::to_string(key.first));
            continue;
        }
        if (!dual.contains(key.first, key.second))
            fail("y entry (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                 ") has vertex outside its cluster");
        if (val < 0)
            fail("nonnegativity violated: y(" + std::to_string(key.first) + "," + std::to_string(key.second) +
                 ") = " + to_string(val));
    }
    if (!r.feasible) {
        r.tight = false;
        return r;
    }
    for (int a = 0; a < nc; ++a)
        for (int b = a + 1; b < nc; ++b) {
            const auto& ma = dual.clusters[a].members;
            const auto& mb = dual.clusters[b].members;
            std::vector<Vertex> common;
            std::set_intersection(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(common));
            if (!common.empty() && common.size() != ma.size() && common.size() != mb.size())
                fail("laminarity violated by clusters " + std::to_string(a) + " and " + std::to_string(b));
        }
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        Rational load = dual.edge_load(g, e);
        if (load > to_rational(g.edge(e).length))
            fail("edge packing violated at edge " + std::to_string(e) + ": " + to_string(load) + " > " +
                 std::to_string(g.edge(e).length));
    }
    std::vector<Rational> own(static_cast<std::size_t>(n));
    for (const auto& [key, val] : dual.y) own[key.second] += val;
    for (Vertex v = 0; v < n; ++v) {
        if (own[v] > dual.phi[v])
            fail("potential bound violated at vertex " + std::to_string(v) + ": " + to_string(own[v]) + " > " +
                 to_string(dual.phi[v]));
        if (own[v] != dual.phi[v]) {
            r.tight = false;
            if (require_tight)
                r.violations.push_back("potential bound not tight at vertex " + std::to_string(v) + ": " +
                                       to_string(own[v]) + " < " + to_string(dual.phi[v]));
        }
    }
    if (!r.feasible) r.tight = false;
    return r;
}

ClusteringResult pc_clustering(const WeightedGraph& g_in, const DemandSet& d, const Rational& eps) {
    if (eps <= 0) throw InvalidInput("eps must be positive");
    ClusteringResult out;
    out.seed = gw_steiner_forest(g_in, d);
    out.seed_cost = out.seed.forest.cost(g_in);
    out.contracted = contract_edges(g_in, out.seed.forest.edges());
    const WeightedGraph& g = out.contracted.graph;
    std::vector<Rational> phi(static_cast<std::size_t>(g.num_vertices()));
    for (const auto& tc : out.seed.tree_components) {
        Length c = 0;
        for (EdgeId e : tc.edges) c += g_in.edge(e).length;
        phi[out.contracted.map.vertex_map[tc.vertices[0]]] = to_rational(c) / eps;
    }
    auto growth = growth_phase(g, phi);
    auto pruning = pruning_phase(g, growth.f1, growth.dual);
    out.f1 = growth.f1;
    out.f2 = pruning.f2;
    out.dual = std::move(growth.dual);
    out.trace = std::move(growth.trace);
    out.tight_set = pruning.tight_set;
    out.flat_sum_disagreements = pruning.flat_sum_disagreements;

    std::vector<EdgeId> full = out.contracted.map.lift(out.f2);
    full.insert(full.end(), out.seed.forest.edges().begin(), out.seed.forest.edges().end());
    Forest f(g_in, full, true);
    auto comps = tree_components_of(g_in, f.edges());
    auto label = f.component_labels(g_in);
    for (const auto& c : comps) {
        out.trees.push_back(c.edges);
        std::vector<std::pair<Vertex, Vertex>> part;
        for (auto [s, t] : d.pairs())
            if (label[s] == label[c.vertices[0]] && label[t] == label[c.vertices[0]]) part.emplace_back(s, t);
        out.demand_parts.emplace_back(g_in.num_vertices(), part);
    }
    return out;
}

}  // namespace sforest
