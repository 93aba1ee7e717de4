#include "sforest/tw_ptas.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "sforest/errors.hpp"

namespace sforest {

std::vector<Vertex> group(const WeightedGraph& g, const std::vector<Vertex>& X, const std::vector<Vertex>& S,
                          const Rational& r) {
    std::vector<Vertex> out = S;
    if (!S.empty()) {
        auto dist = multi_source_distances(g, S);
        for (Vertex x : X) {
            if (!g.valid_vertex(x)) throw InvalidInput("unknown vertex in X");
            if (dist[x].is_finite() && to_rational(dist[x].value()) <= r) out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Vertex> greedy_centers(const WeightedGraph& g, const std::vector<Vertex>& X, Length W,
                                   const Rational& eps) {
    std::vector<Vertex> xs = X;
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const Rational threshold = eps * to_rational(W);
    std::vector<Vertex> centers;
    std::vector<std::vector<Cost>> rows;
    for (Vertex x : xs) {
        bool far = true;
        for (const auto& row : rows) {
            Cost d = row[x];
            if (d.is_finite() && to_rational(d.value()) <= threshold) {
                far = false;
                break;
            }
        }
        if (far) {
            centers.push_back(x);
            rows.push_back(single_source_distances(g, x));
        }
    }
    return centers;
}

std::vector<NodeSets> node_sets(const WeightedGraph& g, const NiceTreeDecomposition& ntd, const DemandSet& d) {
    std::vector<NodeSets> out(ntd.nodes.size());
    std::vector<std::vector<Vertex>> mates(static_cast<std::size_t>(g.num_vertices()));
    for (auto [s, t] : d.pairs()) {
        mates[s].push_back(t);
        mates[t].push_back(s);
    }
    for (std::size_t i = 0; i < ntd.nodes.size(); ++i) {
        std::vector<Vertex> vs = ntd.nodes[i].bag;
        for (int c : ntd.nodes[i].children)
            vs.insert(vs.end(), out[c].subtree_vertices.begin(), out[c].subtree_vertices.end());
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        out[i].subtree_vertices = vs;
        for (Vertex v : vs)
            for (Vertex w : mates[v])
                if (!std::binary_search(vs.begin(), vs.end(), w)) {
                    out[i].active.push_back(v);
                    break;
                }
    }
    return out;
}

bool PartitionCollection::accepts(int node, const Partition& p) const {
    if (unrestricted.at(static_cast<std::size_t>(node))) return p.ground() == nodes[node].active;
    return allowed[node].count(p.encode()) > 0;
}

PartitionCollection full_partition_collection(const WeightedGraph& g, const NiceTreeDecomposition& ntd,
                                              const DemandSet& d) {
    PartitionCollection pc;
    pc.nodes = node_sets(g, ntd, d);
    pc.allowed.resize(ntd.nodes.size());
    pc.unrestricted.assign(ntd.nodes.size(), 1);
    return pc;
}

namespace {

using Mask = std::uint64_t;

struct BlockSearch {
    const std::vector<Mask>& groups;
    Mask full;
    long long limit;
    bool stop_quietly;
    long long transitions = 0;
    bool truncated = false;
    std::map<std::pair<Mask, int>, std::set<std::vector<Mask>>> memo;

    // Partitions of the uncovered part into at most depth blocks.
    const std::set<std::vector<Mask>>& reach(Mask covered, int depth) {
        auto key = std::make_pair(covered, depth);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::set<std::vector<Mask>> out;
        if (covered == full) {
            out.insert(std::vector<Mask>{});
        } else if (depth > 0) {
            for (Mask grp : groups) {
                if (++transitions > limit) {
                    if (!stop_quietly)
                        throw LimitExceeded("partition enumeration exceeded " + std::to_string(limit) + " sequences");
                    truncated = true;
                    break;
                }
                Mask block = grp & ~covered;
                if (block == 0) continue;
                for (const auto& rest : reach(covered | block, depth - 1)) {
                    std::vector<Mask> p = rest;
                    p.push_back(block);
                    std::sort(p.begin(), p.end());
                    out.insert(std::move(p));
                }
                if (truncated) break;
            }
        }
        return memo.emplace(key, std::move(out)).first->second;
    }
};

}  // namespace

PartitionCollection build_partition_collection(const WeightedGraph& g, const NiceTreeDecomposition& ntd,
                                               const DemandSet& d, const Rational& eps,
                                               const PartitionOptions& opts) {
    if (eps <= 0) throw InvalidInput("eps must be positive");
    PartitionCollection pc;
    pc.nodes = node_sets(g, ntd, d);
    pc.allowed.resize(ntd.nodes.size());
    pc.unrestricted.assign(ntd.nodes.size(), 0);
    const int k = std::max(ntd.width(), 0);
    // (k+1) * (1 + 2/eps), floored.
    Rational bound_q = Rational(k + 1) * (Rational(1) + Rational(2) / eps);
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), bound_q.get_num_mpz_t(), bound_q.get_den_mpz_t());
    const long size_bound = fl.fits_slong_p() ? std::max(1L, fl.get_si()) : 1L << 20;

    DistanceMatrix whole = all_pairs_distances(g);
    std::vector<Length> radii{0};
    for (const Cost& c : whole.d)
        if (c.is_finite()) radii.push_back(c.value());
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

    for (std::size_t i = 0; i < ntd.nodes.size(); ++i) {
        const auto& A = pc.nodes[i].active;
        if (A.size() > 60) throw LimitExceeded("active set too large for partition construction");
        if (A.empty()) {
            pc.allowed[i].insert(Partition().encode());
            continue;
        }
        std::vector<Vertex> centers;
        if (opts.mode == PartitionMode::pruned) {
            centers = A;
            centers.insert(centers.end(), ntd.nodes[i].bag.begin(), ntd.nodes[i].bag.end());
        } else if (opts.scope == DistanceScope::subtree) {
            centers = pc.nodes[i].subtree_vertices;
        } else {
            for (Vertex v = 0; v < g.num_vertices(); ++v) centers.push_back(v);
        }
        std::sort(centers.begin(), centers.end());
        centers.erase(std::unique(centers.begin(), centers.end()), centers.end());

        // Distance from each center to each active vertex.
        std::vector<std::vector<Cost>> dist(centers.size());
        if (opts.scope == DistanceScope::subtree) {
            Subgraph sub = induced_subgraph(g, pc.nodes[i].subtree_vertices);
            for (std::size_t c = 0; c < centers.size(); ++c) {
                Vertex sc = sub.from_original[centers[c]];
                std::vector<Cost> row(A.size(), Cost::infinity());
                if (sc >= 0) {
                    auto dd = single_source_distances(sub.graph, sc);
                    for (std::size_t a = 0; a < A.size(); ++a) row[a] = dd[sub.from_original[A[a]]];
                }
                dist[c] = row;
            }
        } else {
            for (std::size_t c = 0; c < centers.size(); ++c)
                for (Vertex a : A) dist[c].push_back(whole.at(centers[c], a));
        }

        std::unordered_set<Mask> group_set;
        for (Length r : radii) {
            std::vector<Mask> units;
            for (std::size_t c = 0; c < centers.size(); ++c) {
                Mask m = 0;
                for (std::size_t a = 0; a < A.size(); ++a)
                    if (dist[c][a].is_finite() && dist[c][a].value() <= r) m |= Mask{1} << a;
                if (m) units.push_back(m);
            }
            std::sort(units.begin(), units.end());
            units.erase(std::unique(units.begin(), units.end()), units.end());
            std::unordered_set<Mask> level{0}, seen{0};
            for (long step = 0; step < size_bound && !level.empty(); ++step) {
                std::unordered_set<Mask> next;
                for (Mask cur : level)
                    for (Mask u : units) {
                        Mask m = cur | u;
                        if (seen.insert(m).second) next.insert(m);
                    }
                level = std::move(next);
            }
            for (Mask m : seen)
                if (m) group_set.insert(m);
        }
        std::vector<Mask> groups(group_set.begin(), group_set.end());
        std::sort(groups.begin(), groups.end());

        const Mask full = A.size() == 64 ? ~Mask{0} : (Mask{1} << A.size()) - 1;
        const bool pruned = opts.mode == PartitionMode::pruned;
        BlockSearch search{.groups = groups, .full = full, .limit = pruned ? opts.pruned_cap : opts.enumeration_bound, .stop_quietly = pruned, .memo = {}};
        const auto& bases = search.reach(0, k + 1);
        pc.transitions += search.transitions;
        std::map<int, std::vector<std::vector<int>>> rho_cache;
        for (const auto& blocks : bases) {
            const int q = static_cast<int>(blocks.size());
            auto& rhos = rho_cache[q];
            if (rhos.empty()) rhos = all_set_partitions(q);
            for (const auto& rho : rhos) {
                std::vector<int> labels(A.size(), -1);
                for (int b = 0; b < q; ++b)
                    for (std::size_t a = 0; a < A.size(); ++a)
                        if (blocks[b] & (Mask{1} << a)) labels[a] = rho[b];
                pc.allowed[i].insert(Partition::from_labels(A, labels).encode());
            }
        }
    }
    return pc;
}

Partition induced_partition(const WeightedGraph& g, const std::vector<EdgeId>& forest, const std::vector<Vertex>& A) {
    UnionFind uf(g.num_vertices());
    for (EdgeId e : forest) uf.unite(g.edge(e).u, g.edge(e).v);
    std::vector<int> labels;
    for (Vertex a : A) labels.push_back(uf.find(a));
    return Partition::from_labels(A, labels);
}

bool conforms(const WeightedGraph& g, const std::vector<EdgeId>& forest, const NiceTreeDecomposition& ntd,
              const DemandSet& d, const PartitionCollection& pc) {
    (void)d;
    for (std::size_t i = 0; i < ntd.nodes.size(); ++i)
        if (!pc.accepts(static_cast<int>(i), induced_partition(g, forest, pc.nodes[i].active))) return false;
    return true;
}

namespace {

using Labels = std::vector<std::uint8_t>;

struct State {
    Mask h = 0;
    Labels alpha;  // over bag positions
    Labels beta;   // over bag positions
    Labels m;      // over active positions, values are beta labels

    std::string key() const {
        std::string s(reinterpret_cast<const char*>(&h), sizeof(h));
        s.append(alpha.begin(), alpha.end());
        s.append(beta.begin(), beta.end());
        s.append(m.begin(), m.end());
        return s;
    }
};

struct Entry {
    State st;
    Length cost;
    int b1 = -1;
    int b2 = -1;
};

struct Table {
    std::vector<Entry> entries;
    std::unordered_map<std::string, int> index;
};

// Relabels so that labels appear in order of first occurrence; applies the same
// relabeling to m.
void canonicalize(Labels& beta, Labels& m) {
    std::uint8_t map[256];
    std::fill(std::begin(map), std::end(map), 0xFF);
    std::uint8_t next = 0;
    for (auto& b : beta) {
        if (map[b] == 0xFF) map[b] = next++;
        b = map[b];
    }
    for (auto& x : m) {
        if (map[x] == 0xFF) throw std::logic_error("active class maps outside the bag partition");
        x = map[x];
    }
}

void canonicalize(Labels& l) {
    Labels none;
    canonicalize(l, none);
}

struct NodeInfo {
    std::vector<Vertex> bag;
    std::vector<EdgeId> bag_edges;  // sorted ids, bit positions
    std::vector<Vertex> active;
};

int position(const std::vector<Vertex>& sorted, Vertex v) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    if (it == sorted.end() || *it != v) return -1;
    return static_cast<int>(it - sorted.begin());
}

class Dp {
public:
    Dp(const WeightedGraph& g, const NiceTreeDecomposition& ntd, const DemandSet& d, const PartitionCollection& pc,
       const DpOptions& opts)
        : g_(g), ntd_(ntd), d_(d), pc_(pc), opts_(opts) {}

    DpResult run() {
        const std::size_t nn = ntd_.nodes.size();
        info_.resize(nn);
        tables_.resize(nn);
        for (std::size_t i = 0; i < nn; ++i) {
            info_[i].bag = ntd_.nodes[i].bag;
            if (info_[i].bag.size() > 12) throw LimitExceeded("bag too large for the dynamic program");
            for (EdgeId e = 0; e < g_.num_edges(); ++e)
                if (position(info_[i].bag, g_.edge(e).u) >= 0 && position(info_[i].bag, g_.edge(e).v) >= 0)
                    info_[i].bag_edges.push_back(e);
            if (info_[i].bag_edges.size() > 64) throw LimitExceeded("bag induces more than 64 edges");
            info_[i].active = pc_.nodes.at(i).active;
        }
        for (std::size_t i = 0; i < nn; ++i) {
            const NiceNode& nd = ntd_.nodes[i];
            switch (nd.kind) {
                case NiceKind::leaf: leaf(static_cast<int>(i)); break;
                case NiceKind::introduce: introduce(static_cast<int>(i)); break;
                case NiceKind::forget: forget(static_cast<int>(i)); break;
                case NiceKind::join: join(static_cast<int>(i)); break;
            }
            stats_.max_node_states = std::max<long long>(stats_.max_node_states, static_cast<long long>(tables_[i].entries.size()));
        }
        DpResult res;
        res.stats = stats_;
        const Table& root = tables_[ntd_.root];
        int best = -1;
        for (std::size_t e = 0; e < root.entries.size(); ++e)
            if (best < 0 || root.entries[e].cost < root.entries[best].cost) best = static_cast<int>(e);
        if (best < 0) return res;
        res.feasible = true;
        res.cost = Cost(root.entries[best].cost);
        res.edges = reconstruct(ntd_.root, best);
        return res;
    }

private:
    const WeightedGraph& g_;
    const NiceTreeDecomposition& ntd_;
    const DemandSet& d_;
    const PartitionCollection& pc_;
    DpOptions opts_;
    std::vector<NodeInfo> info_;
    std::vector<Table> tables_;
    DpStats stats_;

    bool allowed(int node, const State& st) {
        if (pc_.unrestricted[node]) return true;
        std::vector<int> labels(st.m.begin(), st.m.end());
        return pc_.accepts(node, Partition::from_labels(info_[node].active, labels));
    }

    void offer(int node, State st, Length cost, int b1, int b2) {
        ++stats_.generated;
        if (!allowed(node, st)) {
            ++stats_.pruned_by_collection;
            return;
        }
        for (std::size_t i = 0; i < st.alpha.size(); ++i)
            for (std::size_t j = i + 1; j < st.alpha.size(); ++j)
                if (st.alpha[i] == st.alpha[j] && st.beta[i] != st.beta[j])
                    throw std::logic_error("state with beta finer than alpha");
        Table& t = tables_[node];
        std::string k = st.key();
        auto it = t.index.find(k);
        if (it == t.index.end()) {
            if (++stats_.states > opts_.state_cap)
                throw LimitExceeded("dynamic program exceeded " + std::to_string(opts_.state_cap) + " states");
            t.index.emplace(std::move(k), static_cast<int>(t.entries.size()));
            t.entries.push_back({std::move(st), cost, b1, b2});
        } else if (cost < t.entries[it->second].cost) {
            t.entries[it->second].cost = cost;
            t.entries[it->second].b1 = b1;
            t.entries[it->second].b2 = b2;
        }
    }

    void leaf(int i) {
        const NodeInfo& in = info_[i];
        State st;
        st.alpha.assign(in.bag.size(), 0);
        st.beta.assign(in.bag.size(), 0);
        for (Vertex a : in.active) {
            int p = position(in.bag, a);
            if (p < 0) throw std::logic_error("leaf active vertex outside its bag");
            st.m.push_back(st.beta[p]);
        }
        offer(i, std::move(st), 0, -1, -1);
    }

    void introduce(int i) {
        const NiceNode& nd = ntd_.nodes[i];
        const int j = nd.children[0];
        const NodeInfo& in = info_[i];
        const NodeInfo& ch = info_[j];
        if (in.active != ch.active) throw InvalidInput("introduce node changes the active set; terminals must sit in leaves");
        const Vertex v = nd.vertex;
        const int pv = position(in.bag, v);
        const int nb = static_cast<int>(in.bag.size());
        // Child bag position -> parent bag position.
        std::vector<int> up(ch.bag.size());
        for (std::size_t p = 0; p < ch.bag.size(); ++p) up[p] = position(in.bag, ch.bag[p]);
        std::vector<int> edge_up(ch.bag_edges.size());
        for (std::size_t e = 0; e < ch.bag_edges.size(); ++e) edge_up[e] = position_edge(in, ch.bag_edges[e]);
        // Edges at v: (bit in parent, parent position of other endpoint).
        std::vector<std::pair<int, int>> inc;
        for (std::size_t e = 0; e < in.bag_edges.size(); ++e) {
            const Edge& ed = g_.edge(in.bag_edges[e]);
            if (ed.u == v || ed.v == v) inc.emplace_back(static_cast<int>(e), position(in.bag, ed.u == v ? ed.v : ed.u));
        }
        const unsigned subsets = 1u << inc.size();
        const Table& ct = tables_[j];
        for (int ci = 0; ci < static_cast<int>(ct.entries.size()); ++ci) {
            const Entry& ce = ct.entries[ci];
            Mask h0 = 0;
            for (std::size_t e = 0; e < edge_up.size(); ++e)
                if (ce.st.h & (Mask{1} << e)) h0 |= Mask{1} << edge_up[e];
            // Lift child labels to parent positions; v gets a fresh label.
            std::vector<int> a0(nb), b0(nb);
            for (std::size_t p = 0; p < ch.bag.size(); ++p) {
                a0[up[p]] = ce.st.alpha[p];
                b0[up[p]] = ce.st.beta[p];
            }
            const int fresh_a = 200, fresh_b = 200;
            a0[pv] = fresh_a;
            for (unsigned s = 0; s < subsets; ++s) {
                int common_beta = -1;
                bool ok = true;
                Mask h = h0;
                Length add = 0;
                std::vector<int> alpha = a0;
                for (std::size_t k = 0; k < inc.size(); ++k) {
                    if (!(s & (1u << k))) continue;
                    int x = inc[k].second;
                    if (common_beta < 0) common_beta = b0[x];
                    else if (b0[x] != common_beta) { ok = false; break; }
                    h |= Mask{1} << inc[k].first;
                    add += g_.edge(in.bag_edges[inc[k].first]).length;
                    int old = alpha[x];
                    for (int p = 0; p < nb; ++p)
                        if (alpha[p] == old) alpha[p] = fresh_a;
                }
                if (!ok) continue;
                Labels al(alpha.begin(), alpha.end());
                canonicalize(al);
                std::vector<int> options;
                if (common_beta >= 0) {
                    options.push_back(common_beta);
                } else {
                    std::vector<int> seen;
                    for (std::size_t p = 0; p < ch.bag.size(); ++p)
                        if (std::find(seen.begin(), seen.end(), ce.st.beta[p]) == seen.end()) seen.push_back(ce.st.beta[p]);
                    options = seen;
                    options.push_back(fresh_b);
                }
                for (int choice : options) {
                    State st;
                    st.h = h;
                    st.alpha = al;
                    std::vector<int> beta = b0;
                    beta[pv] = choice;
                    st.beta.assign(beta.begin(), beta.end());
                    st.m = ce.st.m;
                    canonicalize(st.beta, st.m);
                    offer(i, std::move(st), ce.cost + add, ci, -1);
                }
            }
        }
    }

    static int position_edge(const NodeInfo& in, EdgeId e) {
        auto it = std::lower_bound(in.bag_edges.begin(), in.bag_edges.end(), e);
        return static_cast<int>(it - in.bag_edges.begin());
    }

    void forget(int i) {
        const NiceNode& nd = ntd_.nodes[i];
        const int j = nd.children[0];
        const NodeInfo& in = info_[i];
        const NodeInfo& ch = info_[j];
        if (in.active != ch.active) throw std::logic_error("forget node changes the active set");
        const int pv = position(ch.bag, nd.vertex);
        std::vector<int> keep_edge;  // child bit -> parent bit or -1
        for (EdgeId e : ch.bag_edges) {
            int p = position_edge(in, e);
            keep_edge.push_back(p < static_cast<int>(in.bag_edges.size()) && in.bag_edges[p] == e ? p : -1);
        }
        const Table& ct = tables_[j];
        for (int ci = 0; ci < static_cast<int>(ct.entries.size()); ++ci) {
            const Entry& ce = ct.entries[ci];
            const auto& a = ce.st.alpha;
            const auto& b = ce.st.beta;
            // v may share its beta class with other bag vertices only if it is
            // already connected to one of them; a closed class must not be the
            // target of an active vertex.
            int beta_mates = 0, alpha_mates = 0;
            for (std::size_t p = 0; p < ch.bag.size(); ++p) {
                if (static_cast<int>(p) == pv) continue;
                if (b[p] == b[pv]) ++beta_mates;
                if (a[p] == a[pv]) ++alpha_mates;
            }
            if (beta_mates > 0 && alpha_mates == 0) continue;
            if (beta_mates == 0 && std::find(ce.st.m.begin(), ce.st.m.end(), b[pv]) != ce.st.m.end()) continue;
            State st;
            for (std::size_t e = 0; e < keep_edge.size(); ++e)
                if (keep_edge[e] >= 0 && (ce.st.h & (Mask{1} << e))) st.h |= Mask{1} << keep_edge[e];
            for (std::size_t p = 0; p < ch.bag.size(); ++p) {
                if (static_cast<int>(p) == pv) continue;
                st.alpha.push_back(a[p]);
                st.beta.push_back(b[p]);
            }
            st.m = ce.st.m;
            canonicalize(st.alpha);
            canonicalize(st.beta, st.m);
            offer(i, std::move(st), ce.cost, ci, -1);
        }
    }

    void join(int i) {
        const NiceNode& nd = ntd_.nodes[i];
        const int j1 = nd.children[0], j2 = nd.children[1];
        const NodeInfo& in = info_[i];
        const NodeInfo& c1 = info_[j1];
        const NodeInfo& c2 = info_[j2];
        for (Vertex a : c1.active)
            if (std::binary_search(c2.active.begin(), c2.active.end(), a))
                throw InvalidInput("join children share an active vertex; terminals must sit in leaves");
        // Demand pairs across the two sides, as (position in A1, position in A2).
        std::vector<std::pair<int, int>> cross;
        for (auto [s, t] : d_.pairs()) {
            int s1 = position(c1.active, s), t2 = position(c2.active, t);
            int t1 = position(c1.active, t), s2 = position(c2.active, s);
            if (s1 >= 0 && t2 >= 0) cross.emplace_back(s1, t2);
            if (t1 >= 0 && s2 >= 0) cross.emplace_back(t1, s2);
        }
        // Source of each parent active vertex.
        std::vector<std::pair<int, int>> src;  // (child 1 or 2, position)
        for (Vertex a : in.active) {
            int p1 = position(c1.active, a);
            if (p1 >= 0) src.emplace_back(1, p1);
            else src.emplace_back(2, position(c2.active, a));
        }
        Length h_len_cache = 0;
        (void)h_len_cache;
        std::unordered_map<std::string, std::vector<int>> by_key;
        const Table& t2 = tables_[j2];
        for (int e2 = 0; e2 < static_cast<int>(t2.entries.size()); ++e2) {
            const State& s = t2.entries[e2].st;
            std::string k(reinterpret_cast<const char*>(&s.h), sizeof(s.h));
            k.append(s.beta.begin(), s.beta.end());
            by_key[k].push_back(e2);
        }
        const Table& t1 = tables_[j1];
        const int nb = static_cast<int>(in.bag.size());
        for (int e1 = 0; e1 < static_cast<int>(t1.entries.size()); ++e1) {
            const Entry& x = t1.entries[e1];
            std::string k(reinterpret_cast<const char*>(&x.st.h), sizeof(x.st.h));
            k.append(x.st.beta.begin(), x.st.beta.end());
            auto it = by_key.find(k);
            if (it == by_key.end()) continue;
            Length hlen = 0;
            for (std::size_t e = 0; e < in.bag_edges.size(); ++e)
                if (x.st.h & (Mask{1} << e)) hlen += g_.edge(in.bag_edges[e]).length;
            for (int e2 : it->second) {
                const Entry& y = t2.entries[e2];
                bool ok = true;
                for (auto [p1, p2] : cross)
                    if (x.st.m[p1] != y.st.m[p2]) { ok = false; break; }
                if (!ok) continue;
                UnionFind uf(nb);
                for (int p = 0; p < nb; ++p)
                    for (int q = p + 1; q < nb; ++q)
                        if (x.st.alpha[p] == x.st.alpha[q] || y.st.alpha[p] == y.st.alpha[q]) uf.unite(p, q);
                State st;
                st.h = x.st.h;
                st.alpha.resize(nb);
                for (int p = 0; p < nb; ++p) st.alpha[p] = static_cast<std::uint8_t>(uf.find(p));
                canonicalize(st.alpha);
                st.beta = x.st.beta;
                for (auto [side, p] : src) st.m.push_back(side == 1 ? x.st.m[p] : y.st.m[p]);
                offer(i, std::move(st), x.cost + y.cost - hlen, e1, e2);
            }
        }
    }

    std::vector<EdgeId> reconstruct(int root, int entry) {
        std::vector<EdgeId> out;
        std::vector<std::pair<int, int>> stack{{root, entry}};
        while (!stack.empty()) {
            auto [node, e] = stack.back();
            stack.pop_back();
            const Entry& en = tables_[node].entries[e];
            for (std::size_t b = 0; b < info_[node].bag_edges.size(); ++b)
                if (en.st.h & (Mask{1} << b)) out.push_back(info_[node].bag_edges[b]);
            const auto& ch = ntd_.nodes[node].children;
            if (!ch.empty() && en.b1 >= 0) stack.emplace_back(ch[0], en.b1);
            if (ch.size() > 1 && en.b2 >= 0) stack.emplace_back(ch[1], en.b2);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

}  // namespace

DpResult conforming_dp(const WeightedGraph& g, const NiceTreeDecomposition& ntd, const DemandSet& d,
                       const PartitionCollection& pc, const DpOptions& opts) {
    if (pc.nodes.size() != ntd.nodes.size()) throw InvalidInput("partition collection does not match decomposition");
    Dp dp(g, ntd, d, pc, opts);
    DpResult res = dp.run();
    if (res.feasible) {
        Forest f(g, res.edges);
        auto val = validate_solution(g, d, f);
        if (!val.feasible || Cost(val.cost) != res.cost)
            throw std::logic_error("dynamic program witness failed verification");
        if (!conforms(g, res.edges, ntd, d, pc)) throw std::logic_error("dynamic program witness does not conform");
    }
    return res;
}

PtasResult tw_ptas(const WeightedGraph& g, const DemandSet& d, const Rational& eps,
                   const std::optional<TreeDecomposition>& td, const PtasOptions& opts) {
    if (eps <= 0) throw InvalidInput("eps must be positive");
    {
        UnionFind uf(g.num_vertices());
        for (const auto& e : g.edges()) uf.unite(e.u, e.v);
        for (auto [s, t] : d.pairs())
            if (!uf.same(s, t)) throw Infeasible("demand pair is disconnected");
    }
    Contraction simple = simplify_parallel_edges(g);
    TerminalGadget gadget = nicer_for_terminals(simple.graph, d, td);
    PtasResult out;
    out.width = gadget.ntd.width();
    out.internal_eps = eps / std::max(1, out.width);
    PartitionCollection pc = opts.full_collection
                                 ? full_partition_collection(gadget.graph, gadget.ntd, gadget.demands)
                                 : build_partition_collection(gadget.graph, gadget.ntd, gadget.demands,
                                                              out.internal_eps, opts.partitions);
    for (std::size_t i = 0; i < pc.allowed.size(); ++i) out.partitions += static_cast<long long>(pc.allowed[i].size());
    DpResult dp = conforming_dp(gadget.graph, gadget.ntd, gadget.demands, pc, opts.dp);
    out.stats = dp.stats;
    if (!dp.feasible) throw Infeasible("no forest conforms to the partition collection");
    out.edges = simple.map.lift(gadget.to_original(dp.edges));
    Length c = 0;
    for (EdgeId e : out.edges) c += g.edge(e).length;
    if (Cost(c) != dp.cost) throw std::logic_error("tw_ptas: lifted cost differs from the dynamic program");
    out.cost = Cost(c);
    return out;
}

PipelineResult psf_pipeline(const WeightedGraph& g, const DemandSet& d, const Rational& eps, int k,
                            const PtasOptions& opts) {
    if (k < 1) throw InvalidInput("k must be positive");
    if (!is_connected(g)) throw InvalidInput("pipeline requires a connected graph");
    PipelineResult out;
    auto classes = bfs_level_partition(g, 0, k);
    Length best = -1;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        Length len = 0;
        for (EdgeId e : classes[i]) len += g.edge(e).length;
        if (best < 0 || len < best) {
            best = len;
            out.chosen_class = static_cast<int>(i);
        }
    }
    out.chosen_class_length = best;
    const auto& chosen = classes[out.chosen_class];
    Contraction c = contract_edges(g, chosen);
    DemandSet cd = d.mapped(c.map.vertex_map, c.graph.num_vertices());
    out.contracted_width = validate(c.graph, heuristic_decomposition(c.graph)).width;
    out.inner = tw_ptas(c.graph, cd, eps, heuristic_decomposition(c.graph), opts);
    std::vector<EdgeId> all = c.map.lift(out.inner.edges);
    all.insert(all.end(), chosen.begin(), chosen.end());
    out.edges = prune_to_minimal_forest(g, d, all);
    Length cost = 0;
    for (EdgeId e : out.edges) cost += g.edge(e).length;
    out.cost = Cost(cost);
    if (!is_feasible(g, d, out.edges)) throw std::logic_error("pipeline output is infeasible");
    return out;
}

}  // namespace sforest
