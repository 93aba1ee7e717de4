#include "sforest/instance_gen.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "sforest/errors.hpp"

namespace sforest {

namespace {

using Rng = std::mt19937_64;

std::uint64_t below(Rng& rng, std::uint64_t n) { return rng() % n; }

Length draw_length(Rng& rng, Length max_len) { return 1 + static_cast<Length>(below(rng, static_cast<std::uint64_t>(max_len))); }

// demand_count distinct pairs of distinct vertices.
DemandSet random_pairs(Rng& rng, int n, int demand_count) {
    if (demand_count < 0) throw InvalidInput("negative demand count");
    long long possible = static_cast<long long>(n) * (n - 1) / 2;
    if (demand_count > possible) throw InvalidInput("more demands than vertex pairs");
    std::set<std::pair<Vertex, Vertex>> seen;
    std::vector<std::pair<Vertex, Vertex>> pairs;
    while (static_cast<int>(pairs.size()) < demand_count) {
        Vertex s = static_cast<Vertex>(below(rng, n));
        Vertex t = static_cast<Vertex>(below(rng, n));
        if (s == t) continue;
        if (seen.insert(std::minmax(s, t)).second) pairs.emplace_back(s, t);
    }
    return DemandSet(n, pairs);
}

void shuffle(Rng& rng, std::vector<Vertex>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(rng, i)]);
}

}  // namespace

GeneratedInstance gen_random(int n, int m, int demand_count, std::uint64_t seed, Length max_len) {
    if (n < 1) throw InvalidInput("gen_random: n must be positive");
    if (m < n - 1) throw InvalidInput("gen_random: m must be at least n - 1");
    if (static_cast<long long>(m) > static_cast<long long>(n) * (n - 1) / 2)
        throw InvalidInput("gen_random: too many edges for a simple graph");
    if (max_len < 1) throw InvalidInput("gen_random: max_len must be positive");
    Rng rng(seed);
    std::vector<Vertex> label(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) label[i] = i;
    shuffle(rng, label);
    std::set<std::pair<Vertex, Vertex>> present;
    std::vector<Edge> edges;
    for (int i = 1; i < n; ++i) {
        Vertex a = label[i], b = label[below(rng, i)];
        present.insert(std::minmax(a, b));
        edges.push_back({a, b, draw_length(rng, max_len)});
    }
    while (static_cast<int>(edges.size()) < m) {
        Vertex a = static_cast<Vertex>(below(rng, n)), b = static_cast<Vertex>(below(rng, n));
        if (a == b || !present.insert(std::minmax(a, b)).second) continue;
        edges.push_back({a, b, draw_length(rng, max_len)});
    }
    GeneratedInstance out{WeightedGraph(n, std::move(edges)), {}};
    out.demands = random_pairs(rng, n, demand_count);
    return out;
}

GeneratedInstance gen_grid(int w, int h, int demand_count, std::uint64_t seed, Length max_len) {
    if (w < 1 || h < 1) throw InvalidInput("gen_grid: sizes must be positive");
    if (max_len < 1) throw InvalidInput("gen_grid: max_len must be positive");
    Rng rng(seed);
    const int n = w * h;
    std::vector<Edge> edges;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            Vertex v = r * w + c;
            if (c + 1 < w) edges.push_back({v, v + 1, draw_length(rng, max_len)});
            if (r + 1 < h) edges.push_back({v, v + w, draw_length(rng, max_len)});
        }
    GeneratedInstance out{WeightedGraph(n, std::move(edges)), {}};
    out.demands = random_pairs(rng, n, demand_count);
    return out;
}

SpInstance gen_random_sp(int n_ops, std::uint64_t seed, int demand_count) {
    if (n_ops < 1) throw InvalidInput("gen_random_sp: n_ops must be positive");
    Rng rng(seed);
    struct Node {
        SpKind kind;
        int left, right;
        Vertex x, y, mid;
    };
    std::vector<Node> nodes{{SpKind::edge, -1, -1, 0, 1, -1}};
    std::vector<int> leaves{0};
    int n = 2;
    auto leaf = [&](Vertex x, Vertex y) {
        nodes.push_back({SpKind::edge, -1, -1, x, y, -1});
        leaves.push_back(static_cast<int>(nodes.size()) - 1);
        return static_cast<int>(nodes.size()) - 1;
    };
    // Expanding a leaf in place keeps parent links valid.
    while (static_cast<int>(leaves.size()) < n_ops) {
        std::size_t pick = below(rng, leaves.size());
        int id = leaves[pick];
        leaves.erase(leaves.begin() + static_cast<long>(pick));
        Vertex x = nodes[id].x, y = nodes[id].y;
        std::uint64_t choice = below(rng, 4);
        if (choice < 2) {
            Vertex w = n++;
            int l = leaf(x, w), r = leaf(w, y);
            nodes[id] = {SpKind::series, l, r, x, y, w};
        } else if (choice == 2 || static_cast<int>(leaves.size()) + 3 > n_ops) {
            int l = leaf(x, y), r = leaf(x, y);
            nodes[id] = {SpKind::parallel, l, r, x, y, -1};
        } else {
            Vertex w = n++;
            int l = leaf(x, y);
            int a = leaf(x, w), b = leaf(w, y);
            nodes.push_back({SpKind::series, a, b, x, y, w});
            int r = static_cast<int>(nodes.size()) - 1;
            nodes[id] = {SpKind::parallel, l, r, x, y, -1};
        }
    }
    SpInstance out;
    std::vector<Edge> edges;
    std::function<int(int)> emit = [&](int id) -> int {
        const Node& nd = nodes[id];
        SpNode s;
        s.kind = nd.kind;
        s.x = nd.x;
        s.y = nd.y;
        s.mid = nd.mid;
        if (nd.kind == SpKind::edge) {
            s.edge = static_cast<EdgeId>(edges.size());
            edges.push_back({nd.x, nd.y, draw_length(rng, 100)});
        } else {
            s.left = emit(nd.left);
            s.right = emit(nd.right);
        }
        out.tree.nodes.push_back(s);
        return static_cast<int>(out.tree.nodes.size()) - 1;
    };
    emit(0);
    out.graph = WeightedGraph(n, std::move(edges));
    int count = demand_count;
    if (count < 0) count = static_cast<int>(below(rng, static_cast<std::uint64_t>(n / 2 + 1)));
    if (2 * count > n) throw InvalidInput("gen_random_sp: too many demands for distinct endpoints");
    std::vector<Vertex> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[i] = i;
    shuffle(rng, order);
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (int i = 0; i < count; ++i) pairs.emplace_back(order[2 * i], order[2 * i + 1]);
    out.demands = DemandSet(n, pairs);
    return out;
}

KTreeInstance gen_partial_ktree(int n, int k, int demand_count, std::uint64_t seed, Length max_len) {
    if (k < 1 || n < k + 1) throw InvalidInput("gen_partial_ktree: need n >= k + 1 >= 2");
    Rng rng(seed);
    KTreeInstance out;
    std::vector<Edge> edges;
    std::vector<Vertex> first;
    for (Vertex v = 0; v <= k; ++v) first.push_back(v);
    // Random spanning tree of the first clique plus each remaining clique edge with probability 1/2.
    std::set<std::pair<Vertex, Vertex>> present;
    for (Vertex v = 1; v <= k; ++v) {
        Vertex u = static_cast<Vertex>(below(rng, v));
        present.insert({u, v});
        edges.push_back({u, v, draw_length(rng, max_len)});
    }
    for (Vertex v = 1; v <= k; ++v)
        for (Vertex u = 0; u < v; ++u)
            if (!present.count({u, v}) && below(rng, 2) == 0) {
                present.insert({u, v});
                edges.push_back({u, v, draw_length(rng, max_len)});
            }
    out.td.bags.push_back(first);
    for (Vertex v = k + 1; v < n; ++v) {
        int host = static_cast<int>(below(rng, out.td.bags.size()));
        std::vector<Vertex> bag = out.td.bags[host];
        if (static_cast<int>(bag.size()) == k + 1) bag.erase(bag.begin() + static_cast<long>(below(rng, bag.size())));
        Vertex anchor = bag[below(rng, bag.size())];
        for (Vertex u : bag)
            if (u == anchor || below(rng, 2) == 0) edges.push_back({u, v, draw_length(rng, max_len)});
        bag.push_back(v);
        std::sort(bag.begin(), bag.end());
        out.td.bags.push_back(bag);
        out.td.tree_edges.emplace_back(host, static_cast<int>(out.td.bags.size()) - 1);
    }
    out.td.root = 0;
    out.graph = WeightedGraph(n, std::move(edges));
    out.demands = random_pairs(rng, n, demand_count);
    return out;
}

bool RFormula::holds(const std::vector<bool>& assignment) const {
    auto value = [&](const Literal& l) {
        if (l.kind == Literal::zero) return false;
        if (l.kind == Literal::one) return true;
        return static_cast<bool>(assignment.at(static_cast<std::size_t>(l.var)));
    };
    for (const auto& c : clauses) {
        bool a = value(c[0]), b = value(c[1]), z = value(c[2]);
        if (a != z && b != z) return false;
    }
    return true;
}

RFormula nae_to_rsat(int n, const std::vector<std::array<int, 3>>& nae) {
    RFormula f;
    f.num_vars = n + static_cast<int>(nae.size());
    for (std::size_t j = 0; j < nae.size(); ++j) {
        for (int v : nae[j])
            if (v < 0 || v >= n) throw InvalidInput("nae_to_rsat: variable out of range");
        Literal a = Literal::of(nae[j][0]), b = Literal::of(nae[j][1]), c = Literal::of(nae[j][2]);
        Literal d = Literal::of(n + static_cast<int>(j));
        f.clauses.push_back({a, b, d});
        f.clauses.push_back({c, d, Literal::constant(false)});
        f.clauses.push_back({c, d, Literal::constant(true)});
    }
    return f;
}

RFormula random_rformula(int max_vars, int m, std::uint64_t seed) {
    if (max_vars < 0 || m < 0) throw InvalidInput("random_rformula: negative size");
    Rng rng(seed);
    RFormula f;
    for (int j = 0; j < m; ++j) {
        std::array<Literal, 3> c;
        for (auto& l : c) {
            std::uint64_t r = below(rng, 6);
            if (max_vars == 0 || r == 0) l = Literal::constant(false);
            else if (r == 1) l = Literal::constant(true);
            else l = Literal::of(static_cast<int>(below(rng, static_cast<std::uint64_t>(max_vars))));
        }
        f.clauses.push_back(c);
    }
    std::vector<int> renum(static_cast<std::size_t>(max_vars), -1);
    for (auto& c : f.clauses)
        for (auto& l : c)
            if (l.kind == Literal::variable) {
                if (renum[l.var] < 0) renum[l.var] = f.num_vars++;
                l.var = renum[l.var];
            }
    return f;
}

HardnessInstance gen_hardness(const RFormula& f) {
    const int n = f.num_vars;
    const int m = static_cast<int>(f.clauses.size());
    HardnessInstance out;
    const Vertex v0 = 0, v1 = 1;
    auto x = [&](int i) { return 2 + i; };
    auto a = [&](int j) { return 2 + n + 3 * j; };
    const int total = 2 + n + 3 * m;
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        edges.push_back({x(i), v0, 1});
        edges.push_back({x(i), v1, 1});
    }
    std::vector<std::pair<Vertex, Vertex>> pairs;
    auto vertex_of = [&](const Literal& l) -> Vertex {
        if (l.kind == Literal::zero) return v0;
        if (l.kind == Literal::one) return v1;
        if (l.var < 0 || l.var >= n) throw InvalidInput("gen_hardness: variable out of range");
        return x(l.var);
    };
    for (int j = 0; j < m; ++j) {
        Vertex aj = a(j), bj = a(j) + 1, cj = a(j) + 2;
        edges.push_back({aj, v0, 1});
        edges.push_back({aj, v1, 1});
        edges.push_back({bj, v0, 1});
        edges.push_back({bj, v1, 1});
        edges.push_back({cj, aj, 1});
        edges.push_back({cj, bj, 1});
        pairs.emplace_back(vertex_of(f.clauses[j][0]), aj);
        pairs.emplace_back(vertex_of(f.clauses[j][1]), bj);
        pairs.emplace_back(vertex_of(f.clauses[j][2]), cj);
    }
    out.graph = WeightedGraph(total, std::move(edges));
    out.demands = DemandSet(total, pairs);
    out.threshold = n + 3 * m;
    out.td.bags.push_back({v0, v1});
    for (int i = 0; i < n; ++i) {
        out.td.bags.push_back({v0, v1, x(i)});
        out.td.tree_edges.emplace_back(0, static_cast<int>(out.td.bags.size()) - 1);
    }
    for (int j = 0; j < m; ++j) {
        out.td.bags.push_back({v0, v1, a(j), a(j) + 1});
        int host = static_cast<int>(out.td.bags.size()) - 1;
        out.td.tree_edges.emplace_back(0, host);
        out.td.bags.push_back({a(j), a(j) + 1, a(j) + 2});
        out.td.tree_edges.emplace_back(host, host + 1);
    }
    out.td.root = 0;
    return out;
}

}  // namespace sforest
