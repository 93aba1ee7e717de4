#include "sforest/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sforest/errors.hpp"

namespace sforest {

namespace {

std::vector<std::string> split_words(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

long long parse_int(const std::string& w, int line, const char* what) {
    long long v = 0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size())
        throw ParseError(line, std::string("expected integer for ") + what + ", got '" + w + "'");
    return v;
}

struct Reader {
    std::vector<std::pair<int, std::vector<std::string>>> lines;
    std::size_t pos = 0;

    explicit Reader(const std::string& text) {
        std::istringstream is(text);
        std::string raw;
        int no = 0;
        while (std::getline(is, raw)) {
            ++no;
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            auto words = split_words(raw);
            if (!words.empty()) lines.emplace_back(no, std::move(words));
        }
    }
    bool done() const { return pos >= lines.size(); }
    const std::vector<std::string>& peek() const { return lines[pos].second; }
    int line() const { return done() ? (lines.empty() ? 1 : lines.back().first) : lines[pos].first; }
    std::vector<std::string> next() { return lines[pos++].second; }
};

Vertex vertex_id(const std::string& w, int n, int line) {
    long long v = parse_int(w, line, "vertex id");
    if (v < 1 || v > n) throw ParseError(line, "vertex id " + w + " out of range 1.." + std::to_string(n));
    return static_cast<Vertex>(v - 1);
}

void expect_words(const std::vector<std::string>& w, std::size_t count, int line, const char* form) {
    if (w.size() != count) throw ParseError(line, std::string("expected '") + form + "'");
}

// TD header, then B/T/R lines; stops at END when in_section, else at end of input.
TreeDecomposition parse_td_lines(Reader& rd, int n, bool in_section) {
    TreeDecomposition td;
    auto at_end = [&]() {
        if (rd.done()) {
            if (in_section) throw ParseError(rd.line(), "missing END for section TreeDecomp");
            return true;
        }
        return in_section && rd.peek().size() == 1 && rd.peek()[0] == "END";
    };
    if (at_end()) throw ParseError(rd.line(), "missing TD header");
    int ln = rd.line();
    auto w = rd.next();
    if (w.size() != 1 || w[0] != "TD") throw ParseError(ln, "expected 'TD'");
    std::vector<std::pair<int, std::pair<long long, long long>>> tree_lines;
    std::optional<std::pair<int, long long>> root_line;
    while (!at_end()) {
        ln = rd.line();
        w = rd.next();
        if (w[0] == "B") {
            if (w.size() < 2) throw ParseError(ln, "expected 'B id v...'");
            long long id = parse_int(w[1], ln, "bag id");
            if (id != static_cast<long long>(td.bags.size()) + 1)
                throw ParseError(ln, "bags must be numbered 1, 2, ... in order");
            std::vector<Vertex> bag;
            for (std::size_t i = 2; i < w.size(); ++i) bag.push_back(vertex_id(w[i], n, ln));
            td.bags.push_back(bag);
        } else if (w[0] == "T") {
            expect_words(w, 3, ln, "T id id");
            tree_lines.push_back({ln, {parse_int(w[1], ln, "bag id"), parse_int(w[2], ln, "bag id")}});
        } else if (w[0] == "R") {
            expect_words(w, 2, ln, "R id");
            if (root_line) throw ParseError(ln, "duplicate R line");
            root_line = std::pair<int, long long>{ln, parse_int(w[1], ln, "bag id")};
        } else {
            throw ParseError(ln, "unexpected '" + w[0] + "' in decomposition");
        }
    }
    const long long b = static_cast<long long>(td.bags.size());
    for (auto& [line, ab] : tree_lines) {
        if (ab.first < 1 || ab.first > b || ab.second < 1 || ab.second > b)
            throw ParseError(line, "tree edge refers to unknown bag");
        td.tree_edges.emplace_back(static_cast<int>(ab.first - 1), static_cast<int>(ab.second - 1));
    }
    if (root_line) {
        if (root_line->second < 1 || root_line->second > b) throw ParseError(root_line->first, "root refers to unknown bag");
        td.root = static_cast<int>(root_line->second - 1);
    }
    return td;
}

void render_td_lines(std::ostream& os, const TreeDecomposition& td) {
    os << "TD\n";
    for (std::size_t i = 0; i < td.bags.size(); ++i) {
        os << "B " << i + 1;
        for (Vertex v : td.bags[i]) os << ' ' << v + 1;
        os << "\n";
    }
    for (auto [a, b] : td.tree_edges) os << "T " << a + 1 << ' ' << b + 1 << "\n";
    if (td.root) os << "R " << *td.root + 1 << "\n";
}

}  // namespace

InstanceFile parse_instance(const std::string& text) {
    Reader rd(text);
    InstanceFile out;
    bool have_graph = false, have_demands = false;
    int n = 0;
    while (!rd.done()) {
        int start = rd.line();
        auto head = rd.next();
        if (head.size() != 2 || head[0] != "SECTION") throw ParseError(start, "expected 'SECTION <name>'");
        const std::string name = head[1];
        auto end_of_section = [&]() {
            if (rd.done()) throw ParseError(rd.line(), "missing END for section " + name);
            return rd.peek().size() == 1 && rd.peek()[0] == "END";
        };
        if (name == "Graph") {
            if (have_graph) throw ParseError(start, "duplicate Graph section");
            have_graph = true;
            if (rd.done()) throw ParseError(start, "missing Nodes line");
            int ln = rd.line();
            auto w = rd.next();
            if (w.size() != 2 || w[0] != "Nodes") throw ParseError(ln, "expected 'Nodes n'");
            long long nn = parse_int(w[1], ln, "node count");
            if (nn < 0 || nn > 10'000'000) throw ParseError(ln, "node count out of range");
            n = static_cast<int>(nn);
            if (rd.done()) throw ParseError(ln, "missing Edges line");
            ln = rd.line();
            w = rd.next();
            if (w.size() != 2 || w[0] != "Edges") throw ParseError(ln, "expected 'Edges m'");
            long long m = parse_int(w[1], ln, "edge count");
            if (m < 0 || m > 100'000'000) throw ParseError(ln, "edge count out of range");
            std::vector<Edge> edges;
            while (!end_of_section()) {
                ln = rd.line();
                w = rd.next();
                if (w.empty() || w[0] != "E") throw ParseError(ln, "expected 'E u v w'");
                expect_words(w, 4, ln, "E u v w");
                Vertex u = vertex_id(w[1], n, ln), v = vertex_id(w[2], n, ln);
                long long len = parse_int(w[3], ln, "edge length");
                if (len < 0) throw ParseError(ln, "negative edge length");
                if (len > (1LL << 40)) throw ParseError(ln, "edge length too large");
                if (u == v) throw ParseError(ln, "self-loop");
                edges.push_back({u, v, len});
            }
            if (static_cast<long long>(edges.size()) != m)
                throw ParseError(rd.line(), "declared " + std::to_string(m) + " edges but found " +
                                                std::to_string(edges.size()));
            rd.next();
            out.graph = WeightedGraph(n, std::move(edges));
        } else if (name == "Demands") {
            if (!have_graph) throw ParseError(start, "Demands section before Graph");
            if (have_demands) throw ParseError(start, "duplicate Demands section");
            have_demands = true;
            std::vector<std::pair<Vertex, Vertex>> pairs;
            while (!end_of_section()) {
                int ln = rd.line();
                auto w = rd.next();
                if (w.empty() || w[0] != "D") throw ParseError(ln, "expected 'D s t'");
                expect_words(w, 3, ln, "D s t");
                Vertex s = vertex_id(w[1], n, ln), t = vertex_id(w[2], n, ln);
                if (s == t) throw ParseError(ln, "demand pair with equal endpoints");
                pairs.emplace_back(s, t);
            }
            rd.next();
            out.demands = DemandSet(n, pairs);
        } else if (name == "TreeDecomp") {
            if (!have_graph) throw ParseError(start, "TreeDecomp section before Graph");
            if (out.td) throw ParseError(start, "duplicate TreeDecomp section");
            out.td = parse_td_lines(rd, n, true);
            rd.next();
        } else if (name == "SpTree") {
            if (!have_graph) throw ParseError(start, "SpTree section before Graph");
            if (out.sp) throw ParseError(start, "duplicate SpTree section");
            SpTree t;
            if (rd.done()) throw ParseError(start, "missing Nodes line");
            int ln = rd.line();
            auto w = rd.next();
            if (w.size() != 2 || w[0] != "Nodes") throw ParseError(ln, "expected 'Nodes k'");
            long long k = parse_int(w[1], ln, "node count");
            if (k < 0 || k > 100'000'000) throw ParseError(ln, "node count out of range");
            while (!end_of_section()) {
                ln = rd.line();
                w = rd.next();
                if (w.size() < 2) throw ParseError(ln, "expected a series-parallel node line");
                long long id = parse_int(w[1], ln, "node id");
                if (id != static_cast<long long>(t.nodes.size()) + 1)
                    throw ParseError(ln, "nodes must be numbered 1, 2, ... in order");
                auto child = [&](const std::string& s) {
                    long long c = parse_int(s, ln, "child id");
                    if (c < 1 || c >= id) throw ParseError(ln, "child must be an earlier node");
                    return static_cast<int>(c - 1);
                };
                SpNode nd;
                if (w[0] == "L") {
                    expect_words(w, 5, ln, "L i e x y");
                    long long e = parse_int(w[2], ln, "edge id");
                    if (e < 1 || e > out.graph.num_edges()) throw ParseError(ln, "unknown edge id");
                    nd.kind = SpKind::edge;
                    nd.edge = static_cast<EdgeId>(e - 1);
                    nd.x = vertex_id(w[3], n, ln);
                    nd.y = vertex_id(w[4], n, ln);
                } else if (w[0] == "S") {
                    expect_words(w, 7, ln, "S i l r x mid y");
                    nd.kind = SpKind::series;
                    nd.left = child(w[2]);
                    nd.right = child(w[3]);
                    nd.x = vertex_id(w[4], n, ln);
                    nd.mid = vertex_id(w[5], n, ln);
                    nd.y = vertex_id(w[6], n, ln);
                } else if (w[0] == "P") {
                    expect_words(w, 6, ln, "P i l r x y");
                    nd.kind = SpKind::parallel;
                    nd.left = child(w[2]);
                    nd.right = child(w[3]);
                    nd.x = vertex_id(w[4], n, ln);
                    nd.y = vertex_id(w[5], n, ln);
                } else {
                    throw ParseError(ln, "unexpected '" + w[0] + "' in SpTree section");
                }
                t.nodes.push_back(nd);
            }
            if (static_cast<long long>(t.nodes.size()) != k)
                throw ParseError(rd.line(), "declared " + std::to_string(k) + " nodes but found " +
                                                std::to_string(t.nodes.size()));
            rd.next();
            try {
                t.check(out.graph);
            } catch (const InvalidInput& e) {
                throw ParseError(start, e.what());
            }
            out.sp = std::move(t);
        } else {
            throw ParseError(start, "unknown section '" + name + "'");
        }
    }
    if (!have_graph) throw ParseError(rd.line(), "missing Graph section");
    if (!have_demands) out.demands = DemandSet(n, {});
    return out;
}

std::string render_instance(const InstanceFile& inst) {
    std::ostringstream os;
    const auto& g = inst.graph;
    os << "SECTION Graph\nNodes " << g.num_vertices() << "\nEdges " << g.num_edges() << "\n";
    for (const auto& e : g.edges()) os << "E " << e.u + 1 << ' ' << e.v + 1 << ' ' << e.length << "\n";
    os << "END\nSECTION Demands\n";
    for (auto [s, t] : inst.demands.pairs()) os << "D " << s + 1 << ' ' << t + 1 << "\n";
    os << "END\n";
    if (inst.td) {
        os << "SECTION TreeDecomp\n";
        render_td_lines(os, *inst.td);
        os << "END\n";
    }
    if (inst.sp) {
        const auto& t = *inst.sp;
        os << "SECTION SpTree\nNodes " << t.nodes.size() << "\n";
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            const SpNode& nd = t.nodes[i];
            switch (nd.kind) {
                case SpKind::edge:
                    os << "L " << i + 1 << ' ' << nd.edge + 1 << ' ' << nd.x + 1 << ' ' << nd.y + 1 << "\n";
                    break;
                case SpKind::series:
                    os << "S " << i + 1 << ' ' << nd.left + 1 << ' ' << nd.right + 1 << ' ' << nd.x + 1 << ' '
                       << nd.mid + 1 << ' ' << nd.y + 1 << "\n";
                    break;
                case SpKind::parallel:
                    os << "P " << i + 1 << ' ' << nd.left + 1 << ' ' << nd.right + 1 << ' ' << nd.x + 1 << ' '
                       << nd.y + 1 << "\n";
                    break;
            }
        }
        os << "END\n";
    }
    return os.str();
}

TreeDecomposition parse_tree_decomposition(const std::string& text, int num_vertices) {
    Reader rd(text);
    return parse_td_lines(rd, num_vertices, false);
}

std::string render_tree_decomposition(const TreeDecomposition& td) {
    std::ostringstream os;
    render_td_lines(os, td);
    return os.str();
}

std::string instance_hash(const InstanceFile& inst) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : render_instance(inst)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace sforest
