#include "sforest/partition.hpp"

#include <algorithm>
#include <map>

#include "sforest/errors.hpp"

namespace sforest {

namespace {

std::vector<int> canonical(const std::vector<int>& raw) {
    std::map<int, int> relabel;
    std::vector<int> out;
    out.reserve(raw.size());
    for (int x : raw) {
        auto it = relabel.find(x);
        if (it == relabel.end()) it = relabel.emplace(x, static_cast<int>(relabel.size())).first;
        out.push_back(it->second);
    }
    return out;
}

void check_ground(const std::vector<Vertex>& ground) {
    for (std::size_t i = 1; i < ground.size(); ++i)
        if (ground[i - 1] >= ground[i]) throw InvalidInput("partition ground set must be sorted and distinct");
}

}  // namespace

Partition Partition::discrete(std::vector<Vertex> ground) {
    std::vector<int> l(ground.size());
    for (std::size_t i = 0; i < l.size(); ++i) l[i] = static_cast<int>(i);
    return from_labels(std::move(ground), l);
}

Partition Partition::single_class(std::vector<Vertex> ground) {
    std::vector<int> l(ground.size(), 0);
    return from_labels(std::move(ground), l);
}

Partition Partition::from_labels(std::vector<Vertex> ground, const std::vector<int>& labels) {
    std::vector<std::size_t> idx(ground.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (labels.size() != ground.size()) throw InvalidInput("label count mismatch");
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return ground[a] < ground[b]; });
    Partition p;
    std::vector<int> raw;
    for (std::size_t i : idx) {
        p.ground_.push_back(ground[i]);
        raw.push_back(labels[i]);
    }
    check_ground(p.ground_);
    p.label_ = canonical(raw);
    return p;
}

Partition Partition::from_classes(std::vector<Vertex> ground, const std::vector<std::vector<Vertex>>& classes) {
    std::sort(ground.begin(), ground.end());
    check_ground(ground);
    std::vector<int> labels(ground.size(), -1);
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (Vertex v : classes[c]) {
            auto it = std::lower_bound(ground.begin(), ground.end(), v);
            if (it == ground.end() || *it != v) throw InvalidInput("class member outside ground set");
            auto i = static_cast<std::size_t>(it - ground.begin());
            if (labels[i] >= 0) throw InvalidInput("classes overlap");
            labels[i] = static_cast<int>(c);
        }
    if (std::find(labels.begin(), labels.end(), -1) != labels.end()) throw InvalidInput("classes do not cover ground set");
    return from_labels(std::move(ground), labels);
}

int Partition::num_classes() const {
    int m = 0;
    for (int l : label_) m = std::max(m, l + 1);
    return m;
}

std::vector<std::vector<Vertex>> Partition::classes() const {
    std::vector<std::vector<Vertex>> out(static_cast<std::size_t>(num_classes()));
    for (std::size_t i = 0; i < ground_.size(); ++i) out[label_[i]].push_back(ground_[i]);
    return out;
}

int Partition::index_of(Vertex v) const {
    auto it = std::lower_bound(ground_.begin(), ground_.end(), v);
    if (it == ground_.end() || *it != v) throw InvalidInput("vertex not in partition ground set");
    return static_cast<int>(it - ground_.begin());
}

int Partition::class_of(Vertex v) const { return label_[index_of(v)]; }

bool Partition::same_class(Vertex a, Vertex b) const { return class_of(a) == class_of(b); }

Partition Partition::join(const Partition& other) const {
    if (ground_ != other.ground_) throw InvalidInput("join of partitions over different ground sets");
    const int n = static_cast<int>(ground_.size());
    UnionFind uf(n);
    std::vector<int> first_a(static_cast<std::size_t>(n), -1), first_b(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        int& fa = first_a[label_[i]];
        if (fa < 0) fa = i; else uf.unite(fa, i);
        int& fb = first_b[other.label_[i]];
        if (fb < 0) fb = i; else uf.unite(fb, i);
    }
    std::vector<int> l(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) l[i] = uf.find(i);
    return from_labels(ground_, l);
}

bool Partition::finer_than(const Partition& other) const {
    if (ground_ != other.ground_) return false;
    std::map<int, int> img;
    for (std::size_t i = 0; i < ground_.size(); ++i) {
        auto [it, fresh] = img.emplace(label_[i], other.label_[i]);
        if (!fresh && it->second != other.label_[i]) return false;
    }
    return true;
}

Partition Partition::restrict_to(const std::vector<Vertex>& subset) const {
    std::vector<Vertex> s = subset;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    std::vector<int> l;
    for (Vertex v : s) l.push_back(class_of(v));
    return from_labels(s, l);
}

std::string Partition::encode() const {
    std::string out;
    for (std::size_t i = 0; i < ground_.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(ground_[i]) + ":" + std::to_string(label_[i]);
    }
    return out;
}

std::vector<std::vector<int>> all_set_partitions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int i, int used) -> void {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (int c = 0; c <= used && c < n; ++c) {
            cur[i] = c;
            self(self, i + 1, std::max(used, c + 1));
        }
    };
    if (n == 0) {
        out.push_back({});
        return out;
    }
    rec(rec, 0, 0);
    return out;
}

}  // namespace sforest
