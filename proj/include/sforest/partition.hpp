#pragma once

#include <string>
#include <vector>

#include "sforest/graph.hpp"

namespace sforest {

// Equivalence relation on a sorted ground set, stored as a restricted growth
// string: label[i] is the class index of ground[i], classes numbered in order of
// first appearance.
class Partition {
public:
    Partition() = default;
    static Partition discrete(std::vector<Vertex> ground);
    static Partition single_class(std::vector<Vertex> ground);
    // Classes must be disjoint and cover the ground set.
    static Partition from_classes(std::vector<Vertex> ground, const std::vector<std::vector<Vertex>>& classes);
    // Labels are arbitrary integers; equal labels mean same class.
    static Partition from_labels(std::vector<Vertex> ground, const std::vector<int>& labels);

    const std::vector<Vertex>& ground() const { return ground_; }
    const std::vector<int>& labels() const { return label_; }
    int num_classes() const;
    std::vector<std::vector<Vertex>> classes() const;
    bool same_class(Vertex a, Vertex b) const;
    int class_of(Vertex v) const;

    // Finest common coarsening.
    Partition join(const Partition& other) const;
    // True when every class of *this lies inside a class of other.
    bool finer_than(const Partition& other) const;
    Partition restrict_to(const std::vector<Vertex>& subset) const;
    std::string encode() const;

    bool operator==(const Partition& o) const { return ground_ == o.ground_ && label_ == o.label_; }
    bool operator<(const Partition& o) const {
        return ground_ != o.ground_ ? ground_ < o.ground_ : label_ < o.label_;
    }

private:
    std::vector<Vertex> ground_;
    std::vector<int> label_;
    int index_of(Vertex v) const;
};

// All set partitions of {0..n-1} as restricted growth strings.
std::vector<std::vector<int>> all_set_partitions(int n);

}  // namespace sforest
