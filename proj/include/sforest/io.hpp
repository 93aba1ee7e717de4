#pragma once

#include <optional>
#include <string>

#include "sforest/graph.hpp"
#include "sforest/sp_exact.hpp"
#include "sforest/tree_decomposition.hpp"

namespace sforest {

// Text format, 1-based ids, '#' starts a comment:
//   SECTION Graph / Nodes n / Edges m / E u v w ... / END
//   SECTION Demands / D s t ... / END
//   SECTION TreeDecomp / TD / B id v... / T id id / R id / END        (optional)
//   SECTION SpTree / Nodes k / L i e x y | S i l r x mid y | P i l r x y / END   (optional)
struct InstanceFile {
    WeightedGraph graph;
    DemandSet demands;
    std::optional<TreeDecomposition> td;
    std::optional<SpTree> sp;
};

// Throws ParseError carrying the offending line number.
InstanceFile parse_instance(const std::string& text);
std::string render_instance(const InstanceFile& inst);

// Standalone decomposition: TD header, B/T/R lines.
TreeDecomposition parse_tree_decomposition(const std::string& text, int num_vertices);
std::string render_tree_decomposition(const TreeDecomposition& td);

// FNV-1a 64 of the canonical rendering, as 16 hex digits.
std::string instance_hash(const InstanceFile& inst);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace sforest
