#pragma once

#include <cstdint>
#include <vector>

#include "cclique/detection.hpp"
#include "cclique/graph.hpp"
#include "cclique/runtime.hpp"

namespace cclique {

// Vertices 1..n_effective split into `parts` contiguous subsets; slot r
// (0-based) owns the ordered d-tuple given by the base-`parts` digits of r.
// Vertices above n are virtual and isolated; slot r runs on node (r mod n) + 1.
struct PartitionScheme {
    std::size_t n = 0, d = 0;
    std::size_t n_effective = 0;
    std::size_t parts = 0, part_size = 0;
    std::vector<std::vector<NodeId>> subsets;
    std::vector<std::vector<std::uint32_t>> assignment;  // slot -> subset indices

    std::uint32_t subset_of(NodeId v) const { return static_cast<std::uint32_t>((v - 1) / part_size); }
    NodeId host(std::size_t slot) const { return static_cast<NodeId>(slot % n + 1); }
};

PartitionScheme build_partition(std::size_t n, std::size_t d);

// Every slot gathers the edges among its tuple's subsets, looks for the pattern
// locally, and one broadcast round spreads the answer. Packed mode sends
// neighbor sublists as bit arrays instead of id lists.
DetectionResult tri_partition(const Graph& g, bool packed = false);
DetectionResult d_clique0(const Graph& g, const SubgraphPattern& pattern, bool packed = false);

// Non-induced occurrence of `pattern` in the graph given by dense adjacency
// rows over `size` vertices (row u has bit v set when u ~ v).
bool match_pattern(std::size_t size, const std::vector<std::uint64_t>& rows, const SubgraphPattern& pattern);

}  // namespace cclique
