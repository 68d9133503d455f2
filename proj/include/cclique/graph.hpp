#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cclique {

// Vertices and clique nodes share the id space 1..n.
using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Undirected simple graph on vertices 1..n with sorted adjacency lists.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n);
    // Throws ParameterError on self-loops, out-of-range ids or duplicates.
    Graph(std::size_t n, const std::vector<Edge>& edges);

    std::size_t size() const { return adj_.size(); }
    std::size_t edge_count() const { return edges_; }
    std::size_t degree(NodeId v) const { return adj_[v - 1].size(); }
    std::size_t max_degree() const;

    // Sorted neighbor ids of v.
    const std::vector<NodeId>& neighbors(NodeId v) const { return adj_[v - 1]; }
    bool has_edge(NodeId u, NodeId v) const;

    // All edges as (u, v) with u < v, lexicographically sorted.
    std::vector<Edge> edges() const;

    // Symmetry, no self-loops, ids in range, sorted and duplicate-free.
    bool check_invariants() const;

    friend bool operator==(const Graph& a, const Graph& b) { return a.adj_ == b.adj_; }

private:
    std::vector<std::vector<NodeId>> adj_;
    std::size_t edges_ = 0;
};

// A constant-sized pattern graph on vertices 1..d.
struct SubgraphPattern {
    std::size_t d = 0;
    std::vector<Edge> edges;

    static SubgraphPattern triangle();
    static SubgraphPattern clique(std::size_t d);
    static SubgraphPattern cycle(std::size_t d);
    static SubgraphPattern path(std::size_t d);
    // Parses "triangle", "clique:4", "cycle:5", "path:4".
    static SubgraphPattern parse(const std::string& spec);

    Graph as_graph() const;
    bool connected() const;
    // Hop diameter; only meaningful for connected patterns.
    std::size_t diameter() const;
};

struct TriangleCensus {
    std::uint64_t t = 0;
    std::vector<std::array<NodeId, 3>> triangles;  // sorted triples, lexicographic
    std::uint64_t t4 = 0, t5 = 0, t6 = 0;
    std::uint64_t delta_max = 0;
    // Per-edge triangle counts, aligned with Graph::edges().
    std::vector<std::uint64_t> delta_e;
};

enum class Family { Empty, Complete, Path, Cycle, Star, Tree, Gnp, SharedEdge, Disjoint, Forests, Grid, Hubs };

struct GeneratorParams {
    std::size_t n = 0;
    std::size_t t = 0;   // triangle count for shared-edge / disjoint
    double p = 0.0;      // edge probability for gnp
    std::size_t k = 1;   // forest count for forests, hub count for hubs
};

Family parse_family(const std::string& name);
std::string family_name(Family f);

Graph generate(Family family, const GeneratorParams& params, std::uint64_t seed = 0);

TriangleCensus census(const Graph& g);

// Non-induced subgraph containment by exhaustive search over vertex subsets.
bool oracle_contains(const Graph& g, const SubgraphPattern& pattern);

std::size_t degeneracy(const Graph& g);

Graph parse_edge_list(const std::string& text);
std::string serialize_edge_list(const Graph& g);

Graph read_edge_list_file(const std::string& path);
void write_edge_list_file(const Graph& g, const std::string& path);

// Relabels and embeds g into a graph on n >= g.size() vertices; map[i] is the
// new id of vertex i + 1.
Graph embed(const Graph& g, std::size_t n, const std::vector<NodeId>& map);

}  // namespace cclique
