#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cclique/detection.hpp"
#include "cclique/graph.hpp"
#include "cclique/runtime.hpp"

namespace cclique {

// Every node ships its neighbor list to its neighbors with round-robin
// messaging; at most 3 * ceil(D^2 / n) + 1 rounds for max degree D.
DetectionResult tri_neighbors(const Graph& g);

// D repetitions of "forward the edges learned last time to all neighbors",
// after which every node knows its D-hop neighborhood and tests it locally.
// D is the pattern's diameter; the pattern must be connected.
DetectionResult detect_diameter_d(const Graph& g, const SubgraphPattern& pattern);

enum class ThresholdRule { Fixed4A, BaseChange, Uniform };

struct DecompositionStep {
    std::vector<NodeId> active;      // sorted
    std::vector<std::size_t> degree;  // per node (index id - 1); 0 when inactive
    std::size_t threshold = 0;
};

struct DecompositionTrace {
    std::vector<DecompositionStep> steps;
    std::size_t rounds = 0;

    std::size_t iterations() const { return steps.size(); }
    // Iteration (0-based) in which v is eliminated.
    std::size_t eliminated_in(NodeId v) const;
};

// Threshold of one iteration from the active degrees. `a` is only read by the
// fixed and base-change rules.
std::size_t threshold_for(ThresholdRule rule, std::size_t n, std::size_t a, const DecompositionStep& step);

// Active nodes announce their induced degree each iteration (one round) and
// those at or below the threshold drop out, until no node is left.
DecompositionTrace quick_decomposition(Network& net, const Graph& g, ThresholdRule rule, std::size_t a);
DecompositionTrace quick_decomposition(const Graph& g, ThresholdRule rule, std::size_t a);

struct DelegateRole {
    NodeId principal = 0;  // 0 when the node serves nobody
    std::size_t begin = 0, end = 0;  // positions in the principal's sorted list
};

struct DelegateAssignment {
    std::size_t iteration = 0;
    std::size_t threshold = 0;
    std::vector<std::vector<NodeId>> delegates;  // per principal, one per range
    std::vector<DelegateRole> role;              // per node
    std::size_t count = 0;
    std::size_t next_pool = 0;                   // pool position after the last delegate
};

// High-degree nodes (degree > threshold) sorted by (degree desc, id asc) take
// consecutive slots of the pool 1..n starting at `pool_start` (cyclically). Each
// gets ceil(degree / threshold) delegates covering consecutive ranges of
// `threshold` positions. Throws DelegateExhaustion when more than n are needed.
DelegateAssignment assign_delegates(const std::vector<std::size_t>& degree, std::size_t threshold,
                                    std::size_t pool_start = 0);

enum class ArborVariant { Sequential, Parallel, BaseChange, Uniform };

ArborVariant parse_arbor_variant(const std::string& name);
std::string arbor_variant_name(ArborVariant v);

// Rounds per phase: degree announcement, high-degree lists to delegates (with
// notifications), delegate exchange, low-degree lists, final announcement.
using PhaseRounds = std::array<std::size_t, 5>;

struct ArborDebug {
    DecompositionTrace trace;
    // One entry per iteration for the sequential variant, a single merged entry
    // otherwise (its announcement slot holds the decomposition rounds).
    std::vector<PhaseRounds> phase_rounds;
    std::vector<std::size_t> delegates_per_iteration;
    std::vector<std::size_t> delegate_roles;  // per node, over all iterations
    std::size_t low_low_hits = 0;    // triangles seen by a low-degree neighbor
    std::size_t delegate_hits = 0;   // triangles seen by a delegate
    std::size_t low_in_bound = 0;    // largest per-node receive bound of the low phase
};

struct ArborResult {
    bool found = false;
    RoundLedger ledger;
    ArborDebug debug;
};

// `a` is the arboricity surrogate; the uniform variant ignores it.
ArborResult tri_arbor(const Graph& g, ArborVariant variant, std::size_t a);
ArborResult tri_arbor(const Graph& g, ArborVariant variant);  // a = max(1, degeneracy)

}  // namespace cclique
