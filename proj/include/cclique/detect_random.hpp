#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "cclique/graph.hpp"
#include "cclique/runtime.hpp"

namespace cclique {

// Critical sample size max{2 n^{2/3} t^{-1/3} ln^{1/3}(2/eps), 2 sqrt(n ln(2/eps))}
// and the first iteration whose sample size reaches it. eps must lie in (0, 2).
double s_threshold(std::size_t n, double t, double eps);
std::size_t m_threshold(std::size_t n, double t, double eps);

// Largest sample size the loop runs before switching to the deterministic
// detector: n^{2/3}.
double sample_cap(std::size_t n);

// Rounds of unpacked TriPartition on n nodes, 2 ceil(3 n_eff^{1/3}) + 1; the
// default wall for the sampling phase.
std::size_t partition_round_cost(std::size_t n);

struct SampleOptions {
    std::optional<double> cap;          // default sample_cap(n)
    std::optional<std::size_t> wall;    // default partition_round_cost(n); 0 disables
    bool fallback = true;               // run TriPartition after the last sample
    std::optional<std::size_t> fixed_s; // run exactly one iteration at this size
    // Skip the message exchange and read the sampled subgraphs directly. The
    // outcome is the same function of the seed when the wall does not bind;
    // no rounds are counted, so the wall is never applied.
    bool outcome_only = false;
};

struct SampleIteration {
    std::size_t m = 0;
    std::size_t s = 0;
    std::size_t rounds = 0;
    std::size_t max_membership = 0;  // max over j of |{i : j in C_i}|
    std::size_t hits = 0;            // nodes that saw a triangle
};

struct SampleResult {
    bool found = false;
    std::size_t success_iteration = 0;  // 0: no sampling iteration succeeded
    std::size_t s_at_success = 0;
    bool fell_back = false;
    std::optional<std::array<NodeId, 3>> witness;
    std::vector<SampleIteration> iterations;
    RoundLedger ledger;
};

// Sample sets C_i of node i in iteration m, drawn uniformly without replacement.
std::vector<NodeId> sample_set(std::size_t n, std::size_t s, std::uint64_t seed, NodeId node, std::size_t m);

SampleResult tri_sample(const Graph& g, std::uint64_t seed, const SampleOptions& options = {});

// Sampling only, with the sample size capped at twice the critical size for
// t0 triangles and failure budget eps; never falls back.
SampleResult distinguisher(const Graph& g, std::size_t t0, double eps, std::uint64_t seed, bool outcome_only = false);
double distinguisher_cap(std::size_t n, std::size_t t0, double eps);

struct TightnessResult {
    std::size_t runs = 0;
    std::size_t misses = 0;  // runs in which no node saw a triangle
    double miss_frequency() const { return runs ? static_cast<double>(misses) / static_cast<double>(runs) : 0.0; }
};

// One sampling iteration at s_fixed on the shared-edge or disjoint family,
// repeated over seeds first_seed, first_seed + 1, ... Above the sample cap
// the deterministic detector runs instead. s_fixed must stay below the
// family's threshold branch.
TightnessResult tightness_experiment(Family family, std::size_t n, std::size_t t, double eps, std::size_t s_fixed,
                                     std::size_t seeds, std::uint64_t first_seed = 1, bool outcome_only = true);

}  // namespace cclique
