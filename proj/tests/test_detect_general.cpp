#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "cclique/detect_general.hpp"
#include "cclique/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cclique;

namespace {

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<Edge> e;
    for (NodeId u = 1; u <= n; ++u)
        for (NodeId v = u + 1; v <= n; ++v)
            if (coin(rng)) e.emplace_back(u, v);
    return Graph(n, e);
}

// Does some slot's tuple contain the subsets of all of `verts` (with multiplicity)?
bool covered(const PartitionScheme& s, std::vector<NodeId> verts) {
    std::multiset<std::uint32_t> need;
    for (NodeId v : verts) need.insert(s.subset_of(v));
    for (const auto& t : s.assignment) {
        std::multiset<std::uint32_t> have(t.begin(), t.end());
        if (std::includes(have.begin(), have.end(), need.begin(), need.end())) return true;
    }
    return false;
}

std::size_t unpacked_round_bound(std::size_t n_eff) {
    double c = std::cbrt(static_cast<double>(n_eff));
    return 2 * static_cast<std::size_t>(std::ceil(3 * c - 1e-9)) + 1;
}

}  // namespace

TEST_CASE("partition of 8 vertices into two halves") {
    PartitionScheme s = build_partition(8, 3);
    CHECK(s.n_effective == 8);
    CHECK(s.parts == 2);
    CHECK(s.subsets == std::vector<std::vector<NodeId>>{{1, 2, 3, 4}, {5, 6, 7, 8}});
    std::set<std::vector<std::uint32_t>> tuples(s.assignment.begin(), s.assignment.end());
    CHECK(tuples.size() == 8);
    for (NodeId a = 1; a <= 8; ++a)
        for (NodeId b = a + 1; b <= 8; ++b)
            for (NodeId c = b + 1; c <= 8; ++c) CHECK(covered(s, {a, b, c}));
}

TEST_CASE("partition sizes and padding") {
    PartitionScheme s27 = build_partition(27, 3);
    CHECK(s27.parts == 3);
    for (const auto& sub : s27.subsets) CHECK(sub.size() == 9);
    for (NodeId a = 1; a <= 27; ++a)
        for (NodeId b = a + 1; b <= 27; ++b)
            for (NodeId c = b + 1; c <= 27; ++c) REQUIRE(covered(s27, {a, b, c}));

    PartitionScheme s5 = build_partition(5, 3);
    CHECK(s5.n_effective == 8);
    CHECK(s5.n_effective - s5.n == 3);
    CHECK(s5.host(5) == 1);
    CHECK(s5.host(7) == 3);

    for (auto [n, d] : {std::pair{16, 4}, std::pair{17, 4}, std::pair{10, 2}, std::pair{1, 3}}) {
        PartitionScheme s = build_partition(n, d);
        CHECK(s.n_effective >= static_cast<std::size_t>(n));
        CHECK(s.assignment.size() == s.n_effective);
        std::set<std::vector<std::uint32_t>> tuples(s.assignment.begin(), s.assignment.end());
        CHECK(tuples.size() == s.n_effective);
        std::set<NodeId> all;
        for (const auto& sub : s.subsets) all.insert(sub.begin(), sub.end());
        CHECK(all.size() == s.n_effective);
    }
    CHECK_THROWS_AS(build_partition(0, 3), ParameterError);
    CHECK_THROWS_AS(build_partition(8, 1), ParameterError);
}

TEST_CASE("pattern matcher on small graphs") {
    auto rows_of = [](const Graph& g) {
        std::size_t n = g.size(), w = (n + 63) / 64;
        std::vector<std::uint64_t> rows(n * w, 0);
        for (auto [u, v] : g.edges()) {
            rows[(u - 1) * w + (v - 1) / 64] |= std::uint64_t{1} << ((v - 1) % 64);
            rows[(v - 1) * w + (u - 1) / 64] |= std::uint64_t{1} << ((u - 1) % 64);
        }
        return rows;
    };
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Graph g = random_graph(9 + seed % 5, 0.3, seed);
        for (const auto& p : {SubgraphPattern::triangle(), SubgraphPattern::clique(4), SubgraphPattern::cycle(4),
                              SubgraphPattern::path(4), SubgraphPattern::cycle(5)})
            CHECK(match_pattern(g.size(), rows_of(g), p) == oracle_contains(g, p));
    }
    Graph big = generate(Family::Complete, {.n = 70});
    CHECK(match_pattern(70, rows_of(big), SubgraphPattern::clique(5)));
}

TEST_CASE("triangle detection examples") {
    Graph k3 = embed(generate(Family::Complete, {.n = 3}), 8, {1, 2, 5});
    CHECK(tri_partition(k3).found);
    CHECK(tri_partition(k3, true).found);

    Graph c5 = embed(generate(Family::Cycle, {.n = 5}), 8, {1, 2, 3, 4, 5});
    CHECK_FALSE(tri_partition(c5).found);
    CHECK_FALSE(tri_partition(c5, true).found);

    Graph inner = embed(generate(Family::Complete, {.n = 3}), 27, {1, 2, 3});
    DetectionResult r = tri_partition(inner);
    CHECK(r.found);
    CHECK(r.n_effective == 27);
    CHECK_FALSE(r.reporters.empty());

    CHECK_FALSE(tri_partition(Graph(5)).found);
    CHECK(tri_partition(generate(Family::Complete, {.n = 5})).found);
}

TEST_CASE("four-vertex patterns") {
    Graph k4 = embed(generate(Family::Complete, {.n = 4}), 16, {3, 7, 11, 16});
    CHECK(d_clique0(k4, SubgraphPattern::clique(4)).found);
    CHECK(d_clique0(k4, SubgraphPattern::clique(4), true).found);

    std::vector<Edge> e = generate(Family::Complete, {.n = 4}).edges();
    e.pop_back();
    Graph k4m = embed(Graph(4, e), 16, {3, 7, 11, 16});
    CHECK_FALSE(d_clique0(k4m, SubgraphPattern::clique(4)).found);

    Graph shared = generate(Family::SharedEdge, {.n = 16, .t = 8});
    REQUIRE(oracle_contains(shared, SubgraphPattern::path(4)));
    CHECK(d_clique0(shared, SubgraphPattern::path(4)).found);
    CHECK_THROWS_AS(d_clique0(shared, SubgraphPattern{1, {}}), ParameterError);
}

TEST_CASE("agreement with the oracle on random graphs") {
    std::mt19937_64 rng(42);
    for (std::size_t n : {5u, 8u, 12u, 27u}) {
        for (int i = 0; i < 30; ++i) {
            double p = std::uniform_real_distribution<double>(0.02, 0.3)(rng);
            Graph g = random_graph(n, p, rng());
            bool tri = oracle_contains(g, SubgraphPattern::triangle());
            CHECK(tri_partition(g).found == tri);
            CHECK(tri_partition(g, true).found == tri);
            CHECK(tri == (oracle::triangles_by_triples(g) > 0));
            if (n <= 12) {
                auto c4 = SubgraphPattern::cycle(4);
                CHECK(d_clique0(g, c4).found == oracle_contains(g, c4));
                CHECK(d_clique0(g, c4, true).found == oracle_contains(g, c4));
            }
        }
    }
}

TEST_CASE("round and message bounds") {
    for (std::size_t n : {8u, 27u, 64u}) {
        Graph g = random_graph(n, 0.1, n);
        DetectionResult u = tri_partition(g), p = tri_partition(g, true);
        CHECK(u.ledger.rounds <= unpacked_round_bound(u.n_effective));
        CHECK(p.ledger.rounds <= u.ledger.rounds);
        if (n >= 64) CHECK(p.ledger.rounds < u.ledger.rounds);
        double cap = 3 * std::pow(static_cast<double>(u.n_effective), 4.0 / 3.0);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(static_cast<double>(u.originated[i]) <= cap + 1e-6);
            // Relays forward each word once; the final broadcast adds up to n.
            CHECK(u.ledger.per_node_sent[i] <= 2 * u.originated[i] + n + 2 * cap);
        }
        CHECK(u.ledger.max_link_use <= 1);

        DetectionResult again = tri_partition(g);
        CHECK(again.found == u.found);
        CHECK(again.ledger == u.ledger);
    }
}
