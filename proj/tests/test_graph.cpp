#include <random>

#include "cclique/errors.hpp"
#include "cclique/graph.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cclique;

namespace {

Graph complete(std::size_t n) { return generate(Family::Complete, {n}); }

}  // namespace

TEST_CASE("generators produce the defining structure") {
    SUBCASE("shared-edge n=10 t=8") {
        Graph g = generate(Family::SharedEdge, {10, 8});
        CHECK(g.edge_count() == 17);
        CHECK(g.has_edge(1, 2));
        for (NodeId k = 3; k <= 10; ++k) {
            CHECK(g.has_edge(1, k));
            CHECK(g.has_edge(2, k));
        }
        CHECK(census(g).t == 8);
    }
    SUBCASE("disjoint n=9 t=3") {
        Graph g = generate(Family::Disjoint, {9, 3});
        CHECK(g.edge_count() == 9);
        CHECK(census(g).t == 3);
        CHECK(census(g).t6 == 3);
    }
    SUBCASE("gnp with p=1 is complete") {
        for (std::uint64_t seed : {0u, 7u, 99u}) {
            GeneratorParams p{4};
            p.p = 1.0;
            CHECK(generate(Family::Gnp, p, seed) == complete(4));
        }
    }
    SUBCASE("parameter errors name the constraint") {
        CHECK_THROWS_AS(generate(Family::SharedEdge, {10, 9}), ParameterError);
        CHECK_THROWS_AS(generate(Family::Disjoint, {8, 3}), ParameterError);
        GeneratorParams bad{4};
        bad.p = 1.5;
        CHECK_THROWS_AS(generate(Family::Gnp, bad), ParameterError);
        CHECK_THROWS_AS(parse_family("nope"), ParameterError);
    }
    SUBCASE("every family satisfies the graph invariants and is seed-deterministic") {
        for (Family f : {Family::Empty, Family::Complete, Family::Path, Family::Cycle, Family::Star, Family::Tree,
                         Family::Gnp, Family::SharedEdge, Family::Disjoint, Family::Forests, Family::Grid,
                         Family::Hubs}) {
            GeneratorParams p{30, 5, 0.2, 3};
            Graph a = generate(f, p, 11), b = generate(f, p, 11);
            CHECK(a.check_invariants());
            CHECK(a == b);
            CHECK(parse_family(family_name(f)) == f);
        }
    }
    SUBCASE("tree and forest families") {
        Graph t = generate(Family::Tree, {50}, 3);
        CHECK(t.edge_count() == 49);
        CHECK(census(t).t == 0);
        GeneratorParams fp{12};
        fp.k = 2;
        Graph f = generate(Family::Forests, fp, 5);
        CHECK(oracle::exact_arboricity(f) <= 2);
    }
    SUBCASE("grid is triangulated with arboricity at most 3") {
        Graph g = generate(Family::Grid, {12});
        CHECK(census(g).t > 0);
        CHECK(oracle::exact_arboricity(g) <= 3);
    }
}

TEST_CASE("census of small graphs") {
    SUBCASE("K4") {
        auto c = census(complete(4));
        CHECK(c.t == 4);
        CHECK(c.t4 == 6);
        CHECK(c.t5 == 0);
        CHECK(c.t6 == 0);
        CHECK(c.delta_max == 2);
    }
    SUBCASE("empty graph") {
        auto c = census(Graph(5));
        CHECK(c.t == 0);
        CHECK(c.delta_max == 0);
    }
    SUBCASE("counting identity on K6: t4 equals the sum over edges of C(delta_e, 2)") {
        auto c = census(complete(6));
        std::uint64_t s = 0;
        for (auto d : c.delta_e) s += d * (d - 1) / 2;
        CHECK(c.t4 == s);
        CHECK(c.t == 20);
    }
}

TEST_CASE("census properties on random graphs") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 100; ++i) {
        std::size_t n = 4 + rng() % 61;
        GeneratorParams p{n};
        p.p = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
        Graph g = generate(Family::Gnp, p, rng());
        auto c = census(g);
        CHECK(c.t == oracle::triangles_by_triples(g));
        CHECK(c.t4 + c.t5 + c.t6 == c.t * (c.t - (c.t ? 1 : 0)) / 2);
        if (c.t > 0) CHECK(3.0 * c.t * c.delta_max >= 2.0 * c.t4);
        CHECK(oracle_contains(g, SubgraphPattern::triangle()) == (c.t > 0));
    }
}

TEST_CASE("census formula path agrees with pair enumeration") {
    // Enough triangles to leave the pairwise enumeration regime.
    Graph g = complete(36);
    auto c = census(g);
    CHECK(c.t == 7140);
    std::uint64_t s = 0;
    for (auto d : c.delta_e) s += d * (d - 1) / 2;
    CHECK(c.t4 == s);
    // t6 in K_n counts pairs of vertex-disjoint triples: C(n,3) * C(n-3,3) / 2.
    CHECK(c.t6 == 7140ull * 5456 / 2);
    CHECK(c.t4 + c.t5 + c.t6 == c.t * (c.t - 1) / 2);
}

TEST_CASE("containment oracle") {
    CHECK(oracle_contains(complete(4), SubgraphPattern::triangle()));
    CHECK_FALSE(oracle_contains(generate(Family::Cycle, {4}), SubgraphPattern::triangle()));
    CHECK_FALSE(oracle_contains(generate(Family::SharedEdge, {10, 8}), SubgraphPattern::clique(4)));
    CHECK(oracle_contains(generate(Family::SharedEdge, {16, 8}), SubgraphPattern::path(4)));
    CHECK(oracle_contains(generate(Family::Grid, {9}), SubgraphPattern::cycle(4)));
    CHECK_FALSE(oracle_contains(generate(Family::Tree, {20}, 1), SubgraphPattern::cycle(4)));
    CHECK_FALSE(oracle_contains(complete(3), SubgraphPattern::clique(4)));
}

TEST_CASE("patterns") {
    CHECK(SubgraphPattern::parse("triangle").edges.size() == 3);
    CHECK(SubgraphPattern::parse("clique:4").edges.size() == 6);
    CHECK(SubgraphPattern::parse("cycle:4").diameter() == 2);
    CHECK(SubgraphPattern::parse("path:4").diameter() == 3);
    CHECK(SubgraphPattern::clique(4).diameter() == 1);
    CHECK(SubgraphPattern::cycle(5).connected());
    CHECK_THROWS_AS(SubgraphPattern::parse("wheel:5"), ParameterError);
}

TEST_CASE("degeneracy") {
    CHECK(degeneracy(generate(Family::Tree, {40}, 9)) == 1);
    CHECK(degeneracy(complete(4)) == 3);
    CHECK(degeneracy(generate(Family::Star, {16})) == 1);
    CHECK(degeneracy(Graph(3)) == 0);

    SUBCASE("sandwiches exact arboricity on tiny graphs") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 40; ++i) {
            GeneratorParams p{3 + rng() % 8};
            p.p = 0.5;
            Graph g = generate(Family::Gnp, p, rng());
            std::size_t a = oracle::exact_arboricity(g), d = degeneracy(g);
            CHECK(a <= d);
            if (a > 0) CHECK(d <= 2 * a - 1);
        }
    }
    SUBCASE("monotone under edge addition") {
        std::mt19937_64 rng(6);
        const std::size_t n = 30;
        std::vector<Edge> e;
        std::size_t last = 0;
        for (int step = 0; step < 150; ++step) {
            NodeId u = 1 + rng() % n, v = 1 + rng() % n;
            if (u == v) continue;
            Edge x{std::min(u, v), std::max(u, v)};
            if (std::find(e.begin(), e.end(), x) != e.end()) continue;
            e.push_back(x);
            std::size_t d = degeneracy(Graph(n, e));
            CHECK(d >= last);
            last = d;
        }
    }
}

TEST_CASE("edge-list format") {
    Graph k3 = parse_edge_list("n 3\n1 2\n2 3\n1 3");
    CHECK(k3 == complete(3));
    CHECK(parse_edge_list(serialize_edge_list(k3)) == k3);

    Graph g = generate(Family::Gnp, {20, 0, 0.3}, 4);
    CHECK(parse_edge_list(serialize_edge_list(g)) == g);

    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_edge_list(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("n 2\n1 1") == 2);
    CHECK(line_of("n 3\n1 2\n2 1") == 3);
    CHECK(line_of("n 3\n1 4") == 2);
    CHECK(line_of("n 3\n1 2 3") == 2);
    CHECK(line_of("n 3\n\n1 x") == 3);
    CHECK(line_of("3\n1 2") == 1);
}

TEST_CASE("graph construction rejects bad edges") {
    CHECK_THROWS_AS(Graph(3, {{1, 1}}), ParameterError);
    CHECK_THROWS_AS(Graph(3, {{1, 4}}), ParameterError);
    CHECK_THROWS_AS(Graph(3, {{1, 2}, {2, 1}}), ParameterError);
}
