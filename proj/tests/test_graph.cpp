#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <sstream>

#include "bivirus/errors.hpp"
#include "bivirus/graph.hpp"
#include "bivirus/sis.hpp"
#include "support/test_helpers.hpp"

using namespace bivirus;

namespace {

Graph parse(const std::string& text) {
    std::istringstream in(text);
    return load_edge_list(in);
}

} // namespace

TEST_CASE("triangle edge list") {
    const Graph g = parse("0 1\n1 2\n2 0");
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 3);
    CHECK(g.weight(0, 1) == 1.0);
    CHECK(g.weight(1, 0) == 1.0);
    CHECK(g.weight(0, 0) == 0.0);
}

TEST_CASE("comment lines are skipped") {
    const Graph g = parse("# c\n0 1\n# c\n1 2\n2 0");
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 3);
}

TEST_CASE("arbitrary ids are remapped in order of first appearance") {
    const Graph g = parse("709 12\n12 alpha\nalpha 709");
    CHECK(g.node_count() == 3);
    CHECK(g.label(0) == "709");
    CHECK(g.label(1) == "12");
    CHECK(g.label(2) == "alpha");
}

TEST_CASE("load failures") {
    CHECK_THROWS_AS(parse("0 1\n2 3"), DisconnectedError);
    CHECK_THROWS_AS(parse("0 0"), SelfLoopError);
    CHECK_THROWS_AS(parse("0 1\n0 1"), DuplicateEdgeError);
    CHECK_THROWS_AS(parse("0 1 2.0\n1 0 3.0"), DuplicateEdgeError);  // relisted, new weight
    CHECK_THROWS_AS(parse("0 1 -1"), NegativeWeightError);
    CHECK_THROWS_AS(parse("0 1 0"), NegativeWeightError);
    CHECK_THROWS_AS(parse("0"), ParseError);
    CHECK_THROWS_AS(parse("0 1 x"), ParseError);
    CHECK_THROWS_AS(parse("0 1 1 1"), ParseError);
    CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("emit/load round trip reproduces the labeled graph") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const Graph g = testing::random_connected_graph(25, 40, seed, /*weighted=*/true);
        std::ostringstream out;
        g.emit(out);
        std::istringstream in(out.str());
        const Graph h = load_edge_list(in);
        REQUIRE(h.node_count() == g.node_count());
        REQUIRE(h.edge_count() == g.edge_count());

        // node indices may be re-interned; identity lives in the labels
        std::map<std::string, std::size_t> h_index;
        for (std::size_t i = 0; i < h.node_count(); ++i) h_index[h.label(i)] = i;
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            REQUIRE(h_index.count(g.label(i)) == 1);
            for (std::size_t j = 0; j < g.node_count(); ++j)
                CHECK(h.weight(h_index[g.label(i)], h_index[g.label(j)]) == g.weight(i, j));
        }
    }
}

TEST_CASE("degree stats") {
    const DegreeStats k3 = degree_stats(Graph::complete(3));
    CHECK(k3.d_min == 2.0);
    CHECK(k3.d_max == 2.0);

    const DegreeStats s5 = degree_stats(Graph::star(5));
    CHECK(s5.d_min == 1.0);
    CHECK(s5.d_max == 4.0);

    const DegreeStats c4 = degree_stats(Graph::cycle(4));
    CHECK(c4.d_min == 2.0);
    CHECK(c4.d_max == 2.0);
}

TEST_CASE("degree stats of d-regular graphs") {
    for (std::size_t n : {4, 7, 10}) {
        const DegreeStats st = degree_stats(Graph::complete(n));
        CHECK(st.d_min == static_cast<double>(n - 1));
        CHECK(st.d_max == static_cast<double>(n - 1));
    }
    const DegreeStats st = degree_stats(Graph::cycle(9));
    CHECK(st.d_min == 2.0);
    CHECK(st.d_max == 2.0);
}

TEST_CASE("degree-bound sufficiency verdicts") {
    const Graph k3 = Graph::complete(3);
    const Graph s5 = Graph::star(5);

    const auto v1 = santos_bounds(VirusParams::from_tau(1.0), VirusParams::from_tau(0.5), k3, k3);
    CHECK(v1.outcome == SufficiencyOutcome::Virus2Dies);
    CHECK(v1.t1_dmin_a == doctest::Approx(2.0));
    CHECK(v1.t2_dmax_b == doctest::Approx(1.0));

    const auto v2 = santos_bounds(VirusParams::from_tau(1.0), VirusParams::from_tau(1.0), s5, s5);
    CHECK(v2.outcome == SufficiencyOutcome::Inconclusive);

    const auto v3 = santos_bounds(VirusParams::from_tau(0.3), VirusParams::from_tau(1.0), k3, k3);
    CHECK(v3.outcome == SufficiencyOutcome::Virus1Dies);
}

TEST_CASE("sufficiency verdict is antisymmetric under swapping the pairs") {
    std::mt19937_64 eng(99);
    std::uniform_real_distribution<double> tau(0.1, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        const Graph a = testing::random_connected_graph(10, 8, 100 + rep);
        const Graph b = testing::random_connected_graph(10, 14, 200 + rep);
        const VirusParams p1 = VirusParams::from_tau(tau(eng));
        const VirusParams p2 = VirusParams::from_tau(tau(eng));
        const auto fwd = santos_bounds(p1, p2, a, b);
        const auto rev = santos_bounds(p2, p1, b, a);
        switch (fwd.outcome) {
            case SufficiencyOutcome::Virus2Dies:
                CHECK(rev.outcome == SufficiencyOutcome::Virus1Dies);
                break;
            case SufficiencyOutcome::Virus1Dies:
                CHECK(rev.outcome == SufficiencyOutcome::Virus2Dies);
                break;
            case SufficiencyOutcome::Inconclusive:
                CHECK(rev.outcome == SufficiencyOutcome::Inconclusive);
                break;
        }
    }
}
