#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coalnet/errors.hpp"
#include "coalnet/spectral.hpp"
#include "test_support.hpp"

#include <Eigen/Eigenvalues>
#include <filesystem>
#include <map>
#include <random>

using namespace coalnet;
using namespace coalnet::testing;

TEST_CASE("two-cell motif with unit weights") {
    Network n = build_network(2, {{1, 1, 1}, {2, 2, 1}, {1, 2, 1}, {2, 1, 1}});
    CHECK(adjacency(n) == mat({{1, 1}, {1, 1}}));
    CHECK(n.is_regular());
}

TEST_CASE("single cell") {
    Network n = build_network(1, {});
    CHECK(adjacency(n) == mat({{0}}));
    CHECK(valency(n, 1) == 0);
    CHECK(n.is_regular());
    Network loop = build_network(1, {{1, 1, Rational(7)}});
    CHECK(laplacian(loop) == mat({{0}})); // v(i) - w_ii
}

TEST_CASE("bidirectional triangle Laplacian") {
    Network n = data_network("fig2_n1.nw");
    CHECK(laplacian(n) == mat({{2, -1, -1}, {-1, 2, -1}, {-1, -1, 2}}));
    CHECK(valency(n, 1) == 2);
    CHECK(n.is_regular());
}

TEST_CASE("weighted three-cell Laplacians") {
    CHECK(laplacian(data_network("fig4_n2.nw")) == mat({{0, 0, 0}, {-1, 3, -2}, {-1, -1, 2}}));
    RatMat w5 = adjacency(data_network("fig5_n2.nw"));
    CHECK(w5(1, 0) == 2);
    CHECK(w5(2, 0) == 1);
    CHECK(w5(2, 1) == 1);
    CHECK(laplacian(data_network("fig5_n1.nw")) == mat({{0, 0, 0}, {-1, 1, 0}, {-1, -1, 2}}));
    CHECK(laplacian(data_network("fig6_n1.nw")) == mat({{0, 0, 0}, {-1, 2, -1}, {0, 0, 0}}));
    CHECK(laplacian(data_network("fig7_n2.nw")) == mat({{0, 0, 0}, {2, 8, -10}, {2, 5, -7}}));
}

TEST_CASE("valency by brute-force row sum") {
    // independent route: sum incoming edge weights straight off the edge list
    for (const char* name : {"fig4_n2.nw", "fig5_n2.nw", "fig7_n2.nw"}) {
        Network n = data_network(name);
        for (int cell = 1; cell <= n.n_cells(); ++cell) {
            Rational direct = 0;
            for (const auto& e : n.edges())
                if (e.target == cell) direct += e.weight;
            CHECK(valency(n, cell) == direct);
        }
    }
    // negative-weight cycle: cell 3 of the last motif collects -2 and 10
    CHECK(valency(data_network("fig7_n2.nw"), 2) == 8);
    CHECK(valency(data_network("fig7_n2.nw"), 3) == -7);
}

TEST_CASE("edge validation and merging") {
    CHECK_THROWS_AS(build_network(2, {{1, 3, 1}}), IndexError);
    CHECK_THROWS_AS(build_network(0, {}), IndexError);
    CHECK_THROWS_AS(build_network(3, {{1, 2, 1}}), ConnectivityError);
    Network dup = build_network(2, {{1, 2, 1}, {1, 2, Rational(1, 2)}, {2, 1, 1}});
    CHECK(adjacency(dup)(1, 0) == Rational(3, 2));
    CHECK(dup.edges().size() == 2);
    // an explicit weight-0 edge is treated as absent
    CHECK_THROWS_AS(build_network(3, {{1, 2, 1}, {2, 3, 0}}), ConnectivityError);
}

TEST_CASE("coalescence of the two-cell motifs") {
    CoalescenceSpec spec = data_spec("fig1.spec");
    Network n = coalesce(spec);
    CHECK(adjacency(n) == mat({{1, 1, 0}, {1, 2, 1}, {0, 1, 1}}));
    CHECK_FALSE(n.is_regular()); // self-loop weights at the merged cell add up
    CHECK_FALSE(is_ffcn(spec));
}

TEST_CASE("coalescence into network 6") {
    CoalescenceSpec spec = data_spec("fig2.spec");
    CHECK(is_ffcn(spec));
    Network n = coalesce(spec);
    CHECK(laplacian(n) == mat({{2, -1, -1, 0, 0},
                               {-1, 2, -1, 0, 0},
                               {-1, -1, 2, 0, 0},
                               {0, 0, -1, 2, -1},
                               {0, 0, -1, -1, 2}}));
}

TEST_CASE("merging two single cells") {
    CoalescenceSpec spec{build_network(1, {}), 1, build_network(1, {}), 1};
    CHECK(coalesce(spec).n_cells() == 1);
    CHECK(is_ffcn(spec));
}

TEST_CASE("non-canonical merge cells are renumbered internally") {
    // merge cell 1 of the triangle with cell 2 of the second motif
    Network tri = data_network("fig2_n1.nw");
    Network m = build_network(3, {{2, 1, 1}, {2, 3, 1}, {3, 1, 1}});
    CoalescenceSpec spec{tri, 1, m, 2};
    Network n = coalesce(spec);
    CHECK(n.n_cells() == 5);
    // the triangle is symmetric, so the head block is unchanged
    RatMat l = laplacian(n);
    for (int i = 0; i < 3; ++i)
        for (int j = 3; j < 5; ++j) CHECK(l(i, j) == 0);
    CHECK(is_ffcn(spec)); // cell 2 of m only receives from cell... check against the rule
}

TEST_CASE("ffcn detection matches the zero-row rule") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> wdist(-3, 3);
    int built = 0;
    while (built < 50) {
        int n2 = 2 + int(rng() % 4);
        std::vector<Edge> edges;
        for (int i = 1; i <= n2; ++i)
            for (int j = 1; j <= n2; ++j) {
                if (rng() % 3) continue;
                int w = wdist(rng);
                if (w) edges.push_back({i, j, Rational(w)});
            }
        Network second;
        try {
            second = build_network(n2, edges);
        } catch (const ConnectivityError&) {
            continue;
        }
        ++built;
        CoalescenceSpec spec{build_network(2, {{1, 2, 1}, {2, 1, 1}}), 2, second, 1};
        RatVec c_row = laplacian(second).row(0);
        CHECK(is_ffcn(spec) == ratvec_is_zero(c_row));
    }
}

TEST_CASE("structural properties of random coalescences") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> wdist(1, 3);
    auto random_connected = [&](int n) {
        while (true) {
            std::vector<Edge> edges;
            for (int i = 2; i <= n; ++i) edges.push_back({int(rng() % (i - 1)) + 1, i, Rational(wdist(rng))});
            for (int k = 0; k < n; ++k) {
                int i = int(rng() % n) + 1, j = int(rng() % n) + 1;
                edges.push_back({i, j, Rational(wdist(rng))});
            }
            try {
                return build_network(n, edges);
            } catch (const ConnectivityError&) {
            }
        }
    };
    for (int trial = 0; trial < 40; ++trial) {
        int n1 = 2 + int(rng() % 4), n2 = 2 + int(rng() % 4);
        Network a = random_connected(n1), b = random_connected(n2);
        CoalescenceSpec spec{a, 1 + int(rng() % n1), b, 1 + int(rng() % n2)};
        Network n = coalesce(spec);
        CHECK(n.n_cells() == n1 + n2 - 1);
        // Laplacian rows sum to zero exactly
        RatMat l = laplacian(n);
        for (int i = 0; i < l.rows(); ++i) {
            Rational s = 0;
            for (int j = 0; j < l.cols(); ++j) s += l(i, j);
            CHECK(s == 0);
        }
        // block form: the head-tail corners vanish for W, D and L
        for (const RatMat& m : {adjacency(n), n.valency_matrix(), l})
            for (int i = 0; i < n1 - 1; ++i)
                for (int j = n1; j < n.n_cells(); ++j) {
                    CHECK(m(i, j) == 0);
                    CHECK(m(j, i) == 0);
                }
        // a coalescence of regular networks with positive valency is not regular
        if (a.is_regular() && b.is_regular() && a.valency(1) > 0 && b.valency(1) > 0)
            CHECK_FALSE(n.is_regular());
    }
}

TEST_CASE("sequential coalescence") {
    Network block = data_network("fig4_n2.nw");
    RFoldSpec r1{{block}, {}};
    CHECK(sequential_coalesce(r1).adjacency() == block.adjacency());

    RFoldSpec r2{{block, block}, {{3, 1}}};
    CoalescenceSpec pair{block, 3, block, 1};
    CHECK(sequential_coalesce(r2).adjacency() == coalesce(pair).adjacency());

    RFoldSpec r3{{block, block, block}, {{3, 1}, {5, 1}}};
    Network chain = sequential_coalesce(r3);
    CHECK(chain.n_cells() == 7);
    // derived check: float eigenvalues of the assembled Laplacian, rounded
    Eigen::EigenSolver<Eigen::MatrixXd> solver(laplacian(chain).to_double());
    std::map<long, int> counts;
    for (int i = 0; i < 7; ++i) {
        CHECK(std::abs(solver.eigenvalues()(i).imag()) < 1e-9);
        counts[std::lround(solver.eigenvalues()(i).real())] += 1;
    }
    CHECK(counts == std::map<long, int>{{0, 1}, {1, 3}, {4, 3}});

    RFoldSpec bad{{block, data_network("fig1_n2.nw")}, {{3, 1}}};
    CHECK_THROWS_AS(sequential_coalesce(bad), PreconditionError);
}

TEST_CASE("network file round trip") {
    Network n = data_network("fig7_n2.nw");
    std::string path = (std::filesystem::temp_directory_path() / "coalnet_roundtrip.nw").string();
    save_network(n, path);
    Network back = load_network(path);
    CHECK(back.adjacency() == n.adjacency());
    CHECK_THROWS_AS(parse_network_json("{\"n_cells\": 2, \"edges\": [[1, 2, 0.25]]}"), ParseError);
    Network frac = parse_network_json("{\"n_cells\": 2, \"edges\": [[1, 2, \"0.25\"]]}");
    CHECK(frac.adjacency()(1, 0) == Rational(1, 4));
}

TEST_CASE("labels survive the coalescence") {
    Network a = build_network(2, {{1, 2, 1}, {2, 1, 1}}, {"u", "v"});
    Network b = build_network(2, {{1, 2, 1}, {2, 1, 1}}, {"p", "q"});
    Network n = coalesce({a, 2, b, 1});
    REQUIRE(n.labels().size() == 3);
    CHECK(n.labels()[0] == "u");
    CHECK(n.labels()[1] == "v+p");
    CHECK(n.labels()[2] == "q");
}
