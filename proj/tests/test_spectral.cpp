#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coalnet/errors.hpp"
#include "coalnet/spectral.hpp"
#include "test_support.hpp"

#include <random>

using namespace coalnet;
using namespace coalnet::testing;

namespace {

// exact chain verification: (A - mu I) chain[k] = chain[k-1], chain[0] in the kernel
void check_chains(const RatMat& a, const EigenvalueData& e) {
    REQUIRE(e.exact);
    RatMat b = a - RatMat::identity(a.rows()).scaled(e.exact_value);
    int total = 0;
    for (const auto& chain : e.chains) {
        total += static_cast<int>(chain.size());
        CHECK(ratvec_is_zero(b.apply(chain[0])));
        for (size_t k = 1; k < chain.size(); ++k) CHECK(b.apply(chain[k]) == chain[k - 1]);
    }
    CHECK(total == e.alg_mult);
    CHECK(static_cast<int>(e.chains.size()) == e.geo_mult);
}

std::vector<RatVec> generalized_space(const EigenvalueData& e) {
    std::vector<RatVec> all;
    for (const auto& chain : e.chains) all.insert(all.end(), chain.begin(), chain.end());
    return all;
}

Network random_connected(std::mt19937& rng, int n, bool no_inputs_to_first) {
    std::uniform_int_distribution<int> wdist(-3, 3);
    while (true) {
        std::vector<Edge> edges;
        for (int i = 2; i <= n; ++i) {
            int from = no_inputs_to_first ? 1 + int(rng() % (i - 1)) : 1 + int(rng() % n);
            edges.push_back({from, i, Rational(1 + int(rng() % 3))});
        }
        for (int k = 0; k < n + 1; ++k) {
            int i = 1 + int(rng() % n), j = 1 + int(rng() % n);
            if (no_inputs_to_first && j == 1) continue;
            int w = wdist(rng);
            if (w) edges.push_back({i, j, Rational(w)});
        }
        try {
            Network net = build_network(n, edges);
            if (!no_inputs_to_first) return net;
            bool ok = true;
            for (int j = 2; j <= n; ++j)
                if (net.adjacency()(0, j - 1) != 0) ok = false;
            if (ok) return net;
        } catch (const ConnectivityError&) {
        }
    }
}

} // namespace

TEST_CASE("network 6 spectral structure") {
    Network n = coalesce(data_spec("fig2.spec"));
    SpectralStructure s = eigen_structure(n.laplacian());
    REQUIRE(s.all_exact);
    REQUIRE(s.eigenvalues.size() == 3);
    const auto* e0 = s.find_exact(0);
    const auto* e1 = s.find_exact(1);
    const auto* e3 = s.find_exact(3);
    REQUIRE(e0);
    REQUIRE(e1);
    REQUIRE(e3);
    CHECK(e0->alg_mult == 1);
    CHECK(e1->alg_mult == 1);
    CHECK(e3->alg_mult == 3);
    CHECK(e0->is_semisimple());
    CHECK(e1->is_semisimple());
    CHECK(e3->is_semisimple());
    check_chains(n.laplacian(), *e3);
    CHECK(same_span(generalized_space(*e3),
                    {vec({1, 0, -1, 0, 1}), vec({0, 1, -1, 0, 1}), vec({0, 0, 0, 1, -1})}));
    CHECK(same_span(generalized_space(*e0), {vec({1, 1, 1, 1, 1})}));
    CHECK(same_span(generalized_space(*e1), {vec({0, 0, 0, 1, 1})}));
}

TEST_CASE("coalescence with a defective eigenvalue") {
    Network n = coalesce(data_spec("fig4.spec"));
    SpectralStructure s = eigen_structure(n.laplacian());
    const auto* e1 = s.find_exact(1);
    REQUIRE(e1);
    CHECK(e1->alg_mult == 2);
    CHECK(e1->geo_mult == 1);
    check_chains(n.laplacian(), *e1);
    REQUIRE(e1->chains.size() == 1);
    REQUIRE(e1->chains[0].size() == 2);
    // the printed generalized eigenvector spans the same G_1 together with E_1
    CHECK(same_span(generalized_space(*e1), {vec({0, 0, 0, 1, 1}), vec({0, 1, 1, -1, -1})}));
    RatMat b = n.laplacian() - RatMat::identity(5);
    CHECK(same_span({b.apply(vec({0, 1, 1, -1, -1}))}, {vec({0, 0, 0, 1, 1})}));
}

TEST_CASE("chain of length three") {
    Network n = coalesce(data_spec("fig5.spec"));
    SpectralStructure s = eigen_structure(n.laplacian());
    const auto* e1 = s.find_exact(1);
    REQUIRE(e1);
    CHECK(same_span(generalized_space(*e1), {vec({0, 1, 1, 2, 3})}));
    const auto* e2 = s.find_exact(2);
    REQUIRE(e2);
    CHECK(e2->alg_mult == 3);
    CHECK(e2->geo_mult == 1);
    REQUIRE(e2->chains.size() == 1);
    REQUIRE(e2->chains[0].size() == 3);
    check_chains(n.laplacian(), *e2);
    CHECK(same_span(generalized_space(*e2),
                    {vec({0, 0, 0, 0, 1}), vec({0, 0, 0, -1, 1}), vec({0, 0, 1, -3, 0})}));
    // the printed third basis vector has chain rank exactly 3
    RatMat b = n.laplacian() - RatMat::identity(5).scaled(2);
    RatVec w = vec({0, 0, 1, -3, 0});
    CHECK_FALSE(ratvec_is_zero(b.power(2).apply(w)));
    CHECK(ratvec_is_zero(b.power(3).apply(w)));
}

TEST_CASE("zero matrix") {
    RatMat z(3, 3);
    SpectralStructure s = eigen_structure(z);
    REQUIRE(s.eigenvalues.size() == 1);
    CHECK(s.eigenvalues[0].exact_value == 0);
    CHECK(s.eigenvalues[0].alg_mult == 3);
    CHECK(s.eigenvalues[0].geo_mult == 3);
}

TEST_CASE("force-exact fails on irrational spectra") {
    // a directed 3-cycle has a complex conjugate Laplacian eigenvalue pair
    Network n = build_network(3, {{1, 2, 1}, {2, 3, 1}, {3, 1, 1}});
    SpectralStructure loose = eigen_structure(n.laplacian());
    CHECK_FALSE(loose.all_exact);
    int complex_clusters = 0;
    for (const auto& e : loose.eigenvalues)
        if (!e.exact && std::abs(e.value.imag()) > 0.1) ++complex_clusters;
    CHECK(complex_clusters == 2);
    CHECK_THROWS_AS(eigen_structure(n.laplacian(), {true, 1e-9}), PreconditionError);
}

TEST_CASE("reduced laplacians") {
    ReducedLaplacians r4 = reduced_laplacians(data_network("fig4_n2.nw"), 1);
    CHECK(r4.l_core == mat({{3, -2}, {-1, 2}}));
    CHECK(r4.l_col == vec({-1, -1}));
    CHECK(r4.l_bar == mat({{-1, 3, -2}, {-1, -1, 2}}));
    ReducedLaplacians r6 = reduced_laplacians(data_network("fig6_n2.nw"), 1);
    CHECK(r6.l_col == vec({-1, 0}));
    ReducedLaplacians r1 = reduced_laplacians(build_network(1, {}), 1);
    CHECK(r1.l_core.rows() == 0);
    CHECK(r1.l_col.empty());
}

TEST_CASE("coupling condition verdicts") {
    auto rep2 = coupling_condition(data_network("fig2_n2.nw"), 1, 3);
    CHECK(rep2.column_vector == vec({-1, -1}));
    CHECK(rep2.in_image);
    REQUIRE(rep2.particular_solution);
    // the stored solution satisfies its defining equation
    ReducedLaplacians red = reduced_laplacians(data_network("fig2_n2.nw"), 1);
    RatMat b = red.l_core - RatMat::identity(2).scaled(3);
    CHECK(b.apply(*rep2.particular_solution) == ratvec_scaled(red.l_col, Rational(-1)));

    CHECK_FALSE(coupling_condition(data_network("fig4_n2.nw"), 1, 1).in_image);
    CHECK(coupling_condition(data_network("fig5_n2.nw"), 1, 1).in_image);
    CHECK_FALSE(coupling_condition(data_network("fig6_n2.nw"), 1, 2).in_image);
}

TEST_CASE("eigenvector lifting") {
    CoalescenceSpec spec5 = data_spec("fig5.spec");
    LiftedVector lifted = lift_eigenvector(spec5, 1, vec({0, 1, 1}));
    CHECK(lifted.genuine_eigenvector());
    CHECK(normalize_leading(lifted.vector) == RatVec{0, 1, 1, 2, 3});

    LiftedVector gen = lift_eigenvector(spec5, 2, vec({0, 0, 1}));
    CHECK(gen.chain_rank > 1); // coupling condition fails and the head meets the merged cell
    RatMat b = coalesce(spec5).laplacian() - RatMat::identity(5).scaled(2);
    CHECK(ratvec_is_zero(b.power(gen.chain_rank).apply(gen.vector)));
    CHECK_FALSE(ratvec_is_zero(b.power(gen.chain_rank - 1).apply(gen.vector)));
    // the printed choice of tail completion is also a valid lift
    CHECK(ratvec_is_zero(b.power(3).apply(vec({0, 0, 1, -3, 0}))));

    // a head vector vanishing at the merged cell lifts by zero padding
    CoalescenceSpec spec2 = data_spec("fig2.spec");
    LiftedVector padded = lift_eigenvector(spec2, 3, vec({1, -1, 0}));
    CHECK(padded.genuine_eigenvector());
    CHECK(padded.vector == RatVec{1, -1, 0, 0, 0});

    CHECK_THROWS_AS(lift_eigenvector(spec2, 3, vec({1, 1, 1})), InputError);
}

TEST_CASE("zero eigenspace basis") {
    CoalescenceSpec spec6 = data_spec("fig6.spec");
    auto basis = zero_eigenspace_basis(spec6);
    REQUIRE(basis.size() == 3);
    CHECK(basis[0] == RatVec{1, 1, 1, 1, 1});
    CHECK(basis[1] == RatVec{0, 1, 2, 0, -2});
    CHECK(basis[2] == RatVec{0, 0, 0, 1, 2});
    // membership in the kernel, exactly, and span equality with it
    RatMat l = coalesce(spec6).laplacian();
    for (const auto& v : basis) CHECK(ratvec_is_zero(l.apply(v)));
    CHECK(same_span(basis, l.kernel_basis()));

    auto basis2 = zero_eigenspace_basis(data_spec("fig2.spec"));
    REQUIRE(basis2.size() == 1);
    CHECK(basis2[0] == RatVec{1, 1, 1, 1, 1});
}

TEST_CASE("spectrum union check on the worked examples") {
    UnionCheckReport u2 = spectrum_union_check(data_spec("fig2.spec"));
    CHECK(u2.ok);
    REQUIRE(u2.rows.size() == 3);
    std::map<long, int> mult;
    for (const auto& row : u2.rows) mult[std::lround(row.value.real())] = row.mult_coalescence;
    CHECK(mult == std::map<long, int>{{0, 1}, {1, 1}, {3, 3}});

    UnionCheckReport u6 = spectrum_union_check(data_spec("fig6.spec"));
    CHECK(u6.ok);
    for (const auto& row : u6.rows)
        if (std::abs(row.value.real()) < 1e-9) CHECK(row.mult_coalescence == 3); // 2 + 2 - 1

    // a single-cell second network leaves the spectrum unchanged
    CoalescenceSpec single{data_network("fig2_n1.nw"), 3, build_network(1, {}), 1};
    UnionCheckReport us = spectrum_union_check(single);
    CHECK(us.ok);
    for (const auto& row : us.rows) CHECK(row.mult_coalescence == row.mult_first);

    CHECK_THROWS_AS(spectrum_union_check(data_spec("fig1.spec")), PreconditionError);
}

TEST_CASE("multiplicity identities on random feedforward coalescences") {
    std::mt19937 rng(2024);
    int done = 0;
    while (done < 60) {
        int n1 = 2 + int(rng() % 5), n2 = 2 + int(rng() % 5);
        Network first = random_connected(rng, n1, false);
        Network second = random_connected(rng, n2, true);
        CoalescenceSpec spec{first, n1, second, 1};
        if (!is_ffcn(spec)) continue;
        ++done;
        UnionCheckReport u = spectrum_union_check(spec);
        CHECK(u.ok);

        // semisimplicity bookkeeping per shared nonzero exact eigenvalue
        SpectralStructure s1 = eigen_structure(first.laplacian());
        SpectralStructure s2 = eigen_structure(second.laplacian());
        SpectralStructure sn = eigen_structure(coalesce(spec).laplacian());
        for (const auto& e : sn.eigenvalues) {
            if (!e.exact) continue;
            if (e.exact_value == 0) continue; // treated in the nonnegative-weight case below
            auto rep = coupling_condition(second, 1, e.exact_value);
            const auto* e1 = s1.find_exact(e.exact_value);
            const auto* e2 = s2.find_exact(e.exact_value);
            int g1 = e1 ? e1->geo_mult : 0;
            int g2 = e2 ? e2->geo_mult : 0;
            if (rep.in_image) {
                CHECK(e.geo_mult == g1 + g2);
            } else if (e1) {
                // does some head eigenvector have a nonzero merged-cell coordinate?
                bool head_hits_c = false;
                for (const auto& chain : e1->chains)
                    if (chain[0][n1 - 1] != 0) head_hits_c = true;
                if (head_hits_c) CHECK(e.alg_mult > e.geo_mult);
            }
        }
    }
}

TEST_CASE("zero eigenvalue is semisimple for nonnegative weights") {
    // holds for nonnegative weight matrices; signed weights can break it
    // (a two-cell network with weights 1 and -1 has a nilpotent Laplacian)
    Network nilpotent = build_network(2, {{2, 1, 1}, {1, 2, -1}});
    SpectralStructure bad = eigen_structure(nilpotent.laplacian());
    CHECK(bad.find_exact(0)->alg_mult == 2);
    CHECK(bad.find_exact(0)->geo_mult == 1);

    std::mt19937 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + int(rng() % 5);
        std::vector<Edge> edges;
        for (int i = 2; i <= n; ++i) edges.push_back({1 + int(rng() % (i - 1)), i, Rational(1 + int(rng() % 3))});
        for (int k = 0; k < n; ++k)
            edges.push_back({1 + int(rng() % n), 1 + int(rng() % n), Rational(1 + int(rng() % 3))});
        Network net = build_network(n, edges);
        const auto* e0 = eigen_structure(net.laplacian()).find_exact(0);
        REQUIRE(e0);
        CHECK(e0->is_semisimple());
    }
}

TEST_CASE("r-fold spectral report with provenance") {
    Network block = data_network("fig4_n2.nw");
    RFoldSpec r2{{data_network("fig2_n1.nw"), data_network("fig2_n2.nw")}, {{3, 1}}};
    FfcnSpectralReport rep = ffcn_spectral_report(r2);
    REQUIRE(rep.all_exact);
    const TaggedChainGroup* g3 = nullptr;
    for (const auto& g : rep.groups)
        if (g.data.exact && g.data.exact_value == 3) g3 = &g;
    REQUIRE(g3);
    REQUIRE(g3->chain_component.size() == 3);
    int from_first = 0, from_second = 0;
    for (int c : g3->chain_component) (c == 1 ? from_first : from_second) += 1;
    CHECK(from_first == 2);
    CHECK(from_second == 1);

    // single-cell tail: the report reduces to the head spectrum
    RFoldSpec single{{data_network("fig2_n1.nw"), build_network(1, {})}, {{3, 1}}};
    FfcnSpectralReport rs = ffcn_spectral_report(single);
    SpectralStructure head = eigen_structure(data_network("fig2_n1.nw").laplacian());
    REQUIRE(rs.groups.size() == head.eigenvalues.size());
    for (size_t i = 0; i < rs.groups.size(); ++i) {
        CHECK(rs.groups[i].data.exact_value == head.eigenvalues[i].exact_value);
        CHECK(rs.groups[i].data.alg_mult == head.eigenvalues[i].alg_mult);
    }

    RFoldSpec r3{{block, block, block}, {{3, 1}, {5, 1}}};
    FfcnSpectralReport rep3 = ffcn_spectral_report(r3);
    for (const auto& g : rep3.groups) {
        if (!g.data.exact) continue;
        if (g.data.exact_value == 1 || g.data.exact_value == 4) CHECK(g.data.alg_mult == 3);
        if (g.data.exact_value == 0) CHECK(g.data.alg_mult == 1);
    }
}

TEST_CASE("numerical jordan check") {
    Eigen::MatrixXd l4 = coalesce(data_spec("fig4.spec")).laplacian().to_double();
    auto [a1, g1] = numerical_jordan_check(l4, {1.0, 0.0});
    CHECK(a1 == 2);
    CHECK(g1 == 1);
    Eigen::MatrixXd l5 = coalesce(data_spec("fig5.spec")).laplacian().to_double();
    auto [a2, g2] = numerical_jordan_check(l5, {2.0, 0.0});
    CHECK(a2 == 3);
    CHECK(g2 == 1);
    auto [a3, g3] = numerical_jordan_check(Eigen::MatrixXd::Identity(4, 4), {1.0, 0.0});
    CHECK(a3 == 4);
    CHECK(g3 == 4);
}
