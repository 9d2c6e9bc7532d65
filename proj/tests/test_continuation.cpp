#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coalnet/continuation.hpp"
#include "coalnet/errors.hpp"
#include "coalnet/series.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace coalnet;
using namespace coalnet::testing;

TEST_CASE("series arithmetic and implicit branches") {
    RatSeries s = RatSeries::variable(5);
    RatSeries sq = s * s;
    CHECK(sq.c[2] == 1);
    RatSeries comp = sq.compose(s.scaled(3)); // (3s)^2
    CHECK(comp.c[2] == 9);
    CHECK_THROWS_AS(sq.compose(RatSeries::constant(1, 5)), InputError);

    // e(x, l) = x (x/2 + 3 l + x l) has the nontrivial root x = -6 l + ...
    Poly e = Poly::term(2, 0, 0, Rational(1, 2)) + Poly::term(1, 0, 1, 3) + Poly::term(2, 0, 1, 1);
    Poly reduced;
    for (const auto& t : e.terms()) reduced = reduced + Poly::term(t.ex - 1, t.ey, t.el, t.c);
    RatSeries b = implicit_branch(reduced, 4);
    CHECK(b.c[0] == 0);
    CHECK(b.c[1] == -6);
    // residual vanishes through the truncation order
    RatSeries lam = RatSeries::variable(4);
    RatSeries res = poly_on_series(e, b, RatSeries::zero(4), lam);
    for (const auto& c : res.c) CHECK(c == 0);
}

TEST_CASE("exponent fit on exact data") {
    NumericalBranch br;
    br.side = +1;
    for (int k = 0; k < 20; ++k) {
        double lambda = 1e-6 * std::pow(1.6, k);
        br.lambdas.push_back(lambda);
        br.states.push_back({lambda, std::sqrt(lambda), 0.0});
    }
    auto [e1, h1] = fit_growth_exponent(br, 1);
    CHECK(std::abs(e1 - 1.0) < 1e-12);
    CHECK(h1 < 1e-12);
    auto [e2, h2] = fit_growth_exponent(br, 2);
    CHECK(std::abs(e2 - 0.5) < 1e-12);
    CHECK(h2 < 1e-12);
    auto [e3, h3] = fit_growth_exponent(br, 3); // identically zero coordinate
    CHECK(e3 == 0.0);
    CHECK(h3 == 0.0);
}

TEST_CASE("a linear system has only the trivial equilibrium") {
    DiffusiveJet linear = DiffusiveJet::make(-5, 0, 0, 0, 1, 0, 0, 0, 0, 0);
    AdmissibleSystem sys(data_network("fig4_n1.nw"), linear);
    OracleConfig cfg;
    auto roots = solve_equilibria(sys, 0.01, cfg);
    REQUIRE(roots.size() == 1);
    for (double x : roots[0]) CHECK(std::abs(x) < 1e-12);
    CHECK_THROWS_AS(solve_equilibria(sys, 0.0, cfg), PreconditionError);
}

TEST_CASE("equilibria of the transcritical head system") {
    DiffusiveJet jet = DiffusiveJet::default_jet(1);
    AdmissibleSystem sys(data_network("fig4_n1.nw"), jet);
    OracleConfig cfg;
    double lambda = 1e-3;
    auto roots = solve_equilibria(sys, lambda, cfg);

    // independent count: roots of the scalar equation g(x,l) + h(x,0,l) = 0
    // inside the basin, by dense scan plus bisection
    RealizedFunctions f = realize_polynomials(jet);
    Poly scalar = f.g + f.h.substitute_y_zero();
    auto value = [&](double x) { return scalar.eval(x, 0.0, lambda); };
    int scalar_roots = 0;
    double prev = value(-cfg.basin_radius);
    for (double x = -cfg.basin_radius + 1e-3; x <= cfg.basin_radius; x += 1e-3) {
        double cur = value(x);
        if (prev == 0.0 || prev * cur < 0) ++scalar_roots;
        prev = cur;
    }
    CHECK(scalar_roots == 2);
    CHECK(roots.size() == 2);
}

TEST_CASE("branch tracing on the head network") {
    DiffusiveJet jet = DiffusiveJet::default_jet(1);
    AdmissibleSystem sys(data_network("fig4_n1.nw"), jet);
    OracleConfig cfg;
    cfg.lambda_min = 1e-5;
    cfg.lambda_points = 16;
    auto branches = trace_branches(sys, cfg);
    int trivial = 0, transcritical = 0;
    for (const auto& b : branches) {
        double residual = 0;
        for (size_t k = 0; k < b.lambdas.size(); ++k) {
            auto f = sys.evaluate(b.states[k], b.lambdas[k]);
            for (double v : f) residual = std::max(residual, std::abs(v));
        }
        CHECK(residual < 1e-10);
        if (b.is_trivial) {
            ++trivial;
            continue;
        }
        CHECK(b.zero_cell[0]);
        CHECK(std::abs(b.exponent[1] - 1.0) < 0.02);
        CHECK(std::abs(b.exponent[2] - 1.0) < 0.02);
        ++transcritical;
    }
    CHECK(trivial == 2);        // one per lambda side
    CHECK(transcritical == 2);  // the transcritical branch, one per side

    // branch counts are stable under refining both grids
    OracleConfig fine = cfg;
    fine.lambda_points *= 2;
    fine.seed_delta /= 2;
    auto refined = trace_branches(sys, fine);
    int fine_nontrivial = 0;
    for (const auto& b : refined)
        if (!b.is_trivial) ++fine_nontrivial;
    CHECK(fine_nontrivial == transcritical);
}
