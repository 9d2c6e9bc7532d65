#include "coalnet/branch.hpp"
#include "coalnet/errors.hpp"

#include <algorithm>
#include <cmath>

namespace coalnet {

std::string to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::OnlyInFirst: return "OnlyInFirst";
        case CaseTag::OnlyInSecond: return "OnlyInSecond";
        case CaseTag::SqrtCase: return "SqrtCase";
        case CaseTag::LinearCase: return "LinearCase";
        case CaseTag::QuarterRootCase: return "QuarterRootCase";
        case CaseTag::PitchforkLSCase: return "PitchforkLSCase";
        case CaseTag::DegenerateUnclassified: return "DegenerateUnclassified";
    }
    return "?";
}

bool BranchSeed::exists_on(int side) const {
    return std::find(sides.begin(), sides.end(), side) != sides.end();
}

std::vector<double> BranchSeed::eval(double lambda) const {
    std::vector<double> out(slope.size(), 0.0);
    if (trivial) return out;
    if (!samples.empty()) {
        // nearest recorded sample (oracle seeds)
        size_t best = 0;
        for (size_t k = 1; k < samples.size(); ++k)
            if (std::abs(samples[k].first - lambda) < std::abs(samples[best].first - lambda)) best = k;
        return samples[best].second;
    }
    if (amplitude) {
        double b = amplitude->eval(lambda);
        for (int c : support) out[c - 1] = b;
        return out;
    }
    for (size_t i = 0; i < slope.size(); ++i) out[i] = slope[i] * lambda;
    return out;
}

namespace {

Rational rationalize(double x, double tol = 1e-9) {
    // continued fraction with small denominators; only used for oracle seeds
    bool neg = x < 0;
    double v = std::abs(x);
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = v;
    for (int i = 0; i < 30; ++i) {
        long long a = static_cast<long long>(std::floor(frac));
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double approx = double(p1) / double(q1);
        if (std::abs(approx - v) <= tol * std::max(1.0, v)) break;
        double rem = frac - double(a);
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    Rational r(p1, q1);
    return neg ? -r : r;
}

struct TailProblem {
    CoalescenceSpec spec; // canonical
    int n2 = 0;
    ReducedLaplacians red;
    RatMat j_core;                 // g_x I + h_1 l_core
    RatMat w_core;                 // adjacency among tail cells
    AdmissibleSystem sys2;         // system on the second network
    std::vector<int> tail_coords;  // 1-based coordinates 2..n2 of the second network

    TailProblem(const CoalescenceSpec& raw, const DiffusiveJet& jet)
        : spec(raw.canonical()), n2(spec.second.n_cells()), red(reduced_laplacians(spec.second, 1)),
          j_core(red.l_core.scaled(jet.h_1)), w_core(spec.second.adjacency().without({0}, {0})),
          sys2(spec.second, jet) {
        for (int i = 0; i < n2 - 1; ++i) {
            j_core(i, i) += jet.g_x;
            tail_coords.push_back(i + 2);
        }
    }

    // bilinear Hessian contraction of the tail equations at the origin
    RatVec bilinear(const RatVec& a, const RatVec& b) const {
        RatVec out(n2 - 1);
        for (int j = 0; j < n2 - 1; ++j) {
            Rational acc = 0;
            for (int p = 0; p < n2 - 1; ++p) {
                if (a[p] == 0) continue;
                for (int q = 0; q < n2 - 1; ++q) {
                    if (b[q] == 0) continue;
                    acc += sys2.second_derivative(tail_coords[j], tail_coords[p], tail_coords[q]) * a[p] * b[q];
                }
            }
            out[j] = acc;
        }
        return out;
    }

    RatVec cubic(const RatVec& v) const {
        RatVec out(n2 - 1);
        for (int j = 0; j < n2 - 1; ++j) {
            Rational acc = 0;
            for (int p = 0; p < n2 - 1; ++p) {
                if (v[p] == 0) continue;
                for (int q = 0; q < n2 - 1; ++q) {
                    if (v[q] == 0) continue;
                    for (int r = 0; r < n2 - 1; ++r) {
                        if (v[r] == 0) continue;
                        acc += sys2.third_derivative(tail_coords[j], tail_coords[p], tail_coords[q],
                                                     tail_coords[r]) *
                               v[p] * v[q] * v[r];
                    }
                }
            }
            out[j] = acc;
        }
        return out;
    }
};

RatVec solve_inside_image(const RatMat& m, const RatVec& rhs, const RatVec& v, const RatVec& v_star) {
    auto sol = m.solve(rhs);
    if (!sol) throw RankError("right-hand side is not in the image");
    Rational vs_v = ratvec_dot(v_star, v);
    if (vs_v == 0) return *sol; // kernel meets the image; any solution works
    Rational t = ratvec_dot(v_star, *sol) / vs_v;
    return ratvec_sub(*sol, ratvec_scaled(v, t));
}

} // namespace

HVector compute_H(const CoalescenceSpec& raw, const DiffusiveJet& jet, const Rational& mu) {
    TailProblem tp(raw, jet);
    RatMat b = tp.red.l_core - RatMat::identity(tp.n2 - 1).scaled(mu);
    auto kernel = b.kernel_basis();
    if (kernel.size() != 1)
        throw RankError("compute_H needs a one-dimensional kernel, got dimension " +
                        std::to_string(kernel.size()));
    HVector out;
    out.v = normalize_leading(kernel[0]);
    out.h_hessian = tp.bilinear(out.v, out.v);

    // H = (g_xx + mu h_11) v*v + h_22 [W v^2 - (W v)*v]
    RatVec vv(out.v.size()), v2(out.v.size());
    for (size_t i = 0; i < out.v.size(); ++i) {
        vv[i] = out.v[i] * out.v[i];
        v2[i] = vv[i];
    }
    RatVec wv = tp.w_core.apply(out.v);
    RatVec wv2 = tp.w_core.apply(v2);
    out.h_structural.resize(out.v.size());
    for (size_t i = 0; i < out.v.size(); ++i)
        out.h_structural[i] =
            (jet.g_xx + mu * jet.h_11) * vv[i] + jet.h_22 * (wv2[i] - wv[i] * out.v[i]);
    if (out.h_hessian != out.h_structural)
        throw ConsistencyError("Hessian and structural forms of H disagree");
    return out;
}

std::vector<BranchSeed> n1_branch_seeds(const Network& net1, const DiffusiveJet& jet, const Rational& mu,
                                        bool run_oracle, const OracleConfig& cfg) {
    const int n1 = net1.n_cells();
    RatMat l1 = net1.laplacian();
    SpectralStructure s1 = eigen_structure(l1);
    if (!s1.has_eigenvalue(mu, 1e-9))
        throw PreconditionError("bifurcation eigenvalue is not in the first network's spectrum");

    std::vector<BranchSeed> seeds;
    BranchSeed trivial;
    trivial.origin = "trivial";
    trivial.trivial = true;
    trivial.exact = true;
    trivial.slope_exact.assign(n1, Rational(0));
    trivial.slope.assign(n1, 0.0);
    trivial.b_c_prime_exact = 0;
    seeds.push_back(trivial);

    RatMat b1 = l1 - RatMat::identity(n1).scaled(mu);
    auto kernel = b1.kernel_basis();

    Rational q = jet.g_xx + mu * jet.h_11; // scalar transcritical coefficients
    Rational p = jet.g_xl + mu * jet.h_1l;

    // Scalar synchronous reduction: a 0/1 kernel vector means the indicated
    // cells move together while the rest stay at the origin, and the common
    // amplitude solves g(x,l) + mu h(x,0,l) = 0.
    for (const auto& kv : kernel) {
        RatVec v = normalize_leading(kv);
        bool indicator = std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0 || x == 1; });
        if (!indicator || q == 0) continue;
        RealizedFunctions f = realize_polynomials(jet);
        Poly e = f.g + f.h.substitute_y_zero().scaled(mu);
        Poly e_reduced; // e / x, exact because e(0,l) = 0
        for (const auto& t : e.terms()) e_reduced = e_reduced + Poly::term(t.ex - 1, t.ey, t.el, t.c);
        RatSeries amp = implicit_branch(e_reduced, 6);

        BranchSeed s;
        s.origin = "scalar-reduction";
        s.exact = true;
        s.amplitude = amp;
        s.slope_exact.assign(n1, Rational(0));
        for (int i = 0; i < n1; ++i)
            if (v[i] == 1) {
                s.support.push_back(i + 1);
                s.slope_exact[i] = amp.c[1];
            }
        s.slope.resize(n1);
        for (int i = 0; i < n1; ++i) s.slope[i] = to_double(s.slope_exact[i]);
        s.b_c_prime_exact = s.slope_exact[n1 - 1];
        s.b_c_prime = to_double(s.b_c_prime_exact);
        seeds.push_back(std::move(s));
    }

    // Generic transcritical seed on a simple kernel direction.
    if (kernel.size() == 1) {
        RatVec v = normalize_leading(kernel[0]);
        auto cokernel = b1.transpose().kernel_basis();
        if (cokernel.size() == 1) {
            RatVec w = cokernel[0];
            AdmissibleSystem sys1(net1, jet);
            std::vector<int> coords;
            for (int i = 1; i <= n1; ++i) coords.push_back(i);
            Rational alpha = 0;
            for (int j = 0; j < n1; ++j) {
                Rational acc = 0;
                for (int a = 0; a < n1; ++a)
                    for (int b = 0; b < n1; ++b)
                        acc += sys1.second_derivative(j + 1, a + 1, b + 1) * v[a] * v[b];
                alpha += w[j] * acc;
            }
            RatMat dxl = l1.scaled(jet.h_1l);
            for (int i = 0; i < n1; ++i) dxl(i, i) += jet.g_xl;
            Rational beta = ratvec_dot(w, dxl.apply(v));
            if (alpha != 0) {
                RatVec slope = ratvec_scaled(v, -2 * beta / alpha);
                bool dup = false;
                for (const auto& s : seeds)
                    if (s.exact && s.slope_exact == slope) dup = true;
                if (!dup) {
                    BranchSeed s;
                    s.origin = "ls-transcritical";
                    s.exact = true;
                    s.slope_exact = slope;
                    s.slope.resize(n1);
                    for (int i = 0; i < n1; ++i) s.slope[i] = to_double(slope[i]);
                    s.b_c_prime_exact = slope[n1 - 1];
                    s.b_c_prime = to_double(s.b_c_prime_exact);
                    seeds.push_back(std::move(s));
                }
            }
        }
    }

    if (!run_oracle) return seeds;

    AdmissibleSystem sys1(net1, jet);
    auto branches = trace_branches(sys1, cfg);
    std::vector<bool> closed_form_hit(seeds.size(), false);
    // debiased per-cell slope: fit x = a lambda + c lambda^2
    auto fit_slope = [&](const std::vector<std::pair<double, std::vector<double>>>& samples) {
        std::vector<double> slope(n1, 0.0);
        for (int c = 0; c < n1; ++c) {
            double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
            for (const auto& [l, x] : samples) {
                s11 += l * l;
                s12 += l * l * l;
                s22 += l * l * l * l;
                r1 += x[c] * l;
                r2 += x[c] * l * l;
            }
            double det = s11 * s22 - s12 * s12;
            slope[c] = det != 0 ? (r1 * s22 - r2 * s12) / det : 0.0;
        }
        return slope;
    };
    auto slope_close = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double d = 0, scale = 1.0;
        for (int c = 0; c < n1; ++c) {
            d = std::max(d, std::abs(a[c] - b[c]));
            scale = std::max({scale, std::abs(a[c]), std::abs(b[c])});
        }
        return d <= 0.05 * scale;
    };
    for (const auto& br : branches) {
        if (br.is_trivial) {
            closed_form_hit[0] = true;
            continue;
        }
        bool linear = true;
        for (int c = 0; c < n1; ++c)
            if (!br.zero_cell[c] && std::abs(br.exponent[c] - 1.0) > 0.12) linear = false;
        std::vector<std::pair<double, std::vector<double>>> samples;
        for (size_t k = 0; k < br.lambdas.size(); ++k) samples.push_back({br.lambdas[k], br.states[k]});
        if (linear) {
            std::vector<double> slope = fit_slope(samples);
            int match = -1;
            for (size_t si = 0; si < seeds.size(); ++si)
                if (!seeds[si].trivial && slope_close(slope, seeds[si].slope)) {
                    match = static_cast<int>(si);
                    break;
                }
            if (match >= 0) {
                BranchSeed& s = seeds[match];
                closed_form_hit[match] = true;
                if (!s.exists_on(br.side)) s.sides.push_back(br.side);
                if (s.origin == "oracle") {
                    s.samples.insert(s.samples.end(), samples.begin(), samples.end());
                    s.slope = fit_slope(s.samples);
                    s.b_c_prime = s.slope[n1 - 1];
                }
                continue;
            }
            BranchSeed s;
            s.origin = "oracle";
            s.slope = slope;
            s.b_c_prime = slope[n1 - 1];
            s.exponent_hint.assign(br.exponent.begin(), br.exponent.begin() + n1);
            s.sides = {br.side};
            s.samples = std::move(samples);
            seeds.push_back(std::move(s));
            closed_form_hit.push_back(true);
            continue;
        }
        BranchSeed s;
        s.origin = "oracle";
        s.slope.assign(n1, 0.0);
        s.differentiable = false;
        s.exponent_hint.assign(br.exponent.begin(), br.exponent.begin() + n1);
        s.sides = {br.side};
        s.samples = std::move(samples);
        seeds.push_back(std::move(s));
        closed_form_hit.push_back(true);
    }
    for (size_t si = 0; si < seeds.size(); ++si)
        if (seeds[si].exact && !seeds[si].trivial && !closed_form_hit[si])
            throw ConsistencyError("oracle did not recover the closed-form seed '" + seeds[si].origin + "'");
    return seeds;
}

TailExpansion expand_tail_branch(const CoalescenceSpec& raw, const DiffusiveJet& jet,
                                 const BranchSeed& seed, const Rational& mu, int order) {
    TailProblem tp(raw, jet);
    const int tail = tp.n2 - 1;
    RatMat b = tp.red.l_core - RatMat::identity(tail).scaled(mu);
    auto kern = b.kernel_basis();
    if (kern.size() != 1) throw RankError("tail expansion needs a one-dimensional kernel");
    RatVec v = kern[0];
    int d = -1;
    for (int i = 0; i < tail; ++i)
        if (v[i] != 0) {
            d = i;
            break;
        }
    v = ratvec_scaled(v, Rational(1) / v[d]); // parametrizing coordinate leads with 1

    // b_c(lambda) as an exact series
    RatSeries bc = RatSeries::zero(order);
    if (!seed.trivial) {
        if (seed.amplitude) {
            bool c_in_support =
                std::find(seed.support.begin(), seed.support.end(), tp.spec.first.n_cells()) != seed.support.end();
            if (c_in_support) {
                bc = *seed.amplitude;
                bc.c.resize(order + 1);
            }
        } else {
            Rational bp = seed.exact ? seed.b_c_prime_exact : rationalize(seed.b_c_prime);
            bc.c[1] = bp;
        }
    }

    Rational bprime = bc.c.size() > 1 ? bc.c[1] : Rational(0);
    // bordered matrix: columns = j_core without the d-column, then D_lambda phi
    RatMat m(tail, tail);
    {
        int col = 0;
        for (int j = 0; j < tail; ++j) {
            if (j == d) continue;
            for (int i = 0; i < tail; ++i) m(i, col) = tp.j_core(i, j);
            ++col;
        }
        for (int i = 0; i < tail; ++i) m(i, tail - 1) = bprime * jet.h_1 * tp.red.l_col[i];
    }
    if (m.rank() != tail)
        throw PreconditionError("implicit parametrization is singular; expansion preconditions fail");

    TailExpansion exp;
    exp.param_cell = d;
    exp.lambda = RatSeries::zero(order);
    exp.x.assign(tail, RatSeries::zero(order));
    for (int i = 0; i < tail; ++i) exp.x[i].c[1] = v[i];

    const Poly& g = tp.sys2.g();
    const Poly& h = tp.sys2.h();
    const RatMat& w2 = tp.spec.second.adjacency();
    for (int k = 2; k <= order; ++k) {
        RatSeries bc_of_lambda = bc.compose(exp.lambda);
        std::vector<RatSeries> residual;
        for (int j = 0; j < tail; ++j) {
            // cell j+2 of the second network
            RatSeries acc = poly_on_series(g, exp.x[j], RatSeries::zero(order), exp.lambda);
            for (int srcc = 0; srcc < tp.n2; ++srcc) {
                Rational wgt = w2(j + 1, srcc);
                if (wgt == 0 || srcc == j + 1) continue;
                const RatSeries& other = srcc == 0 ? bc_of_lambda : exp.x[srcc - 1];
                acc = acc + poly_on_series(h, exp.x[j], other, exp.lambda).scaled(wgt);
            }
            residual.push_back(acc);
        }
        RatVec rhs(tail);
        for (int j = 0; j < tail; ++j) rhs[j] = -residual[j].c[k];
        auto sol = m.solve(rhs);
        if (!sol) throw NumericalError("tail expansion solve failed");
        int col = 0;
        for (int j = 0; j < tail; ++j) {
            if (j == d) continue;
            exp.x[j].c[k] = (*sol)[col++];
        }
        exp.lambda.c[k] = (*sol)[tail - 1];
    }
    return exp;
}

LSData ls_reduction(const CoalescenceSpec& raw, const DiffusiveJet& jet, const Rational& mu) {
    TailProblem tp(raw, jet);
    const int tail = tp.n2 - 1;
    RatMat b = tp.red.l_core - RatMat::identity(tail).scaled(mu);
    auto kern = b.kernel_basis();
    if (kern.size() != 1) throw RankError("LS reduction needs a one-dimensional kernel");
    LSData ls;
    ls.v = normalize_leading(kern[0]);
    auto cokern = tp.j_core.transpose().kernel_basis();
    if (cokern.size() != 1) throw RankError("LS reduction needs a one-dimensional cokernel");
    ls.v_star = normalize_leading(cokern[0]);
    if (ratvec_dot(ls.v_star, ls.v) < 0) ls.v_star = ratvec_scaled(ls.v_star, Rational(-1));

    ls.h = compute_H(raw, jet, mu).h();
    ls.psi_yy = ratvec_dot(ls.v_star, ls.h);
    if (ls.psi_yy == 0) {
        ls.w_yy = solve_inside_image(tp.j_core, ratvec_scaled(ls.h, Rational(-1)), ls.v, ls.v_star);
        RatVec term = tp.cubic(ls.v);
        RatVec mixed = tp.bilinear(ls.v, ls.w_yy);
        ls.psi_yyy = ratvec_dot(ls.v_star, ratvec_add(term, ratvec_scaled(mixed, Rational(3))));
    }
    RatVec hl = ratvec_scaled(tp.red.l_col, jet.h_1);
    if (tp.j_core.in_image(hl)) {
        ls.w_lambda_unit =
            ratvec_scaled(solve_inside_image(tp.j_core, hl, ls.v, ls.v_star), Rational(-1));
        ls.psi_yl_curvature = ratvec_dot(ls.v_star, tp.bilinear(ls.v, ls.w_lambda_unit));
    } else {
        ls.w_lambda_unit.assign(tail, Rational(0));
        ls.psi_yl_curvature = 0;
    }
    ls.psi_yl_transversal = (jet.g_xl + mu * jet.h_1l) * ratvec_dot(ls.v_star, ls.v);
    return ls;
}

CaseTag classify_case(const CoalescenceSpec& raw, const DiffusiveJet& jet, const BranchSeed& seed) {
    CoalescenceSpec spec = raw.canonical();
    if (!is_ffcn(spec)) throw PreconditionError("classification needs a feedforward coalescence");
    Network net = coalesce(spec);
    auto mu_opt = bifurcation_eigenvalue(net, jet);
    if (!mu_opt) throw PreconditionError("the jet has no bifurcation eigenvalue on this network");
    Rational mu = *mu_opt;

    SpectralStructure s1 = eigen_structure(spec.first.laplacian());
    SpectralStructure s2 = eigen_structure(spec.second.laplacian());
    bool in1 = s1.has_eigenvalue(mu, 1e-9);
    bool in2 = s2.has_eigenvalue(mu, 1e-9);
    if (in1 && !in2) return CaseTag::OnlyInFirst;
    if (!in1 && in2) return CaseTag::OnlyInSecond;
    if (!in1 && !in2) throw PreconditionError("bifurcation eigenvalue missing from both components");

    if (!seed.differentiable) return CaseTag::DegenerateUnclassified;

    TailProblem tp(spec, jet);
    const int tail = tp.n2 - 1;
    bool bprime_zero = seed.exact ? seed.b_c_prime_exact == 0 : std::abs(seed.b_c_prime) < 1e-12;
    bool blc_in_image = bprime_zero || tp.j_core.in_image(tp.red.l_col);

    if (!blc_in_image) {
        if (tp.j_core.rank() != tail - 1) return CaseTag::DegenerateUnclassified;
        HVector h = compute_H(spec, jet, mu);
        if (!tp.j_core.in_image(h.h())) return CaseTag::SqrtCase;
        return tp.n2 == 3 ? CaseTag::QuarterRootCase : CaseTag::DegenerateUnclassified;
    }
    // b_c'(0) L^c lands in the image: Lyapunov-Schmidt route, needs mu simple
    // in the reduced Laplacian.
    RatMat core = tp.red.l_core;
    SpectralStructure score = eigen_structure(core);
    const EigenvalueData* e = score.find_exact(mu);
    if (!e || e->alg_mult != 1) return CaseTag::DegenerateUnclassified;
    HVector h = compute_H(spec, jet, mu);
    if (!tp.j_core.in_image(h.h())) return CaseTag::LinearCase;
    return CaseTag::PitchforkLSCase;
}

namespace {

std::vector<Rational> seed_exponents(const CoalescenceSpec& spec, const BranchSeed& seed) {
    const int n1 = spec.first.n_cells();
    std::vector<Rational> out(n1, Rational(0));
    for (int i = 0; i < n1; ++i) {
        if (seed.exact ? seed.slope_exact[i] != 0 : std::abs(seed.slope[i]) > 1e-12) out[i] = 1;
        if (!seed.exponent_hint.empty() && std::abs(seed.exponent_hint[i]) > 1e-6)
            out[i] = rationalize(seed.exponent_hint[i], 0.08);
    }
    return out;
}

} // namespace

BranchPrediction predict_branch(const CoalescenceSpec& raw, const DiffusiveJet& jet, const BranchSeed& seed) {
    CoalescenceSpec spec = raw.canonical();
    BranchPrediction pred;
    pred.tag = classify_case(spec, jet, seed);
    Network net = coalesce(spec);
    const int n = net.n_cells();
    const int n1 = spec.first.n_cells();
    Rational mu = *bifurcation_eigenvalue(net, jet);
    pred.growth_exponent.assign(n, Rational(0));
    auto head = seed_exponents(spec, seed);
    for (int i = 0; i < n1; ++i) pred.growth_exponent[i] = head[i];

    switch (pred.tag) {
        case CaseTag::OnlyInFirst: {
            pred.branch_count = 1;
            // the unique extension inherits the head behaviour; tail cells follow
            // at the same leading order through the nonsingular tail Jacobian
            Rational lead = 0;
            for (int i = 0; i < n1; ++i) lead = std::max(lead, head[i]);
            for (int i = n1; i < n; ++i) pred.growth_exponent[i] = seed.trivial ? Rational(0) : lead;
            pred.lambda_domain = 0;
            return pred;
        }
        case CaseTag::OnlyInSecond: {
            pred.branch_count = 1;
            pred.note = "branches are carried by the second component; the merging cell does not bifurcate";
            pred.lambda_domain = 0;
            return pred;
        }
        case CaseTag::SqrtCase: {
            TailExpansion exp = expand_tail_branch(spec, jet, seed, mu, 2);
            pred.branch_count = 2;
            pred.z2_lambda = exp.lambda.derivative_at_zero(2);
            if (*pred.z2_lambda == 0) {
                pred.tag = CaseTag::DegenerateUnclassified;
                pred.note = "z''_lambda vanished; misclassification guard";
                return pred;
            }
            pred.lambda_domain = *pred.z2_lambda > 0 ? +1 : -1;
            for (int i = 0; i < static_cast<int>(exp.x.size()); ++i) {
                if (i == exp.param_cell) {
                    pred.growth_exponent[n1 + i] = Rational(1, 2);
                    continue;
                }
                pred.z2_rest.push_back(exp.x[i].derivative_at_zero(2));
                int lead = 0;
                for (int k = 1; k <= exp.x[i].order(); ++k)
                    if (exp.x[i].c[k] != 0) {
                        lead = k;
                        break;
                    }
                pred.growth_exponent[n1 + i] = lead == 0 ? Rational(0) : Rational(lead, 2);
            }
            return pred;
        }
        case CaseTag::QuarterRootCase: {
            TailExpansion exp = expand_tail_branch(spec, jet, seed, mu, 4);
            if (exp.lambda.c[2] != 0 || exp.lambda.c[3] != 0)
                throw ConsistencyError("quarter-root expansion expected z''_lambda = z'''_lambda = 0");
            pred.z4_lambda = exp.lambda.derivative_at_zero(4);
            if (*pred.z4_lambda == 0) {
                pred.tag = CaseTag::DegenerateUnclassified;
                pred.note = "z^(4)_lambda vanished; no quarter-root conclusion";
                return pred;
            }
            pred.branch_count = 2;
            pred.lambda_domain = *pred.z4_lambda > 0 ? +1 : -1;
            for (int i = 0; i < static_cast<int>(exp.x.size()); ++i) {
                if (i == exp.param_cell) {
                    pred.growth_exponent[n1 + i] = Rational(1, 4);
                    continue;
                }
                pred.z2_rest.push_back(exp.x[i].derivative_at_zero(2));
                int lead = 0;
                for (int k = 1; k <= exp.x[i].order(); ++k)
                    if (exp.x[i].c[k] != 0) {
                        lead = k;
                        break;
                    }
                pred.growth_exponent[n1 + i] = lead == 0 ? Rational(0) : Rational(lead, 4);
            }
            return pred;
        }
        case CaseTag::LinearCase:
        case CaseTag::PitchforkLSCase: {
            LSData ls = ls_reduction(spec, jet, mu);
            pred.psi_yy = ls.psi_yy;
            Rational bp_exact = seed.exact ? seed.b_c_prime_exact : rationalize(seed.b_c_prime);
            Rational psi_yl_exact = bp_exact * ls.psi_yl_curvature + ls.psi_yl_transversal;
            pred.psi_yl = seed.exact ? to_double(psi_yl_exact)
                                     : seed.b_c_prime * to_double(ls.psi_yl_curvature) +
                                           to_double(ls.psi_yl_transversal);
            if (seed.exact) pred.psi_yl_exact = psi_yl_exact;
            pred.w_lambda = ratvec_scaled(ls.w_lambda_unit, bp_exact);

            if (pred.tag == CaseTag::LinearCase) {
                if (ls.psi_yy == 0) {
                    pred.tag = CaseTag::PitchforkLSCase; // reroute guard
                } else {
                    pred.branch_count = 2;
                    pred.lambda_domain = 0;
                    Rational yprime = -2 * psi_yl_exact / ls.psi_yy;
                    for (int i = 0; i < static_cast<int>(ls.v.size()); ++i) {
                        Rational slope_b2 = yprime * ls.v[i] + pred.w_lambda[i];
                        pred.growth_exponent[n1 + i] =
                            (slope_b2 != 0 || pred.w_lambda[i] != 0) ? Rational(1) : Rational(0);
                    }
                    return pred;
                }
            }
            // pitchfork route
            pred.psi_yyy = ls.psi_yyy;
            if (ls.psi_yyy == 0 || pred.psi_yl == 0) {
                pred.tag = CaseTag::DegenerateUnclassified;
                pred.note = "psi_yyy or psi_ylambda vanished; Lyapunov-Schmidt route degenerate";
                return pred;
            }
            pred.branch_count = 3;
            if (seed.exact) {
                pred.lambda_curvature = -ls.psi_yyy / (3 * psi_yl_exact);
                pred.lambda_domain = *pred.lambda_curvature > 0 ? +1 : -1;
            } else {
                double curv = -to_double(ls.psi_yyy) / (3 * pred.psi_yl);
                pred.lambda_domain = curv > 0 ? +1 : -1;
            }
            for (int i = 0; i < static_cast<int>(ls.v.size()); ++i) {
                if (ls.v[i] != 0)
                    pred.growth_exponent[n1 + i] = Rational(1, 2);
                else if (pred.w_lambda[i] != 0 || (!ls.w_yy.empty() && ls.w_yy[i] != 0))
                    pred.growth_exponent[n1 + i] = Rational(1);
            }
            return pred;
        }
        default:
            pred.branch_count = 1;
            pred.note = "outside the classified cases; rely on the numerical oracle";
            return pred;
    }
}

std::vector<NumericalBranch> one_component_extension(const CoalescenceSpec& raw, const DiffusiveJet& jet,
                                                     const BranchSeed& seed, const OracleConfig& cfg) {
    CoalescenceSpec spec = raw.canonical();
    CaseTag tag = classify_case(spec, jet, seed);
    Network net = coalesce(spec);
    const int n1 = spec.first.n_cells();
    const int n = net.n_cells();
    AdmissibleSystem sys(net, jet);

    if (tag == CaseTag::OnlyInFirst) {
        std::vector<NumericalBranch> out;
        double ratio = std::pow(cfg.lambda_max / cfg.lambda_min, 1.0 / (cfg.lambda_points - 1));
        for (int side : {+1, -1}) {
            if (!seed.exists_on(side)) continue;
            NumericalBranch b;
            b.side = side;
            std::vector<double> x(n, 0.0);
            bool ok = true;
            double al = cfg.lambda_max;
            std::vector<std::vector<double>> rev_states;
            std::vector<double> rev_lambdas;
            for (int k = 0; k < cfg.lambda_points; ++k, al /= ratio) {
                double lambda = side * al;
                auto headv = seed.eval(lambda);
                for (int i = 0; i < n1; ++i) x[i] = headv[i];
                // Newton on the tail only: the head is pinned to the seed
                for (int iter = 0; iter < cfg.max_newton_iters; ++iter) {
                    auto f = sys.evaluate(x, lambda);
                    double res = 0;
                    for (int i = n1; i < n; ++i) res = std::max(res, std::abs(f[i]));
                    if (res < cfg.newton_tol * 1e3) break;
                    Eigen::MatrixXd full(n, n);
                    sys.jacobian(x.data(), lambda, full);
                    Eigen::MatrixXd jt = full.block(n1, n1, n - n1, n - n1);
                    Eigen::VectorXd rhs(n - n1);
                    for (int i = n1; i < n; ++i) rhs(i - n1) = -f[i];
                    Eigen::VectorXd step = Eigen::PartialPivLU<Eigen::MatrixXd>(jt).solve(rhs);
                    for (int i = n1; i < n; ++i) x[i] += step(i - n1);
                }
                auto f = sys.evaluate(x, lambda);
                double res = 0;
                for (int i = n1; i < n; ++i) res = std::max(res, std::abs(f[i]));
                if (res > 1e-8) {
                    ok = false;
                    break;
                }
                rev_lambdas.push_back(lambda);
                rev_states.push_back(x);
            }
            if (!ok) throw NumericalError("tail Newton did not converge along the seed");
            b.lambdas.assign(rev_lambdas.rbegin(), rev_lambdas.rend());
            b.states.assign(rev_states.rbegin(), rev_states.rend());
            b.zero_cell.assign(n, true);
            b.is_trivial = true;
            for (const auto& xs : b.states)
                for (int c = 0; c < n; ++c)
                    if (std::abs(xs[c]) > 1e-13) {
                        b.zero_cell[c] = false;
                        b.is_trivial = false;
                    }
            b.exponent.assign(n, 0.0);
            b.exponent_halfwidth.assign(n, 0.0);
            for (int c = 1; c <= n; ++c) {
                auto [e, hw] = fit_growth_exponent(b, c);
                b.exponent[c - 1] = e;
                b.exponent_halfwidth[c - 1] = hw;
            }
            out.push_back(std::move(b));
        }
        return out;
    }
    if (tag == CaseTag::OnlyInSecond) {
        // branches live on the second component with the merging cell at rest
        AdmissibleSystem sys2(spec.second, jet);
        auto tail_branches = trace_branches(sys2, cfg);
        std::vector<NumericalBranch> out;
        for (auto& tb : tail_branches) {
            if (!tb.zero_cell[0]) // merging coordinate must stay at the origin
                throw ConsistencyError("the merging cell does not bifurcate in the OnlyInSecond case");
            NumericalBranch b;
            b.side = tb.side;
            b.lambdas = tb.lambdas;
            for (const auto& xs : tb.states) {
                std::vector<double> full(n, 0.0);
                for (int i = 1; i < spec.second.n_cells(); ++i) full[n1 + i - 1] = xs[i];
                b.states.push_back(std::move(full));
            }
            b.zero_cell.assign(n, true);
            for (int i = 1; i < spec.second.n_cells(); ++i) b.zero_cell[n1 + i - 1] = tb.zero_cell[i];
            b.is_trivial = tb.is_trivial;
            b.exponent.assign(n, 0.0);
            b.exponent_halfwidth.assign(n, 0.0);
            for (int i = 1; i < spec.second.n_cells(); ++i) {
                b.exponent[n1 + i - 1] = tb.exponent[i];
                b.exponent_halfwidth[n1 + i - 1] = tb.exponent_halfwidth[i];
            }
            out.push_back(std::move(b));
        }
        return out;
    }
    throw PreconditionError("one_component_extension applies to the OnlyInFirst/OnlyInSecond cases");
}

} // namespace coalnet
