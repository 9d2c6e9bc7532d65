#pragma once

#include "coalnet/continuation.hpp"
#include "coalnet/series.hpp"
#include "coalnet/spectral.hpp"

#include <optional>
#include <string>

namespace coalnet {

enum class CaseTag {
    OnlyInFirst,
    OnlyInSecond,
    SqrtCase,
    LinearCase,
    QuarterRootCase,
    PitchforkLSCase,
    DegenerateUnclassified,
};
std::string to_string(CaseTag tag);

/// An equilibrium branch of the first component network near lambda = 0.
struct BranchSeed {
    std::string origin; // "trivial" | "scalar-reduction" | "ls-transcritical" | "oracle"
    bool trivial = false;
    bool exact = false;              // slope data carries exact rationals
    RatVec slope_exact;              // d b / d lambda at 0, per cell of N1
    std::vector<double> slope;       // always filled
    Rational b_c_prime_exact;        // c-coordinate slope when exact
    double b_c_prime = 0.0;
    std::optional<RatSeries> amplitude; // scalar-reduction amplitude b(lambda)
    std::vector<int> support;           // 1-based cells carrying the amplitude
    std::vector<double> exponent_hint;  // per-cell exponent (oracle seeds); empty = linear
    bool differentiable = true;         // false for oracle seeds with non-unit exponent
    std::vector<int> sides = {+1, -1};  // lambda signs on which the branch exists
    std::vector<std::pair<double, std::vector<double>>> samples; // oracle seeds: (lambda, state)

    bool exists_on(int side) const;
    std::vector<double> eval(double lambda) const;
};

std::vector<BranchSeed> n1_branch_seeds(const Network& net1, const DiffusiveJet& jet, const Rational& mu,
                                        bool run_oracle = false, const OracleConfig& cfg = {});

/// The quadratic-form vector H of the reduced tail problem, computed two ways
/// (Hessian contraction and the structural network formula) and checked equal.
struct HVector {
    RatVec v;            // kernel vector of (l_core - mu I), first nonzero coordinate 1
    RatVec h_hessian;
    RatVec h_structural;
    const RatVec& h() const { return h_hessian; }
};
HVector compute_H(const CoalescenceSpec& spec, const DiffusiveJet& jet, const Rational& mu);

/// Parametric expansion of the tail equations along the kernel direction:
/// the parametrizing tail cell equals s, lambda and the remaining tail cells
/// are Taylor series in s.
struct TailExpansion {
    int param_cell = 0;          // 0-based index among the tail cells
    std::vector<RatSeries> x;    // per tail cell
    RatSeries lambda;
};
TailExpansion expand_tail_branch(const CoalescenceSpec& spec, const DiffusiveJet& jet,
                                 const BranchSeed& seed, const Rational& mu, int order);

/// Lyapunov-Schmidt data of the reduced tail problem at the bifurcation.
struct LSData {
    RatVec v;       // kernel of j_core, first nonzero coordinate 1
    RatVec v_star;  // spans Im(j_core)^perp, sign fixed by <v*, v> >= 0 when nonzero
    RatVec h;
    Rational psi_yy;
    RatVec w_yy;          // solves j_core w = -H inside Im(j_core); empty unless psi_yy = 0
    Rational psi_yyy = 0; // valid when psi_yy = 0
    RatVec w_lambda_unit; // -j_core^{-1}(h_1 L^c) inside Im, per unit b_c'(0)
    Rational psi_yl_curvature;  // <v*, D^2 phi(v, w_lambda_unit)>
    Rational psi_yl_transversal; // (g_xl + mu h_1l) <v*, v>
};
LSData ls_reduction(const CoalescenceSpec& spec, const DiffusiveJet& jet, const Rational& mu);

struct BranchPrediction {
    CaseTag tag = CaseTag::DegenerateUnclassified;
    int branch_count = 1;
    std::vector<Rational> growth_exponent; // per cell of the coalescence network
    int lambda_domain = 0;                 // +1 positive-only, -1 negative-only, 0 both sides
    // derivative / LS coefficients, exact where the seed is exact
    std::optional<Rational> z2_lambda;  // sqrt case
    RatVec z2_rest;                     // second derivatives of the non-parametrizing tail cells
    std::optional<Rational> z4_lambda;  // quarter-root case
    std::optional<Rational> psi_yy;
    std::optional<Rational> psi_yyy;
    std::optional<Rational> psi_yl_exact;
    double psi_yl = 0.0;
    std::optional<Rational> lambda_curvature; // pitchfork: Lambda''(0)
    RatVec w_lambda;                          // leading tail derivative of the y = 0 extension
    std::string note;
};

CaseTag classify_case(const CoalescenceSpec& spec, const DiffusiveJet& jet, const BranchSeed& seed);
BranchPrediction predict_branch(const CoalescenceSpec& spec, const DiffusiveJet& jet, const BranchSeed& seed);

/// Unique extension when the bifurcation lives in exactly one component
/// (Newton through the tail for OnlyInFirst; zero head and the second
/// network's branches for OnlyInSecond).
std::vector<NumericalBranch> one_component_extension(const CoalescenceSpec& spec, const DiffusiveJet& jet,
                                                     const BranchSeed& seed, const OracleConfig& cfg = {});

} // namespace coalnet
