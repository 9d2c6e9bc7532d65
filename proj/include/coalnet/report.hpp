#pragma once

#include "coalnet/branch.hpp"

#include <string>

namespace coalnet {

struct AgreementTolerances {
    double exp_half = 0.03;    // sqrt / quarter-root exponents
    double exp_linear = 0.06;  // linear exponents
};

struct SeedReport {
    BranchSeed seed;
    BranchPrediction prediction;
    // filled by verification
    int observed_pos = 0; // nontrivial oracle branches matched, lambda > 0
    int observed_neg = 0;
    int expected_pos = -1; // -1 = no prediction made
    int expected_neg = -1;
    bool agree_count = true;
    bool agree_exponents = true;
    std::string detail;
};

struct AnalysisReport {
    Network coalesced;
    bool has_mu = false;
    Rational mu_star;
    bool union_checked = false;
    UnionCheckReport union_check;
    std::vector<SeedReport> seeds;
    bool oracle_ran = false;
    std::vector<NumericalBranch> oracle;
    std::vector<int> branch_seed; // per oracle branch, matched seed index or -1
    bool all_agree = true;
    std::string note;
};

/// Seeds, classification and analytic predictions (no coalescence oracle).
AnalysisReport classify_report(const CoalescenceSpec& spec, const DiffusiveJet& jet,
                               bool seed_oracle = true, const OracleConfig& cfg = {});

/// classify_report plus the equilibrium-continuation oracle on the
/// coalescence network and per-seed agreement verdicts.
AnalysisReport verify_report(const CoalescenceSpec& spec, const DiffusiveJet& jet,
                             const OracleConfig& cfg = {}, const AgreementTolerances& tol = {});

std::string render_text(const AnalysisReport& rep);
std::string render_json(const AnalysisReport& rep);

std::string spectral_text(const SpectralStructure& s);
std::string spectral_json(const SpectralStructure& s);

} // namespace coalnet
