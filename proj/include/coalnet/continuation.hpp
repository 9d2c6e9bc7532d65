#pragma once

#include "coalnet/system.hpp"

#include <optional>

namespace coalnet {

struct OracleConfig {
    double lambda_min = 1e-6;
    double lambda_max = 1e-2;
    int lambda_points = 24;    // geometric grid per sign
    double seed_delta = 1e-3;  // fixed seed amplitudes delta, 2*delta
    double seed_kappa = 2.0;   // scaled amplitudes kappa*sqrt(l), kappa*l^(1/4)
    double newton_tol = 1e-12;
    int max_newton_iters = 50;
    double dedup_radius = 1e-8;
    double basin_radius = 0.5;
    double origin_radius = 0.1; // branch must shrink below this at the smallest lambda
    int full_sweep_stride = 4;  // seed-grid sweep every k-th grid point, continuation in between

    void validate() const;
};

/// One traced equilibrium branch on one side of lambda = 0.
struct NumericalBranch {
    int side = +1;                             // sign of lambda
    std::vector<double> lambdas;               // |lambda| ascending, signed values
    std::vector<std::vector<double>> states;
    std::vector<double> exponent;              // per cell, log-log fit
    std::vector<double> exponent_halfwidth;
    std::vector<bool> zero_cell;               // coordinate numerically zero along the branch
    bool is_trivial = false;
    bool link_warning = false;

    const std::vector<double>& state_at_smallest() const { return states.front(); }
    const std::vector<double>& state_at_largest() const { return states.back(); }
};

std::optional<std::vector<double>> newton_solve(const AdmissibleSystem& sys, std::vector<double> x,
                                                double lambda, const OracleConfig& cfg);

/// All equilibria near the origin at a fixed lambda (Newton from the seed
/// grid, deduplicated, far-field roots dropped).
std::vector<std::vector<double>> solve_equilibria(const AdmissibleSystem& sys, double lambda,
                                                  const OracleConfig& cfg);

std::vector<NumericalBranch> trace_branches(const AdmissibleSystem& sys, const OracleConfig& cfg);

/// Least-squares slope of log|x_cell| against log|lambda| with half-width;
/// cells are 1-based. Coordinates that never rise above noise report (0, 0)
/// and are flagged in the branch.
std::pair<double, double> fit_growth_exponent(const NumericalBranch& branch, int cell);

} // namespace coalnet
