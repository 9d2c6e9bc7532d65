#include "coalnet/continuation.hpp"
#include "coalnet/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace coalnet {

void OracleConfig::validate() const {
    if (lambda_min <= 0 || lambda_max <= lambda_min) throw InputError("bad lambda window");
    if (lambda_points < 2) throw InputError("lambda grid needs at least two points");
    if (newton_tol <= 0 || dedup_radius <= 0) throw InputError("tolerances must be positive");
}

namespace {

double rel_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0, scale = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
    }
    return num / (1.0 + scale);
}

double sup_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> lambda_grid(const OracleConfig& cfg) {
    std::vector<double> grid(cfg.lambda_points);
    double ratio = std::pow(cfg.lambda_max / cfg.lambda_min, 1.0 / (cfg.lambda_points - 1));
    double v = cfg.lambda_min;
    for (int i = 0; i < cfg.lambda_points; ++i, v *= ratio) grid[i] = v;
    grid.back() = cfg.lambda_max;
    return grid;
}

std::pair<double, double> detail_fit(const std::vector<double>& t, const std::vector<double>& y) {
    const double m = static_cast<double>(t.size());
    double tbar = 0, ybar = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        tbar += t[i];
        ybar += y[i];
    }
    tbar /= m;
    ybar /= m;
    double stt = 0, sty = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - tbar) * (t[i] - tbar);
        sty += (t[i] - tbar) * (y[i] - ybar);
    }
    double slope = sty / stt;
    double ss_res = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        double r = y[i] - ybar - slope * (t[i] - tbar);
        ss_res += r * r;
    }
    double half_width = t.size() > 2 ? 2.0 * std::sqrt(ss_res / (m - 2) / stt) : 0.0;
    return {slope, half_width};
}

} // namespace

std::optional<std::vector<double>> newton_solve(const AdmissibleSystem& sys, std::vector<double> x,
                                                double lambda, const OracleConfig& cfg) {
    // Iterate to step convergence, not just residual convergence: the
    // Jacobian conditioning degrades like 1/lambda near the branch point and
    // a residual of newton_tol alone leaves position errors far above the
    // deduplication radius.
    const int n = sys.dimension();
    Eigen::MatrixXd jac(n, n);
    std::vector<double> f(n);
    Eigen::VectorXd rhs(n);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(n);
    Eigen::VectorXd step(n);
    for (int iter = 0; iter < cfg.max_newton_iters; ++iter) {
        sys.evaluate_with_jacobian(x.data(), lambda, f.data(), jac);
        for (int i = 0; i < n; ++i) rhs(i) = -f[i];
        lu.compute(jac);
        step = lu.solve(rhs);
        if (!step.allFinite()) return std::nullopt;
        for (int i = 0; i < n; ++i) x[i] += step(i);
        if (sup_norm(x) > 8 * cfg.basin_radius) return std::nullopt; // escaping the window
        if (step.cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + sup_norm(x))) break;
    }
    sys.evaluate(x.data(), lambda, f.data());
    double res = 0;
    for (double v : f) res = std::max(res, std::abs(v));
    if (res < cfg.newton_tol) return x;
    return std::nullopt;
}

std::vector<std::vector<double>> solve_equilibria(const AdmissibleSystem& sys, double lambda,
                                                  const OracleConfig& cfg) {
    cfg.validate();
    if (lambda == 0) throw PreconditionError("the Jacobian is singular at lambda = 0 by construction");
    const int n = sys.dimension();
    double al = std::abs(lambda);
    std::vector<double> amps = {0.0, cfg.seed_delta, -cfg.seed_delta, 2 * cfg.seed_delta, -2 * cfg.seed_delta,
                                cfg.seed_kappa * std::sqrt(al), -cfg.seed_kappa * std::sqrt(al)};
    if (n <= 5) {
        amps.push_back(cfg.seed_kappa * std::pow(al, 0.25));
        amps.push_back(-cfg.seed_kappa * std::pow(al, 0.25));
    }
    std::vector<std::vector<double>> roots;
    std::vector<double> seed(n, 0.0);
    const size_t total = static_cast<size_t>(std::pow(double(amps.size()), n));
    for (size_t code = 0; code < total; ++code) {
        size_t c = code;
        for (int i = 0; i < n; ++i) {
            seed[i] = amps[c % amps.size()];
            c /= amps.size();
        }
        auto sol = newton_solve(sys, seed, lambda, cfg);
        if (!sol) continue;
        if (sup_norm(*sol) > cfg.basin_radius) continue;
        bool dup = false;
        for (const auto& r : roots)
            if (rel_dist(r, *sol) < cfg.dedup_radius) {
                dup = true;
                break;
            }
        if (!dup) roots.push_back(std::move(*sol));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::pair<double, double> fit_growth_exponent(const NumericalBranch& branch, int cell) {
    const int c = cell - 1;
    // stay clear of the top of the window, where higher-order terms bend the
    // power law; fall back to everything when the branch is short
    double lmin = branch.lambdas.empty() ? 0.0 : std::abs(branch.lambdas.front());
    for (double cutoff : {lmin * 1e3, std::numeric_limits<double>::infinity()}) {
        std::vector<double> t, y;
        for (size_t k = 0; k < branch.lambdas.size(); ++k) {
            double x = branch.states[k][c];
            if (std::abs(x) <= 1e-13) continue;
            if (std::abs(branch.lambdas[k]) > cutoff) continue;
            t.push_back(std::log(std::abs(branch.lambdas[k])));
            y.push_back(std::log(std::abs(x)));
        }
        if (t.size() < 8) continue;
        return detail_fit(t, y);
    }
    return {0.0, 0.0};
}

std::vector<NumericalBranch> trace_branches(const AdmissibleSystem& sys, const OracleConfig& cfg) {
    cfg.validate();
    const int n = sys.dimension();
    std::vector<double> grid = lambda_grid(cfg); // |lambda| ascending
    std::vector<NumericalBranch> out;

    for (int side : {+1, -1}) {
        // roots per grid index, found by seed sweeps on a stride plus
        // continuation of everything already known
        std::vector<std::vector<std::vector<double>>> roots(grid.size());
        auto add_root = [&](int gi, std::vector<double> r) {
            for (const auto& existing : roots[gi])
                if (rel_dist(existing, r) < cfg.dedup_radius) return;
            roots[gi].push_back(std::move(r));
        };
        for (size_t gi = grid.size(); gi-- > 0;) {
            double lambda = side * grid[gi];
            bool sweep = (gi % std::max(1, cfg.full_sweep_stride) == 0) || gi + 1 == grid.size();
            if (sweep)
                for (auto& r : solve_equilibria(sys, lambda, cfg)) add_root(static_cast<int>(gi), r);
            // continue roots of the neighbour above down to this grid point
            if (gi + 1 < grid.size())
                for (const auto& r : roots[gi + 1]) {
                    auto sol = newton_solve(sys, r, lambda, cfg);
                    if (sol && sup_norm(*sol) <= cfg.basin_radius) add_root(static_cast<int>(gi), std::move(*sol));
                }
        }
        // second pass upward so sweep discoveries at small lambda reach the top
        for (size_t gi = 1; gi < grid.size(); ++gi) {
            double lambda = side * grid[gi];
            for (const auto& r : roots[gi - 1]) {
                auto sol = newton_solve(sys, r, lambda, cfg);
                if (sol && sup_norm(*sol) <= cfg.basin_radius) add_root(static_cast<int>(gi), std::move(*sol));
            }
        }

        // link ascending in |lambda| with a per-cell power-law predictor
        struct Work {
            NumericalBranch branch;
            bool open = true;
        };
        std::vector<Work> work;
        for (const auto& r : roots[0]) {
            Work w;
            w.branch.side = side;
            w.branch.lambdas = {side * grid[0]};
            w.branch.states = {r};
            work.push_back(std::move(w));
        }
        for (size_t gi = 1; gi < grid.size(); ++gi) {
            double lambda = side * grid[gi];
            std::vector<bool> taken(roots[gi].size(), false);
            for (auto& w : work) {
                if (!w.open) continue;
                const auto& hist_l = w.branch.lambdas;
                const auto& hist_x = w.branch.states;
                std::vector<double> pred = hist_x.back();
                if (hist_x.size() >= 2) {
                    for (int c = 0; c < n; ++c) {
                        double x1 = hist_x[hist_x.size() - 2][c], x2 = hist_x.back()[c];
                        if (std::abs(x1) > 1e-13 && std::abs(x2) > 1e-13 && x1 * x2 > 0) {
                            double alpha = std::log(std::abs(x2) / std::abs(x1)) /
                                           std::log(std::abs(hist_l.back() / hist_l[hist_l.size() - 2]));
                            alpha = std::clamp(alpha, -0.5, 2.0);
                            pred[c] = x2 * std::pow(grid[gi] / grid[gi - 1], alpha);
                        }
                    }
                }
                int best = -1, second = -1;
                double bd = 0, sd = 0;
                for (size_t ri = 0; ri < roots[gi].size(); ++ri) {
                    if (taken[ri]) continue;
                    double d = rel_dist(pred, roots[gi][ri]);
                    if (best < 0 || d < bd) {
                        second = best;
                        sd = bd;
                        best = static_cast<int>(ri);
                        bd = d;
                    } else if (second < 0 || d < sd) {
                        second = static_cast<int>(ri);
                        sd = d;
                    }
                }
                if (best >= 0 && bd < 0.25) {
                    if (second >= 0 && sd < 10 * cfg.dedup_radius) w.branch.link_warning = true;
                    taken[best] = true;
                    w.branch.lambdas.push_back(lambda);
                    w.branch.states.push_back(roots[gi][best]);
                } else {
                    w.open = false;
                }
            }
            for (size_t ri = 0; ri < roots[gi].size(); ++ri) {
                if (taken[ri]) continue;
                Work w;
                w.branch.side = side;
                w.branch.lambdas = {lambda};
                w.branch.states = {roots[gi][ri]};
                work.push_back(std::move(w));
            }
        }

        for (auto& w : work) {
            NumericalBranch& b = w.branch;
            if (static_cast<int>(b.lambdas.size()) < 8) continue;
            if (sup_norm(b.states.front()) > cfg.origin_radius) continue; // far-field root
            b.is_trivial = true;
            b.zero_cell.assign(n, true);
            for (const auto& x : b.states)
                for (int c = 0; c < n; ++c)
                    if (std::abs(x[c]) > 1e-13) {
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
    }
    return out;
}

} // namespace coalnet
