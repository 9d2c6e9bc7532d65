#include "coalnet/spectral.hpp"
#include "coalnet/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <map>
#include <set>

namespace coalnet {

namespace {

BigInt lcm_big(const BigInt& a, const BigInt& b) {
    if (a == 0 || b == 0) return 0;
    return a / gcd(a, b) * b;
}

// Evaluate a monic integer polynomial (rational coefficients with unit
// denominators) at an integer point.
Rational poly_eval(const std::vector<Rational>& c, const Rational& x) {
    Rational acc = 0;
    for (size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
    return acc;
}

// Synthetic division by (x - r); the caller guarantees r is a root.
std::vector<Rational> deflate(const std::vector<Rational>& c, const Rational& r) {
    std::vector<Rational> out(c.size() - 1);
    Rational carry = c.back();
    for (size_t k = c.size() - 1; k-- > 0;) {
        out[k] = carry;
        carry = c[k] + carry * r;
    }
    return out;
}

struct ExactJordan {
    int geo_mult = 0;
    std::vector<std::vector<RatVec>> chains;
};

// Classical chain extraction from the kernel filtration of B = A - mu I.
// Candidate tops are taken in order of descending leading index so that
// chains supported on later coordinate blocks are selected first.
ExactJordan exact_jordan(const RatMat& a, const Rational& mu, int alg_mult) {
    const int n = a.rows();
    RatMat b = a - RatMat::identity(n).scaled(mu);
    std::vector<std::vector<RatVec>> kernels; // kernels[k] = basis of ker B^{k+1}
    RatMat power = b;
    while (true) {
        kernels.push_back(power.kernel_basis());
        if (static_cast<int>(kernels.back().size()) >= alg_mult) break;
        if (static_cast<int>(kernels.size()) >= n) break;
        power = power * b;
    }
    const int depth = static_cast<int>(kernels.size());
    auto dim = [&](int k) { return k <= 0 ? 0 : static_cast<int>(kernels[k - 1].size()); };

    ExactJordan out;
    out.geo_mult = dim(1);
    std::vector<std::pair<int, RatVec>> tops; // (length, top vector)
    for (int k = depth; k >= 1; --k) {
        int longer = 0;
        for (const auto& t : tops)
            if (t.first > k) ++longer;
        int need = (dim(k) - dim(k - 1)) - longer;
        if (need <= 0) continue;
        SpanTracker used;
        for (const auto& v : (k >= 2 ? kernels[k - 2] : std::vector<RatVec>{})) used.add(v);
        for (const auto& t : tops)
            if (t.first > k) {
                RatVec level = t.second;
                for (int i = 0; i < t.first - k; ++i) level = b.apply(level);
                used.add(level);
            }
        std::vector<RatVec> candidates = kernels[k - 1];
        std::stable_sort(candidates.begin(), candidates.end(), [](const RatVec& x, const RatVec& y) {
            auto lead = [](const RatVec& v) {
                for (size_t i = 0; i < v.size(); ++i)
                    if (v[i] != 0) return static_cast<int>(i);
                return static_cast<int>(v.size());
            };
            return lead(x) > lead(y);
        });
        for (auto& cand : candidates) {
            if (need == 0) break;
            if (used.add(cand)) {
                tops.push_back({k, cand});
                --need;
            }
        }
        if (need != 0) throw NumericalError("jordan chain extraction failed"); // unreachable on exact path
    }
    for (auto& [len, top] : tops) {
        std::vector<RatVec> chain(len);
        chain[len - 1] = top;
        for (int i = len - 2; i >= 0; --i) chain[i] = b.apply(chain[i + 1]);
        // scale the whole chain so the eigenvector leads with 1
        Rational lead = 0;
        for (const Rational& q : chain[0])
            if (q != 0) {
                lead = q;
                break;
            }
        if (lead != 0 && lead != 1)
            for (auto& v : chain) v = ratvec_scaled(v, Rational(1) / lead);
        out.chains.push_back(std::move(chain));
    }
    // longest chains first, then by leading support
    std::stable_sort(out.chains.begin(), out.chains.end(),
                     [](const auto& x, const auto& y) { return x.size() > y.size(); });
    return out;
}

std::vector<Eigen::VectorXcd> complex_nullspace(const Eigen::MatrixXcd& m, double tol) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double thresh = tol * (sv.size() ? sv(0) : 0.0);
    if (thresh == 0.0) thresh = tol;
    std::vector<Eigen::VectorXcd> out;
    for (int i = 0; i < m.cols(); ++i)
        if (i >= sv.size() || sv(i) <= thresh) out.push_back(svd.matrixV().col(i));
    return out;
}

std::vector<std::vector<Eigen::VectorXcd>> float_jordan(const Eigen::MatrixXcd& b, int alg_mult, double tol) {
    const int n = static_cast<int>(b.rows());
    std::vector<std::vector<Eigen::VectorXcd>> kernels;
    Eigen::MatrixXcd power = b;
    while (true) {
        kernels.push_back(complex_nullspace(power, tol));
        if (static_cast<int>(kernels.back().size()) >= alg_mult) break;
        if (static_cast<int>(kernels.size()) >= n) break;
        power = power * b;
    }
    auto dim = [&](int k) { return k <= 0 ? 0 : static_cast<int>(kernels[k - 1].size()); };
    const int depth = static_cast<int>(kernels.size());

    // incremental independence via Gram-Schmidt with tolerance
    std::vector<Eigen::VectorXcd> ortho;
    auto try_add = [&](Eigen::VectorXcd v) {
        for (const auto& u : ortho) v -= u.dot(v) * u;
        if (v.norm() <= tol * 10) return false;
        v.normalize();
        ortho.push_back(v);
        return true;
    };
    std::vector<std::pair<int, Eigen::VectorXcd>> tops;
    for (int k = depth; k >= 1; --k) {
        int longer = 0;
        for (const auto& t : tops)
            if (t.first > k) ++longer;
        int need = (dim(k) - dim(k - 1)) - longer;
        if (need <= 0) continue;
        ortho.clear();
        if (k >= 2)
            for (const auto& v : kernels[k - 2]) try_add(v);
        for (const auto& t : tops)
            if (t.first > k) {
                Eigen::VectorXcd level = t.second;
                for (int i = 0; i < t.first - k; ++i) level = b * level;
                try_add(level);
            }
        for (const auto& cand : kernels[k - 1]) {
            if (need == 0) break;
            if (try_add(cand)) {
                tops.push_back({k, cand});
                --need;
            }
        }
    }
    std::vector<std::vector<Eigen::VectorXcd>> chains;
    for (auto& [len, top] : tops) {
        std::vector<Eigen::VectorXcd> chain(len);
        chain[len - 1] = top;
        for (int i = len - 2; i >= 0; --i) chain[i] = b * chain[i + 1];
        chains.push_back(std::move(chain));
    }
    std::stable_sort(chains.begin(), chains.end(),
                     [](const auto& x, const auto& y) { return x.size() > y.size(); });
    return chains;
}

} // namespace

int numerical_rank(const Eigen::MatrixXcd& m, double tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    double thresh = tol * sv(0);
    if (thresh == 0.0) thresh = tol;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++r;
    return r;
}

std::pair<int, int> numerical_jordan_check(const Eigen::MatrixXd& a, std::complex<double> mu, double tol) {
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXcd b = a.cast<std::complex<double>>();
    for (int i = 0; i < n; ++i) b(i, i) -= mu;
    int geo = n - numerical_rank(b, tol);
    // algebraic multiplicity from rank stabilization of powers
    Eigen::MatrixXcd power = b;
    int alg = n - numerical_rank(power, tol);
    for (int k = 2; k <= n; ++k) {
        power = power * b;
        int deficiency = n - numerical_rank(power, tol);
        if (deficiency == alg) break;
        alg = deficiency;
    }
    return {alg, geo};
}

const EigenvalueData* SpectralStructure::find_exact(const Rational& mu) const {
    for (const auto& e : eigenvalues)
        if (e.exact && e.exact_value == mu) return &e;
    return nullptr;
}

const EigenvalueData* SpectralStructure::find_close(std::complex<double> mu, double tol) const {
    const EigenvalueData* best = nullptr;
    double best_dist = 0;
    for (const auto& e : eigenvalues) {
        double d = std::abs(e.value - mu);
        if (!best || d < best_dist) {
            best = &e;
            best_dist = d;
        }
    }
    double scale = std::max(1.0, std::abs(mu));
    if (best && best_dist <= tol * scale * 100) return best;
    return nullptr;
}

bool SpectralStructure::has_eigenvalue(const Rational& mu, double tol) const {
    if (find_exact(mu)) return true;
    for (const auto& e : eigenvalues)
        if (!e.exact && std::abs(e.value - std::complex<double>(to_double(mu), 0)) <=
                            tol * std::max(1.0, std::abs(to_double(mu))) * 100)
            return true;
    return false;
}

SpectralStructure eigen_structure(const RatMat& a, const SpectralOptions& opt) {
    if (a.rows() != a.cols()) throw InputError("eigen_structure needs a square matrix");
    const int n = a.rows();
    SpectralStructure out;
    out.dimension = n;

    // Scale to an integer matrix: rational eigenvalues of A are then m/D with
    // m an integer root of the monic integer characteristic polynomial.
    BigInt d = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d = lcm_big(d, denominator(a(i, j)));
    if (d == 0) d = 1;
    RatMat scaled = a.scaled(Rational(d));
    std::vector<Rational> poly = scaled.charpoly();

    Eigen::EigenSolver<Eigen::MatrixXd> solver(a.to_double());
    std::vector<std::complex<double>> float_eigs(n);
    for (int i = 0; i < n; ++i) float_eigs[i] = solver.eigenvalues()(i);

    // exact eigenvalues: integer roots of the scaled characteristic polynomial
    std::set<BigInt> candidates;
    candidates.insert(0);
    double dd = d.convert_to<double>();
    for (const auto& ev : float_eigs) {
        if (std::abs(ev.imag()) > 0.5) continue;
        BigInt base(static_cast<long long>(std::llround(ev.real() * dd)));
        for (long long off = -1; off <= 1; ++off) candidates.insert(base + off);
    }
    std::map<Rational, int> exact_mult;
    for (const BigInt& c : candidates) {
        Rational r(c);
        while (poly.size() > 1 && poly_eval(poly, r) == 0) {
            poly = deflate(poly, r);
            exact_mult[Rational(c) / Rational(d)] += 1;
        }
    }
    int exact_total = 0;
    for (auto& [mu, m] : exact_mult) exact_total += m;
    if (opt.force_exact && exact_total < n)
        throw PreconditionError("matrix has irrational eigenvalues; exact path unavailable");

    std::vector<bool> consumed(n, false);
    for (auto& [mu, mult] : exact_mult) {
        EigenvalueData e;
        e.exact = true;
        e.exact_value = mu;
        e.value = {to_double(mu), 0.0};
        e.alg_mult = mult;
        ExactJordan jordan = exact_jordan(a, mu, mult);
        e.geo_mult = jordan.geo_mult;
        e.chains = std::move(jordan.chains);
        out.eigenvalues.push_back(std::move(e));
        // mark the closest float eigenvalues as used
        for (int k = 0; k < mult; ++k) {
            int best = -1;
            double bd = 0;
            for (int i = 0; i < n; ++i) {
                if (consumed[i]) continue;
                double dist = std::abs(float_eigs[i] - std::complex<double>(to_double(mu), 0));
                if (best < 0 || dist < bd) {
                    best = i;
                    bd = dist;
                }
            }
            if (best >= 0) consumed[best] = true;
        }
    }

    // leftover float eigenvalues -> clusters
    std::vector<std::complex<double>> rest;
    for (int i = 0; i < n; ++i)
        if (!consumed[i]) rest.push_back(float_eigs[i]);
    std::sort(rest.begin(), rest.end(), [](auto x, auto y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    double scale_abs = 1.0;
    for (const auto& ev : float_eigs) scale_abs = std::max(scale_abs, std::abs(ev));
    size_t i = 0;
    while (i < rest.size()) {
        size_t j = i + 1;
        std::complex<double> center = rest[i];
        while (j < rest.size() && std::abs(rest[j] - center) <= opt.tol * scale_abs) {
            center = (center * double(j - i) + rest[j]) / double(j - i + 1);
            ++j;
        }
        EigenvalueData e;
        e.value = center;
        e.alg_mult = static_cast<int>(j - i);
        Eigen::MatrixXcd b = a.to_double().cast<std::complex<double>>();
        for (int k = 0; k < n; ++k) b(k, k) -= center;
        e.geo_mult = n - numerical_rank(b, opt.tol);
        e.chains_float = float_jordan(b, e.alg_mult, opt.tol);
        out.eigenvalues.push_back(std::move(e));
        i = j;
    }

    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](const auto& x, const auto& y) {
        if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
        return x.value.imag() < y.value.imag();
    });
    out.all_exact = exact_total == n;
    for (size_t p = 0; p + 1 < out.eigenvalues.size(); ++p) {
        double gap = std::abs(out.eigenvalues[p].value - out.eigenvalues[p + 1].value);
        if (gap > 0 && gap < 10 * opt.tol * scale_abs) out.clustering_warning = true;
    }
    return out;
}

ReducedLaplacians reduced_laplacians(const Network& net2, int c) {
    if (c < 1 || c > net2.n_cells()) throw IndexError("coalescence cell out of range");
    RatMat l = net2.laplacian();
    ReducedLaplacians out;
    out.l_bar = l.without({c - 1}, {});
    out.l_core = l.without({c - 1}, {c - 1});
    RatVec col = l.col(c - 1);
    col.erase(col.begin() + (c - 1));
    out.l_col = col;
    return out;
}

CouplingConditionReport coupling_condition(const Network& net2, int c, const Rational& mu) {
    ReducedLaplacians red = reduced_laplacians(net2, c);
    const int m = red.l_core.rows();
    RatMat b = red.l_core - RatMat::identity(m).scaled(mu);
    CouplingConditionReport rep;
    rep.mu = mu;
    rep.column_vector = red.l_col;
    auto sol = b.solve(ratvec_scaled(red.l_col, Rational(-1)));
    rep.in_image = sol.has_value();
    if (sol) rep.particular_solution = *sol;
    return rep;
}

LiftedVector lift_eigenvector(const CoalescenceSpec& raw, const Rational& mu, const RatVec& v1) {
    CoalescenceSpec spec = raw.canonical();
    const int n1 = spec.first.n_cells();
    if (static_cast<int>(v1.size()) != n1) throw InputError("head vector has wrong dimension");
    RatMat l1 = spec.first.laplacian();
    RatMat b1 = l1 - RatMat::identity(n1).scaled(mu);
    int rank1 = 0;
    {
        RatVec w = v1;
        while (rank1 <= n1 && !ratvec_is_zero(w)) {
            w = b1.apply(w);
            ++rank1;
        }
        if (rank1 > n1 || ratvec_is_zero(v1))
            throw InputError("head vector is not a generalized eigenvector of the first Laplacian");
    }
    Network net = coalesce(spec);
    const int n = net.n_cells();
    RatMat b = net.laplacian() - RatMat::identity(n).scaled(mu);
    // Solve the tail block of (L_N - mu I)^j (v1, w) = 0 for increasing j.
    for (int j = rank1; j <= n; ++j) {
        RatMat bj = b.power(j);
        const int tail = n - n1;
        RatMat block_head(tail, n1), block_tail(tail, tail);
        for (int r = 0; r < tail; ++r) {
            for (int col = 0; col < n1; ++col) block_head(r, col) = bj(n1 + r, col);
            for (int col = 0; col < tail; ++col) block_tail(r, col) = bj(n1 + r, n1 + col);
        }
        RatVec rhs = ratvec_scaled(block_head.apply(v1), Rational(-1));
        auto w = block_tail.solve(rhs);
        if (!w) continue;
        RatVec full(n);
        for (int i = 0; i < n1; ++i) full[i] = v1[i];
        for (int i = 0; i < tail; ++i) full[n1 + i] = (*w)[i];
        // true chain rank of the lifted vector
        int rank = 0;
        RatVec probe = full;
        while (!ratvec_is_zero(probe)) {
            probe = b.apply(probe);
            ++rank;
        }
        return {full, rank};
    }
    throw NumericalError("no generalized eigenvector extension found"); // unreachable for FFCN inputs
}

std::vector<RatVec> zero_eigenspace_basis(const CoalescenceSpec& raw) {
    CoalescenceSpec spec = raw.canonical();
    if (!is_ffcn(spec)) throw PreconditionError("zero_eigenspace_basis needs a feedforward coalescence");
    const int n1 = spec.first.n_cells();
    const int n2 = spec.second.n_cells();
    RatMat l1 = spec.first.laplacian();
    RatMat l2 = spec.second.laplacian();
    ReducedLaplacians red = reduced_laplacians(spec.second, 1);

    // Arrange both kernels as the all-ones vector plus generators whose first
    // coordinate vanishes.
    auto ones_first = [](std::vector<RatVec> raw, int dim) {
        RatVec ones(dim, Rational(1));
        std::vector<RatVec> tails;
        for (auto v : raw) {
            if (v[0] != 0) v = ratvec_sub(ratvec_scaled(v, Rational(1) / v[0]), ones);
            if (!ratvec_is_zero(v)) tails.push_back(std::move(v));
        }
        tails = canonical_rowspace_basis(std::move(tails));
        std::vector<RatVec> out = {ones};
        out.insert(out.end(), tails.begin(), tails.end());
        return out;
    };
    std::vector<RatVec> basis1 = ones_first(l1.kernel_basis(), n1);
    std::vector<RatVec> basis2 = l2.kernel_basis();
    std::vector<RatVec> tail_zero_c;
    {
        SpanTracker tracker;
        RatVec ones(n2, Rational(1));
        tracker.add(ones);
        for (auto v : basis2) {
            if (v[0] != 0) v = ratvec_sub(ratvec_scaled(v, Rational(1) / v[0]), ones);
            if (!ratvec_is_zero(v) && tracker.add(v)) {
                RatVec tail(v.begin() + 1, v.end());
                tail_zero_c.push_back(normalize_leading(tail));
            }
        }
    }

    std::vector<RatVec> out;
    for (const auto& head : basis1) {
        RatVec v = head;
        Rational c = v[n1 - 1];
        RatVec w;
        bool constant = std::all_of(v.begin(), v.end(), [&](const Rational& q) { return q == c; });
        if (constant) {
            w.assign(n2 - 1, c); // constant vectors extend synchronously
        } else {
            auto sol = red.l_core.solve(ratvec_scaled(red.l_col, -c));
            if (!sol) throw NumericalError("zero eigenspace lift failed");
            w = *sol;
            // canonical form: clear leading tail coordinates against the
            // zero-c kernel vectors of the second network
            for (const auto& t : tail_zero_c) {
                int lead = -1;
                for (size_t i = 0; i < t.size(); ++i)
                    if (t[i] != 0) {
                        lead = static_cast<int>(i);
                        break;
                    }
                if (lead >= 0 && w[lead] != 0) w = ratvec_sub(w, ratvec_scaled(t, w[lead] / t[lead]));
            }
        }
        RatVec full(v.begin(), v.end());
        full.insert(full.end(), w.begin(), w.end());
        out.push_back(std::move(full));
    }
    for (const auto& t : tail_zero_c) {
        RatVec full(n1, Rational(0));
        full.insert(full.end(), t.begin(), t.end());
        out.push_back(std::move(full));
    }
    return out;
}

UnionCheckReport spectrum_union_check(const CoalescenceSpec& spec, const SpectralOptions& opt) {
    if (!is_ffcn(spec)) throw PreconditionError("spectrum_union_check needs a feedforward coalescence");
    SpectralStructure s1 = eigen_structure(spec.first.laplacian(), opt);
    SpectralStructure s2 = eigen_structure(spec.second.laplacian(), opt);
    SpectralStructure sn = eigen_structure(coalesce(spec).laplacian(), opt);

    double scale = 1.0;
    for (const auto& e : sn.eigenvalues) scale = std::max(scale, std::abs(e.value));
    double tol = opt.tol * scale * 100;

    // cluster the union of all three spectra
    std::vector<std::complex<double>> centers;
    auto center_of = [&](std::complex<double> v) -> int {
        for (size_t i = 0; i < centers.size(); ++i)
            if (std::abs(centers[i] - v) <= tol) return static_cast<int>(i);
        centers.push_back(v);
        return static_cast<int>(centers.size()) - 1;
    };
    std::map<int, UnionCheckRow> rows;
    auto fold = [&](const SpectralStructure& s, int which) {
        for (const auto& e : s.eigenvalues) {
            int c = center_of(e.value);
            auto& row = rows[c];
            row.value = centers[c];
            if (which == 0) row.mult_first += e.alg_mult;
            if (which == 1) row.mult_second += e.alg_mult;
            if (which == 2) row.mult_coalescence += e.alg_mult;
        }
    };
    fold(s1, 0);
    fold(s2, 1);
    fold(sn, 2);

    UnionCheckReport rep;
    rep.ok = true;
    for (auto& [c, row] : rows) {
        bool is_zero = std::abs(row.value) <= tol;
        row.expected = row.mult_first + row.mult_second - (is_zero ? 1 : 0);
        row.ok = row.expected == row.mult_coalescence;
        rep.ok = rep.ok && row.ok;
        rep.rows.push_back(row);
    }
    return rep;
}

FfcnSpectralReport ffcn_spectral_report(const RFoldSpec& spec, const SpectralOptions& opt) {
    FfcnSpectralReport rep;
    rep.assembled = sequential_coalesce(spec);
    rep.layer_of_cell.assign(rep.assembled.n_cells(), 1);
    int offset = spec.nets[0].n_cells();
    for (size_t i = 1; i < spec.nets.size(); ++i) {
        for (int k = 0; k < spec.nets[i].n_cells() - 1; ++k) rep.layer_of_cell[offset + k] = static_cast<int>(i) + 1;
        offset += spec.nets[i].n_cells() - 1;
    }
    SpectralStructure s = eigen_structure(rep.assembled.laplacian(), opt);
    rep.all_exact = s.all_exact;
    for (auto& e : s.eigenvalues) {
        TaggedChainGroup group;
        group.data = e;
        for (const auto& chain : e.chains) {
            const RatVec& top = chain.back();
            int layer = 1;
            for (size_t i = 0; i < top.size(); ++i)
                if (top[i] != 0) {
                    layer = rep.layer_of_cell[i];
                    break;
                }
            group.chain_component.push_back(layer);
        }
        for (const auto& chain : e.chains_float) {
            const auto& top = chain.back();
            double norm = top.norm();
            int layer = 1;
            for (int i = 0; i < top.size(); ++i)
                if (std::abs(top(i)) > 1e-8 * norm) {
                    layer = rep.layer_of_cell[i];
                    break;
                }
            group.chain_component.push_back(layer);
        }
        rep.groups.push_back(std::move(group));
    }
    return rep;
}

} // namespace coalnet
