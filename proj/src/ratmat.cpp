#include "coalnet/ratmat.hpp"
#include "coalnet/errors.hpp"

#include <algorithm>
#include <sstream>

namespace coalnet {

RatMat RatMat::identity(int n) {
    RatMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RatMat RatMat::from_rows(const std::vector<RatVec>& rows) {
    if (rows.empty()) return {};
    RatMat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows(); ++i) {
        if (static_cast<int>(rows[i].size()) != m.cols()) throw InputError("ragged row list");
        for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

RatMat RatMat::operator*(const RatMat& rhs) const {
    if (cols_ != rhs.rows_) throw InputError("matrix product shape mismatch");
    RatMat out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Rational& a = (*this)(i, k);
            if (a == 0) continue;
            for (int j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

RatMat RatMat::operator+(const RatMat& rhs) const {
    RatMat out(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + rhs.data_[i];
    return out;
}

RatMat RatMat::operator-(const RatMat& rhs) const {
    RatMat out(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - rhs.data_[i];
    return out;
}

RatMat RatMat::scaled(const Rational& s) const {
    RatMat out(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] * s;
    return out;
}

RatVec RatMat::apply(const RatVec& x) const {
    if (static_cast<int>(x.size()) != cols_) throw InputError("matrix-vector shape mismatch");
    RatVec out(rows_);
    for (int i = 0; i < rows_; ++i) {
        Rational acc = 0;
        for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

RatMat RatMat::transpose() const {
    RatMat out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

RatMat RatMat::power(int k) const {
    RatMat acc = identity(rows_);
    for (int i = 0; i < k; ++i) acc = acc * (*this);
    return acc;
}

Rational RatMat::trace() const {
    Rational t = 0;
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

RatVec RatMat::row(int i) const {
    RatVec r(cols_);
    for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
}

RatVec RatMat::col(int j) const {
    RatVec c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

RatMat RatMat::without(const std::vector<int>& drop_rows, const std::vector<int>& drop_cols) const {
    auto keep = [](int n, const std::vector<int>& drop) {
        std::vector<int> k;
        for (int i = 0; i < n; ++i)
            if (std::find(drop.begin(), drop.end(), i) == drop.end()) k.push_back(i);
        return k;
    };
    auto kr = keep(rows_, drop_rows);
    auto kc = keep(cols_, drop_cols);
    RatMat out(static_cast<int>(kr.size()), static_cast<int>(kc.size()));
    for (size_t i = 0; i < kr.size(); ++i)
        for (size_t j = 0; j < kc.size(); ++j) out(static_cast<int>(i), static_cast<int>(j)) = (*this)(kr[i], kc[j]);
    return out;
}

Eigen::MatrixXd RatMat::to_double() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(i, j) = coalnet::to_double((*this)(i, j));
    return m;
}

namespace {

// Row echelon form in place; returns pivot columns.
std::vector<int> echelonize(std::vector<RatVec>& m) {
    std::vector<int> pivot_cols;
    if (m.empty()) return pivot_cols;
    const int cols = static_cast<int>(m[0].size());
    int r = 0;
    for (int c = 0; c < cols && r < static_cast<int>(m.size()); ++c) {
        int pivot = -1;
        for (int i = r; i < static_cast<int>(m.size()); ++i)
            if (m[i][c] != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        std::swap(m[r], m[pivot]);
        Rational inv = Rational(1) / m[r][c];
        for (int j = c; j < cols; ++j) m[r][j] *= inv;
        for (int i = 0; i < static_cast<int>(m.size()); ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c];
            for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        pivot_cols.push_back(c);
        ++r;
    }
    return pivot_cols;
}

} // namespace

int RatMat::rank() const {
    std::vector<RatVec> rows;
    rows.reserve(rows_);
    for (int i = 0; i < rows_; ++i) rows.push_back(row(i));
    return static_cast<int>(echelonize(rows).size());
}

std::vector<RatVec> RatMat::kernel_basis() const {
    std::vector<RatVec> rows;
    rows.reserve(rows_);
    for (int i = 0; i < rows_; ++i) rows.push_back(row(i));
    auto pivots = echelonize(rows);
    std::vector<bool> is_pivot(cols_, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<RatVec> basis;
    for (int free = 0; free < cols_; ++free) {
        if (is_pivot[free]) continue;
        RatVec v(cols_);
        v[free] = 1;
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -rows[r][free];
        basis.push_back(std::move(v));
    }
    return canonical_rowspace_basis(basis);
}

std::vector<RatVec> canonical_rowspace_basis(std::vector<RatVec> vectors) {
    echelonize(vectors);
    vectors.erase(std::remove_if(vectors.begin(), vectors.end(), ratvec_is_zero), vectors.end());
    return vectors;
}

std::optional<RatVec> RatMat::solve(const RatVec& b) const {
    if (static_cast<int>(b.size()) != rows_) throw InputError("solve shape mismatch");
    std::vector<RatVec> aug;
    aug.reserve(rows_);
    for (int i = 0; i < rows_; ++i) {
        RatVec r = row(i);
        r.push_back(b[i]);
        aug.push_back(std::move(r));
    }
    auto pivots = echelonize(aug);
    if (!pivots.empty() && pivots.back() == cols_) return std::nullopt; // inconsistent
    RatVec x(cols_);
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][cols_];
    return x;
}

bool RatMat::in_image(const RatVec& b) const { return solve(b).has_value(); }

std::vector<Rational> RatMat::charpoly() const {
    // Faddeev-LeVerrier recursion; exact over rationals.
    if (rows_ != cols_) throw InputError("charpoly of non-square matrix");
    const int n = rows_;
    std::vector<Rational> c(n + 1);
    c[n] = 1;
    RatMat m = identity(n);
    for (int k = 1; k <= n; ++k) {
        RatMat am = (*this) * m;
        Rational ck = -am.trace() / k;
        c[n - k] = ck;
        m = am;
        for (int i = 0; i < n; ++i) m(i, i) += ck;
    }
    return c;
}

std::string RatMat::to_string() const {
    std::ostringstream os;
    for (int i = 0; i < rows_; ++i) {
        os << (i == 0 ? "[" : " ");
        for (int j = 0; j < cols_; ++j) os << (j ? " " : "[") << rat_to_string((*this)(i, j));
        os << "]" << (i + 1 == rows_ ? "]" : "\n");
    }
    return os.str();
}

RatVec ratvec_scaled(const RatVec& v, const Rational& s) {
    RatVec out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] * s;
    return out;
}

RatVec ratvec_add(const RatVec& a, const RatVec& b) {
    RatVec out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

RatVec ratvec_sub(const RatVec& a, const RatVec& b) {
    RatVec out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

bool ratvec_is_zero(const RatVec& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
}

Rational ratvec_dot(const RatVec& a, const RatVec& b) {
    Rational acc = 0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

RatVec normalize_leading(const RatVec& v) {
    for (const Rational& q : v)
        if (q != 0) return ratvec_scaled(v, Rational(1) / q);
    return v;
}

void SpanTracker::reduce(RatVec& v) const {
    for (size_t k = 0; k < basis_.size(); ++k) {
        const Rational& f = v[pivots_[k]];
        if (f == 0) continue;
        Rational factor = f; // basis vectors have pivot coefficient 1
        for (size_t j = 0; j < v.size(); ++j) v[j] -= factor * basis_[k][j];
    }
}

bool SpanTracker::add(RatVec v) {
    reduce(v);
    int pivot = -1;
    for (size_t j = 0; j < v.size(); ++j)
        if (v[j] != 0) {
            pivot = static_cast<int>(j);
            break;
        }
    if (pivot < 0) return false;
    Rational inv = Rational(1) / v[pivot];
    for (auto& q : v) q *= inv;
    basis_.push_back(std::move(v));
    pivots_.push_back(pivot);
    return true;
}

bool SpanTracker::contains(RatVec v) const {
    reduce(v);
    return ratvec_is_zero(v);
}

int span_rank(const std::vector<RatVec>& vectors) {
    SpanTracker t;
    for (const auto& v : vectors) t.add(v);
    return t.dimension();
}

bool same_span(const std::vector<RatVec>& a, const std::vector<RatVec>& b) {
    SpanTracker ta;
    for (const auto& v : a) ta.add(v);
    SpanTracker tb;
    for (const auto& v : b) tb.add(v);
    if (ta.dimension() != tb.dimension()) return false;
    for (const auto& v : b)
        if (!ta.contains(v)) return false;
    return true;
}

} // namespace coalnet
