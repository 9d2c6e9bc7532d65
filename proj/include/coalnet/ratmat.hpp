#pragma once

#include "coalnet/rational.hpp"

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace coalnet {

/// Dense matrix over exact rationals. Sized for the small systems that
/// appear here (a handful of cells), not for large-scale work.
class RatMat {
public:
    RatMat() = default;
    RatMat(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

    static RatMat identity(int n);
    static RatMat from_rows(const std::vector<RatVec>& rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rational& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const Rational& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    bool operator==(const RatMat& other) const = default;

    RatMat operator*(const RatMat& rhs) const;
    RatMat operator+(const RatMat& rhs) const;
    RatMat operator-(const RatMat& rhs) const;
    RatMat scaled(const Rational& s) const;
    RatVec apply(const RatVec& x) const;
    RatMat transpose() const;
    RatMat power(int k) const;
    Rational trace() const;

    RatVec row(int i) const;
    RatVec col(int j) const;

    /// Submatrix keeping everything except the listed rows/columns (0-based).
    RatMat without(const std::vector<int>& drop_rows, const std::vector<int>& drop_cols) const;

    Eigen::MatrixXd to_double() const;

    int rank() const;
    /// Basis of the right null space.
    std::vector<RatVec> kernel_basis() const;
    /// Particular solution of A x = b with free variables set to zero.
    std::optional<RatVec> solve(const RatVec& b) const;
    bool in_image(const RatVec& b) const;

    /// Monic characteristic polynomial, coefficient vector c with
    /// p(x) = sum_k c[k] x^k and c[n] = 1.
    std::vector<Rational> charpoly() const;

    std::string to_string() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Rational> data_;
};

RatVec ratvec_scaled(const RatVec& v, const Rational& s);
RatVec ratvec_add(const RatVec& a, const RatVec& b);
RatVec ratvec_sub(const RatVec& a, const RatVec& b);
bool ratvec_is_zero(const RatVec& v);
Rational ratvec_dot(const RatVec& a, const RatVec& b);

/// Scale so that the first nonzero coordinate becomes 1. Zero vectors pass through.
RatVec normalize_leading(const RatVec& v);

/// Incremental exact independence tracker (forward elimination basis).
class SpanTracker {
public:
    /// Returns true (and absorbs the vector) if v is independent of the span so far.
    bool add(RatVec v);
    bool contains(RatVec v) const;
    int dimension() const { return static_cast<int>(basis_.size()); }

private:
    void reduce(RatVec& v) const;
    std::vector<RatVec> basis_; // echelonized: each has a unique pivot position
    std::vector<int> pivots_;
};

int span_rank(const std::vector<RatVec>& vectors);
bool same_span(const std::vector<RatVec>& a, const std::vector<RatVec>& b);

/// Reduced row echelon basis of the span (canonical representative).
std::vector<RatVec> canonical_rowspace_basis(std::vector<RatVec> vectors);

} // namespace coalnet
