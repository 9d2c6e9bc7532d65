#pragma once

#include "coalnet/system.hpp"

namespace coalnet {

/// Truncated univariate Taylor series over the rationals: c[k] is the
/// coefficient of s^k, everything beyond `order` is dropped.
struct RatSeries {
    std::vector<Rational> c;

    static RatSeries zero(int order) { return {RatVec(order + 1)}; }
    static RatSeries constant(const Rational& v, int order);
    static RatSeries variable(int order); // the series s itself

    int order() const { return static_cast<int>(c.size()) - 1; }
    const Rational& coeff(int k) const { return c[k]; }
    /// k-th derivative at 0, i.e. k! * c[k].
    Rational derivative_at_zero(int k) const;

    RatSeries operator+(const RatSeries& rhs) const;
    RatSeries operator-(const RatSeries& rhs) const;
    RatSeries operator*(const RatSeries& rhs) const;
    RatSeries scaled(const Rational& s) const;
    RatSeries power(int e) const;
    /// Composition this(inner) for inner with zero constant term.
    RatSeries compose(const RatSeries& inner) const;
    double eval(double s) const;
};

/// p(X(s), Y(s), L(s)) truncated to the common order.
RatSeries poly_on_series(const Poly& p, const RatSeries& x, const RatSeries& y, const RatSeries& l);

/// Solve e(b(l), l) = 0 for the branch through the origin, given
/// e with e(0,0) = 0 and e_x(0,0) != 0 (x is the first Poly variable,
/// lambda the third). Returns the Taylor series of b to `order`.
RatSeries implicit_branch(const Poly& e, int order);

} // namespace coalnet
