#include "coalnet/series.hpp"
#include "coalnet/errors.hpp"

#include <cmath>

namespace coalnet {

RatSeries RatSeries::constant(const Rational& v, int order) {
    RatSeries s = zero(order);
    s.c[0] = v;
    return s;
}

RatSeries RatSeries::variable(int order) {
    RatSeries s = zero(order);
    if (order >= 1) s.c[1] = 1;
    return s;
}

Rational RatSeries::derivative_at_zero(int k) const {
    if (k > order()) return 0;
    Rational f = 1;
    for (int m = 2; m <= k; ++m) f *= m;
    return c[k] * f;
}

RatSeries RatSeries::operator+(const RatSeries& rhs) const {
    RatSeries out = zero(std::min(order(), rhs.order()));
    for (int k = 0; k <= out.order(); ++k) out.c[k] = c[k] + rhs.c[k];
    return out;
}

RatSeries RatSeries::operator-(const RatSeries& rhs) const {
    RatSeries out = zero(std::min(order(), rhs.order()));
    for (int k = 0; k <= out.order(); ++k) out.c[k] = c[k] - rhs.c[k];
    return out;
}

RatSeries RatSeries::operator*(const RatSeries& rhs) const {
    RatSeries out = zero(std::min(order(), rhs.order()));
    for (int i = 0; i <= order() && i <= out.order(); ++i) {
        if (c[i] == 0) continue;
        for (int j = 0; j + i <= out.order() && j <= rhs.order(); ++j) out.c[i + j] += c[i] * rhs.c[j];
    }
    return out;
}

RatSeries RatSeries::scaled(const Rational& s) const {
    RatSeries out = *this;
    for (auto& q : out.c) q *= s;
    return out;
}

RatSeries RatSeries::power(int e) const {
    RatSeries acc = constant(1, order());
    for (int i = 0; i < e; ++i) acc = acc * (*this);
    return acc;
}

RatSeries RatSeries::compose(const RatSeries& inner) const {
    if (inner.c[0] != 0) throw InputError("series composition needs a zero constant term");
    RatSeries acc = zero(inner.order());
    // Horner over the outer coefficients
    for (size_t k = c.size(); k-- > 0;) {
        acc = acc * inner;
        acc.c[0] += c[k];
    }
    return acc;
}

double RatSeries::eval(double s) const {
    double acc = 0;
    for (size_t k = c.size(); k-- > 0;) acc = acc * s + to_double(c[k]);
    return acc;
}

RatSeries poly_on_series(const Poly& p, const RatSeries& x, const RatSeries& y, const RatSeries& l) {
    int order = std::min(std::min(x.order(), y.order()), l.order());
    RatSeries acc = RatSeries::zero(order);
    for (const auto& t : p.terms()) {
        RatSeries m = RatSeries::constant(t.c, order);
        if (t.ex) m = m * x.power(t.ex);
        if (t.ey) m = m * y.power(t.ey);
        if (t.el) m = m * l.power(t.el);
        acc = acc + m;
    }
    return acc;
}

RatSeries implicit_branch(const Poly& e, int order) {
    Rational e0 = e.eval(0, 0, 0);
    Rational ex = e.derivative(0).eval(0, 0, 0);
    if (e0 != 0) throw InputError("implicit branch needs e(0,0) = 0");
    if (ex == 0) throw InputError("implicit branch needs e_x(0,0) != 0");
    RatSeries b = RatSeries::zero(order);
    RatSeries lambda = RatSeries::variable(order);
    for (int k = 1; k <= order; ++k) {
        RatSeries residual = poly_on_series(e, b, RatSeries::zero(order), lambda);
        b.c[k] = -residual.c[k] / ex;
    }
    return b;
}

} // namespace coalnet
