#include "coalnet/system.hpp"
#include "coalnet/errors.hpp"
#include "coalnet/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace coalnet {

using nlohmann::json;

Poly Poly::term(int ex, int ey, int el, const Rational& c) {
    Poly p;
    if (c != 0) p.terms_.push_back({ex, ey, el, c});
    return p;
}

void Poly::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
        return std::tie(a.ex, a.ey, a.el) < std::tie(b.ex, b.ey, b.el);
    });
    std::vector<Term> out;
    for (const auto& t : terms_) {
        if (!out.empty() && out.back().ex == t.ex && out.back().ey == t.ey && out.back().el == t.el)
            out.back().c += t.c;
        else
            out.push_back(t);
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.c == 0; }), out.end());
    terms_ = std::move(out);
}

Poly Poly::operator+(const Poly& rhs) const {
    Poly p;
    p.terms_ = terms_;
    p.terms_.insert(p.terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
    p.normalize();
    return p;
}

Poly Poly::operator-(const Poly& rhs) const { return *this + rhs.scaled(Rational(-1)); }

Poly Poly::operator*(const Poly& rhs) const {
    Poly p;
    for (const auto& a : terms_)
        for (const auto& b : rhs.terms_) p.terms_.push_back({a.ex + b.ex, a.ey + b.ey, a.el + b.el, a.c * b.c});
    p.normalize();
    return p;
}

Poly Poly::scaled(const Rational& s) const {
    Poly p;
    if (s == 0) return p;
    p.terms_ = terms_;
    for (auto& t : p.terms_) t.c *= s;
    return p;
}

Poly Poly::derivative(int var) const {
    Poly p;
    for (const auto& t : terms_) {
        Term d = t;
        int* e = var == 0 ? &d.ex : var == 1 ? &d.ey : &d.el;
        if (*e == 0) continue;
        d.c *= *e;
        *e -= 1;
        p.terms_.push_back(d);
    }
    p.normalize();
    return p;
}

Rational Poly::eval(const Rational& x, const Rational& y, const Rational& l) const {
    auto ipow = [](const Rational& b, int e) {
        Rational r = 1;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    };
    Rational acc = 0;
    for (const auto& t : terms_) acc += t.c * ipow(x, t.ex) * ipow(y, t.ey) * ipow(l, t.el);
    return acc;
}

double Poly::eval(double x, double y, double l) const {
    double acc = 0;
    for (const auto& t : terms_) acc += to_double(t.c) * std::pow(x, t.ex) * std::pow(y, t.ey) * std::pow(l, t.el);
    return acc;
}

Rational Poly::jet_coeff(int i, int j, int k) const {
    auto fact = [](int n) {
        Rational r = 1;
        for (int m = 2; m <= n; ++m) r *= m;
        return r;
    };
    for (const auto& t : terms_)
        if (t.ex == i && t.ey == j && t.el == k) return t.c * fact(i) * fact(j) * fact(k);
    return 0;
}

Poly Poly::substitute_y_equal_x() const {
    Poly p;
    for (const auto& t : terms_) p.terms_.push_back({t.ex + t.ey, 0, t.el, t.c});
    p.normalize();
    return p;
}

Poly Poly::substitute_y_zero() const {
    Poly p;
    for (const auto& t : terms_)
        if (t.ey == 0) p.terms_.push_back(t);
    p.normalize();
    return p;
}

DiffusiveJet DiffusiveJet::make(Rational g_x, Rational g_xx, Rational g_xxx, Rational g_xl,
                                Rational h_1, Rational h_11, Rational h_12, Rational h_1l,
                                Rational h_111, Rational h_122) {
    DiffusiveJet j;
    j.g_x = std::move(g_x);
    j.g_xx = std::move(g_xx);
    j.g_xxx = std::move(g_xxx);
    j.g_xl = std::move(g_xl);
    j.h_1 = std::move(h_1);
    j.h_11 = std::move(h_11);
    j.h_12 = std::move(h_12);
    j.h_1l = std::move(h_1l);
    j.h_111 = std::move(h_111);
    j.h_122 = std::move(h_122);
    j.h_22 = -j.h_11 - 2 * j.h_12;
    return j;
}

DiffusiveJet DiffusiveJet::default_jet(const Rational& mu) {
    return make(-mu, 1, -1, 1, 1, Rational(1, 2), Rational(-1, 2), Rational(1, 3), Rational(1, 4),
                Rational(1, 5));
}

DiffusiveJet load_jet(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    auto get = [&](std::initializer_list<const char*> keys, bool required) -> std::optional<Rational> {
        for (const char* k : keys)
            if (j.contains(k)) {
                const auto& v = j.at(k);
                if (v.is_number_integer()) return Rational(static_cast<long long>(v.get<long long>()));
                if (v.is_string()) return parse_rational(v.get<std::string>());
                throw ParseError(std::string("jet entry '") + k + "' must be an integer or decimal string");
            }
        if (required) throw ParseError(std::string("jet file misses '") + *keys.begin() + "'");
        return std::nullopt;
    };
    DiffusiveJet jet = DiffusiveJet::make(
        *get({"g_x"}, true), *get({"g_xx"}, true), *get({"g_xxx"}, true), *get({"g_x\xce\xbb", "g_xl"}, true),
        *get({"h_1"}, true), *get({"h_11"}, true), *get({"h_12"}, true), *get({"h_1\xce\xbb", "h_1l"}, true),
        *get({"h_111"}, true), *get({"h_122"}, true));
    if (auto h22 = get({"h_22"}, false); h22 && *h22 != jet.h_22)
        throw JetError("h_22 violates the diffusive identity h_11 + 2 h_12 + h_22 = 0");
    return jet;
}

std::string jet_to_json(const DiffusiveJet& jet) {
    json j;
    j["g_x"] = rat_to_string(jet.g_x);
    j["g_xx"] = rat_to_string(jet.g_xx);
    j["g_xxx"] = rat_to_string(jet.g_xxx);
    j["g_x\xce\xbb"] = rat_to_string(jet.g_xl);
    j["h_1"] = rat_to_string(jet.h_1);
    j["h_11"] = rat_to_string(jet.h_11);
    j["h_12"] = rat_to_string(jet.h_12);
    j["h_22"] = rat_to_string(jet.h_22);
    j["h_111"] = rat_to_string(jet.h_111);
    j["h_122"] = rat_to_string(jet.h_122);
    j["h_1\xce\xbb"] = rat_to_string(jet.h_1l);
    return j.dump(2);
}

RealizedFunctions realize_polynomials(const DiffusiveJet& jet) {
    if (jet.h_11 + 2 * jet.h_12 + jet.h_22 != 0)
        throw JetError("jet violates the diffusive identity h_11 + 2 h_12 + h_22 = 0");
    RealizedFunctions f;
    f.g = Poly::term(1, 0, 0, jet.g_x) + Poly::term(2, 0, 0, jet.g_xx / 2) +
          Poly::term(3, 0, 0, jet.g_xxx / 6) + Poly::term(1, 0, 1, jet.g_xl);
    Poly diff = Poly::term(1, 0, 0, 1) - Poly::term(0, 1, 0, 1);
    Poly bracket = Poly::term(0, 0, 0, jet.h_1) + Poly::term(0, 0, 1, jet.h_1l) +
                   Poly::term(1, 0, 0, jet.h_11 / 2) - Poly::term(0, 1, 0, jet.h_22 / 2) +
                   Poly::term(2, 0, 0, jet.h_111 / 6) + Poly::term(0, 2, 0, jet.h_122 / 2);
    f.h = diff * bracket;
    return f;
}

DiffusiveJet extract_jet(const RealizedFunctions& f) {
    if (!f.h.substitute_y_equal_x().is_zero()) throw JetError("coupling function is not diffusive");
    DiffusiveJet j = DiffusiveJet::make(f.g.jet_coeff(1, 0, 0), f.g.jet_coeff(2, 0, 0), f.g.jet_coeff(3, 0, 0),
                                        f.g.jet_coeff(1, 0, 1), f.h.jet_coeff(1, 0, 0), f.h.jet_coeff(2, 0, 0),
                                        f.h.jet_coeff(1, 1, 0), f.h.jet_coeff(1, 0, 1), f.h.jet_coeff(3, 0, 0),
                                        f.h.jet_coeff(1, 2, 0));
    if (j.h_22 != f.h.jet_coeff(0, 2, 0)) throw JetError("second derivatives violate the diffusive identity");
    return j;
}

AdmissibleSystem::AdmissibleSystem(Network net, DiffusiveJet jet)
    : net_(std::move(net)), jet_(std::move(jet)), funcs_(realize_polynomials(jet_)) {
    cg_ = compile(funcs_.g);
    cgx_ = compile(funcs_.g.derivative(0));
    ch_ = compile(funcs_.h);
    chx_ = compile(funcs_.h.derivative(0));
    chy_ = compile(funcs_.h.derivative(1));
    in_edges_.resize(net_.n_cells());
    for (const auto& e : net_.edges()) {
        if (e.source == e.target) continue; // h(x,x,l) == 0: self-loops do not act
        in_edges_[e.target - 1].push_back({e.source - 1, to_double(e.weight), e.weight});
    }
    fast_.g_x = to_double(jet_.g_x);
    fast_.g_xx2 = to_double(jet_.g_xx) / 2;
    fast_.g_xxx6 = to_double(jet_.g_xxx) / 6;
    fast_.g_xl = to_double(jet_.g_xl);
    fast_.h_1 = to_double(jet_.h_1);
    fast_.h_1l = to_double(jet_.h_1l);
    fast_.h_11_2 = to_double(jet_.h_11) / 2;
    fast_.h_22_2 = to_double(jet_.h_22) / 2;
    fast_.h_111_6 = to_double(jet_.h_111) / 6;
    fast_.h_122_2 = to_double(jet_.h_122) / 2;
}

void AdmissibleSystem::evaluate_with_jacobian(const double* x, double lambda, double* f,
                                              Eigen::MatrixXd& jac) const {
    // closed-form evaluation of the realized polynomials
    //   g(x,l) = x (g_x + g_xl l + g_xx/2 x + g_xxx/6 x^2)
    //   h(x,y,l) = (x-y) B(x,y,l),
    //   B = h_1 + h_1l l + h_11/2 x - h_22/2 y + h_111/6 x^2 + h_122/2 y^2
    const int n = net_.n_cells();
    jac.setZero(n, n);
    const double gl = fast_.g_x + fast_.g_xl * lambda;
    const double hl = fast_.h_1 + fast_.h_1l * lambda;
    for (int i = 0; i < n; ++i) {
        const double xi = x[i];
        f[i] = ((fast_.g_xxx6 * xi + fast_.g_xx2) * xi + gl) * xi;
        jac(i, i) = (3 * fast_.g_xxx6 * xi + 2 * fast_.g_xx2) * xi + gl;
        for (const auto& e : in_edges_[i]) {
            const double xj = x[e.src];
            const double diff = xi - xj;
            const double b = hl + fast_.h_11_2 * xi - fast_.h_22_2 * xj + fast_.h_111_6 * xi * xi +
                             fast_.h_122_2 * xj * xj;
            const double bx = fast_.h_11_2 + 2 * fast_.h_111_6 * xi;
            const double by = -fast_.h_22_2 + 2 * fast_.h_122_2 * xj;
            f[i] += e.w * diff * b;
            jac(i, i) += e.w * (b + diff * bx);
            jac(i, e.src) += e.w * (diff * by - b);
        }
    }
}

AdmissibleSystem::CompiledPoly AdmissibleSystem::compile(const Poly& p) {
    CompiledPoly out;
    for (const auto& t : p.terms()) out.push_back({t.ex, t.ey, t.el, to_double(t.c)});
    return out;
}

double AdmissibleSystem::eval_compiled(const CompiledPoly& p, double x, double y, double l) {
    double acc = 0;
    for (const auto& t : p) {
        double m = t.c;
        for (int i = 0; i < t.ex; ++i) m *= x;
        for (int i = 0; i < t.ey; ++i) m *= y;
        for (int i = 0; i < t.el; ++i) m *= l;
        acc += m;
    }
    return acc;
}

RatVec AdmissibleSystem::evaluate_exact(const RatVec& x, const Rational& lambda) const {
    if (static_cast<int>(x.size()) != net_.n_cells()) throw InputError("state dimension mismatch");
    RatVec out(x.size());
    for (int i = 0; i < net_.n_cells(); ++i) {
        Rational acc = funcs_.g.eval(x[i], 0, lambda);
        for (const auto& e : in_edges_[i]) acc += e.w_exact * funcs_.h.eval(x[i], x[e.src], lambda);
        out[i] = acc;
    }
    return out;
}

void AdmissibleSystem::evaluate(const double* x, double lambda, double* out) const {
    for (int i = 0; i < net_.n_cells(); ++i) {
        double acc = eval_compiled(cg_, x[i], 0, lambda);
        for (const auto& e : in_edges_[i]) acc += e.w * eval_compiled(ch_, x[i], x[e.src], lambda);
        out[i] = acc;
    }
}

std::vector<double> AdmissibleSystem::evaluate(const std::vector<double>& x, double lambda) const {
    std::vector<double> out(x.size());
    evaluate(x.data(), lambda, out.data());
    return out;
}

void AdmissibleSystem::jacobian(const double* x, double lambda, Eigen::MatrixXd& out) const {
    const int n = net_.n_cells();
    out.setZero(n, n);
    for (int i = 0; i < n; ++i) {
        out(i, i) = eval_compiled(cgx_, x[i], 0, lambda);
        for (const auto& e : in_edges_[i]) {
            out(i, i) += e.w * eval_compiled(chx_, x[i], x[e.src], lambda);
            out(i, e.src) += e.w * eval_compiled(chy_, x[i], x[e.src], lambda);
        }
    }
}

RatMat AdmissibleSystem::jacobian_origin() const { return coalnet::jacobian_origin(net_, jet_); }

Rational AdmissibleSystem::second_derivative(int cell, int a, int b) const {
    const int i = cell - 1;
    Rational acc = 0;
    if (a == cell && b == cell) acc += jet_.g_xx;
    for (const auto& e : in_edges_[i]) {
        int n1 = (a == cell) + (b == cell);
        int n2 = (a == e.src + 1) + (b == e.src + 1);
        if (n1 + n2 != 2) continue;
        acc += e.w_exact * funcs_.h.jet_coeff(n1, n2, 0);
    }
    return acc;
}

Rational AdmissibleSystem::third_derivative(int cell, int a, int b, int c) const {
    const int i = cell - 1;
    Rational acc = 0;
    if (a == cell && b == cell && c == cell) acc += jet_.g_xxx;
    for (const auto& e : in_edges_[i]) {
        int n1 = (a == cell) + (b == cell) + (c == cell);
        int n2 = (a == e.src + 1) + (b == e.src + 1) + (c == e.src + 1);
        if (n1 + n2 != 3) continue;
        acc += e.w_exact * funcs_.h.jet_coeff(n1, n2, 0);
    }
    return acc;
}

RatMat AdmissibleSystem::hessian(int cell, const std::vector<int>& coords) const {
    RatMat h(static_cast<int>(coords.size()), static_cast<int>(coords.size()));
    for (size_t p = 0; p < coords.size(); ++p)
        for (size_t q = 0; q < coords.size(); ++q)
            h(static_cast<int>(p), static_cast<int>(q)) = second_derivative(cell, coords[p], coords[q]);
    return h;
}

RatMat jacobian_origin(const Network& net, const DiffusiveJet& jet) {
    RatMat j = net.laplacian().scaled(jet.h_1);
    for (int i = 0; i < net.n_cells(); ++i) j(i, i) += jet.g_x;
    return j;
}

std::optional<Rational> bifurcation_eigenvalue(const Network& net, const DiffusiveJet& jet, double tol) {
    if (jet.h_1 == 0) {
        if (jet.g_x == 0)
            throw GenericityError("g_x = h_1 = 0: every Laplacian eigenvalue meets the bifurcation condition");
        return std::nullopt;
    }
    Rational mu_star = -jet.g_x / jet.h_1;
    SpectralStructure s = eigen_structure(net.laplacian(), {false, tol});
    double target = to_double(mu_star);
    double scale = std::max(1.0, std::abs(target));
    int hits = 0;
    bool found = false;
    for (const auto& e : s.eigenvalues) {
        bool close = std::abs(e.value - std::complex<double>(target, 0)) <= 100 * tol * scale;
        if (e.exact && e.exact_value == mu_star) {
            found = true;
            ++hits;
        } else if (close) {
            found = true;
            ++hits;
        }
    }
    if (hits > 1)
        throw GenericityError("bifurcation condition is ambiguous within the clustering tolerance");
    return found ? std::optional<Rational>(mu_star) : std::nullopt;
}

std::vector<RatMat> hessian_tensors(const AdmissibleSystem& sys, const std::vector<int>& cells,
                                    const std::vector<int>& coords) {
    std::vector<RatMat> out;
    for (int c : cells) out.push_back(sys.hessian(c, coords));
    return out;
}

} // namespace coalnet
