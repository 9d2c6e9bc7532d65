#pragma once

#include "coalnet/network.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace coalnet {

/// Sparse polynomial in (x, y, lambda) with rational coefficients.
/// g-polynomials simply never use the y variable.
class Poly {
public:
    struct Term {
        int ex = 0, ey = 0, el = 0;
        Rational c;
    };

    Poly() = default;
    static Poly term(int ex, int ey, int el, const Rational& c);

    Poly operator+(const Poly& rhs) const;
    Poly operator-(const Poly& rhs) const;
    Poly operator*(const Poly& rhs) const;
    Poly scaled(const Rational& s) const;

    Poly derivative(int var) const; // 0 = x, 1 = y, 2 = lambda
    Rational eval(const Rational& x, const Rational& y, const Rational& l) const;
    double eval(double x, double y, double l) const;
    /// Coefficient extracted as a derivative value at the origin:
    /// d^{i+j+k} p / dx^i dy^j dl^k (0).
    Rational jet_coeff(int i, int j, int k) const;
    bool is_zero() const { return terms_.empty(); }
    Poly substitute_y_equal_x() const;
    Poly substitute_y_zero() const;

    const std::vector<Term>& terms() const { return terms_; }

private:
    void normalize();
    std::vector<Term> terms_;
};

/// Taylor data of the internal dynamics g and the diffusive coupling h at the
/// origin. h_22 is derived from the second-order diffusive identity
/// h_11 + 2 h_12 + h_22 = 0.
struct DiffusiveJet {
    Rational g_x, g_xx, g_xxx, g_xl;
    Rational h_1, h_11, h_12, h_22, h_111, h_122, h_1l;

    static DiffusiveJet make(Rational g_x, Rational g_xx, Rational g_xxx, Rational g_xl,
                             Rational h_1, Rational h_11, Rational h_12, Rational h_1l,
                             Rational h_111, Rational h_122);
    /// The fixed test jet with g_x chosen so that g_x + mu h_1 = 0.
    static DiffusiveJet default_jet(const Rational& mu);

    bool operator==(const DiffusiveJet&) const = default;
};

DiffusiveJet load_jet(const std::string& path);
std::string jet_to_json(const DiffusiveJet& jet);

/// Concrete polynomial realization of a jet:
///   g(x,l) = g_x x + g_xx/2 x^2 + g_xxx/6 x^3 + g_xl x l
///   h(x,y,l) = (x-y) * [h_1 + h_1l l + h_11/2 x - h_22/2 y + h_111/6 x^2 + h_122/2 y^2]
/// so h(x,x,l) == 0 holds structurally.
struct RealizedFunctions {
    Poly g;
    Poly h;
};
RealizedFunctions realize_polynomials(const DiffusiveJet& jet);
DiffusiveJet extract_jet(const RealizedFunctions& f);

/// A diffusive input-additive admissible system F on a fixed network.
class AdmissibleSystem {
public:
    AdmissibleSystem(Network net, DiffusiveJet jet);

    const Network& network() const { return net_; }
    const DiffusiveJet& jet() const { return jet_; }
    const Poly& g() const { return funcs_.g; }
    const Poly& h() const { return funcs_.h; }
    int dimension() const { return net_.n_cells(); }

    RatVec evaluate_exact(const RatVec& x, const Rational& lambda) const;
    void evaluate(const double* x, double lambda, double* out) const;
    std::vector<double> evaluate(const std::vector<double>& x, double lambda) const;
    void jacobian(const double* x, double lambda, Eigen::MatrixXd& out) const;
    /// Fused fast path for the Newton inner loop.
    void evaluate_with_jacobian(const double* x, double lambda, double* f, Eigen::MatrixXd& jac) const;

    RatMat jacobian_origin() const; // g_x I + h_1 L

    /// Exact derivative tensors of the cell equations at the origin.
    Rational second_derivative(int cell, int a, int b) const;         // 1-based everywhere
    Rational third_derivative(int cell, int a, int b, int c) const;
    /// Hessian of f_cell restricted to `coords` (1-based cell list).
    RatMat hessian(int cell, const std::vector<int>& coords) const;

private:
    Network net_;
    DiffusiveJet jet_;
    RealizedFunctions funcs_;

    struct CompiledTerm {
        int ex, ey, el;
        double c;
    };
    using CompiledPoly = std::vector<CompiledTerm>;
    static CompiledPoly compile(const Poly& p);
    static double eval_compiled(const CompiledPoly& p, double x, double y, double l);
    CompiledPoly cg_, cgx_, ch_, chx_, chy_;
    struct InEdge {
        int src;
        double w;
        Rational w_exact;
    };
    std::vector<std::vector<InEdge>> in_edges_; // per cell, self-loops excluded
    struct FastJet {
        double g_x, g_xx2, g_xxx6, g_xl;
        double h_1, h_1l, h_11_2, h_22_2, h_111_6, h_122_2;
    } fast_{};
};

RatMat jacobian_origin(const Network& net, const DiffusiveJet& jet);

/// The eigenvalue mu* of L_N with g_x + mu* h_1 = 0, when it exists.
std::optional<Rational> bifurcation_eigenvalue(const Network& net, const DiffusiveJet& jet,
                                               double tol = 1e-9);

std::vector<RatMat> hessian_tensors(const AdmissibleSystem& sys, const std::vector<int>& cells,
                                    const std::vector<int>& coords);

} // namespace coalnet
