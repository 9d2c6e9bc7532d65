#pragma once

#include "coalnet/network.hpp"
#include "coalnet/ratmat.hpp"

#include <complex>
#include <optional>

namespace coalnet {

struct SpectralOptions {
    bool force_exact = false;  // fail instead of falling back to floating point
    double tol = 1e-9;         // relative clustering / rank tolerance
};

/// One eigenvalue with its multiplicities and Jordan chains.
/// chain[0] is an eigenvector and (A - mu I) chain[k] = chain[k-1].
struct EigenvalueData {
    std::complex<double> value;
    bool exact = false;
    Rational exact_value;
    int alg_mult = 0;
    int geo_mult = 0;
    std::vector<std::vector<RatVec>> chains;                      // exact path
    std::vector<std::vector<Eigen::VectorXcd>> chains_float;      // float path
    bool is_semisimple() const { return alg_mult == geo_mult; }
};

struct SpectralStructure {
    int dimension = 0;
    bool all_exact = false;
    bool clustering_warning = false; // two clusters closer than 10x tolerance
    std::vector<EigenvalueData> eigenvalues;

    const EigenvalueData* find_exact(const Rational& mu) const;
    const EigenvalueData* find_close(std::complex<double> mu, double tol) const;
    bool has_eigenvalue(const Rational& mu, double tol) const;
};

SpectralStructure eigen_structure(const RatMat& a, const SpectralOptions& opt = {});

/// Partition of L_{N2} around the coalescence cell c:
/// l_bar (without the c-row), l_core (without c-row and c-column) and
/// l_col (the c-column without the c-row).
struct ReducedLaplacians {
    RatMat l_bar;
    RatMat l_core;
    RatVec l_col;
};
ReducedLaplacians reduced_laplacians(const Network& net2, int c);

struct CouplingConditionReport {
    Rational mu;
    RatVec column_vector; // L_{N2}^c
    bool in_image = false;
    std::optional<RatVec> particular_solution; // w with (l_core - mu I) w = -L_{N2}^c
};
CouplingConditionReport coupling_condition(const Network& net2, int c, const Rational& mu);

/// Extension of an eigenvector of L_{N1} across the feedforward tail.
struct LiftedVector {
    RatVec vector;       // full-length (n1 + n2 - 1) vector
    int chain_rank = 1;  // smallest k with (L_N - mu I)^k v = 0
    bool genuine_eigenvector() const { return chain_rank == 1; }
};
LiftedVector lift_eigenvector(const CoalescenceSpec& spec, const Rational& mu, const RatVec& v1);

std::vector<RatVec> zero_eigenspace_basis(const CoalescenceSpec& spec);

struct UnionCheckRow {
    std::complex<double> value;
    int mult_first = 0;
    int mult_second = 0;
    int mult_coalescence = 0;
    int expected = 0;
    bool ok = false;
};
struct UnionCheckReport {
    bool ok = false;
    std::vector<UnionCheckRow> rows;
};
UnionCheckReport spectrum_union_check(const CoalescenceSpec& spec, const SpectralOptions& opt = {});

/// Full spectral structure of an r-fold FFCN with, per chain, the component
/// network the chain's top vector lifts from (1-based layer index).
struct TaggedChainGroup {
    EigenvalueData data;
    std::vector<int> chain_component; // parallel to data.chains
};
struct FfcnSpectralReport {
    Network assembled;
    std::vector<int> layer_of_cell; // 1-based component index per cell
    std::vector<TaggedChainGroup> groups;
    bool all_exact = false;
};
FfcnSpectralReport ffcn_spectral_report(const RFoldSpec& spec, const SpectralOptions& opt = {});

// float-path helpers (shared with the continuation oracle)
int numerical_rank(const Eigen::MatrixXcd& m, double tol);
std::pair<int, int> numerical_jordan_check(const Eigen::MatrixXd& a, std::complex<double> mu, double tol = 1e-9);

} // namespace coalnet
