#pragma once

#include "wrr/basis.hpp"
#include "wrr/shiftset.hpp"
#include "wrr/sim.hpp"

#include <string>

namespace wrr {

/// Second-moment summaries of the two environments: covariate Grammians
/// G^e and rotated responses Z^e, in basis coordinates.
/// G is (p*n_basis) square, Z is (p*n_basis) x n_basis with Z[(j,l), k] =
/// E[xi_{j,l} zeta_k]. Moments are uncentered plug-in second moments;
/// the observational environment is assumed centered.
struct Grammians {
    int p = 0;
    int n_basis = 0;
    Matrix G_O, G_A;
    Matrix Z_O, Z_A;
    Eigen::Index n_samples_O = 0;
    Eigen::Index n_samples_A = 0;

    void validate() const;
    std::string to_json() const;
    static Grammians from_json(const std::string& text);
};

Grammians empirical_grammians(const ScoreTable& scores_O, const ScoreTable& scores_A);

/// Exact moments from the SEM law; env A at shift scale 1.
Grammians population_grammians(const SemSpec& spec);

/// Discretized pooled covariance operator gamma*K_{X^A} + (1-gamma)*K_{X^O}
/// in basis coordinates, with its full symmetric eigendecomposition.
/// Eigenvalues are descending; directions with |lambda| <= kernel_tol *
/// max|lambda| are flagged as kernel directions.
struct PooledOperator {
    double gamma = 0.0;
    Matrix K;
    Vector eigenvalues;   // descending
    Matrix eigenvectors;  // orthonormal columns, sign-fixed
    double kernel_tol = 0.0;
    int kernel_dim = 0;

    bool is_kernel_direction(Eigen::Index l) const;
};

inline constexpr double kKernelTol = 1e-10;

PooledOperator pooled_operator(const Grammians& gram, double gamma,
                               double kernel_tol = kKernelTol);

/// Empirical covariance kernel of all variables in a score table, sampled
/// on a grid: block (i,j) is phi(s)^T Mhat_ij phi(t).
ShiftKernelGrid covariance_kernel_grid(const ScoreTable& scores, const BasisSpec& basis,
                                       const Vector& grid);

/// Estimated eigenfunctions of the pooled operator, built from a held-out
/// sample split. Columns of `coeffs` are orthonormal basis-coordinate
/// vectors (unit L2 norm by Parseval), sign-fixed: first coordinate of
/// noticeable size is positive.
struct EigenfunctionSet {
    BasisSpec basis;  // underlying scalar basis phi
    int p = 0;
    Matrix coeffs;       // (p*n_basis) x n_eig
    Vector eigenvalues;  // descending, matching columns

    int n_eig() const { return static_cast<int>(coeffs.cols()); }
    /// Component i (0-based variable among the p covariates) of
    /// eigenfunction l evaluated on a grid.
    Vector component_on_grid(int l, int var, const Vector& grid) const;
};

EigenfunctionSet estimate_eigenfunctions(const ScoreTable& scores_O_split,
                                         const ScoreTable& scores_A_split, double gamma,
                                         const BasisSpec& basis);

/// Fixes eigenvector signs in place: first coordinate with magnitude above
/// 1e-8 of the max is made positive.
void fix_signs(Matrix& vectors);

}  // namespace wrr
