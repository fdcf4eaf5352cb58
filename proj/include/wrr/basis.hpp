#pragma once

#include "wrr/common.hpp"

#include <string>
#include <vector>

namespace wrr {

/// One coordinate process sampled on a finite time grid.
struct SampledCurve {
    Vector grid;    // strictly increasing, within the basis interval
    Vector values;  // one value per grid point, finite

    void validate() const;
    double sup_distance(const SampledCurve& other) const;
};

enum class BasisKind { FourierSine, Custom };

/// Orthonormal system on [t1, t2]. FourierSine is
///   phi_k(t) = sqrt(2) sin(2 k pi (t-t1)/(t2-t1)) / sqrt(t2-t1),
/// the standard sine system scaled to the interval. Custom bases are
/// tabulated on a reference grid and evaluated by linear interpolation,
/// which is how estimated eigenfunctions arrive in practice.
struct BasisSpec {
    BasisKind kind = BasisKind::FourierSine;
    int n_basis = 0;
    double t1 = 0.0;
    double t2 = 1.0;
    // Custom only: tabulated values, one column per basis function.
    Vector ref_grid;
    Matrix ref_values;  // ref_grid.size() x n_basis

    double length() const { return t2 - t1; }
};

BasisSpec make_fourier_sine_basis(int n_basis, double t1, double t2);

BasisSpec make_custom_basis(const Vector& ref_grid, const Matrix& ref_values, double t1,
                            double t2);

/// phi_k(t), k is 1-based as in the usual indexing.
double eval_basis(const BasisSpec& basis, int k, double t);

/// All basis functions on a grid; returns n_basis x grid.size().
Matrix eval_basis_grid(const BasisSpec& basis, const Vector& grid);

enum class QuadratureRule { LeftRiemann, Trapezoid };

/// Scores of a sampled curve against every basis function.
/// Default is the left-Riemann sum
///   score_k = sum_{l<N-1} (t_{l+1}-t_l) y(t_l) phi_k(t_l),
/// trapezoid is available for convergence studies.
Vector riemann_scores(const SampledCurve& curve, const BasisSpec& basis,
                      QuadratureRule rule = QuadratureRule::LeftRiemann);

/// Max-norm distance of the discrete Gram matrix from identity on a uniform
/// grid of n_points; the orthonormality diagnostic for BasisSpec.
double orthonormality_defect(const BasisSpec& basis, int n_points);

/// Environment label for score tables and samples.
enum class EnvLabel { O, A };

std::string to_string(EnvLabel e);

/// Per-sample scores of all variables against one basis.
/// Column order is var-major: variable 0 (Y) occupies columns
/// [0, n_basis), variable j occupies [j*n_basis, (j+1)*n_basis).
struct ScoreTable {
    EnvLabel env = EnvLabel::O;
    int n_vars = 0;  // p+1 (target first)
    int n_basis = 0;
    Matrix scores;  // n_samples x (n_vars*n_basis)

    Eigen::Index n_samples() const { return scores.rows(); }
    void validate() const;

    /// Block of columns for one variable.
    Eigen::Block<const Matrix> var_block(int var) const {
        return scores.block(0, var * n_basis, scores.rows(), n_basis);
    }
};

}  // namespace wrr
