#include "wrr/basis.hpp"

#include <cmath>

namespace wrr {

void SampledCurve::validate() const {
    check_grid(grid, 1, "SampledCurve");
    require(values.size() == grid.size(), "SampledCurve: grid/value size mismatch");
    for (Eigen::Index l = 0; l < values.size(); ++l)
        require(std::isfinite(values[l]), "SampledCurve: non-finite value");
}

double SampledCurve::sup_distance(const SampledCurve& other) const {
    require(grid.size() == other.grid.size(), "sup_distance: grids differ");
    return (values - other.values).cwiseAbs().maxCoeff();
}

BasisSpec make_fourier_sine_basis(int n_basis, double t1, double t2) {
    require(n_basis >= 1, "make_fourier_sine_basis: n_basis must be >= 1");
    require(t1 < t2, "make_fourier_sine_basis: need t1 < t2");
    BasisSpec b;
    b.kind = BasisKind::FourierSine;
    b.n_basis = n_basis;
    b.t1 = t1;
    b.t2 = t2;
    return b;
}

BasisSpec make_custom_basis(const Vector& ref_grid, const Matrix& ref_values, double t1,
                            double t2) {
    require(t1 < t2, "make_custom_basis: need t1 < t2");
    check_grid(ref_grid, 2, "make_custom_basis");
    require(ref_values.rows() == ref_grid.size(),
            "make_custom_basis: table rows must match reference grid");
    require(ref_values.cols() >= 1, "make_custom_basis: need at least one basis function");
    BasisSpec b;
    b.kind = BasisKind::Custom;
    b.n_basis = static_cast<int>(ref_values.cols());
    b.t1 = t1;
    b.t2 = t2;
    b.ref_grid = ref_grid;
    b.ref_values = ref_values;
    return b;
}

namespace {

double interp_column(const Vector& grid, const Matrix& values, int col, double t) {
    // Clamped linear interpolation on the reference grid.
    if (t <= grid[0]) return values(0, col);
    const Eigen::Index n = grid.size();
    if (t >= grid[n - 1]) return values(n - 1, col);
    // Binary search for the bracketing interval.
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        if (grid[mid] <= t)
            lo = mid;
        else
            hi = mid;
    }
    const double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
    return (1.0 - w) * values(lo, col) + w * values(hi, col);
}

}  // namespace

double eval_basis(const BasisSpec& basis, int k, double t) {
    require(k >= 1 && k <= basis.n_basis,
            "eval_basis: basis index " + std::to_string(k) + " out of range [1," +
                std::to_string(basis.n_basis) + "]");
    require(t >= basis.t1 && t <= basis.t2, "eval_basis: t outside basis interval");
    if (basis.kind == BasisKind::FourierSine) {
        const double u = (t - basis.t1) / basis.length();
        return std::sqrt(2.0) * std::sin(2.0 * k * M_PI * u) / std::sqrt(basis.length());
    }
    return interp_column(basis.ref_grid, basis.ref_values, k - 1, t);
}

Matrix eval_basis_grid(const BasisSpec& basis, const Vector& grid) {
    Matrix out(basis.n_basis, grid.size());
    for (int k = 1; k <= basis.n_basis; ++k)
        for (Eigen::Index l = 0; l < grid.size(); ++l) out(k - 1, l) = eval_basis(basis, k, grid[l]);
    return out;
}

Vector riemann_scores(const SampledCurve& curve, const BasisSpec& basis, QuadratureRule rule) {
    curve.validate();
    require(curve.grid.size() >= 2, "riemann_scores: need at least 2 grid points");
    require(curve.grid[0] >= basis.t1 && curve.grid[curve.grid.size() - 1] <= basis.t2,
            "riemann_scores: curve grid outside basis interval");
    const Vector w = rule == QuadratureRule::LeftRiemann ? left_riemann_weights(curve.grid)
                                                         : trapezoid_weights(curve.grid);
    const Matrix phi = eval_basis_grid(basis, curve.grid);
    return phi * (w.cwiseProduct(curve.values));
}

double orthonormality_defect(const BasisSpec& basis, int n_points) {
    Vector grid = Vector::LinSpaced(n_points, basis.t1, basis.t2);
    const Matrix phi = eval_basis_grid(basis, grid);
    const Vector w = trapezoid_weights(grid);
    Matrix gram = phi * w.asDiagonal() * phi.transpose();
    gram -= Matrix::Identity(basis.n_basis, basis.n_basis);
    return gram.cwiseAbs().maxCoeff();
}

std::string to_string(EnvLabel e) { return e == EnvLabel::O ? "O" : "A"; }

void ScoreTable::validate() const {
    require(n_vars >= 1 && n_basis >= 1, "ScoreTable: empty dimensions");
    require(scores.cols() == static_cast<Eigen::Index>(n_vars) * n_basis,
            "ScoreTable: column count must equal n_vars*n_basis");
}

}  // namespace wrr
