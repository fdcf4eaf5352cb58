#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace wrr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Validation failure of caller-supplied arguments or input files.
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Numerical breakdown (singular systems, failed factorizations).
/// Carries a condition estimate when one is available.
class NumericFailure : public std::runtime_error {
public:
    explicit NumericFailure(const std::string& msg, double condition_estimate = 0.0)
        : std::runtime_error(msg), condition_estimate_(condition_estimate) {}
    double condition_estimate() const { return condition_estimate_; }

private:
    double condition_estimate_;
};

/// Combined Grammian is numerically singular (det(G_n)=0 case).
class RankDeficient : public NumericFailure {
public:
    using NumericFailure::NumericFailure;
};

/// An eigen-path denominator average fell below threshold.
class DegenerateDenominator : public NumericFailure {
public:
    DegenerateDenominator(const std::string& msg, int component)
        : NumericFailure(msg), component_(component) {}
    int component() const { return component_; }

private:
    int component_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

/// Trapezoid quadrature weights for an increasing grid.
Vector trapezoid_weights(const Vector& grid);

/// Left-Riemann weights: w_l = t_{l+1} - t_l for l < N-1, w_{N-1} = 0.
Vector left_riemann_weights(const Vector& grid);

/// Checks that a grid is strictly increasing with at least `min_points` points.
void check_grid(const Vector& grid, int min_points, const std::string& what);

}  // namespace wrr
