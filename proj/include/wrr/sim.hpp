#pragma once

#include "wrr/basis.hpp"
#include "wrr/panel.hpp"
#include "wrr/rng.hpp"

#include <cstdint>
#include <string>

namespace wrr {

/// Score-space functional SEM over p covariates and one target.
/// Variable order in all stacked vectors/matrices: Y-block, X1..Xp-blocks,
/// each of width n_basis. The two observed environments share B and Sigma;
/// environment A adds a Gaussian shift with law N(shift_mean, shift_cov).
struct SemSpec {
    int p = 0;
    int n_basis = 0;
    Matrix B;           // (p+1)n x (p+1)n structural matrix
    Matrix sigma;       // noise covariance, symmetric PSD
    Vector shift_mean;  // zero on unshifted coordinates
    Matrix shift_cov;   // symmetric PSD

    int dim() const { return (p + 1) * n_basis; }
    void validate() const;

    std::string to_json() const;
    static SemSpec from_json(const std::string& text);
};

/// The running illustration: p=2, n_basis=10, chain X1 -> Y -> X2 with unit
/// homogeneous effects, Sigma = I_30, shift on the X scores with mean 0.1
/// and variance 0.01 per coordinate.
SemSpec paper_example_spec();

/// Solves (I-B) s = shift + noise; residual is checked to 1e-10 * (1+|s|).
Vector solve_scores(const SemSpec& spec, const Vector& noise, const Vector& shift);

struct EnvSample {
    ScoreTable scores;
};

/// n i.i.d. draws of the environment in score space:
///   s = (I-B)^{-1} (scale * alpha * 1{env=A} + eps),
/// eps ~ N(0, Sigma), alpha ~ N(shift_mean, shift_cov) independent of eps.
/// Deterministic given seed. Noise and shift use separate derived streams,
/// so runs with the same seed share eps draws across environments: the two
/// environments are observed as coupled pairs, matching the estimation
/// model's paired-sample scheme (and scale=0 in A reproduces O exactly).
EnvSample simulate_env(const SemSpec& spec, EnvLabel env, Eigen::Index n, double scale,
                       uint64_t seed);

/// Finite basis expansion of every variable's scores on a grid.
CurvePanel synthesize_curves(const EnvSample& sample, const BasisSpec& basis,
                             const Vector& grid);

/// Exact second moment of the stacked score vector:
///   (I-B)^{-1} (Sigma + scale^2 (shift_cov + shift_mean shift_mean^T) 1{A}) (I-B)^{-T}.
Matrix population_second_moment(const SemSpec& spec, EnvLabel env, double scale = 1.0);

}  // namespace wrr
