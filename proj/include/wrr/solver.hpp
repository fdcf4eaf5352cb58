#pragma once

#include "wrr/discretize.hpp"
#include "wrr/moments.hpp"
#include "wrr/panel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wrr {

enum class Provenance { Population, Empirical };
enum class ColBasisKind { SameBasis, Eigenfunctions };

/// Regression kernel beta(t,tau) as coefficient matrices. Row side is
/// always the scalar basis phi_k(t). The column side is either the same
/// basis (Grammian path) or estimated eigenfunctions psi_l of the pooled
/// operator (eigen path), where psi_l is vector-valued over the p
/// covariates:
///   beta_j(t,tau) = sum_{k,l} C_j(k,l) phi_k(t) * col_l(j)(tau).
struct KernelCoeffs {
    BasisSpec basis_row;
    ColBasisKind col_kind = ColBasisKind::SameBasis;
    std::vector<Matrix> C;  // p matrices, n_basis x n_cols
    double gamma = 0.0;
    Provenance provenance = Provenance::Population;

    // Eigenfunction columns (col_kind == Eigenfunctions).
    EigenfunctionSet eigen;
    // clamp flags from T_M per (column l, covariate j); a clamped component
    // is the constant function truncation_M.
    std::vector<std::vector<bool>> clamped;
    double truncation_M = 0.0;

    int p() const { return static_cast<int>(C.size()); }
    int n_cols() const { return C.empty() ? 0 : static_cast<int>(C[0].cols()); }
    bool any_clamped() const;

    /// Exact conversion of eigenfunction columns to basis coordinates.
    /// Requires no clamped component.
    KernelCoeffs to_same_basis() const;

    /// L2 norm of the p-vector kernel (Parseval / eigen orthonormality).
    double l2_norm() const;

    std::string to_json() const;
};

/// L2 distance between two kernels over the same row basis; both are
/// converted to basis coordinates.
double l2_distance(const KernelCoeffs& a, const KernelCoeffs& b);

struct SolveReport {
    double condition_estimate = 0.0;
    int kernel_dim_excluded = 0;
    double normal_eq_residual = 0.0;
    int truncation_index = 0;
    double summability_partial_sum = 0.0;
    bool summability_flagged = false;
};

inline constexpr double kConditionLimit = 1e12;

/// Combined-Grammian solve [gamma G_A + (1-gamma) G_O] C = gamma Z_A +
/// (1-gamma) Z_O via a symmetric eigendecomposition (the combination can be
/// indefinite for gamma > 1). Condition estimates above 1e12 raise
/// RankDeficient, the practical det(G_n)=0 cutoff.
std::pair<KernelCoeffs, SolveReport> solve_grammian(
    const Grammians& gram, double gamma,
    const std::optional<BasisSpec>& basis = std::nullopt);

/// Eigenbasis solve: rotate the combined response into the pooled
/// operator's eigencoordinates, divide by eigenvalues, zero the kernel
/// directions (minimal-norm representative of the solution coset).
std::pair<KernelCoeffs, SolveReport> solve_eigenbasis(
    const Grammians& gram, const PooledOperator& pooled, double gamma,
    const std::optional<BasisSpec>& basis = std::nullopt);

enum class FitPath { Grammian, Eigen };

struct FitConfig {
    double gamma = 0.5;
    BasisSpec basis;
    FitPath path = FitPath::Grammian;
    double d_n = 0.0;           // 0: default n^(-1/4)
    int e_n = 0;                // 0: default min(n_basis, ceil(n^(1/4)))
    double truncation_M = 5.0;  // T_M level, must be > 1
    SplitFractions splits;
    bool center_observational = false;
};

/// Full empirical pipeline on paired curve panels: delta-partition each
/// sample (monitoring all variables of both environments jointly),
/// project, extract left-Riemann scores, then solve along the configured
/// path. Panels must hold the same number of samples: environment pairs
/// are observed jointly.
std::pair<KernelCoeffs, SolveReport> fit_empirical(const CurvePanel& panel_O,
                                                   const CurvePanel& panel_A,
                                                   const FitConfig& config, uint64_t seed);

/// Surfaces beta_j(t, tau) on a grid product.
std::vector<Matrix> eval_beta_surface(const KernelCoeffs& beta, const Vector& grid_t,
                                      const Vector& grid_tau);

void write_beta_json_file(const KernelCoeffs& beta, const SolveReport& report,
                          const std::string& path);
void write_surface_csv_file(const KernelCoeffs& beta, const Vector& grid_t,
                            const Vector& grid_tau, const std::string& path);

}  // namespace wrr
