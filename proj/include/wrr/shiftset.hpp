#pragma once

#include "wrr/common.hpp"

#include <string>
#include <vector>

namespace wrr {

/// Default relative tolerance for membership margins.
inline constexpr double kMembershipTol = 1e-8;

/// Verdict of a shift-set membership test. margin is the smallest
/// eigenvalue of the dominance matrix; boundary marks margins within the
/// tolerance band around zero (the defining inequality is non-strict).
struct Membership {
    bool member = false;
    bool boundary = false;
    double margin = 0.0;
};

/// Finite-dimensional criterion: A' (score second moment M_prime) lies in
/// the level-gamma shift set of A (score second moment M) iff
/// gamma*M - M_prime is positive semidefinite.
Membership psd_membership_scores(const Matrix& M_prime, const Matrix& M, double gamma,
                                 double tol = kMembershipTol);

/// Joint covariance kernel of a multivariate shift sampled on a grid:
/// block (i,j) holds K_{A(i),A(j)}(s,t) over grid x grid.
struct ShiftKernelGrid {
    Vector grid;
    int n_vars = 0;
    Matrix K;  // (n_vars*m) x (n_vars*m), m = grid.size()

    void validate() const;
};

/// Grid-discretized Mercer criterion with trapezoid quadrature weights:
/// member iff W^(1/2) (gamma*K - K') W^(1/2) is PSD. Exact in the grid
/// refinement limit for band-limited kernels; a single grid gives a
/// necessary-but-approximate test.
Membership mercer_membership_grid(const ShiftKernelGrid& K_prime, const ShiftKernelGrid& K,
                                  double gamma, double tol = kMembershipTol);

/// Matrix autocovariance sequence of a wide-sense stationary shift on a
/// symmetric, uniformly spaced lag grid.
struct AutocovSequence {
    Vector lags;                 // -L*dh, ..., 0, ..., L*dh
    std::vector<Matrix> values;  // one n_vars x n_vars matrix per lag

    int n_vars() const { return values.empty() ? 0 : static_cast<int>(values[0].rows()); }
    void validate() const;
};

struct FourierMembership {
    bool member = false;
    double margin = 0.0;           // most negative bin eigenvalue
    double worst_frequency = 0.0;  // frequency of that bin
    Vector frequencies;            // bin frequencies in [0, pi/dh]
    Vector bin_margins;            // smallest eigenvalue per bin
};

/// Stationary criterion (Fourier domain): member iff
/// gamma*FT[K_A](w) - FT[K_A'](w) is PSD at every frequency bin of a
/// zero-padded DFT of the sampled autocovariances.
FourierMembership stationary_fourier_membership(const AutocovSequence& acov_prime,
                                                const AutocovSequence& acov, double gamma,
                                                int fft_size, double tol = kMembershipTol);

/// Membership of basis-truncated score laws against the full law: level
/// L keeps basis indices 1..L of every variable. Returns one verdict per
/// level and the first level from which membership holds onward (0 if none).
struct PartialSumReport {
    std::vector<Membership> levels;
    int first_stable_level = 0;
};

PartialSumReport partial_sum_membership(const Matrix& score_moment, int n_vars, int n_basis,
                                        double gamma, int n_terms,
                                        double tol = kMembershipTol);

std::string membership_json(const Membership& m, double gamma);

/// Kernel grid CSV: header `i,j,s,t,value` with 1-based variable indices.
ShiftKernelGrid read_kernel_csv_file(const std::string& path);
void write_kernel_csv_file(const ShiftKernelGrid& k, const std::string& path);

}  // namespace wrr
