#pragma once

#include "wrr/basis.hpp"

#include <cstdint>
#include <vector>

namespace wrr {

/// Stopping-time grid of one sample: the next point is the first grid time
/// at which any monitored coordinate has moved by at least delta since the
/// previous point. Always starts at the grid's first point and ends at its
/// last. Stopping times are resolved at grid resolution.
struct Partition {
    Vector points;
    std::vector<Eigen::Index> grid_indices;  // positions within the source grid
    double delta = 0.0;
};

/// Builds the delta-partition from jointly monitored curves (rows of
/// `monitored`), one column per grid point.
Partition delta_partition(const Matrix& monitored, const Vector& grid, double delta);

/// Left-value step function over the partition, tabulated back on the
/// curve's own grid. The sup-norm deviation from the input is checked
/// against the partition's delta.
SampledCurve project_piecewise(const SampledCurve& curve, const Partition& partition);

/// Truncation of grid-function components: a component whose L2 norm
/// exceeds M is replaced by the constant function M.
std::vector<SampledCurve> truncate(const std::vector<SampledCurve>& components, double M);

/// Coefficient-vector variant; Parseval gives the L2 norm. A clamped
/// component stands for the constant function M on the interval.
struct CoeffComponent {
    Vector coeffs;
    bool clamped_to_constant = false;
};
std::vector<CoeffComponent> truncate(const std::vector<Vector>& components, double M);

/// Disjoint sample splits for the eigen-path estimator: main sample,
/// denominator sample, eigenfunction sample.
struct SplitPlan {
    std::vector<Eigen::Index> main_indices;
    std::vector<Eigen::Index> denom_indices;
    std::vector<Eigen::Index> eigen_indices;
};

struct SplitFractions {
    double main = 0.5;
    double denom = 0.25;
    double eigen = 0.25;
};

SplitPlan make_split(Eigen::Index n, SplitFractions fractions, uint64_t seed);

/// Default jump threshold d_n = n^(-1/4).
double default_delta(Eigen::Index n);

/// Default truncation index e(n) = min(n_basis, ceil(n^(1/4))).
int default_truncation_index(Eigen::Index n, int n_basis);

}  // namespace wrr
