#include "wrr/discretize.hpp"

#include "wrr/rng.hpp"

#include <algorithm>
#include <cmath>

namespace wrr {

Partition delta_partition(const Matrix& monitored, const Vector& grid, double delta) {
    require(delta > 0.0, "delta_partition: delta must be > 0");
    check_grid(grid, 2, "delta_partition");
    require(monitored.rows() >= 1, "delta_partition: no curves to monitor");
    require(monitored.cols() == grid.size(), "delta_partition: curves do not cover the grid");

    Partition part;
    part.delta = delta;
    part.grid_indices.push_back(0);
    Vector anchor = monitored.col(0);
    for (Eigen::Index l = 1; l < grid.size(); ++l) {
        if ((monitored.col(l) - anchor).cwiseAbs().maxCoeff() >= delta) {
            part.grid_indices.push_back(l);
            anchor = monitored.col(l);
        }
    }
    if (part.grid_indices.back() != grid.size() - 1) part.grid_indices.push_back(grid.size() - 1);
    part.points.resize(static_cast<Eigen::Index>(part.grid_indices.size()));
    for (Eigen::Index i = 0; i < part.points.size(); ++i)
        part.points[i] = grid[part.grid_indices[i]];
    return part;
}

SampledCurve project_piecewise(const SampledCurve& curve, const Partition& partition) {
    curve.validate();
    require(!partition.grid_indices.empty(), "project_piecewise: empty partition");
    // Partition points must be grid points of the curve.
    for (std::size_t i = 0; i < partition.grid_indices.size(); ++i) {
        const Eigen::Index gi = partition.grid_indices[i];
        require(gi >= 0 && gi < curve.grid.size() &&
                    curve.grid[gi] == partition.points[static_cast<Eigen::Index>(i)],
                "project_piecewise: partition point off the curve grid");
    }
    SampledCurve out;
    out.grid = curve.grid;
    out.values.resize(curve.values.size());
    std::size_t seg = 0;
    for (Eigen::Index l = 0; l < curve.grid.size(); ++l) {
        while (seg + 1 < partition.grid_indices.size() && partition.grid_indices[seg + 1] <= l)
            ++seg;
        out.values[l] = curve.values[partition.grid_indices[seg]];
    }
    const double dist = out.sup_distance(curve);
    if (partition.delta > 0.0 && dist > partition.delta)
        throw NumericFailure("project_piecewise: projection deviates by " + std::to_string(dist) +
                             " > delta; curve was not monitored by this partition");
    return out;
}

namespace {

double l2_norm_grid(const SampledCurve& f) {
    const Vector w = trapezoid_weights(f.grid);
    return std::sqrt(w.dot(f.values.cwiseProduct(f.values)));
}

}  // namespace

std::vector<SampledCurve> truncate(const std::vector<SampledCurve>& components, double M) {
    require(M > 1.0, "truncate: requires M > 1");
    std::vector<SampledCurve> out = components;
    for (auto& c : out) {
        c.validate();
        if (l2_norm_grid(c) > M) c.values.setConstant(M);
    }
    return out;
}

std::vector<CoeffComponent> truncate(const std::vector<Vector>& components, double M) {
    require(M > 1.0, "truncate: requires M > 1");
    std::vector<CoeffComponent> out;
    out.reserve(components.size());
    for (const auto& c : components) {
        CoeffComponent t;
        t.coeffs = c;
        if (c.norm() > M) {
            t.clamped_to_constant = true;
            t.coeffs.setZero();
        }
        out.push_back(std::move(t));
    }
    return out;
}

SplitPlan make_split(Eigen::Index n, SplitFractions fractions, uint64_t seed) {
    require(fractions.main > 0 && fractions.denom > 0 && fractions.eigen > 0,
            "make_split: fractions must be positive");
    require(fractions.main + fractions.denom + fractions.eigen <= 1.0 + 1e-12,
            "make_split: fractions must sum to at most 1");
    const auto n_main = static_cast<Eigen::Index>(fractions.main * static_cast<double>(n));
    const auto n_denom = static_cast<Eigen::Index>(fractions.denom * static_cast<double>(n));
    const auto n_eigen = static_cast<Eigen::Index>(fractions.eigen * static_cast<double>(n));
    require(n_main >= 1 && n_denom >= 1 && n_eigen >= 1,
            "make_split: a requested split is empty at n=" + std::to_string(n));

    std::vector<Eigen::Index> perm(n);
    for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
    Xoshiro256pp rng = derive_stream(seed, stream::kSplit);
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(rng.next_u64() % static_cast<uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    SplitPlan plan;
    plan.main_indices.assign(perm.begin(), perm.begin() + n_main);
    plan.denom_indices.assign(perm.begin() + n_main, perm.begin() + n_main + n_denom);
    plan.eigen_indices.assign(perm.begin() + n_main + n_denom,
                              perm.begin() + n_main + n_denom + n_eigen);
    std::sort(plan.main_indices.begin(), plan.main_indices.end());
    std::sort(plan.denom_indices.begin(), plan.denom_indices.end());
    std::sort(plan.eigen_indices.begin(), plan.eigen_indices.end());
    return plan;
}

double default_delta(Eigen::Index n) { return std::pow(static_cast<double>(n), -0.25); }

int default_truncation_index(Eigen::Index n, int n_basis) {
    const int e = static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 0.25)));
    return std::min(n_basis, e);
}

}  // namespace wrr
