#include "wrr/common.hpp"

#include <cmath>

namespace wrr {

Vector trapezoid_weights(const Vector& grid) {
    const auto n = grid.size();
    Vector w = Vector::Zero(n);
    for (Eigen::Index l = 0; l + 1 < n; ++l) {
        const double h = grid[l + 1] - grid[l];
        w[l] += 0.5 * h;
        w[l + 1] += 0.5 * h;
    }
    return w;
}

Vector left_riemann_weights(const Vector& grid) {
    const auto n = grid.size();
    Vector w = Vector::Zero(n);
    for (Eigen::Index l = 0; l + 1 < n; ++l) w[l] = grid[l + 1] - grid[l];
    return w;
}

void check_grid(const Vector& grid, int min_points, const std::string& what) {
    require(grid.size() >= min_points,
            what + ": need at least " + std::to_string(min_points) + " grid points, got " +
                std::to_string(grid.size()));
    for (Eigen::Index l = 0; l + 1 < grid.size(); ++l) {
        require(grid[l + 1] > grid[l], what + ": grid must be strictly increasing");
        require(std::isfinite(grid[l]), what + ": grid contains non-finite value");
    }
    require(std::isfinite(grid[grid.size() - 1]), what + ": grid contains non-finite value");
}

}  // namespace wrr
