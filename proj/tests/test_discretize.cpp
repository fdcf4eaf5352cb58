#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wrr/discretize.hpp"
#include "wrr/rng.hpp"

#include <cmath>
#include <set>

using namespace wrr;

namespace {

SampledCurve curve_from(const Vector& grid, const Vector& values) {
    SampledCurve c;
    c.grid = grid;
    c.values = values;
    return c;
}

Vector random_band_limited(const BasisSpec& basis, const Vector& grid, Xoshiro256pp& rng) {
    const Matrix phi = eval_basis_grid(basis, grid);
    return phi.transpose() * rng.gaussian_vector(basis.n_basis);
}

}  // namespace

TEST_CASE("delta partition of simple curves") {
    const Vector grid = Vector::LinSpaced(1000, 0.0, 1.0);

    SUBCASE("constant curves never jump") {
        const Matrix mon = Matrix::Constant(3, 1000, 0.7);
        const Partition p = delta_partition(mon, grid, 0.1);
        REQUIRE(p.points.size() == 2);
        CHECK(p.points[0] == 0.0);
        CHECK(p.points[1] == 1.0);
    }

    SUBCASE("ramp crosses at multiples of delta") {
        Matrix mon(1, 1000);
        mon.row(0) = grid.transpose();  // f(t) = t
        const Partition p = delta_partition(mon, grid, 0.25);
        // Closed-form crossings of the ramp: 0, .25, .5, .75 and the forced
        // right endpoint, each resolved within one grid step.
        REQUIRE(p.points.size() == 5);
        const double step = grid[1] - grid[0];
        for (int i = 0; i < 4; ++i) CHECK(std::abs(p.points[i] - 0.25 * i) <= step);
        CHECK(p.points[4] == 1.0);
    }

    SUBCASE("delta -> 0 recovers the full grid") {
        Matrix mon(1, 1000);
        mon.row(0) = grid.transpose();
        const Partition p = delta_partition(mon, grid, 1e-12);
        CHECK(p.points.size() == grid.size());
    }

    SUBCASE("rejects bad delta") {
        const Matrix mon = Matrix::Zero(1, 1000);
        CHECK_THROWS_AS(delta_partition(mon, grid, 0.0), InvalidArgument);
        CHECK_THROWS_AS(delta_partition(mon, grid, -1.0), InvalidArgument);
    }
}

TEST_CASE("piecewise projection") {
    const Vector grid = Vector::LinSpaced(1000, 0.0, 1.0);

    SUBCASE("full-grid partition is the identity") {
        Xoshiro256pp rng(3);
        const Vector vals = rng.gaussian_vector(1000);
        Matrix mon(1, 1000);
        mon.row(0) = vals.transpose();
        const Partition p = delta_partition(mon, grid, 1e-300);
        const SampledCurve proj = project_piecewise(curve_from(grid, vals), p);
        CHECK((proj.values - vals).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("ramp becomes a staircase with treads at the crossings") {
        Matrix mon(1, 1000);
        mon.row(0) = grid.transpose();
        const Partition p = delta_partition(mon, grid, 0.25);
        const SampledCurve proj = project_piecewise(curve_from(grid, grid), p);
        const std::set<double> treads(proj.values.data(),
                                      proj.values.data() + proj.values.size());
        CHECK(treads.size() == 5);
        const double step = grid[1] - grid[0];
        int i = 0;
        for (double tread : treads) {
            CHECK(std::abs(tread - 0.25 * i) <= step);
            ++i;
        }
    }

    SUBCASE("projection stays within delta on random smooth curves") {
        const BasisSpec basis = make_fourier_sine_basis(8, 0.0, 1.0);
        Xoshiro256pp rng(11);
        for (int rep = 0; rep < 100; ++rep) {
            const Vector vals = random_band_limited(basis, grid, rng);
            Matrix mon(1, grid.size());
            mon.row(0) = vals.transpose();
            const double delta = 0.2 + rng.next_double();
            const Partition p = delta_partition(mon, grid, delta);
            const SampledCurve proj = project_piecewise(curve_from(grid, vals), p);
            CHECK(proj.sup_distance(curve_from(grid, vals)) <= delta);
        }
    }

    SUBCASE("off-grid partition point is rejected") {
        Matrix mon(1, 1000);
        mon.row(0) = grid.transpose();
        Partition p = delta_partition(mon, grid, 0.25);
        p.points[1] += 1e-4;  // no longer a grid value
        CHECK_THROWS_AS(project_piecewise(curve_from(grid, grid), p), InvalidArgument);
    }
}

TEST_CASE("delta partition correctness invariant") {
    // Between consecutive partition points every monitored coordinate stays
    // strictly within delta of its anchor value.
    const Vector grid = Vector::LinSpaced(500, 0.0, 1.0);
    const BasisSpec basis = make_fourier_sine_basis(6, 0.0, 1.0);
    Xoshiro256pp rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix mon(3, grid.size());
        for (int v = 0; v < 3; ++v) mon.row(v) = random_band_limited(basis, grid, rng).transpose();
        const double delta = 0.3 + rng.next_double();
        const Partition p = delta_partition(mon, grid, delta);
        for (std::size_t i = 0; i + 1 < p.grid_indices.size(); ++i) {
            const Eigen::Index a = p.grid_indices[i];
            for (Eigen::Index l = a + 1; l < p.grid_indices[i + 1]; ++l)
                CHECK((mon.col(l) - mon.col(a)).cwiseAbs().maxCoeff() < delta);
        }
    }
}

TEST_CASE("score stability under projection") {
    // |scores(P(X)) - scores(X)|_inf <= delta * (T2-T1) * max|phi|.
    const BasisSpec basis = make_fourier_sine_basis(10, 0.0, 1.0);
    const Vector grid = Vector::LinSpaced(800, 0.0, 1.0);
    const double phi_max = std::sqrt(2.0);
    Xoshiro256pp rng(23);
    for (int rep = 0; rep < 50; ++rep) {
        const Vector vals = random_band_limited(basis, grid, rng);
        Matrix mon(1, grid.size());
        mon.row(0) = vals.transpose();
        const double delta = 0.1 + rng.next_double();
        const Partition p = delta_partition(mon, grid, delta);
        const SampledCurve orig = curve_from(grid, vals);
        const SampledCurve proj = project_piecewise(orig, p);
        const Vector diff = riemann_scores(proj, basis) - riemann_scores(orig, basis);
        CHECK(diff.cwiseAbs().maxCoeff() <= delta * 1.0 * phi_max + 1e-12);
    }
}

TEST_CASE("truncation operator") {
    const Vector grid = Vector::LinSpaced(200, 0.0, 1.0);
    const BasisSpec basis = make_fourier_sine_basis(4, 0.0, 1.0);

    SUBCASE("components under the level pass through") {
        Vector small(200);
        for (Eigen::Index l = 0; l < 200; ++l) small[l] = 0.5 * eval_basis(basis, 1, grid[l]);
        const auto out = truncate({curve_from(grid, small)}, 2.0);
        CHECK((out[0].values - small).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("an over-norm component becomes the constant function M") {
        Vector big(200);
        for (Eigen::Index l = 0; l < 200; ++l) big[l] = 10.0 * eval_basis(basis, 1, grid[l]);
        const auto out = truncate({curve_from(grid, big)}, 2.0);
        CHECK(out[0].values.minCoeff() == 2.0);
        CHECK(out[0].values.maxCoeff() == 2.0);
    }

    SUBCASE("identity when all norms are below M") {
        std::vector<SampledCurve> comps;
        Xoshiro256pp rng(5);
        for (int i = 0; i < 4; ++i) comps.push_back(curve_from(grid, 0.3 * rng.gaussian_vector(200)));
        const auto out = truncate(comps, 5.0);
        for (int i = 0; i < 4; ++i)
            CHECK((out[i].values - comps[i].values).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("idempotence") {
        Xoshiro256pp rng(9);
        std::vector<SampledCurve> comps;
        for (int i = 0; i < 6; ++i)
            comps.push_back(curve_from(grid, 3.0 * rng.gaussian_vector(200)));
        const auto once = truncate(comps, 1.5);
        const auto twice = truncate(once, 1.5);
        for (std::size_t i = 0; i < comps.size(); ++i)
            CHECK((twice[i].values - once[i].values).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("coefficient variant clamps by Parseval norm") {
        Vector small(4), big(4);
        small << 0.5, 0.0, 0.0, 0.0;
        big << 10.0, 0.0, 0.0, 0.0;
        const auto out = truncate(std::vector<Vector>{small, big}, 2.0);
        CHECK_FALSE(out[0].clamped_to_constant);
        CHECK((out[0].coeffs - small).cwiseAbs().maxCoeff() == 0.0);
        CHECK(out[1].clamped_to_constant);
    }

    SUBCASE("M must exceed 1") {
        CHECK_THROWS_AS(truncate(std::vector<Vector>{Vector::Zero(3)}, 1.0), InvalidArgument);
        CHECK_THROWS_AS(truncate(std::vector<Vector>{Vector::Zero(3)}, 0.5), InvalidArgument);
    }
}

TEST_CASE("sample splits") {
    SUBCASE("sizes and disjointness") {
        const SplitPlan plan = make_split(1000, {0.5, 0.25, 0.25}, 77);
        CHECK(plan.main_indices.size() == 500);
        CHECK(plan.denom_indices.size() == 250);
        CHECK(plan.eigen_indices.size() == 250);
        std::set<Eigen::Index> all;
        for (auto i : plan.main_indices) all.insert(i);
        for (auto i : plan.denom_indices) all.insert(i);
        for (auto i : plan.eigen_indices) all.insert(i);
        CHECK(all.size() == 1000);
        CHECK(*all.begin() >= 0);
        CHECK(*all.rbegin() < 1000);
    }

    SUBCASE("tiny n") {
        const SplitPlan plan = make_split(4, {0.5, 0.25, 0.25}, 1);
        CHECK(plan.main_indices.size() == 2);
        CHECK(plan.denom_indices.size() == 1);
        CHECK(plan.eigen_indices.size() == 1);
    }

    SUBCASE("determinism") {
        const SplitPlan a = make_split(100, {0.5, 0.25, 0.25}, 5);
        const SplitPlan b = make_split(100, {0.5, 0.25, 0.25}, 5);
        CHECK(a.main_indices == b.main_indices);
        CHECK(a.denom_indices == b.denom_indices);
        CHECK(a.eigen_indices == b.eigen_indices);
    }

    SUBCASE("empty split is rejected") {
        CHECK_THROWS_AS(make_split(3, {0.5, 0.25, 0.25}, 1), InvalidArgument);
        CHECK_THROWS_AS(make_split(100, {0.0, 0.5, 0.5}, 1), InvalidArgument);
    }
}

TEST_CASE("defaults") {
    CHECK(default_delta(10000) == doctest::Approx(0.1));
    CHECK(default_truncation_index(10000, 10) == 10);
    CHECK(default_truncation_index(1000, 10) == 6);
    CHECK(default_truncation_index(250, 10) == 4);
    CHECK(default_truncation_index(16, 3) == 2);
}
