#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wrr/moments.hpp"
#include "wrr/rng.hpp"

#include <cmath>

using namespace wrr;

namespace {

ScoreTable table_from(const Matrix& scores, EnvLabel env, int n_vars, int nb) {
    ScoreTable t;
    t.env = env;
    t.n_vars = n_vars;
    t.n_basis = nb;
    t.scores = scores;
    return t;
}

}  // namespace

TEST_CASE("empirical grammians approach the moment oracle") {
    const SemSpec spec = paper_example_spec();
    const Eigen::Index n = 100000;
    const EnvSample sO = simulate_env(spec, EnvLabel::O, n, 1.0, 12);
    const EnvSample sA = simulate_env(spec, EnvLabel::A, n, 1.0, 12);
    const Grammians g = empirical_grammians(sO.scores, sA.scores);
    g.validate();

    // Solved-form oracle per basis dim: G_O = [[1,1],[1,3]], Z_O = [1,2].
    for (int k : {0, 3, 9}) {
        CHECK(std::abs(g.G_O(k, k) - 1.0) < 0.05);
        CHECK(std::abs(g.G_O(k, 10 + k) - 1.0) < 0.05);
        CHECK(std::abs(g.G_O(10 + k, 10 + k) - 3.0) < 0.05);
        CHECK(std::abs(g.Z_O(k, k) - 1.0) < 0.05);
        CHECK(std::abs(g.Z_O(10 + k, k) - 2.0) < 0.05);
        CHECK(std::abs(g.G_A(k, k) - 1.02) < 0.05);
        CHECK(std::abs(g.G_A(k, 10 + k) - 1.03) < 0.05);
        CHECK(std::abs(g.G_A(10 + k, 10 + k) - 3.06) < 0.05);
        CHECK(std::abs(g.Z_A(k, k) - 1.02) < 0.05);
        CHECK(std::abs(g.Z_A(10 + k, k) - 2.03) < 0.05);
    }

    const Grammians pop = population_grammians(spec);
    CHECK((g.G_O - pop.G_O).cwiseAbs().maxCoeff() < 0.05);
    CHECK((g.G_A - pop.G_A).cwiseAbs().maxCoeff() < 0.05);
    CHECK((g.Z_O - pop.Z_O).cwiseAbs().maxCoeff() < 0.05);
    CHECK((g.Z_A - pop.Z_A).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("single zero sample gives zero matrices") {
    const Matrix zero = Matrix::Zero(1, 6);
    const Grammians g = empirical_grammians(table_from(zero, EnvLabel::O, 3, 2),
                                            table_from(zero, EnvLabel::A, 3, 2));
    CHECK(g.G_O.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.G_A.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.Z_O.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.Z_A.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("population grammians: exact values") {
    const SemSpec spec = paper_example_spec();
    const Grammians g = population_grammians(spec);

    SUBCASE("per-dim observational blocks") {
        for (int k = 0; k < 10; ++k) {
            CHECK(g.G_O(k, k) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(g.G_O(k, 10 + k) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(g.G_O(10 + k, 10 + k) == doctest::Approx(3.0).epsilon(1e-12));
            CHECK(g.Z_O(k, k) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(g.Z_O(10 + k, k) == doctest::Approx(2.0).epsilon(1e-12));
        }
        // No shift: off-dim entries vanish in O.
        CHECK(std::abs(g.G_O(0, 1)) < 1e-14);
        CHECK(std::abs(g.G_O(0, 11)) < 1e-14);
    }

    SUBCASE("per-dim shift increments") {
        const Matrix diff = g.G_A - g.G_O;
        for (int k = 0; k < 10; ++k) {
            CHECK(diff(k, k) == doctest::Approx(0.02).epsilon(1e-10));
            CHECK(diff(k, 10 + k) == doctest::Approx(0.03).epsilon(1e-10));
            CHECK(diff(10 + k, 10 + k) == doctest::Approx(0.06).epsilon(1e-10));
        }
        // The shift mean couples distinct basis dims through mu mu^T.
        CHECK(diff(0, 1) == doctest::Approx(0.01).epsilon(1e-10));
        CHECK(diff(0, 11) == doctest::Approx(0.02).epsilon(1e-10));
        CHECK(diff(10, 11) == doctest::Approx(0.04).epsilon(1e-10));
    }

    SUBCASE("zero shift law collapses A to O") {
        SemSpec flat = spec;
        flat.shift_mean.setZero();
        flat.shift_cov.setZero();
        const Grammians gf = population_grammians(flat);
        CHECK((gf.G_A - gf.G_O).cwiseAbs().maxCoeff() == 0.0);
        CHECK((gf.Z_A - gf.Z_O).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("pooled operator") {
    const SemSpec spec = paper_example_spec();
    const Grammians g = population_grammians(spec);

    SUBCASE("gamma 0 is the observational Grammian") {
        const PooledOperator op = pooled_operator(g, 0.0);
        CHECK((op.K - g.G_O).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("gamma 500 per-dim block") {
        const PooledOperator op = pooled_operator(g, 500.0);
        for (int k = 0; k < 10; ++k) {
            CHECK(op.K(k, k) == doctest::Approx(11.0).epsilon(1e-9));
            CHECK(op.K(k, 10 + k) == doctest::Approx(16.0).epsilon(1e-9));
            CHECK(op.K(10 + k, 10 + k) == doctest::Approx(33.0).epsilon(1e-9));
        }
    }

    SUBCASE("gamma 1/2 is strictly positive definite") {
        const PooledOperator op = pooled_operator(g, 0.5);
        CHECK(op.eigenvalues.minCoeff() > 0.0);
        CHECK(op.kernel_dim == 0);
    }

    SUBCASE("gamma affinity") {
        const PooledOperator base = pooled_operator(g, 0.0);
        for (double gamma : {0.5, 2.0, 10.0}) {
            const PooledOperator op = pooled_operator(g, gamma);
            const Matrix expected = base.K + gamma * (g.G_A - g.G_O);
            CHECK((op.K - expected).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    SUBCASE("eigendecomposition invariants") {
        const PooledOperator op = pooled_operator(g, 10.0);
        const Eigen::Index d = op.K.rows();
        for (Eigen::Index l = 0; l < d; ++l) {
            const double resid =
                (op.K * op.eigenvectors.col(l) - op.eigenvalues[l] * op.eigenvectors.col(l))
                    .norm();
            CHECK(resid <= 1e-8 * op.K.norm());
        }
        const Matrix gram = op.eigenvectors.transpose() * op.eigenvectors;
        CHECK((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-8);
        // Completeness: eigenvalues sum to the trace.
        CHECK(op.eigenvalues.sum() == doctest::Approx(op.K.trace()).epsilon(1e-8));
        // Descending order.
        for (Eigen::Index l = 0; l + 1 < d; ++l) CHECK(op.eigenvalues[l] >= op.eigenvalues[l + 1]);
    }
}

TEST_CASE("grammian consistency rate") {
    // ||Ghat - G|| over n in {1e2,1e3,1e4} shrinks at roughly root-n:
    // log-log slope -0.5 +- 0.15.
    const SemSpec spec = paper_example_spec();
    const Grammians pop = population_grammians(spec);
    std::vector<double> ns = {100, 1000, 10000};
    std::vector<double> errs;
    for (double nd : ns) {
        const auto n = static_cast<Eigen::Index>(nd);
        // Average the error over a few seeds to tame single-draw noise.
        double err = 0.0;
        for (uint64_t seed : {41ULL, 42ULL, 43ULL, 44ULL}) {
            const EnvSample sO = simulate_env(spec, EnvLabel::O, n, 1.0, seed);
            const EnvSample sA = simulate_env(spec, EnvLabel::A, n, 1.0, seed);
            const Grammians g = empirical_grammians(sO.scores, sA.scores);
            err += (g.G_O - pop.G_O).norm() + (g.G_A - pop.G_A).norm();
        }
        errs.push_back(err / 4.0);
    }
    const double slope = (std::log(errs[2]) - std::log(errs[0])) /
                         (std::log(ns[2]) - std::log(ns[0]));
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.3));
    CHECK(std::abs(slope + 0.5) < 0.15);
}

TEST_CASE("covariance kernel on a grid") {
    const BasisSpec basis = make_fourier_sine_basis(4, 0.0, 1.0);
    const Vector grid = Vector::LinSpaced(40, 0.0, 1.0);

    SUBCASE("identity score moment gives the Mercer sum") {
        // i.i.d. scores with identity second moment: K(s,t) -> sum_k
        // phi_k(s) phi_k(t) within Monte-Carlo error.
        Xoshiro256pp rng(19);
        const Eigen::Index n = 60000;
        Matrix scores(n, 4);
        for (Eigen::Index i = 0; i < n; ++i) scores.row(i) = rng.gaussian_vector(4).transpose();
        const ShiftKernelGrid k =
            covariance_kernel_grid(table_from(scores, EnvLabel::O, 1, 4), basis, grid);
        const Matrix phi = eval_basis_grid(basis, grid);
        const Matrix mercer = phi.transpose() * phi;
        CHECK((k.K - mercer).cwiseAbs().maxCoeff() < 0.15);
    }

    SUBCASE("zero scores give the zero kernel") {
        const ShiftKernelGrid k =
            covariance_kernel_grid(table_from(Matrix::Zero(3, 8), EnvLabel::O, 2, 4), basis, grid);
        CHECK(k.K.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("symmetry holds exactly") {
        Xoshiro256pp rng(21);
        Matrix scores(50, 8);
        for (Eigen::Index i = 0; i < 50; ++i) scores.row(i) = rng.gaussian_vector(8).transpose();
        const ShiftKernelGrid k =
            covariance_kernel_grid(table_from(scores, EnvLabel::A, 2, 4), basis, grid);
        CHECK((k.K - k.K.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("estimated eigenfunctions") {
    const SemSpec spec = paper_example_spec();
    const BasisSpec basis = make_fourier_sine_basis(10, 0.0, 1.0);
    const double gamma = 0.5;

    SUBCASE("converge to the population eigenvectors") {
        const Eigen::Index n = 100000;
        const EnvSample sO = simulate_env(spec, EnvLabel::O, n, 1.0, 55);
        const EnvSample sA = simulate_env(spec, EnvLabel::A, n, 1.0, 55);
        const EigenfunctionSet est = estimate_eigenfunctions(sO.scores, sA.scores, gamma, basis);
        const PooledOperator pop = pooled_operator(population_grammians(spec), gamma);
        // Subspace angle of each leading eigendirection below 0.05 rad.
        for (int l = 0; l < 5; ++l) {
            const double cosang =
                std::abs(est.coeffs.col(l).dot(pop.eigenvectors.col(l)));
            CHECK(std::acos(std::min(1.0, cosang)) < 0.05);
        }
    }

    SUBCASE("diagonal operator yields signed basis functions") {
        // p=1, K diagonal in the basis: eigenvectors are unit coordinate
        // vectors, so the eigenfunctions are the basis functions themselves.
        Xoshiro256pp rng(77);
        const Eigen::Index n = 20000;
        Matrix scores(n, 8);  // 2 vars (Y + one X), nb = 4
        for (Eigen::Index i = 0; i < n; ++i) {
            Vector z = rng.gaussian_vector(8);
            z[4] *= 3.0;  // distinct variances on the X block
            z[5] *= 2.0;
            z[6] *= 1.5;
            scores.row(i) = z.transpose();
        }
        const BasisSpec b4 = make_fourier_sine_basis(4, 0.0, 1.0);
        const ScoreTable tO = table_from(scores, EnvLabel::O, 2, 4);
        const EigenfunctionSet est = estimate_eigenfunctions(tO, tO, gamma, b4);
        const Vector grid = Vector::LinSpaced(200, 0.0, 1.0);
        // Leading eigenfunction aligns with phi_1 up to small mixing.
        const Vector f = est.component_on_grid(0, 0, grid);
        Vector phi1(200);
        for (int l = 0; l < 200; ++l) phi1[l] = eval_basis(b4, 1, grid[l]);
        const double ip = trapezoid_weights(grid).dot(f.cwiseProduct(phi1));
        CHECK(std::abs(ip) > 0.99);
    }

    SUBCASE("orthonormality of the returned set") {
        const EnvSample sO = simulate_env(spec, EnvLabel::O, 2000, 1.0, 3);
        const EnvSample sA = simulate_env(spec, EnvLabel::A, 2000, 1.0, 3);
        const EigenfunctionSet est = estimate_eigenfunctions(sO.scores, sA.scores, gamma, basis);
        const Matrix gram = est.coeffs.transpose() * est.coeffs;
        CHECK((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-6);
    }

    SUBCASE("sign convention: leading coordinate positive") {
        const EnvSample sO = simulate_env(spec, EnvLabel::O, 500, 1.0, 9);
        const EnvSample sA = simulate_env(spec, EnvLabel::A, 500, 1.0, 9);
        const EigenfunctionSet est = estimate_eigenfunctions(sO.scores, sA.scores, gamma, basis);
        for (int l = 0; l < est.n_eig(); ++l) {
            const Vector col = est.coeffs.col(l);
            const double thresh = 1e-8 * col.cwiseAbs().maxCoeff();
            for (Eigen::Index r = 0; r < col.size(); ++r) {
                if (std::abs(col[r]) > thresh) {
                    CHECK(col[r] > 0.0);
                    break;
                }
            }
        }
    }
}

TEST_CASE("grammians json round trip") {
    const Grammians g = population_grammians(paper_example_spec());
    const Grammians back = Grammians::from_json(g.to_json());
    CHECK((back.G_O - g.G_O).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.G_A - g.G_A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.Z_O - g.Z_O).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.Z_A - g.Z_A).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("empirical grammians reject bad input") {
    const Matrix zero = Matrix::Zero(1, 6);
    ScoreTable ok = table_from(zero, EnvLabel::O, 3, 2);
    ScoreTable empty = ok;
    empty.scores.resize(0, 6);
    CHECK_THROWS_AS(empirical_grammians(empty, ok), InvalidArgument);
    ScoreTable mismatched = table_from(Matrix::Zero(1, 4), EnvLabel::A, 2, 2);
    CHECK_THROWS_AS(empirical_grammians(ok, mismatched), InvalidArgument);
}
