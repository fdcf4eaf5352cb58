#include "wrr/moments.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace wrr {

namespace {

using nlohmann::json;

void check_gram_matrix(const Matrix& G, const std::string& what) {
    require((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + G.cwiseAbs().maxCoeff()),
            what + ": not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
    const double floor = -1e-8 * std::max(G.trace(), 1e-300);
    require(es.eigenvalues().minCoeff() >= floor, what + ": not positive semidefinite");
}

json matrix_to_json(const Matrix& m) {
    json arr = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
    return arr;
}

Matrix matrix_from_json(const json& arr, Eigen::Index rows, Eigen::Index cols,
                        const std::string& what) {
    require(arr.is_array() && static_cast<Eigen::Index>(arr.size()) == rows * cols,
            what + ": expected row-major array of length " + std::to_string(rows * cols));
    Matrix m(rows, cols);
    Eigen::Index i = 0;
    for (const auto& v : arr) {
        m(i / cols, i % cols) = v.get<double>();
        ++i;
    }
    return m;
}

}  // namespace

void Grammians::validate() const {
    require(p >= 1 && n_basis >= 1, "Grammians: empty dimensions");
    const Eigen::Index d = static_cast<Eigen::Index>(p) * n_basis;
    require(G_O.rows() == d && G_O.cols() == d && G_A.rows() == d && G_A.cols() == d,
            "Grammians: G has wrong shape");
    require(Z_O.rows() == d && Z_O.cols() == n_basis && Z_A.rows() == d &&
                Z_A.cols() == n_basis,
            "Grammians: Z has wrong shape");
    check_gram_matrix(G_O, "Grammians G_O");
    check_gram_matrix(G_A, "Grammians G_A");
}

std::string Grammians::to_json() const {
    json j;
    j["p"] = p;
    j["n_basis"] = n_basis;
    j["n_samples_O"] = n_samples_O;
    j["n_samples_A"] = n_samples_A;
    j["G_O"] = matrix_to_json(G_O);
    j["G_A"] = matrix_to_json(G_A);
    j["Z_O"] = matrix_to_json(Z_O);
    j["Z_A"] = matrix_to_json(Z_A);
    return j.dump(2);
}

Grammians Grammians::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("Grammians JSON: ") + e.what());
    }
    Grammians g;
    g.p = j.at("p").get<int>();
    g.n_basis = j.at("n_basis").get<int>();
    g.n_samples_O = j.value("n_samples_O", 0);
    g.n_samples_A = j.value("n_samples_A", 0);
    const Eigen::Index d = static_cast<Eigen::Index>(g.p) * g.n_basis;
    g.G_O = matrix_from_json(j.at("G_O"), d, d, "G_O");
    g.G_A = matrix_from_json(j.at("G_A"), d, d, "G_A");
    g.Z_O = matrix_from_json(j.at("Z_O"), d, g.n_basis, "Z_O");
    g.Z_A = matrix_from_json(j.at("Z_A"), d, g.n_basis, "Z_A");
    g.validate();
    return g;
}

namespace {

void accumulate_env(const ScoreTable& scores, Matrix& G, Matrix& Z) {
    const int nb = scores.n_basis;
    const int p = scores.n_vars - 1;
    const Eigen::Index n = scores.n_samples();
    const auto X = scores.scores.rightCols(static_cast<Eigen::Index>(p) * nb);
    const auto Y = scores.scores.leftCols(nb);
    G = X.transpose() * X / static_cast<double>(n);
    Z = X.transpose() * Y / static_cast<double>(n);
}

}  // namespace

Grammians empirical_grammians(const ScoreTable& scores_O, const ScoreTable& scores_A) {
    scores_O.validate();
    scores_A.validate();
    require(scores_O.n_samples() >= 1 && scores_A.n_samples() >= 1,
            "empirical_grammians: empty score table");
    require(scores_O.n_vars == scores_A.n_vars && scores_O.n_basis == scores_A.n_basis,
            "empirical_grammians: table dimensions differ");
    require(scores_O.n_vars >= 2, "empirical_grammians: need a target and covariates");
    Grammians g;
    g.p = scores_O.n_vars - 1;
    g.n_basis = scores_O.n_basis;
    g.n_samples_O = scores_O.n_samples();
    g.n_samples_A = scores_A.n_samples();
    accumulate_env(scores_O, g.G_O, g.Z_O);
    accumulate_env(scores_A, g.G_A, g.Z_A);
    return g;
}

Grammians population_grammians(const SemSpec& spec) {
    spec.validate();
    const int nb = spec.n_basis;
    const Eigen::Index d_x = static_cast<Eigen::Index>(spec.p) * nb;
    Grammians g;
    g.p = spec.p;
    g.n_basis = nb;
    const Matrix M_O = population_second_moment(spec, EnvLabel::O);
    const Matrix M_A = population_second_moment(spec, EnvLabel::A);
    g.G_O = M_O.block(nb, nb, d_x, d_x);
    g.G_A = M_A.block(nb, nb, d_x, d_x);
    g.Z_O = M_O.block(nb, 0, d_x, nb);
    g.Z_A = M_A.block(nb, 0, d_x, nb);
    return g;
}

bool PooledOperator::is_kernel_direction(Eigen::Index l) const {
    const double scale = eigenvalues.cwiseAbs().maxCoeff();
    return eigenvalues[l] <= kernel_tol * scale;
}

PooledOperator pooled_operator(const Grammians& gram, double gamma, double kernel_tol) {
    gram.validate();
    require(gamma >= 0.0, "pooled_operator: gamma must be >= 0");
    PooledOperator op;
    op.gamma = gamma;
    op.kernel_tol = kernel_tol;
    op.K = gamma * gram.G_A + (1.0 - gamma) * gram.G_O;
    op.K = 0.5 * (op.K + op.K.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(op.K);
    if (es.info() != Eigen::Success)
        throw NumericFailure("pooled_operator: eigendecomposition failed");
    // Eigen returns ascending order; flip to descending.
    const Eigen::Index d = op.K.rows();
    op.eigenvalues = es.eigenvalues().reverse();
    op.eigenvectors.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) op.eigenvectors.col(i) = es.eigenvectors().col(d - 1 - i);
    fix_signs(op.eigenvectors);
    const double scale = op.eigenvalues.cwiseAbs().maxCoeff();
    op.kernel_dim = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        if (op.eigenvalues[i] <= kernel_tol * scale) ++op.kernel_dim;
    return op;
}

ShiftKernelGrid covariance_kernel_grid(const ScoreTable& scores, const BasisSpec& basis,
                                       const Vector& grid) {
    scores.validate();
    require(scores.n_samples() >= 1, "covariance_kernel_grid: empty score table");
    require(scores.n_basis == basis.n_basis,
            "covariance_kernel_grid: basis size does not match score table");
    check_grid(grid, 2, "covariance_kernel_grid");

    const Eigen::Index n = scores.n_samples();
    const Matrix M = scores.scores.transpose() * scores.scores / static_cast<double>(n);
    const Matrix phi = eval_basis_grid(basis, grid);  // n_basis x m
    const Eigen::Index m = grid.size();
    const int nv = scores.n_vars;
    ShiftKernelGrid k;
    k.grid = grid;
    k.n_vars = nv;
    k.K.resize(nv * m, nv * m);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j)
            k.K.block(i * m, j * m, m, m) =
                phi.transpose() *
                M.block(i * basis.n_basis, j * basis.n_basis, basis.n_basis, basis.n_basis) *
                phi;
    k.K = 0.5 * (k.K + k.K.transpose()).eval();
    return k;
}

void fix_signs(Matrix& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        const double thresh = 1e-8 * vectors.col(c).cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
            if (std::abs(vectors(r, c)) > thresh) {
                if (vectors(r, c) < 0) vectors.col(c) = -vectors.col(c);
                break;
            }
        }
    }
}

Vector EigenfunctionSet::component_on_grid(int l, int var, const Vector& grid) const {
    require(l >= 0 && l < n_eig(), "EigenfunctionSet: eigenfunction index out of range");
    require(var >= 0 && var < p, "EigenfunctionSet: variable index out of range");
    const Matrix phi = eval_basis_grid(basis, grid);
    const Vector coef = coeffs.col(l).segment(var * basis.n_basis, basis.n_basis);
    return phi.transpose() * coef;
}

EigenfunctionSet estimate_eigenfunctions(const ScoreTable& scores_O_split,
                                         const ScoreTable& scores_A_split, double gamma,
                                         const BasisSpec& basis) {
    require(scores_O_split.n_samples() >= 1 && scores_A_split.n_samples() >= 1,
            "estimate_eigenfunctions: empty eigen split");
    const Grammians gram = empirical_grammians(scores_O_split, scores_A_split);
    const PooledOperator op = pooled_operator(gram, gamma);
    EigenfunctionSet set;
    set.basis = basis;
    set.p = gram.p;
    set.coeffs = op.eigenvectors;  // unit-norm columns: unit L2 by Parseval
    set.eigenvalues = op.eigenvalues;
    return set;
}

}  // namespace wrr
