#include "wrr/sim.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace wrr {

namespace {

using nlohmann::json;

Matrix json_to_matrix(const json& arr, Eigen::Index rows, Eigen::Index cols,
                      const std::string& what) {
    require(arr.is_array() && static_cast<Eigen::Index>(arr.size()) == rows * cols,
            what + ": expected row-major array of length " + std::to_string(rows * cols));
    Matrix m(rows, cols);
    Eigen::Index i = 0;
    for (const auto& v : arr) {
        require(v.is_number(), what + ": non-numeric entry");
        m(i / cols, i % cols) = v.get<double>();
        ++i;
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json arr = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
    return arr;
}

void check_sym_psd(const Matrix& m, const std::string& what) {
    require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()),
            what + ": not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -1e-10, what + ": not positive semidefinite");
}

}  // namespace

void SemSpec::validate() const {
    require(p >= 1, "SemSpec: need at least one covariate");
    require(n_basis >= 1, "SemSpec: n_basis must be >= 1");
    const Eigen::Index d = dim();
    require(B.rows() == d && B.cols() == d, "SemSpec: B has wrong shape");
    require(sigma.rows() == d && sigma.cols() == d, "SemSpec: sigma has wrong shape");
    require(shift_mean.size() == d, "SemSpec: shift_mean has wrong length");
    require(shift_cov.rows() == d && shift_cov.cols() == d, "SemSpec: shift_cov has wrong shape");
    check_sym_psd(sigma, "SemSpec sigma");
    check_sym_psd(shift_cov, "SemSpec shift_cov");

    // I-B must be solvable: unit-vector solve residuals below 1e-8.
    const Matrix ImB = Matrix::Identity(d, d) - B;
    Eigen::PartialPivLU<Matrix> lu(ImB);
    for (Eigen::Index i = 0; i < d; ++i) {
        Vector e = Vector::Unit(d, i);
        Vector x = lu.solve(e);
        require((ImB * x - e).norm() <= 1e-8 * (1.0 + x.norm()),
                "SemSpec: I-B is numerically singular");
    }
}

std::string SemSpec::to_json() const {
    json j;
    j["p"] = p;
    j["n_basis"] = n_basis;
    j["B"] = matrix_to_json(B);
    j["sigma"] = matrix_to_json(sigma);
    j["shift_mean"] = std::vector<double>(shift_mean.data(), shift_mean.data() + shift_mean.size());
    j["shift_cov"] = matrix_to_json(shift_cov);
    return j.dump(2);
}

SemSpec SemSpec::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("SemSpec JSON: ") + e.what());
    }
    require(j.contains("p") && j.contains("n_basis"), "SemSpec JSON: missing p or n_basis");
    SemSpec s;
    s.p = j["p"].get<int>();
    s.n_basis = j["n_basis"].get<int>();
    require(s.p >= 1 && s.n_basis >= 1, "SemSpec JSON: bad dimensions");
    const Eigen::Index d = s.dim();
    s.B = json_to_matrix(j.at("B"), d, d, "SemSpec B");
    s.sigma = json_to_matrix(j.at("sigma"), d, d, "SemSpec sigma");
    const auto& mean = j.at("shift_mean");
    require(mean.is_array() && static_cast<Eigen::Index>(mean.size()) == d,
            "SemSpec shift_mean: wrong length");
    s.shift_mean.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) s.shift_mean[i] = mean[i].get<double>();
    s.shift_cov = json_to_matrix(j.at("shift_cov"), d, d, "SemSpec shift_cov");
    s.validate();
    return s;
}

SemSpec paper_example_spec() {
    SemSpec s;
    s.p = 2;
    s.n_basis = 10;
    const int nb = s.n_basis;
    const Eigen::Index d = s.dim();
    // 3x3 variable structure (Y, X1, X2): Y <- X1 and X2 <- Y, unit effects,
    // expanded homogeneously over the basis blocks.
    Matrix b3 = Matrix::Zero(3, 3);
    b3(0, 1) = 1.0;  // b_{x1 y}
    b3(2, 0) = 1.0;  // b_{y x2}
    s.B = Matrix::Zero(d, d);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (b3(i, j) != 0.0)
                s.B.block(i * nb, j * nb, nb, nb) = b3(i, j) * Matrix::Identity(nb, nb);
    s.sigma = Matrix::Identity(d, d);
    s.shift_mean = Vector::Zero(d);
    s.shift_mean.segment(nb, 2 * nb).setConstant(0.1);
    s.shift_cov = Matrix::Zero(d, d);
    s.shift_cov.diagonal().segment(nb, 2 * nb).setConstant(0.01);
    return s;
}

Vector solve_scores(const SemSpec& spec, const Vector& noise, const Vector& shift) {
    const Eigen::Index d = spec.dim();
    require(noise.size() == d, "solve_scores: noise has wrong length");
    require(shift.size() == d, "solve_scores: shift has wrong length");
    const Matrix ImB = Matrix::Identity(d, d) - spec.B;
    Eigen::PartialPivLU<Matrix> lu(ImB);
    const Vector rhs = shift + noise;
    Vector s = lu.solve(rhs);
    const double resid = (ImB * s - rhs).norm();
    if (!(resid <= 1e-10 * (1.0 + s.norm()))) {
        const double rcond = lu.rcond();
        throw NumericFailure("solve_scores: I-B solve failed (residual " + std::to_string(resid) +
                                 ")",
                             rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
    }
    return s;
}

EnvSample simulate_env(const SemSpec& spec, EnvLabel env, Eigen::Index n, double scale,
                       uint64_t seed) {
    require(n >= 1, "simulate_env: need n >= 1");
    require(scale >= 0.0, "simulate_env: scale must be >= 0");
    const Eigen::Index d = spec.dim();

    const Matrix ImB = Matrix::Identity(d, d) - spec.B;
    Eigen::PartialPivLU<Matrix> lu(ImB);

    const Matrix noise_sqrt = psd_sqrt(spec.sigma);
    const Matrix shift_sqrt = psd_sqrt(spec.shift_cov);

    // Separate streams: the noise sequence is identical for both environments
    // under one seed, so O/A runs with a shared seed form coupled pairs.
    Xoshiro256pp noise_rng = derive_stream(seed, stream::kNoise);
    Xoshiro256pp shift_rng = derive_stream(seed, stream::kShift);

    EnvSample out;
    out.scores.env = env;
    out.scores.n_vars = spec.p + 1;
    out.scores.n_basis = spec.n_basis;
    out.scores.scores.resize(n, d);
    for (Eigen::Index m = 0; m < n; ++m) {
        Vector drive = noise_sqrt * noise_rng.gaussian_vector(d);
        if (env == EnvLabel::A) {
            const Vector alpha = spec.shift_mean + shift_sqrt * shift_rng.gaussian_vector(d);
            drive += scale * alpha;
        }
        out.scores.scores.row(m) = lu.solve(drive).transpose();
    }
    return out;
}

CurvePanel synthesize_curves(const EnvSample& sample, const BasisSpec& basis,
                             const Vector& grid) {
    check_grid(grid, 2, "synthesize_curves");
    require(grid[0] >= basis.t1 && grid[grid.size() - 1] <= basis.t2,
            "synthesize_curves: grid outside basis interval");
    sample.scores.validate();
    require(sample.scores.n_basis == basis.n_basis,
            "synthesize_curves: basis size does not match score table");
    const Matrix phi = eval_basis_grid(basis, grid);  // n_basis x ngrid
    CurvePanel panel;
    panel.env = sample.scores.env;
    panel.grid = grid;
    panel.samples.reserve(sample.scores.n_samples());
    const int nv = sample.scores.n_vars;
    for (Eigen::Index m = 0; m < sample.scores.n_samples(); ++m) {
        Matrix curves(nv, grid.size());
        for (int v = 0; v < nv; ++v) {
            const Vector coef =
                sample.scores.scores.row(m).segment(v * basis.n_basis, basis.n_basis);
            curves.row(v) = coef.transpose() * phi;
        }
        panel.samples.push_back(std::move(curves));
    }
    return panel;
}

Matrix population_second_moment(const SemSpec& spec, EnvLabel env, double scale) {
    const Eigen::Index d = spec.dim();
    const Matrix ImB = Matrix::Identity(d, d) - spec.B;
    Eigen::PartialPivLU<Matrix> lu(ImB);
    if (lu.rcond() < 1e-14)
        throw NumericFailure("population_second_moment: I-B numerically singular",
                             1.0 / std::max(lu.rcond(), 1e-300));
    Matrix inner = spec.sigma;
    if (env == EnvLabel::A) {
        inner += scale * scale *
                 (spec.shift_cov + spec.shift_mean * spec.shift_mean.transpose());
    }
    const Matrix L = lu.solve(Matrix::Identity(d, d));
    return L * inner * L.transpose();
}

}  // namespace wrr
