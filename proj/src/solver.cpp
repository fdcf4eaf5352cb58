#include "wrr/solver.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace wrr {

namespace {

BasisSpec default_basis_for(const Grammians& gram, const std::optional<BasisSpec>& basis) {
    if (basis) {
        require(basis->n_basis == gram.n_basis,
                "solve: basis size does not match Grammians");
        return *basis;
    }
    return make_fourier_sine_basis(gram.n_basis, 0.0, 1.0);
}

struct CombinedSystem {
    Matrix K;   // gamma G_A + (1-gamma) G_O, symmetrized
    Matrix Z;   // gamma Z_A + (1-gamma) Z_O
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    double cond = 0.0;
};

CombinedSystem combine(const Grammians& gram, double gamma) {
    CombinedSystem sys;
    sys.K = gamma * gram.G_A + (1.0 - gamma) * gram.G_O;
    sys.K = 0.5 * (sys.K + sys.K.transpose()).eval();
    sys.Z = gamma * gram.Z_A + (1.0 - gamma) * gram.Z_O;
    sys.es.compute(sys.K);
    if (sys.es.info() != Eigen::Success)
        throw NumericFailure("combined Grammian eigendecomposition failed");
    const Vector abs_ev = sys.es.eigenvalues().cwiseAbs();
    const double lmax = abs_ev.maxCoeff();
    const double lmin = abs_ev.minCoeff();
    sys.cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    return sys;
}

KernelCoeffs pack_same_basis(const Matrix& C_all, const BasisSpec& basis, int p, double gamma,
                             Provenance prov) {
    // C_all is (p*nb) x nb with rows indexed (covariate j, basis l) and
    // columns indexed by target basis k; C_j(k, l) = C_all(j*nb + l, k).
    const int nb = basis.n_basis;
    KernelCoeffs beta;
    beta.basis_row = basis;
    beta.col_kind = ColBasisKind::SameBasis;
    beta.gamma = gamma;
    beta.provenance = prov;
    beta.C.reserve(p);
    for (int j = 0; j < p; ++j)
        beta.C.push_back(C_all.block(j * nb, 0, nb, nb).transpose());
    return beta;
}

}  // namespace

bool KernelCoeffs::any_clamped() const {
    for (const auto& row : clamped)
        for (bool c : row)
            if (c) return true;
    return false;
}

KernelCoeffs KernelCoeffs::to_same_basis() const {
    if (col_kind == ColBasisKind::SameBasis) return *this;
    require(!any_clamped(),
            "to_same_basis: truncated (clamped) eigen components have no basis coordinates");
    const int nb = basis_row.n_basis;
    KernelCoeffs out;
    out.basis_row = basis_row;
    out.col_kind = ColBasisKind::SameBasis;
    out.gamma = gamma;
    out.provenance = provenance;
    out.C.reserve(C.size());
    for (int j = 0; j < p(); ++j) {
        // C_j(k, l') = sum_l C(k, l) V[(j, l'), l]
        const Matrix Vj = eigen.coeffs.block(j * nb, 0, nb, n_cols());
        out.C.push_back(C[j] * Vj.transpose());
    }
    return out;
}

double KernelCoeffs::l2_norm() const {
    if (col_kind == ColBasisKind::SameBasis) {
        double s = 0.0;
        for (const auto& Cj : C) s += Cj.squaredNorm();
        return std::sqrt(s);
    }
    // Eigen columns are orthonormal in L2^p; the C matrices hold one shared
    // coefficient per (k, l) so the norm is that of any one of them.
    if (!any_clamped()) return C.empty() ? 0.0 : C[0].norm();
    return l2_distance(*this, KernelCoeffs{});  // quadrature fallback
}

namespace {

// Quadrature L2 distance used only when clamped components block the exact
// Parseval route.
double l2_distance_quadrature(const KernelCoeffs& a, const KernelCoeffs& b, int n_points) {
    const BasisSpec& basis = a.C.empty() ? b.basis_row : a.basis_row;
    Vector grid = Vector::LinSpaced(n_points, basis.t1, basis.t2);
    const Vector w = trapezoid_weights(grid);
    const int p = std::max(a.p(), b.p());
    double acc = 0.0;
    const auto surf_a = a.C.empty() ? std::vector<Matrix>() : eval_beta_surface(a, grid, grid);
    const auto surf_b = b.C.empty() ? std::vector<Matrix>() : eval_beta_surface(b, grid, grid);
    for (int j = 0; j < p; ++j) {
        Matrix diff = Matrix::Zero(grid.size(), grid.size());
        if (j < static_cast<int>(surf_a.size())) diff += surf_a[j];
        if (j < static_cast<int>(surf_b.size())) diff -= surf_b[j];
        acc += (w.asDiagonal() * diff.cwiseProduct(diff) * w.asDiagonal()).sum();
    }
    return std::sqrt(acc);
}

}  // namespace

double l2_distance(const KernelCoeffs& a, const KernelCoeffs& b) {
    if (a.C.empty() && b.C.empty()) return 0.0;
    const bool exact_a = a.C.empty() || a.col_kind == ColBasisKind::SameBasis || !a.any_clamped();
    const bool exact_b = b.C.empty() || b.col_kind == ColBasisKind::SameBasis || !b.any_clamped();
    if (exact_a && exact_b) {
        const KernelCoeffs sa = a.C.empty() ? a : a.to_same_basis();
        const KernelCoeffs sb = b.C.empty() ? b : b.to_same_basis();
        const int p = std::max(sa.p(), sb.p());
        const int nb = (sa.C.empty() ? sb : sa).basis_row.n_basis;
        double acc = 0.0;
        for (int j = 0; j < p; ++j) {
            Matrix diff = Matrix::Zero(nb, nb);
            if (j < sa.p()) diff += sa.C[j];
            if (j < sb.p()) diff -= sb.C[j];
            acc += diff.squaredNorm();
        }
        return std::sqrt(acc);
    }
    return l2_distance_quadrature(a, b, 1000);
}

std::pair<KernelCoeffs, SolveReport> solve_grammian(const Grammians& gram, double gamma,
                                                    const std::optional<BasisSpec>& basis) {
    gram.validate();
    require(gamma >= 0.0, "solve_grammian: gamma must be >= 0");
    const BasisSpec b = default_basis_for(gram, basis);
    CombinedSystem sys = combine(gram, gamma);
    if (!(sys.cond < kConditionLimit))
        throw RankDeficient("solve_grammian: combined Grammian numerically singular "
                            "(det(G_n)=0 within the 1e12 condition cutoff)",
                            sys.cond);
    const Vector inv_ev = sys.es.eigenvalues().cwiseInverse();
    const Matrix C_all = sys.es.eigenvectors() * inv_ev.asDiagonal() *
                         sys.es.eigenvectors().transpose() * sys.Z;
    const double resid = (sys.K * C_all - sys.Z).norm();
    const double zscale = std::max(sys.Z.norm(), 1e-300);
    if (!(resid <= 1e-8 * zscale))
        throw NumericFailure("solve_grammian: normal equation residual " + std::to_string(resid),
                             sys.cond);
    SolveReport report;
    report.condition_estimate = sys.cond;
    report.normal_eq_residual = resid / zscale;
    report.truncation_index = gram.n_basis;
    KernelCoeffs beta = pack_same_basis(C_all, b, gram.p, gamma, Provenance::Population);
    return {std::move(beta), report};
}

std::pair<KernelCoeffs, SolveReport> solve_eigenbasis(const Grammians& gram,
                                                      const PooledOperator& pooled,
                                                      double gamma,
                                                      const std::optional<BasisSpec>& basis) {
    gram.validate();
    require(std::abs(pooled.gamma - gamma) <= 1e-12 * (1.0 + std::abs(gamma)),
            "solve_eigenbasis: pooled operator was built at a different gamma");
    const BasisSpec b = default_basis_for(gram, basis);
    const Eigen::Index d = pooled.K.rows();
    require(gram.G_O.rows() == d, "solve_eigenbasis: operator/Grammian size mismatch");

    if (pooled.kernel_dim == static_cast<int>(d))
        throw NumericFailure("solve_eigenbasis: pooled operator is degenerate "
                             "(all eigenvalues below kernel tolerance)");

    const Matrix Z = gamma * gram.Z_A + (1.0 - gamma) * gram.Z_O;
    const Matrix N = pooled.eigenvectors.transpose() * Z;  // (l, k)

    const int nb = gram.n_basis;
    Matrix coef = Matrix::Zero(nb, d);  // (k, l)
    int excluded = 0;
    for (Eigen::Index l = 0; l < d; ++l) {
        if (pooled.is_kernel_direction(l)) {
            ++excluded;
            continue;  // minimal-norm coset representative: zero coefficient
        }
        coef.col(l) = N.row(l).transpose() / pooled.eigenvalues[l];
    }

    // Summability diagnostic (condition (4.2) on the retained spectrum):
    // flag when the per-direction contribution grows at the spectral tail.
    SolveReport report;
    report.kernel_dim_excluded = excluded;
    report.truncation_index = static_cast<int>(d) - excluded;
    report.summability_partial_sum = coef.squaredNorm();
    double prev_term = -1.0;
    for (Eigen::Index l = 0; l < d; ++l) {
        if (pooled.is_kernel_direction(l)) continue;
        const double term = coef.col(l).squaredNorm();
        if (prev_term >= 0.0 && term > prev_term * (1.0 + 1e-12)) report.summability_flagged = true;
        prev_term = term;
    }
    {
        const Vector abs_ev = pooled.eigenvalues.cwiseAbs();
        double lmin = std::numeric_limits<double>::infinity();
        for (Eigen::Index l = 0; l < d; ++l)
            if (!pooled.is_kernel_direction(l)) lmin = std::min(lmin, abs_ev[l]);
        report.condition_estimate = abs_ev.maxCoeff() / lmin;
    }

    KernelCoeffs beta;
    beta.basis_row = b;
    beta.col_kind = ColBasisKind::Eigenfunctions;
    beta.gamma = gamma;
    beta.provenance = Provenance::Population;
    beta.eigen.basis = b;
    beta.eigen.p = gram.p;
    beta.eigen.coeffs = pooled.eigenvectors;
    beta.eigen.eigenvalues = pooled.eigenvalues;
    beta.truncation_M = 0.0;
    beta.clamped.assign(d, std::vector<bool>(gram.p, false));
    beta.C.assign(gram.p, coef);
    return {std::move(beta), report};
}

namespace {

struct PanelScores {
    Matrix O;  // n x (n_vars*nb)
    Matrix A;
};

// Scores of delta-projected curves for every sample, with partitions built
// from the jointly monitored rows of both environments.
PanelScores projected_scores(const CurvePanel& panel_O, const CurvePanel& panel_A,
                             const BasisSpec& basis, double delta, bool monitor_target) {
    const Eigen::Index n = panel_O.n_samples();
    const int nv = panel_O.n_vars();
    const int nb = basis.n_basis;
    const Vector& grid = panel_O.grid;
    const Matrix phi = eval_basis_grid(basis, grid);
    const Vector w = left_riemann_weights(grid);
    const Matrix phi_w = phi * w.asDiagonal();  // nb x ngrid

    const int first_var = monitor_target ? 0 : 1;
    PanelScores out;
    out.O.resize(n, static_cast<Eigen::Index>(nv) * nb);
    out.A.resize(n, static_cast<Eigen::Index>(nv) * nb);
    Matrix monitored(2 * (nv - first_var), grid.size());
    for (Eigen::Index m = 0; m < n; ++m) {
        monitored.topRows(nv - first_var) = panel_O.samples[m].bottomRows(nv - first_var);
        monitored.bottomRows(nv - first_var) = panel_A.samples[m].bottomRows(nv - first_var);
        const Partition part = delta_partition(monitored, grid, delta);
        for (int v = 0; v < nv; ++v) {
            SampledCurve cO = panel_O.curve(m, v);
            SampledCurve cA = panel_A.curve(m, v);
            const SampledCurve pO = project_piecewise(cO, part);
            const SampledCurve pA = project_piecewise(cA, part);
            out.O.row(m).segment(v * nb, nb) = (phi_w * pO.values).transpose();
            out.A.row(m).segment(v * nb, nb) = (phi_w * pA.values).transpose();
        }
    }
    return out;
}

ScoreTable table_from_rows(const Matrix& scores, const std::vector<Eigen::Index>& rows,
                           EnvLabel env, int n_vars, int nb) {
    ScoreTable t;
    t.env = env;
    t.n_vars = n_vars;
    t.n_basis = nb;
    t.scores.resize(static_cast<Eigen::Index>(rows.size()), scores.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) t.scores.row(i) = scores.row(rows[i]);
    return t;
}

ScoreTable truncate_table(const ScoreTable& t, int e) {
    ScoreTable out;
    out.env = t.env;
    out.n_vars = t.n_vars;
    out.n_basis = e;
    out.scores.resize(t.scores.rows(), static_cast<Eigen::Index>(t.n_vars) * e);
    for (int v = 0; v < t.n_vars; ++v)
        out.scores.block(0, v * e, t.scores.rows(), e) =
            t.scores.block(0, v * t.n_basis, t.scores.rows(), e);
    return out;
}

BasisSpec restrict_basis(const BasisSpec& basis, int e) {
    if (e == basis.n_basis) return basis;
    if (basis.kind == BasisKind::FourierSine) {
        BasisSpec b = basis;
        b.n_basis = e;
        return b;
    }
    return make_custom_basis(basis.ref_grid, basis.ref_values.leftCols(e), basis.t1, basis.t2);
}

// Zero-pad a beta solved on the first e basis indices to the full basis.
KernelCoeffs embed_rows_cols(const KernelCoeffs& beta, const BasisSpec& full_basis, int e) {
    const int nb = full_basis.n_basis;
    KernelCoeffs out = beta;
    out.basis_row = full_basis;
    for (auto& Cj : out.C) {
        Matrix full = Matrix::Zero(nb, beta.col_kind == ColBasisKind::SameBasis ? nb : Cj.cols());
        full.block(0, 0, e, Cj.cols()) = Cj;
        Cj = std::move(full);
    }
    return out;
}

}  // namespace

std::pair<KernelCoeffs, SolveReport> fit_empirical(const CurvePanel& panel_O,
                                                   const CurvePanel& panel_A,
                                                   const FitConfig& config, uint64_t seed) {
    panel_O.validate();
    panel_A.validate();
    require(panel_O.n_samples() == panel_A.n_samples(),
            "fit_empirical: environments must hold the same number of samples "
            "(paired observation scheme)");
    require(panel_O.n_vars() == panel_A.n_vars(), "fit_empirical: variable count differs");
    require(panel_O.n_vars() >= 2, "fit_empirical: need a target and covariates");
    require((panel_O.grid - panel_A.grid).cwiseAbs().maxCoeff() == 0.0,
            "fit_empirical: environments must share one observation grid");
    require(config.truncation_M > 1.0, "fit_empirical: truncation level M must be > 1");
    require(config.basis.n_basis >= 1, "fit_empirical: basis not configured");

    const Eigen::Index n = panel_O.n_samples();
    const int nv = panel_O.n_vars();
    const int p = nv - 1;
    const int nb = config.basis.n_basis;
    const double delta = config.d_n > 0.0 ? config.d_n : default_delta(n);
    const int e = config.e_n > 0 ? config.e_n : default_truncation_index(n, nb);
    require(e >= 1 && e <= nb,
            "fit_empirical: truncation index e(n) must lie in [1, n_basis]");

    if (config.path == FitPath::Grammian) {
        PanelScores scores =
            projected_scores(panel_O, panel_A, config.basis, delta, /*monitor_target=*/true);
        if (config.center_observational) {
            const Vector mean_O = scores.O.colwise().mean();
            scores.O.rowwise() -= mean_O.transpose();
            scores.A.rowwise() -= mean_O.transpose();
        }
        std::vector<Eigen::Index> all(n);
        for (Eigen::Index i = 0; i < n; ++i) all[i] = i;
        ScoreTable tO = table_from_rows(scores.O, all, EnvLabel::O, nv, nb);
        ScoreTable tA = table_from_rows(scores.A, all, EnvLabel::A, nv, nb);
        const Grammians gram = empirical_grammians(truncate_table(tO, e), truncate_table(tA, e));
        auto [beta, report] = solve_grammian(gram, config.gamma, restrict_basis(config.basis, e));
        report.truncation_index = e;
        KernelCoeffs full = embed_rows_cols(beta, config.basis, e);
        full.provenance = Provenance::Empirical;
        return {std::move(full), report};
    }

    // Eigen path (split-based estimator).
    const SplitPlan plan = make_split(n, config.splits, seed);

    // Main and eigen splits share the target-monitoring partitions.
    PanelScores scores =
        projected_scores(panel_O, panel_A, config.basis, delta, /*monitor_target=*/true);
    // Denominator split: partitions monitor the covariates only.
    PanelScores denom_scores =
        projected_scores(panel_O, panel_A, config.basis, delta, /*monitor_target=*/false);

    ScoreTable eig_O = table_from_rows(scores.O, plan.eigen_indices, EnvLabel::O, nv, nb);
    ScoreTable eig_A = table_from_rows(scores.A, plan.eigen_indices, EnvLabel::A, nv, nb);
    if (config.center_observational) {
        const Vector mean_O = eig_O.scores.colwise().mean();
        eig_O.scores.rowwise() -= mean_O.transpose();
        eig_A.scores.rowwise() -= mean_O.transpose();
    }
    const EigenfunctionSet psi = estimate_eigenfunctions(eig_O, eig_A, config.gamma, config.basis);

    const Eigen::Index d_x = static_cast<Eigen::Index>(p) * nb;
    const Matrix V = psi.coeffs.leftCols(e);

    // Numerator sums over the main split.
    Matrix num = Matrix::Zero(e, e);  // (l, k)
    {
        ScoreTable main_O = table_from_rows(scores.O, plan.main_indices, EnvLabel::O, nv, nb);
        ScoreTable main_A = table_from_rows(scores.A, plan.main_indices, EnvLabel::A, nv, nb);
        if (config.center_observational) {
            const Vector mean_O = main_O.scores.colwise().mean();
            main_O.scores.rowwise() -= mean_O.transpose();
            main_A.scores.rowwise() -= mean_O.transpose();
        }
        const Eigen::Index nm = main_O.n_samples();
        const Matrix chi_O = main_O.scores.rightCols(d_x) * V;  // (m, l)
        const Matrix chi_A = main_A.scores.rightCols(d_x) * V;
        const Matrix D_O = main_O.scores.leftCols(e);  // (m, k)
        const Matrix D_A = main_A.scores.leftCols(e);
        num = (config.gamma * chi_A.transpose() * D_A +
               (1.0 - config.gamma) * chi_O.transpose() * D_O) /
              static_cast<double>(nm);
    }

    // Denominator averages over the denominator split.
    Vector denom(e);
    {
        ScoreTable den_O =
            table_from_rows(denom_scores.O, plan.denom_indices, EnvLabel::O, nv, nb);
        ScoreTable den_A =
            table_from_rows(denom_scores.A, plan.denom_indices, EnvLabel::A, nv, nb);
        if (config.center_observational) {
            const Vector mean_O = den_O.scores.colwise().mean();
            den_O.scores.rowwise() -= mean_O.transpose();
            den_A.scores.rowwise() -= mean_O.transpose();
        }
        const Eigen::Index nd = den_O.n_samples();
        const Matrix chi_O = den_O.scores.rightCols(d_x) * V;
        const Matrix chi_A = den_A.scores.rightCols(d_x) * V;
        denom = (config.gamma * chi_A.cwiseProduct(chi_A) +
                 (1.0 - config.gamma) * chi_O.cwiseProduct(chi_O))
                    .colwise()
                    .sum()
                    .transpose() /
                static_cast<double>(nd);
        for (int l = 0; l < e; ++l)
            if (denom[l] < 1e-12)
                throw DegenerateDenominator(
                    "fit_empirical: denominator average for eigen direction " +
                        std::to_string(l + 1) + " fell below 1e-12",
                    l + 1);
    }

    Matrix coef(e, e);  // (k, l)
    for (int l = 0; l < e; ++l) coef.col(l) = num.row(l).transpose() / denom[l];

    // T_M on the estimated eigenfunction components (grid functions).
    std::vector<std::vector<bool>> clamped(e, std::vector<bool>(p, false));
    {
        const Vector w = trapezoid_weights(panel_O.grid);
        for (int l = 0; l < e; ++l) {
            for (int j = 0; j < p; ++j) {
                const Vector vals = psi.component_on_grid(l, j, panel_O.grid);
                const double norm = std::sqrt(w.dot(vals.cwiseProduct(vals)));
                if (norm > config.truncation_M) clamped[l][j] = true;
            }
        }
    }

    SolveReport report;
    report.truncation_index = e;
    report.summability_partial_sum = coef.squaredNorm();
    {
        const Vector abs_ev = psi.eigenvalues.head(e).cwiseAbs();
        report.condition_estimate =
            abs_ev.maxCoeff() / std::max(abs_ev.minCoeff(), 1e-300);
    }

    KernelCoeffs beta;
    beta.basis_row = config.basis;
    beta.col_kind = ColBasisKind::Eigenfunctions;
    beta.gamma = config.gamma;
    beta.provenance = Provenance::Empirical;
    beta.eigen.basis = config.basis;
    beta.eigen.p = p;
    beta.eigen.coeffs = V;
    beta.eigen.eigenvalues = psi.eigenvalues.head(e);
    beta.truncation_M = config.truncation_M;
    beta.clamped = std::move(clamped);
    Matrix coef_full = Matrix::Zero(nb, e);
    coef_full.topRows(e) = coef;
    beta.C.assign(p, coef_full);
    return {std::move(beta), report};
}

std::vector<Matrix> eval_beta_surface(const KernelCoeffs& beta, const Vector& grid_t,
                                      const Vector& grid_tau) {
    check_grid(grid_t, 1, "eval_beta_surface t-grid");
    check_grid(grid_tau, 1, "eval_beta_surface tau-grid");
    require(grid_t[0] >= beta.basis_row.t1 && grid_t[grid_t.size() - 1] <= beta.basis_row.t2,
            "eval_beta_surface: t grid outside basis interval");
    require(grid_tau[0] >= beta.basis_row.t1 &&
                grid_tau[grid_tau.size() - 1] <= beta.basis_row.t2,
            "eval_beta_surface: tau grid outside basis interval");
    const Matrix phi_t = eval_basis_grid(beta.basis_row, grid_t);  // nb x |t|
    std::vector<Matrix> surfaces;
    surfaces.reserve(beta.C.size());
    if (beta.col_kind == ColBasisKind::SameBasis) {
        const Matrix phi_tau = eval_basis_grid(beta.basis_row, grid_tau);
        for (const auto& Cj : beta.C)
            surfaces.push_back(phi_t.transpose() * Cj * phi_tau);
        return surfaces;
    }
    for (int j = 0; j < beta.p(); ++j) {
        Matrix G(beta.n_cols(), grid_tau.size());
        for (int l = 0; l < beta.n_cols(); ++l) {
            if (beta.clamped[l][j])
                G.row(l).setConstant(beta.truncation_M);
            else
                G.row(l) = beta.eigen.component_on_grid(l, j, grid_tau).transpose();
        }
        surfaces.push_back(phi_t.transpose() * beta.C[j] * G);
    }
    return surfaces;
}

void write_beta_json_file(const KernelCoeffs& beta, const SolveReport& report,
                          const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(beta.to_json());
    j["report"] = {{"condition_estimate", report.condition_estimate},
                   {"kernel_dim_excluded", report.kernel_dim_excluded},
                   {"normal_eq_residual", report.normal_eq_residual},
                   {"truncation_index", report.truncation_index},
                   {"summability_partial_sum", report.summability_partial_sum},
                   {"summability_flagged", report.summability_flagged}};
    std::ofstream out(path);
    require(out.good(), "cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    require(out.good(), "write failed: " + path);
}

std::string KernelCoeffs::to_json() const {
    nlohmann::json j;
    j["gamma"] = gamma;
    j["provenance"] = provenance == Provenance::Population ? "population" : "empirical";
    j["basis"] = {{"kind", basis_row.kind == BasisKind::FourierSine ? "fourier_sine" : "custom"},
                  {"n_basis", basis_row.n_basis},
                  {"interval", {basis_row.t1, basis_row.t2}}};
    j["col_kind"] = col_kind == ColBasisKind::SameBasis ? "same_basis" : "eigenfunctions";
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& Cj : C) {
        nlohmann::json arr = nlohmann::json::array();
        for (Eigen::Index r = 0; r < Cj.rows(); ++r)
            for (Eigen::Index c = 0; c < Cj.cols(); ++c) arr.push_back(Cj(r, c));
        cs.push_back({{"rows", Cj.rows()}, {"cols", Cj.cols()}, {"data", arr}});
    }
    j["C"] = cs;
    if (col_kind == ColBasisKind::Eigenfunctions) {
        nlohmann::json ev = nlohmann::json::array();
        for (Eigen::Index i = 0; i < eigen.eigenvalues.size(); ++i)
            ev.push_back(eigen.eigenvalues[i]);
        j["eigenvalues"] = ev;
        j["truncation_M"] = truncation_M;
    }
    return j.dump(2);
}

void write_surface_csv_file(const KernelCoeffs& beta, const Vector& grid_t,
                            const Vector& grid_tau, const std::string& path) {
    const auto surfaces = eval_beta_surface(beta, grid_t, grid_tau);
    std::ofstream out(path);
    require(out.good(), "cannot open for writing: " + path);
    out << "t,tau,var,value\n";
    out.precision(17);
    for (std::size_t j = 0; j < surfaces.size(); ++j)
        for (Eigen::Index a = 0; a < grid_t.size(); ++a)
            for (Eigen::Index b = 0; b < grid_tau.size(); ++b)
                out << grid_t[a] << ',' << grid_tau[b] << ',' << var_name(static_cast<int>(j) + 1)
                    << ',' << surfaces[j](a, b) << '\n';
    require(out.good(), "write failed: " + path);
}

}  // namespace wrr
