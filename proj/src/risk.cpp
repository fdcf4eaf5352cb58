#include "wrr/risk.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace wrr {

namespace {

// Stacked residual map R (nb x (p+1)nb): row k holds 1 on the target
// coordinate k and -C_j(k, l) on covariate coordinates, so that the
// residual score vector is R * s.
Matrix residual_map(const SemSpec& spec, const KernelCoeffs& beta) {
    const KernelCoeffs b = beta.to_same_basis();
    require(static_cast<int>(b.C.size()) == spec.p,
            "risk: beta covariate count does not match the SEM");
    const int nb = spec.n_basis;
    require(b.basis_row.n_basis == nb, "risk: beta basis size does not match the SEM");
    Matrix R = Matrix::Zero(nb, spec.dim());
    R.block(0, 0, nb, nb) = Matrix::Identity(nb, nb);
    for (int j = 0; j < spec.p; ++j) R.block(0, (j + 1) * nb, nb, nb) = -b.C[j];
    return R;
}

}  // namespace

RiskEstimate risk_mc(const SemSpec& spec, EnvLabel env, double scale, const KernelCoeffs& beta,
                     Eigen::Index n_mc, uint64_t seed) {
    require(n_mc >= 2, "risk_mc: need n_mc >= 2");
    const Matrix R = residual_map(spec, beta);
    const EnvSample sample = simulate_env(spec, env, n_mc, scale, seed);
    // Per-draw squared residual norm; streaming mean/variance.
    double mean = 0.0, m2 = 0.0;
    for (Eigen::Index m = 0; m < n_mc; ++m) {
        const Vector resid = R * sample.scores.scores.row(m).transpose();
        const double x = resid.squaredNorm();
        const double d = x - mean;
        mean += d / static_cast<double>(m + 1);
        m2 += d * (x - mean);
    }
    RiskEstimate est;
    est.method = RiskMethod::MonteCarlo;
    est.n_mc = n_mc;
    est.value = mean;
    est.std_error = std::sqrt(m2 / static_cast<double>(n_mc - 1) / static_cast<double>(n_mc));
    return est;
}

RiskEstimate risk_closed_form(const SemSpec& spec, EnvLabel env, double scale,
                              const KernelCoeffs& beta) {
    const Matrix R = residual_map(spec, beta);
    const Matrix M = population_second_moment(spec, env, scale);
    RiskEstimate est;
    est.method = RiskMethod::ClosedForm;
    est.value = (R * M * R.transpose()).trace();
    return est;
}

DecompositionReport check_decomposition(const SemSpec& spec, const KernelCoeffs& beta,
                                        double gamma, RiskMethod method, Eigen::Index n_mc,
                                        uint64_t seed) {
    require(gamma > 0.0, "check_decomposition: gamma must be > 0");
    DecompositionReport r;
    r.gamma = gamma;
    const double sqrt_gamma = std::sqrt(gamma);
    if (method == RiskMethod::ClosedForm) {
        r.lhs = risk_closed_form(spec, EnvLabel::A, sqrt_gamma, beta).value;
        const double risk_A = risk_closed_form(spec, EnvLabel::A, 1.0, beta).value;
        const double risk_O = risk_closed_form(spec, EnvLabel::O, 0.0, beta).value;
        r.rhs = gamma * risk_A + (1.0 - gamma) * risk_O;
        r.diff = r.lhs - r.rhs;
        r.pass = std::abs(r.diff) <= 1e-10 * std::max({std::abs(r.lhs), std::abs(r.rhs), 1e-30});
        return r;
    }
    require(n_mc >= 2, "check_decomposition: need n_mc >= 2 for Monte Carlo");
    uint64_t sm = seed;
    const uint64_t seed_lhs = splitmix64(sm);
    const uint64_t seed_A = splitmix64(sm);
    const uint64_t seed_O = splitmix64(sm);
    const RiskEstimate lhs = risk_mc(spec, EnvLabel::A, sqrt_gamma, beta, n_mc, seed_lhs);
    const RiskEstimate risk_A = risk_mc(spec, EnvLabel::A, 1.0, beta, n_mc, seed_A);
    const RiskEstimate risk_O = risk_mc(spec, EnvLabel::O, 0.0, beta, n_mc, seed_O);
    r.lhs = lhs.value;
    r.rhs = gamma * risk_A.value + (1.0 - gamma) * risk_O.value;
    r.diff = r.lhs - r.rhs;
    r.std_error = std::sqrt(lhs.std_error * lhs.std_error +
                            gamma * gamma * risk_A.std_error * risk_A.std_error +
                            (1.0 - gamma) * (1.0 - gamma) * risk_O.std_error * risk_O.std_error);
    r.pass = std::abs(r.diff) <= 3.0 * r.std_error;
    return r;
}

std::string decomposition_json(const DecompositionReport& r) {
    nlohmann::json j;
    j["gamma"] = r.gamma;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["diff"] = r.diff;
    j["std_error"] = r.std_error;
    j["pass"] = r.pass;
    return j.dump(2);
}

std::vector<ContinuityRow> risk_continuity_probe(const SemSpec& spec, const KernelCoeffs& beta,
                                                 const std::vector<double>& deltas,
                                                 const ShiftDirection& direction) {
    require(!deltas.empty(), "risk_continuity_probe: no perturbation sizes");
    for (double d : deltas) require(d >= 0.0, "risk_continuity_probe: deltas must be >= 0");
    require(direction.mean.size() == spec.dim(), "risk_continuity_probe: direction mean length");
    require(direction.cov.rows() == spec.dim() && direction.cov.cols() == spec.dim(),
            "risk_continuity_probe: direction covariance shape");

    const double base = risk_closed_form(spec, EnvLabel::A, 1.0, beta).value;
    std::vector<ContinuityRow> rows;
    rows.reserve(deltas.size());
    for (double d : deltas) {
        SemSpec perturbed = spec;
        perturbed.shift_mean = spec.shift_mean + d * direction.mean;
        perturbed.shift_cov = spec.shift_cov + d * d * direction.cov;
        ContinuityRow row;
        row.delta = d;
        row.risk_perturbed = risk_closed_form(perturbed, EnvLabel::A, 1.0, beta).value;
        row.abs_diff = std::abs(row.risk_perturbed - base);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace wrr
