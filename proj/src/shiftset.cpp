#include "wrr/shiftset.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <sstream>

namespace wrr {

namespace {

Membership membership_from_matrix(const Matrix& dominance, double scale, double tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (dominance + dominance.transpose()),
                                             Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericFailure("membership: eigendecomposition failed");
    Membership m;
    m.margin = es.eigenvalues().minCoeff();
    const double band = tol * std::max(scale, 1e-300);
    m.member = m.margin >= -band;
    m.boundary = std::abs(m.margin) <= band;
    return m;
}

}  // namespace

Membership psd_membership_scores(const Matrix& M_prime, const Matrix& M, double gamma,
                                 double tol) {
    require(M.rows() == M.cols() && M_prime.rows() == M_prime.cols(),
            "psd_membership_scores: matrices must be square");
    require(M.rows() == M_prime.rows(), "psd_membership_scores: size mismatch");
    require(gamma > 0.0, "psd_membership_scores: gamma must be > 0");
    const Matrix dom = gamma * M - M_prime;
    return membership_from_matrix(dom, (gamma * M).trace(), tol);
}

void ShiftKernelGrid::validate() const {
    check_grid(grid, 2, "ShiftKernelGrid");
    require(n_vars >= 1, "ShiftKernelGrid: n_vars must be >= 1");
    const Eigen::Index d = static_cast<Eigen::Index>(n_vars) * grid.size();
    require(K.rows() == d && K.cols() == d, "ShiftKernelGrid: K has wrong shape");
    require((K - K.transpose()).cwiseAbs().maxCoeff() <=
                1e-10 * (1.0 + K.cwiseAbs().maxCoeff()),
            "ShiftKernelGrid: K not symmetric");
}

Membership mercer_membership_grid(const ShiftKernelGrid& K_prime, const ShiftKernelGrid& K,
                                  double gamma, double tol) {
    K.validate();
    K_prime.validate();
    require(K.n_vars == K_prime.n_vars, "mercer_membership_grid: variable count mismatch");
    require(K.grid.size() == K_prime.grid.size() && (K.grid - K_prime.grid).norm() == 0.0,
            "mercer_membership_grid: grids must be identical");
    require(gamma > 0.0, "mercer_membership_grid: gamma must be > 0");

    const Vector w = trapezoid_weights(K.grid).cwiseSqrt();
    const Eigen::Index m = K.grid.size();
    Vector wrep(static_cast<Eigen::Index>(K.n_vars) * m);
    for (int v = 0; v < K.n_vars; ++v) wrep.segment(v * m, m) = w;
    const Matrix dom =
        wrep.asDiagonal() * (gamma * K.K - K_prime.K) * wrep.asDiagonal();
    const double scale = (wrep.asDiagonal() * (gamma * K.K) * wrep.asDiagonal()).trace();
    return membership_from_matrix(dom, scale, tol);
}

void AutocovSequence::validate() const {
    require(!values.empty(), "AutocovSequence: empty");
    require(lags.size() == static_cast<Eigen::Index>(values.size()),
            "AutocovSequence: lag/value count mismatch");
    require(lags.size() % 2 == 1, "AutocovSequence: lag grid must be symmetric around 0");
    const Eigen::Index L = lags.size() / 2;
    require(std::abs(lags[L]) <= 1e-14, "AutocovSequence: middle lag must be 0");
    const double dh = L > 0 ? lags[L + 1] - lags[L] : 1.0;
    require(dh > 0, "AutocovSequence: lags must be increasing");
    for (Eigen::Index j = 0; j + 1 < lags.size(); ++j)
        require(std::abs((lags[j + 1] - lags[j]) - dh) <= 1e-10 * dh,
                "AutocovSequence: lags must be uniformly spaced");
    for (Eigen::Index j = 0; j < lags.size(); ++j)
        require(std::abs(lags[j] + lags[lags.size() - 1 - j]) <= 1e-12,
                "AutocovSequence: asymmetric lag grid");
    const int nv = n_vars();
    for (const auto& v : values)
        require(v.rows() == nv && v.cols() == nv, "AutocovSequence: inconsistent matrix sizes");
}

FourierMembership stationary_fourier_membership(const AutocovSequence& acov_prime,
                                                const AutocovSequence& acov, double gamma,
                                                int fft_size, double tol) {
    acov.validate();
    acov_prime.validate();
    require(acov.n_vars() == acov_prime.n_vars(),
            "stationary_fourier_membership: variable count mismatch");
    require(acov.lags.size() == acov_prime.lags.size() &&
                (acov.lags - acov_prime.lags).cwiseAbs().maxCoeff() <= 1e-12,
            "stationary_fourier_membership: lag grids must match");
    require(fft_size >= static_cast<int>(acov.lags.size()),
            "stationary_fourier_membership: fft_size must cover the lag grid");
    require(gamma > 0.0, "stationary_fourier_membership: gamma must be > 0");

    const Eigen::Index half = acov.lags.size() / 2;
    const double dh = half > 0 ? acov.lags[half + 1] - acov.lags[half] : 1.0;
    const int nv = acov.n_vars();
    const int n_bins = fft_size / 2 + 1;

    using CMatrix = Eigen::MatrixXcd;
    FourierMembership out;
    out.frequencies.resize(n_bins);
    out.bin_margins.resize(n_bins);
    out.margin = std::numeric_limits<double>::infinity();
    double scale = 0.0;

    std::vector<CMatrix> doms(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        const double omega = 2.0 * M_PI * b / (fft_size * dh);
        out.frequencies[b] = omega;
        CMatrix H = CMatrix::Zero(nv, nv), Hp = CMatrix::Zero(nv, nv);
        for (Eigen::Index j = 0; j < acov.lags.size(); ++j) {
            const std::complex<double> ph =
                std::exp(std::complex<double>(0.0, -omega * acov.lags[j]));
            H += dh * ph * acov.values[j];
            Hp += dh * ph * acov_prime.values[j];
        }
        CMatrix dom = gamma * H - Hp;
        dom = 0.5 * (dom + dom.adjoint()).eval();
        doms[b] = dom;
        scale = std::max(scale, std::abs((gamma * H).trace().real()));
    }
    for (int b = 0; b < n_bins; ++b) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(doms[b], Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw NumericFailure("stationary_fourier_membership: eigensolver failed");
        const double lam = es.eigenvalues().minCoeff();
        out.bin_margins[b] = lam;
        if (lam < out.margin) {
            out.margin = lam;
            out.worst_frequency = out.frequencies[b];
        }
    }
    out.member = out.margin >= -tol * std::max(scale, 1e-300);
    return out;
}

PartialSumReport partial_sum_membership(const Matrix& score_moment, int n_vars, int n_basis,
                                        double gamma, int n_terms, double tol) {
    require(score_moment.rows() == score_moment.cols(),
            "partial_sum_membership: moment must be square");
    require(score_moment.rows() == static_cast<Eigen::Index>(n_vars) * n_basis,
            "partial_sum_membership: moment size must be n_vars*n_basis");
    require(n_terms >= 1 && n_terms <= n_basis,
            "partial_sum_membership: n_terms must be in [1, n_basis]");

    PartialSumReport report;
    report.levels.reserve(n_terms);
    for (int level = 1; level <= n_terms; ++level) {
        Matrix truncated = Matrix::Zero(score_moment.rows(), score_moment.cols());
        for (int vi = 0; vi < n_vars; ++vi)
            for (int vj = 0; vj < n_vars; ++vj)
                truncated.block(vi * n_basis, vj * n_basis, level, level) =
                    score_moment.block(vi * n_basis, vj * n_basis, level, level);
        report.levels.push_back(psd_membership_scores(truncated, score_moment, gamma, tol));
    }
    for (int level = n_terms; level >= 1; --level) {
        if (!report.levels[level - 1].member) break;
        report.first_stable_level = level;
    }
    return report;
}

std::string membership_json(const Membership& m, double gamma) {
    nlohmann::json j;
    j["gamma"] = gamma;
    j["member"] = m.member;
    j["boundary"] = m.boundary;
    j["margin"] = m.margin;
    return j.dump(2);
}

ShiftKernelGrid read_kernel_csv_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open: " + path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "kernel CSV: empty file");
    require(line == "i,j,s,t,value", "kernel CSV: bad header '" + line + "'");
    std::map<double, Eigen::Index> grid_pos;
    struct Entry {
        int i, j;
        double s, t, value;
    };
    std::vector<Entry> entries;
    int row = 1;
    int max_var = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ss(line);
        Entry e;
        char c1, c2, c3, c4;
        ss >> e.i >> c1 >> e.j >> c2 >> e.s >> c3 >> e.t >> c4 >> e.value;
        require(static_cast<bool>(ss) && c1 == ',' && c2 == ',' && c3 == ',' && c4 == ',',
                "kernel CSV row " + std::to_string(row) + ": parse error");
        require(e.i >= 1 && e.j >= 1, "kernel CSV row " + std::to_string(row) + ": bad indices");
        max_var = std::max({max_var, e.i, e.j});
        grid_pos.emplace(e.s, 0);
        grid_pos.emplace(e.t, 0);
        entries.push_back(e);
    }
    require(!entries.empty(), "kernel CSV: no data rows");
    ShiftKernelGrid k;
    k.n_vars = max_var;
    k.grid.resize(static_cast<Eigen::Index>(grid_pos.size()));
    Eigen::Index pos = 0;
    for (auto& [t, idx] : grid_pos) {
        idx = pos;
        k.grid[pos++] = t;
    }
    const Eigen::Index m = k.grid.size();
    k.K = Matrix::Constant(max_var * m, max_var * m, std::numeric_limits<double>::quiet_NaN());
    for (const auto& e : entries) {
        const Eigen::Index r = (e.i - 1) * m + grid_pos.at(e.s);
        const Eigen::Index c = (e.j - 1) * m + grid_pos.at(e.t);
        k.K(r, c) = e.value;
    }
    require(k.K.allFinite(), "kernel CSV: incomplete kernel (missing grid entries)");
    k.validate();
    return k;
}

void write_kernel_csv_file(const ShiftKernelGrid& k, const std::string& path) {
    k.validate();
    std::ofstream out(path);
    require(out.good(), "cannot open for writing: " + path);
    out << "i,j,s,t,value\n";
    out.precision(17);
    const Eigen::Index m = k.grid.size();
    for (int i = 0; i < k.n_vars; ++i)
        for (int j = 0; j < k.n_vars; ++j)
            for (Eigen::Index a = 0; a < m; ++a)
                for (Eigen::Index b = 0; b < m; ++b)
                    out << (i + 1) << ',' << (j + 1) << ',' << k.grid[a] << ',' << k.grid[b]
                        << ',' << k.K(i * m + a, j * m + b) << '\n';
    require(out.good(), "write failed: " + path);
}

}  // namespace wrr
