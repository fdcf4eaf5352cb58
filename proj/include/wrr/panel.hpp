#pragma once

#include "wrr/basis.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace wrr {

/// Panel of sampled curves: n_samples x n_vars curves sharing one grid.
/// Variable 0 is the target Y, variables 1..p are X1..Xp.
struct CurvePanel {
    EnvLabel env = EnvLabel::O;
    Vector grid;
    std::vector<Matrix> samples;  // each n_vars x grid.size()

    Eigen::Index n_samples() const { return static_cast<Eigen::Index>(samples.size()); }
    int n_vars() const { return samples.empty() ? 0 : static_cast<int>(samples[0].rows()); }
    void validate() const;

    SampledCurve curve(Eigen::Index sample, int var) const;
};

std::string var_name(int var);

/// Curve CSV: header `env,sample_id,var,t,value`, rows sorted by
/// (env, sample_id, var, t). One file holds one environment.
void write_curve_csv(const CurvePanel& panel, std::ostream& out);
void write_curve_csv_file(const CurvePanel& panel, const std::string& path);

/// Parses one environment's panel. Every (sample, var) pair must cover the
/// full grid; missing points or unknown variables are errors that name the
/// offending row.
CurvePanel read_curve_csv(std::istream& in, EnvLabel expect_env);
CurvePanel read_curve_csv_file(const std::string& path, EnvLabel expect_env);

}  // namespace wrr
