#pragma once

#include "wrr/sim.hpp"
#include "wrr/solver.hpp"

#include <string>
#include <vector>

namespace wrr {

/// Batch experiment configuration. One self-contained JSON file; every
/// default is materialized back into output metadata so artifacts are
/// self-describing.
struct ExperimentConfig {
    SemSpec sem;
    std::vector<double> gammas = {0.5, 1.0, 2.0, 10.0};
    Eigen::Index n_samples = 1000;
    Eigen::Index n_mc = 20000;
    int grid_points = 100;
    BasisSpec basis;
    FitPath estimator_path = FitPath::Grammian;
    double d_n = 0.0;  // 0 = n^(-1/4)
    int e_n = 0;       // 0 = min(n_basis, ceil(n^(1/4)))
    double truncation_M = 5.0;
    SplitFractions splits;
    uint64_t seed = 20240901;
    double shift_scale = 1.0;
    bool center_observational = false;
    std::string out_dir = "out";

    void validate() const;

    FitConfig fit_config(double gamma) const;

    /// Full effective configuration as JSON (all defaults materialized).
    std::string materialized() const;
};

/// Parses a config file. Unknown keys are rejected (probable typos); the
/// SEM may be given inline under "sem" or by path under "sem_path",
/// defaulting to the built-in example spec.
ExperimentConfig load_config_file(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir);

/// FNV-1a hash of the SEM JSON, recorded in metadata.
std::string spec_hash(const SemSpec& spec);

}  // namespace wrr
