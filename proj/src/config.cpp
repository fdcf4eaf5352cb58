#include "wrr/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace wrr {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

BasisSpec parse_basis(const json& j) {
    const std::string kind = j.value("kind", "fourier_sine");
    require(kind == "fourier_sine", "config basis: only fourier_sine is configurable here");
    const int n_basis = j.value("n_basis", 10);
    double t1 = 0.0, t2 = 1.0;
    if (j.contains("interval")) {
        const auto& iv = j["interval"];
        require(iv.is_array() && iv.size() == 2, "config basis: interval must be [t1, t2]");
        t1 = iv[0].get<double>();
        t2 = iv[1].get<double>();
    }
    return make_fourier_sine_basis(n_basis, t1, t2);
}

}  // namespace

void ExperimentConfig::validate() const {
    sem.validate();
    require(!gammas.empty(), "config: gammas must be nonempty");
    for (double g : gammas) require(g > 0.0, "config: gammas must be > 0");
    require(n_samples >= 2, "config: n_samples must be >= 2");
    require(n_mc >= 2, "config: n_mc must be >= 2");
    require(grid_points >= 2, "config: grid_points must be >= 2");
    require(basis.n_basis == sem.n_basis,
            "config: basis size must match the SEM score dimension");
    require(truncation_M > 1.0, "config: truncation_M must be > 1");
    require(shift_scale >= 0.0, "config: shift_scale must be >= 0");
    require(e_n >= 0 && e_n <= basis.n_basis, "config: e_n must lie in [0, n_basis]");
    require(d_n >= 0.0, "config: d_n must be >= 0");
}

FitConfig ExperimentConfig::fit_config(double gamma) const {
    FitConfig fc;
    fc.gamma = gamma;
    fc.basis = basis;
    fc.path = estimator_path;
    fc.d_n = d_n;
    fc.e_n = e_n;
    fc.truncation_M = truncation_M;
    fc.splits = splits;
    fc.center_observational = center_observational;
    return fc;
}

std::string ExperimentConfig::materialized() const {
    json j;
    j["sem"] = json::parse(sem.to_json());
    j["gammas"] = gammas;
    j["n_samples"] = n_samples;
    j["n_mc"] = n_mc;
    j["grid_points"] = grid_points;
    j["basis"] = {{"kind", "fourier_sine"},
                  {"n_basis", basis.n_basis},
                  {"interval", {basis.t1, basis.t2}}};
    j["estimator_path"] = estimator_path == FitPath::Grammian ? "grammian" : "eigen";
    j["d_n"] = d_n;
    j["e_n"] = e_n;
    j["truncation_M"] = truncation_M;
    j["split_fractions"] = {splits.main, splits.denom, splits.eigen};
    j["seed"] = seed;
    j["shift_scale"] = shift_scale;
    j["center_observational"] = center_observational;
    j["out_dir"] = out_dir;
    return j.dump(2);
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config JSON: ") + e.what());
    }
    static const std::set<std::string> known = {
        "sem",       "sem_path",     "gammas",          "n_samples",
        "n_mc",      "grid_points",  "basis",           "estimator_path",
        "d_n",       "e_n",          "truncation_M",    "split_fractions",
        "seed",      "shift_scale",  "center_observational", "out_dir"};
    for (const auto& [key, _] : j.items())
        require(known.count(key) > 0, "config: unknown key '" + key + "'");

    ExperimentConfig c;
    if (j.contains("sem")) {
        c.sem = SemSpec::from_json(j["sem"].dump());
    } else if (j.contains("sem_path")) {
        std::filesystem::path p = j["sem_path"].get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        c.sem = SemSpec::from_json(read_file(p.string()));
    } else {
        c.sem = paper_example_spec();
    }
    if (j.contains("gammas")) c.gammas = j["gammas"].get<std::vector<double>>();
    if (j.contains("n_samples")) c.n_samples = j["n_samples"].get<Eigen::Index>();
    if (j.contains("n_mc")) c.n_mc = j["n_mc"].get<Eigen::Index>();
    if (j.contains("grid_points")) c.grid_points = j["grid_points"].get<int>();
    if (j.contains("basis"))
        c.basis = parse_basis(j["basis"]);
    else
        c.basis = make_fourier_sine_basis(c.sem.n_basis, 0.0, 1.0);
    if (j.contains("estimator_path")) {
        const std::string p = j["estimator_path"].get<std::string>();
        require(p == "grammian" || p == "eigen",
                "config: estimator_path must be 'grammian' or 'eigen'");
        c.estimator_path = p == "grammian" ? FitPath::Grammian : FitPath::Eigen;
    }
    if (j.contains("d_n")) c.d_n = j["d_n"].get<double>();
    if (j.contains("e_n")) c.e_n = j["e_n"].get<int>();
    if (j.contains("truncation_M")) c.truncation_M = j["truncation_M"].get<double>();
    if (j.contains("split_fractions")) {
        const auto& f = j["split_fractions"];
        require(f.is_array() && f.size() == 3,
                "config: split_fractions must be [main, denom, eigen]");
        c.splits.main = f[0].get<double>();
        c.splits.denom = f[1].get<double>();
        c.splits.eigen = f[2].get<double>();
    }
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("shift_scale")) c.shift_scale = j["shift_scale"].get<double>();
    if (j.contains("center_observational"))
        c.center_observational = j["center_observational"].get<bool>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    c.validate();
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    const std::string base = std::filesystem::path(path).parent_path().string();
    return parse_config(read_file(path), base);
}

std::string spec_hash(const SemSpec& spec) {
    const std::string s = spec.to_json();
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace wrr
