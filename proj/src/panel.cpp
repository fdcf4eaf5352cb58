#include "wrr/panel.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace wrr {

void CurvePanel::validate() const {
    check_grid(grid, 2, "CurvePanel");
    require(!samples.empty(), "CurvePanel: no samples");
    const auto rows = samples[0].rows();
    require(rows >= 1, "CurvePanel: no variables");
    for (const auto& s : samples) {
        require(s.rows() == rows, "CurvePanel: inconsistent variable count");
        require(s.cols() == grid.size(), "CurvePanel: sample does not cover the grid");
        require(s.allFinite(), "CurvePanel: non-finite curve value");
    }
}

SampledCurve CurvePanel::curve(Eigen::Index sample, int var) const {
    require(sample >= 0 && sample < n_samples(), "CurvePanel::curve: sample out of range");
    require(var >= 0 && var < n_vars(), "CurvePanel::curve: variable out of range");
    SampledCurve c;
    c.grid = grid;
    c.values = samples[sample].row(var).transpose();
    return c;
}

std::string var_name(int var) { return var == 0 ? "Y" : "X" + std::to_string(var); }

namespace {

int parse_var_name(const std::string& name, int row) {
    if (name == "Y") return 0;
    if (name.size() >= 2 && name[0] == 'X') {
        try {
            const int j = std::stoi(name.substr(1));
            if (j >= 1) return j;
        } catch (...) {
        }
    }
    throw InvalidArgument("curve CSV row " + std::to_string(row) + ": unknown variable '" +
                          name + "' (expected Y or X1..Xp)");
}

}  // namespace

void write_curve_csv(const CurvePanel& panel, std::ostream& out) {
    panel.validate();
    out << "env,sample_id,var,t,value\n";
    out.precision(17);
    const std::string env = to_string(panel.env);
    for (Eigen::Index m = 0; m < panel.n_samples(); ++m) {
        for (int v = 0; v < panel.n_vars(); ++v) {
            for (Eigen::Index l = 0; l < panel.grid.size(); ++l) {
                out << env << ',' << m << ',' << var_name(v) << ',' << panel.grid[l] << ','
                    << panel.samples[m](v, l) << '\n';
            }
        }
    }
}

void write_curve_csv_file(const CurvePanel& panel, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "cannot open for writing: " + path);
    write_curve_csv(panel, out);
    require(out.good(), "write failed: " + path);
}

CurvePanel read_curve_csv(std::istream& in, EnvLabel expect_env) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "curve CSV: empty file");
    require(line == "env,sample_id,var,t,value",
            "curve CSV: bad header '" + line + "'");

    // (sample, var) -> list of (t, value); grid consistency checked afterwards.
    std::map<std::pair<long, int>, std::vector<std::pair<double, double>>> by_curve;
    int max_var = 0;
    long max_sample = -1;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string env_s, sample_s, var_s, t_s, value_s;
        const bool ok = std::getline(ss, env_s, ',') && std::getline(ss, sample_s, ',') &&
                        std::getline(ss, var_s, ',') && std::getline(ss, t_s, ',') &&
                        std::getline(ss, value_s);
        require(ok, "curve CSV row " + std::to_string(row) + ": expected 5 fields");
        require(env_s == "O" || env_s == "A",
                "curve CSV row " + std::to_string(row) + ": env must be O or A");
        if ((env_s == "A") != (expect_env == EnvLabel::A))
            throw InvalidArgument("curve CSV row " + std::to_string(row) + ": env '" + env_s +
                                  "' does not match expected environment " +
                                  to_string(expect_env));
        long sample = 0;
        double t = 0.0, value = 0.0;
        try {
            sample = std::stol(sample_s);
            t = std::stod(t_s);
            value = std::stod(value_s);
        } catch (...) {
            throw InvalidArgument("curve CSV row " + std::to_string(row) + ": parse error");
        }
        require(std::isfinite(t) && std::isfinite(value),
                "curve CSV row " + std::to_string(row) + ": non-finite number");
        const int var = parse_var_name(var_s, row);
        max_var = std::max(max_var, var);
        max_sample = std::max(max_sample, sample);
        by_curve[{sample, var}].push_back({t, value});
    }
    require(max_sample >= 0, "curve CSV: no data rows");

    // Reference grid from the first curve; everything else must match it.
    const auto& ref = by_curve.begin()->second;
    const Eigen::Index ngrid = static_cast<Eigen::Index>(ref.size());
    CurvePanel panel;
    panel.env = expect_env;
    panel.grid.resize(ngrid);
    for (Eigen::Index l = 0; l < ngrid; ++l) panel.grid[l] = ref[l].first;
    check_grid(panel.grid, 2, "curve CSV grid");

    const int n_vars = max_var + 1;
    panel.samples.assign(max_sample + 1, Matrix::Zero(n_vars, ngrid));
    for (long m = 0; m <= max_sample; ++m) {
        for (int v = 0; v < n_vars; ++v) {
            auto it = by_curve.find({m, v});
            if (it == by_curve.end())
                throw InvalidArgument("curve CSV: missing variable " + var_name(v) +
                                      " for sample " + std::to_string(m));
            const auto& pts = it->second;
            if (static_cast<Eigen::Index>(pts.size()) != ngrid)
                throw InvalidArgument("curve CSV: sample " + std::to_string(m) + " variable " +
                                      var_name(v) + " has " + std::to_string(pts.size()) +
                                      " grid points, expected " + std::to_string(ngrid));
            for (Eigen::Index l = 0; l < ngrid; ++l) {
                if (pts[l].first != panel.grid[l])
                    throw InvalidArgument("curve CSV: sample " + std::to_string(m) +
                                          " variable " + var_name(v) +
                                          " grid mismatch at point " + std::to_string(l));
                panel.samples[m](v, l) = pts[l].second;
            }
        }
    }
    panel.validate();
    return panel;
}

CurvePanel read_curve_csv_file(const std::string& path, EnvLabel expect_env) {
    std::ifstream in(path);
    require(in.good(), "cannot open: " + path);
    return read_curve_csv(in, expect_env);
}

}  // namespace wrr
