// wrr: batch driver for worst-risk-robust function-on-function regression.
// Subcommands: simulate, fit, risk, check, shift-check. Everything is
// deterministic given (config, seed); reruns produce identical artifacts.

#include "wrr/config.hpp"
#include "wrr/moments.hpp"
#include "wrr/panel.hpp"
#include "wrr/risk.hpp"
#include "wrr/rng.hpp"
#include "wrr/shiftset.hpp"
#include "wrr/sim.hpp"
#include "wrr/solver.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCheckFailure = 4;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    uint64_t seed = 0;
    bool seed_set = false;
    std::vector<double> gammas;
    std::string path_override;
    bool center_observational = false;
};

wrr::ExperimentConfig effective_config(const CliOptions& opt) {
    wrr::ExperimentConfig cfg = wrr::load_config_file(opt.config_path);
    if (opt.seed_set) cfg.seed = opt.seed;
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (!opt.gammas.empty()) cfg.gammas = opt.gammas;
    if (!opt.path_override.empty()) {
        wrr::require(opt.path_override == "grammian" || opt.path_override == "eigen",
                     "--path must be 'grammian' or 'eigen'");
        cfg.estimator_path =
            opt.path_override == "grammian" ? wrr::FitPath::Grammian : wrr::FitPath::Eigen;
    }
    if (opt.center_observational) cfg.center_observational = true;
    cfg.validate();
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    wrr::require(out.good(), "cannot open for writing: " + path.string());
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    wrr::require(out.good(), "write failed: " + path.string());
}

json metadata(const wrr::ExperimentConfig& cfg, const std::string& command) {
    json meta;
    meta["command"] = command;
    meta["rng"] = wrr::kRngName;
    meta["seed"] = cfg.seed;
    meta["spec_hash"] = wrr::spec_hash(cfg.sem);
    meta["config"] = json::parse(cfg.materialized());
    return meta;
}

std::string gamma_tag(double gamma) {
    std::ostringstream ss;
    ss << gamma;
    std::string s = ss.str();
    for (auto& ch : s)
        if (ch == '.') ch = 'p';
    return s;
}

int cmd_simulate(const CliOptions& opt) {
    const wrr::ExperimentConfig cfg = effective_config(opt);
    fs::create_directories(cfg.out_dir);
    const wrr::Vector grid =
        wrr::Vector::LinSpaced(cfg.grid_points, cfg.basis.t1, cfg.basis.t2);
    // Shared seed: the noise stream is common to both environments, so the
    // panels form coupled pairs.
    const wrr::EnvSample sO =
        wrr::simulate_env(cfg.sem, wrr::EnvLabel::O, cfg.n_samples, cfg.shift_scale, cfg.seed);
    const wrr::EnvSample sA =
        wrr::simulate_env(cfg.sem, wrr::EnvLabel::A, cfg.n_samples, cfg.shift_scale, cfg.seed);
    const wrr::CurvePanel pO = wrr::synthesize_curves(sO, cfg.basis, grid);
    const wrr::CurvePanel pA = wrr::synthesize_curves(sA, cfg.basis, grid);
    wrr::write_curve_csv_file(pO, (fs::path(cfg.out_dir) / "curves_O.csv").string());
    wrr::write_curve_csv_file(pA, (fs::path(cfg.out_dir) / "curves_A.csv").string());
    write_text(fs::path(cfg.out_dir) / "metadata.json", metadata(cfg, "simulate").dump(2));
    std::cout << "wrote " << cfg.out_dir << "/curves_{O,A}.csv (" << cfg.n_samples
              << " samples, " << cfg.grid_points << " grid points)\n";
    return kExitOk;
}

int cmd_fit(const CliOptions& opt, const std::string& curves_O, const std::string& curves_A) {
    const wrr::ExperimentConfig cfg = effective_config(opt);
    fs::create_directories(cfg.out_dir);
    const std::string file_O =
        curves_O.empty() ? (fs::path(cfg.out_dir) / "curves_O.csv").string() : curves_O;
    const std::string file_A =
        curves_A.empty() ? (fs::path(cfg.out_dir) / "curves_A.csv").string() : curves_A;
    const wrr::CurvePanel panel_O = wrr::read_curve_csv_file(file_O, wrr::EnvLabel::O);
    const wrr::CurvePanel panel_A = wrr::read_curve_csv_file(file_A, wrr::EnvLabel::A);

    struct Item {
        double gamma;
        wrr::KernelCoeffs beta;
        wrr::SolveReport report;
    };
    // Per-gamma work items run concurrently; each writes its own files.
    std::vector<std::future<Item>> futures;
    for (double gamma : cfg.gammas) {
        futures.push_back(std::async(std::launch::async, [&, gamma]() {
            auto [beta, report] =
                wrr::fit_empirical(panel_O, panel_A, cfg.fit_config(gamma), cfg.seed);
            return Item{gamma, std::move(beta), report};
        }));
    }
    json summary = json::array();
    const wrr::Vector sgrid = wrr::Vector::LinSpaced(50, cfg.basis.t1, cfg.basis.t2);
    for (auto& f : futures) {
        Item item = f.get();
        const std::string tag = gamma_tag(item.gamma);
        const fs::path beta_path = fs::path(cfg.out_dir) / ("beta_gamma" + tag + ".json");
        const fs::path surf_path = fs::path(cfg.out_dir) / ("surface_gamma" + tag + ".csv");
        wrr::write_beta_json_file(item.beta, item.report, beta_path.string());
        wrr::write_surface_csv_file(item.beta, sgrid, sgrid, surf_path.string());
        summary.push_back({{"gamma", item.gamma},
                           {"beta", beta_path.filename().string()},
                           {"surface", surf_path.filename().string()},
                           {"condition_estimate", item.report.condition_estimate},
                           {"truncation_index", item.report.truncation_index},
                           {"kernel_dim_excluded", item.report.kernel_dim_excluded}});
    }
    json meta = metadata(cfg, "fit");
    meta["fits"] = summary;
    write_text(fs::path(cfg.out_dir) / "fit_summary.json", meta.dump(2));
    std::cout << "fitted " << cfg.gammas.size() << " gamma value(s) from " << file_O << ", "
              << file_A << "\n";
    return kExitOk;
}

int cmd_risk(const CliOptions& opt) {
    const wrr::ExperimentConfig cfg = effective_config(opt);
    fs::create_directories(cfg.out_dir);
    const wrr::Grammians gram = wrr::population_grammians(cfg.sem);
    json rows = json::array();
    for (double gamma : cfg.gammas) {
        auto [beta, report] = wrr::solve_grammian(gram, gamma, cfg.basis);
        const double rO = wrr::risk_closed_form(cfg.sem, wrr::EnvLabel::O, 0.0, beta).value;
        const double rA = wrr::risk_closed_form(cfg.sem, wrr::EnvLabel::A, 1.0, beta).value;
        const wrr::RiskEstimate mc =
            wrr::risk_mc(cfg.sem, wrr::EnvLabel::A, 1.0, beta, cfg.n_mc, cfg.seed);
        rows.push_back({{"gamma", gamma},
                        {"risk_O_closed", rO},
                        {"risk_A_closed", rA},
                        {"worst_risk_closed", gamma * rA + (1.0 - gamma) * rO},
                        {"risk_A_mc", mc.value},
                        {"risk_A_mc_std_error", mc.std_error}});
    }
    json meta = metadata(cfg, "risk");
    meta["risks"] = rows;
    write_text(fs::path(cfg.out_dir) / "risk_report.json", meta.dump(2));
    std::cout << meta["risks"].dump(2) << '\n';
    return kExitOk;
}

int cmd_check(const CliOptions& opt, bool corrupt_rhs) {
    const wrr::ExperimentConfig cfg = effective_config(opt);
    fs::create_directories(cfg.out_dir);
    const wrr::Grammians gram = wrr::population_grammians(cfg.sem);
    const wrr::Matrix shift_moment =
        cfg.sem.shift_cov + cfg.sem.shift_mean * cfg.sem.shift_mean.transpose();

    bool all_pass = true;
    json rows = json::array();
    for (double gamma : cfg.gammas) {
        auto [beta, report] = wrr::solve_grammian(gram, gamma, cfg.basis);
        wrr::DecompositionReport closed =
            wrr::check_decomposition(cfg.sem, beta, gamma, wrr::RiskMethod::ClosedForm);
        if (corrupt_rhs) {
            closed.rhs += 1.0;
            closed.diff = closed.lhs - closed.rhs;
            closed.pass = false;
        }
        const wrr::DecompositionReport mc = wrr::check_decomposition(
            cfg.sem, beta, gamma, wrr::RiskMethod::MonteCarlo, cfg.n_mc, cfg.seed);
        // Membership of the attained-supremum shift sqrt(gamma)*A: its score
        // second moment is gamma times the observed one, the boundary case.
        const wrr::Membership member =
            wrr::psd_membership_scores(gamma * shift_moment, shift_moment, gamma);
        const bool pass = closed.pass && mc.pass && member.member;
        all_pass = all_pass && pass;
        rows.push_back({{"gamma", gamma},
                        {"closed", json::parse(wrr::decomposition_json(closed))},
                        {"monte_carlo", json::parse(wrr::decomposition_json(mc))},
                        {"sqrt_gamma_shift_member", member.member},
                        {"membership_margin", member.margin},
                        {"pass", pass}});
    }
    json meta = metadata(cfg, "check");
    meta["checks"] = rows;
    meta["all_pass"] = all_pass;
    write_text(fs::path(cfg.out_dir) / "check_report.json", meta.dump(2));
    std::cout << (all_pass ? "decomposition checks passed" : "decomposition checks FAILED")
              << " for " << cfg.gammas.size() << " gamma value(s)\n";
    return all_pass ? kExitOk : kExitCheckFailure;
}

int cmd_shift_check(const CliOptions& opt, const std::string& kernel_path,
                    const std::string& kernel_prime_path, double gamma) {
    wrr::require(gamma > 0.0, "shift-check: --gamma must be > 0");
    const wrr::ShiftKernelGrid k = wrr::read_kernel_csv_file(kernel_path);
    const wrr::ShiftKernelGrid kp = wrr::read_kernel_csv_file(kernel_prime_path);
    const wrr::Membership m = wrr::mercer_membership_grid(kp, k, gamma);
    std::cout << wrr::membership_json(m, gamma) << '\n';
    if (!opt.out_dir.empty()) {
        fs::create_directories(opt.out_dir);
        write_text(fs::path(opt.out_dir) / "shift_check.json", wrr::membership_json(m, gamma));
    }
    return m.member ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"worst-risk-robust function-on-function regression driver"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&](CLI::App* sub, bool need_config = true) {
        auto* c = sub->add_option("--config", opt.config_path, "experiment config JSON");
        if (need_config) c->required();
        sub->add_option("--seed", opt.seed, "override config seed")
            ->each([&](const std::string&) { opt.seed_set = true; });
        sub->add_option("--out", opt.out_dir, "override output directory");
    };

    auto* sim = app.add_subcommand("simulate", "simulate paired environments to curve CSVs");
    add_common(sim);

    std::string curves_O, curves_A;
    auto* fit = app.add_subcommand("fit", "fit worst-risk minimizers from curve CSVs");
    add_common(fit);
    fit->add_option("--curves-o", curves_O, "observational curve CSV (default out_dir/curves_O.csv)");
    fit->add_option("--curves-a", curves_A, "shifted curve CSV (default out_dir/curves_A.csv)");
    fit->add_option("--gamma", opt.gammas, "override gamma values (repeatable)");
    fit->add_option("--path", opt.path_override, "estimator path: grammian or eigen");
    fit->add_flag("--center-observational", opt.center_observational,
                  "center scores by observational-environment means");

    auto* risk = app.add_subcommand("risk", "population and Monte-Carlo risks per gamma");
    add_common(risk);
    risk->add_option("--gamma", opt.gammas, "override gamma values (repeatable)");

    bool corrupt_rhs = false;
    auto* check = app.add_subcommand("check", "verify the worst-risk decomposition per gamma");
    add_common(check);
    check->add_option("--gamma", opt.gammas, "override gamma values (repeatable)");
    check->add_flag("--corrupt-rhs-for-testing", corrupt_rhs)->group("");  // test hook

    std::string kernel_path, kernel_prime_path;
    double gamma_single = 1.0;
    auto* shift = app.add_subcommand("shift-check", "Mercer membership of a shift kernel grid");
    shift->add_option("--kernel", kernel_path, "reference kernel CSV")->required();
    shift->add_option("--kernel-prime", kernel_prime_path, "candidate kernel CSV")->required();
    shift->add_option("--gamma", gamma_single, "robustness level")->required();
    shift->add_option("--out", opt.out_dir, "optional output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(opt);
        if (fit->parsed()) return cmd_fit(opt, curves_O, curves_A);
        if (risk->parsed()) return cmd_risk(opt);
        if (check->parsed()) return cmd_check(opt, corrupt_rhs);
        if (shift->parsed()) return cmd_shift_check(opt, kernel_path, kernel_prime_path, gamma_single);
    } catch (const wrr::InvalidArgument& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const wrr::NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
