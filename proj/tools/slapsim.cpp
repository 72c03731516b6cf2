// slapsim: closed-form design, single-site evolution, spatial scans and R
// sweeps for node-addressed adiabatic passage in an optical lattice.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slap/commands.hpp"
#include "slap/config.hpp"
#include "slap/errors.hpp"

namespace {

constexpr double kNm = 1e-9;

int code(slap::ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-site addressing by position-dependent adiabatic passage"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", slap::kToolVersion);

    std::string config_path;
    std::string out_dir = ".";
    bool plot_script = false;
    unsigned threads = 0;
    app.add_option("-c,--config", config_path, "run configuration (JSON)")->required();
    app.add_option("-o,--out", out_dir, "output directory");
    app.add_flag("--plot-script", plot_script, "also write a gnuplot script for each table");
    app.add_option("-j,--threads", threads, "worker threads for spatial scans (0 = all cores)");

    const std::map<std::string, slap::Protocol> protocols{{"slap", slap::Protocol::slap},
                                                          {"cpt", slap::Protocol::cpt}};
    const std::map<std::string, slap::Technique> techniques{{"slap", slap::Technique::slap},
                                                            {"cpt", slap::Technique::cpt}};

    auto* analytic = app.add_subcommand("analytic", "closed-form widths, SSA window and efficiencies");

    auto* simulate = app.add_subcommand("simulate", "time series of one site's density matrix");
    double sim_x_nm = 0.0;
    std::optional<slap::Protocol> sim_protocol;
    simulate->add_option("--x", sim_x_nm, "site position, nm")->required();
    simulate->add_option("--protocol", sim_protocol, "slap or cpt (default: config)")
        ->transform(CLI::CheckedTransformer(protocols, CLI::ignore_case));

    auto* scan = app.add_subcommand("scan", "survival profile and final distribution over the grid");
    std::optional<slap::Protocol> scan_protocol;
    bool refine = false;
    scan->add_option("--protocol", scan_protocol, "slap or cpt (default: config)")
        ->transform(CLI::CheckedTransformer(protocols, CLI::ignore_case));
    scan->add_flag("--refine", refine, "double the grid until site probabilities change < 1e-3");

    auto* sweep = app.add_subcommand("sweep", "addressing efficiency versus the intensity ratio R");
    std::string sweep_param = "r";
    std::vector<double> sweep_values;
    sweep->add_option("--param", sweep_param, "swept parameter")->check(CLI::IsMember({"r"}));
    sweep->add_option("--values", sweep_values, "comma-separated values")->required()->delimiter(',');

    auto* design = app.add_subcommand("design", "intensity ratio R needed for a target width");
    double target_nm = 0.0;
    slap::Technique technique = slap::Technique::slap;
    std::vector<double> w_p_nm;
    design->add_option("--target-fwhm-nm", target_nm, "target width, nm")->required();
    design->add_option("--technique", technique, "slap or cpt")
        ->transform(CLI::CheckedTransformer(techniques, CLI::ignore_case));
    design->add_option("--w-p-nm", w_p_nm, "pump node widths to evaluate, nm (default: config)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : code(slap::ExitCode::config_error);
    }

    slap::RunConfig cfg;
    try {
        cfg = slap::load_config(config_path);
    } catch (const slap::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return code(slap::ExitCode::config_error);
    } catch (const slap::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return code(slap::ExitCode::config_error);
    }

    slap::CommandOptions opts;
    opts.out_dir = out_dir;
    opts.plot_script = plot_script;
    opts.refine = refine;
    opts.parallel.threads = threads;
    opts.log = &std::cout;

    try {
        if (*analytic) return code(slap::run_analytic(cfg, opts));
        if (*simulate) return code(slap::run_simulate(cfg, sim_x_nm * kNm, sim_protocol.value_or(cfg.protocol), opts));
        if (*scan) return code(slap::run_scan(cfg, scan_protocol.value_or(cfg.protocol), opts));
        if (*sweep) return code(slap::run_sweep(cfg, sweep_values, opts));
        if (*design) {
            for (double& w : w_p_nm) w *= kNm;
            return code(slap::run_design(cfg, target_nm * kNm, technique, w_p_nm, opts));
        }
    } catch (const slap::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return code(slap::ExitCode::config_error);
    } catch (const slap::IntegrationFailure& e) {
        std::cerr << "integration failure: " << e.what() << '\n';
        return code(slap::ExitCode::runtime_failure);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return code(slap::ExitCode::runtime_failure);
    }
    return code(slap::ExitCode::ok);
}
