#include "slap/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "slap/errors.hpp"

namespace slap {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kNm = 1e-9;
constexpr double kUs = 1e-6;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    return fmt::format("{:.10g}", v);
}

json num_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& digest,
              const std::vector<std::string>& columns)
        : out_(path, std::ios::binary) {
        if (!out_) throw Error(fmt::format("cannot write {}", path.string()));
        out_ << "# config_digest=" << digest << '\n';
        write(columns);
    }

    void row(std::initializer_list<double> values) {
        std::string line;
        for (double v : values) line += (line.empty() ? "" : ",") + num(v);
        out_ << line << '\n';
    }

    void flush() { out_.flush(); }

private:
    void write(const std::vector<std::string>& cells) {
        std::string line;
        for (const auto& c : cells) line += (line.empty() ? "" : ",") + c;
        out_ << line << '\n';
    }

    std::ofstream out_;
};

class Manifest {
public:
    Manifest(const RunConfig& cfg, std::string subcommand, json arguments)
        : start_(Clock::now()) {
        doc_["tool"] = kToolName;
        doc_["version"] = kToolVersion;
        doc_["subcommand"] = std::move(subcommand);
        doc_["arguments"] = std::move(arguments);
        doc_["config_digest"] = cfg.digest;
        doc_["config"] = cfg.source;
        doc_["derived"] = derived_to_json(derive(cfg));
        doc_["outputs"] = json::array();
        doc_["errors"] = json::array();
        doc_["status"] = "ok";
    }

    void output(const std::filesystem::path& file) { doc_["outputs"].push_back(file.filename().string()); }
    void error(const std::string& message) { doc_["errors"].push_back(message); }
    void status(const std::string& s) { doc_["status"] = s; }

    void write(const std::filesystem::path& dir) {
        doc_["wall_clock_s"] = std::chrono::duration<double>(Clock::now() - start_).count();
        const auto path = dir / fmt::format("manifest_{}.json", doc_["subcommand"].get<std::string>());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(fmt::format("cannot write {}", path.string()));
        out << doc_.dump(2) << '\n';
    }

private:
    Clock::time_point start_;
    json doc_;
};

void write_plot_script(const std::filesystem::path& path, const std::string& digest, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    out << "# gnuplot script generated by " << kToolName << " (config_digest=" << digest << ")\n"
        << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << body;
}

json report_json(const AddressingReport& r) {
    return json{
        {"r", r.r},
        {"protocol", to_string(r.protocol)},
        {"dx_numeric_nm", num_json(r.dx_numeric / kNm)},
        {"p_x0", num_json(r.p_x0)},
        {"p_x1", num_json(r.p_x1)},
        {"eta_numeric", num_json(r.eta_numeric)},
        {"dx_analytic_nm", num_json(r.dx_analytic / kNm)},
        {"p_x0_analytic", num_json(r.p_x0_analytic)},
        {"p_x1_analytic", num_json(r.p_x1_analytic)},
        {"eta_analytic", num_json(r.eta_analytic)},
        {"errors", r.errors},
    };
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
}

}  // namespace

const std::vector<std::string>& simulate_columns() {
    static const std::vector<std::string> c{"t_s_us", "rho11", "rho22", "rho33", "re_rho13", "im_rho13"};
    return c;
}

const std::vector<std::string>& scan_columns() {
    static const std::vector<std::string> c{"x_nm", "p11", "rho_lat_per_nm", "rho1_per_nm"};
    return c;
}

const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> c{"r",         "eta_slap_num", "eta_cpt_num", "eta_slap_analytic",
                                            "eta_cpt_analytic", "p_x0_slap", "p_x1_slap",  "p_x0_cpt",
                                            "p_x1_cpt"};
    return c;
}

const std::vector<std::string>& design_columns() {
    static const std::vector<std::string> c{"w_p_nm", "r_required", "fwhm_at_r_nm"};
    return c;
}

json analytic_summary(const RunConfig& cfg) {
    const DerivedQuantities d = derive(cfg);
    const AnalyticParams p = AnalyticParams::from_field(cfg.field, cfg.a_const);
    json out;
    json errors = json::array();
    out["derived"] = derived_to_json(d);
    out["a_const"] = cfg.a_const;

    auto attempt = [&](const char* name, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            errors.push_back(fmt::format("{}: {}", name, e.what()));
        }
    };

    out["x_th_nm"] = nullptr;
    attempt("adiabatic_threshold_x", [&] { out["x_th_nm"] = adiabatic_threshold_x(p) / kNm; });

    double dx_slap = kNaN;
    double dx_cpt = kNaN;
    attempt("slap_fwhm", [&] { dx_slap = slap_fwhm(p); });
    attempt("cpt_fwhm", [&] { dx_cpt = cpt_fwhm(p); });
    out["dx_slap_nm"] = num_json(dx_slap / kNm);
    out["dx_cpt_nm"] = num_json(dx_cpt / kNm);

    out["ssa_window"] = nullptr;
    attempt("ssa_window", [&] {
        const SsaWindow w = ssa_window(p, d.x1, d.trap.dx_at);
        out["ssa_window"] = json{
            {"lower", w.lower},
            {"upper", w.upper},
            {"x_plus_nm", w.x_plus / kNm},
            {"x_minus_nm", w.x_minus / kNm},
            {"feasible", w.feasible},
            {"contains_omega_s0_t", w.contains(d.pulse_area)},
        };
    });

    auto probs = [&](double dx) -> json {
        if (!std::isfinite(dx)) return nullptr;
        const SiteProbabilities sp = analytic_site_probs(dx, d.trap.dx_at, d.x1);
        return json{{"p_x0", sp.p_x0}, {"p_x1", sp.p_x1}, {"eta", sp.eta}};
    };
    out["slap"] = probs(dx_slap);
    out["cpt"] = probs(dx_cpt);

    // Published comparison values whose underlying w_s and A were never
    // stated; listed for reference, not reproduced.
    out["unresolved_reference_targets"] = json::array({
        json{{"quantity", "dx_slap_nm"},
             {"w_p_nm", 509},
             {"r", {1, 10, 100}},
             {"values", {330.66, 181.86, 100.82}},
             {"status", "unresolved: Stokes waist and A behind these values are unstated"}},
        json{{"quantity", "addressing_time_us"},
             {"values", {40}},
             {"status", "unresolved: parameter set for a ~300 nm resolution run is unstated"}},
    });
    out["errors"] = errors;
    return out;
}

ExitCode run_analytic(const RunConfig& cfg, const CommandOptions& opts) {
    ensure_dir(opts.out_dir);
    Manifest manifest(cfg, "analytic", json::object());
    const json summary = analytic_summary(cfg);
    const auto path = opts.out_dir / "analytic.json";
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(fmt::format("cannot write {}", path.string()));
        json doc = summary;
        doc["config_digest"] = cfg.digest;
        out << doc.dump(2) << '\n';
    }
    manifest.output(path);
    for (const auto& e : summary["errors"]) manifest.error(e.get<std::string>());
    manifest.write(opts.out_dir);

    if (opts.log) {
        auto& log = *opts.log;
        const json& d = summary["derived"];
        log << fmt::format("omega_trap = 2pi x {:.4f} kHz, dx_at = {:.2f} nm, omega_s0 = 2pi x {:.4f} MHz\n",
                           d["omega_trap_khz"].get<double>(), d["dx_at_nm"].get<double>(),
                           d["omega_s0_mhz"].get<double>());
        log << fmt::format("R = {:.6g}, R' = {:.6g}, Omega_S0 T = {:.6g}\n", d["r"].get<double>(),
                           d["r_prime"].get<double>(), d["omega_s0_t"].get<double>());
        if (!summary["dx_slap_nm"].is_null())
            log << fmt::format("dx_slap = {:.3f} nm\n", summary["dx_slap_nm"].get<double>());
        if (!summary["dx_cpt_nm"].is_null())
            log << fmt::format("dx_cpt = {:.3f} nm\n", summary["dx_cpt_nm"].get<double>());
        if (!summary["ssa_window"].is_null()) {
            const json& w = summary["ssa_window"];
            log << fmt::format("SSA window for Omega_S0 T: ({:.4f}, {:.4f}) feasible={} contains={}\n",
                               w["lower"].get<double>(), w["upper"].get<double>(), w["feasible"].get<bool>(),
                               w["contains_omega_s0_t"].get<bool>());
        }
        for (const char* t : {"slap", "cpt"}) {
            if (summary[t].is_null()) continue;
            log << fmt::format("{}: p_x0 = {:.4f}, p_x1 = {:.4f}, eta = {:.4f}\n", t,
                               summary[t]["p_x0"].get<double>(), summary[t]["p_x1"].get<double>(),
                               summary[t]["eta"].get<double>());
        }
        for (const auto& e : summary["errors"]) log << "note: " << e.get<std::string>() << '\n';
    }
    return ExitCode::ok;
}

ExitCode run_simulate(const RunConfig& cfg, double x, Protocol protocol, const CommandOptions& opts) {
    ensure_dir(opts.out_dir);
    Manifest manifest(cfg, "simulate", json{{"x_nm", x / kNm}, {"protocol", to_string(protocol)}});
    const auto path = opts.out_dir / fmt::format("simulate_{}_x{}nm.csv", to_string(protocol), num(x / kNm));
    ExitCode code = ExitCode::ok;
    DensityMatrix final_state;
    {
        CsvWriter csv(path, cfg.digest, simulate_columns());
        manifest.output(path);
        try {
            final_state = evolve_site(x, protocol, cfg.field, cfg.atom, cfg.integrator,
                                      [&](double t, const DensityMatrix& rho) {
                                          const auto r13 = rho.element(1, 3);
                                          csv.row({t / kUs, rho.population(1), rho.population(2),
                                                   rho.population(3), r13.real(), r13.imag()});
                                      });
        } catch (const IntegrationFailure& e) {
            manifest.error(fmt::format("integration failed at t = {:.9g} us: {}", e.time() / kUs, e.what()));
            manifest.status("partial");
            code = ExitCode::runtime_failure;
        }
    }
    if (opts.plot_script) {
        const auto script = opts.out_dir / "plot_simulate.gp";
        write_plot_script(script, cfg.digest,
                          fmt::format("set xlabel 't (us)'\nplot '{0}' using 1:2 with lines, '' using 1:3 with lines, "
                                      "'' using 1:4 with lines\n",
                                      path.filename().string()));
        manifest.output(script);
    }
    manifest.write(opts.out_dir);
    if (opts.log && code == ExitCode::ok) {
        *opts.log << fmt::format("x = {:.3f} nm, {}: rho11 = {:.6f}, rho22 = {:.6f}, rho33 = {:.6f}\n", x / kNm,
                                 to_string(protocol), final_state.population(1), final_state.population(2),
                                 final_state.population(3));
    }
    return code;
}

ExitCode run_scan(const RunConfig& cfg, Protocol protocol, const CommandOptions& opts) {
    ensure_dir(opts.out_dir);
    Manifest manifest(cfg, "scan", json{{"protocol", to_string(protocol)}, {"refine", opts.refine}});
    const TrapDerived trap = derive_trap(cfg.lattice, cfg.atom);

    PartialScan scan = scan_survival_partial(cfg.grid, protocol, cfg.field, cfg.atom, cfg.integrator, opts.parallel);
    scan.profile.provenance = cfg.digest;
    ExitCode code = ExitCode::ok;
    for (const PointFailure& f : scan.failures) {
        manifest.error(fmt::format("integration failed at x = {:.6g} nm: {}", f.x / kNm, f.message));
    }
    if (!scan.failures.empty()) {
        manifest.status("partial");
        code = ExitCode::runtime_failure;
    } else if (opts.refine) {
        try {
            scan.profile = refine_profile(scan.profile, cfg.field, cfg.atom, cfg.lattice, trap, cfg.integrator,
                                          1e-3, 4, opts.parallel);
        } catch (const IntegrationFailure& e) {
            manifest.error(fmt::format("refinement failed: {}", e.what()));
            manifest.status("partial");
            code = ExitCode::runtime_failure;
        }
    }
    const SurvivalProfile& profile = scan.profile;

    const auto csv_path = opts.out_dir / fmt::format("scan_{}.csv", to_string(protocol));
    {
        CsvWriter csv(csv_path, cfg.digest, scan_columns());
        const std::vector<double> xs = profile.grid.points();
        const std::vector<double> rho_lat = lattice_samples(profile.grid, cfg.lattice, trap);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            // densities per nm
            csv.row({xs[i] / kNm, profile.p11[i], rho_lat[i] * kNm, profile.p11[i] * rho_lat[i] * kNm});
        }
    }
    manifest.output(csv_path);

    const AddressingReport rep =
        addressing_report(profile, cfg.lattice, trap, AnalyticParams::from_field(cfg.field, cfg.a_const));
    const auto rep_path = opts.out_dir / fmt::format("report_{}.json", to_string(protocol));
    {
        std::ofstream out(rep_path, std::ios::binary);
        if (!out) throw Error(fmt::format("cannot write {}", rep_path.string()));
        json doc = report_json(rep);
        doc["config_digest"] = cfg.digest;
        doc["grid_points"] = profile.grid.n_points;
        out << doc.dump(2) << '\n';
    }
    manifest.output(rep_path);
    for (const auto& e : rep.errors) manifest.error(e);

    if (opts.plot_script) {
        const auto script = opts.out_dir / fmt::format("plot_scan_{}.gp", to_string(protocol));
        write_plot_script(script, cfg.digest,
                          fmt::format("set xlabel 'x (nm)'\nset ylabel 'density (1/nm)'\n"
                                      "plot '{0}' using 1:3 with lines, '' using 1:4 with points\n",
                                      csv_path.filename().string()));
        manifest.output(script);
    }
    manifest.write(opts.out_dir);

    if (opts.log) {
        *opts.log << fmt::format(
            "{}: dx_numeric = {:.2f} nm, p_x0 = {:.4f}, p_x1 = {:.4f}, eta = {:.4f} "
            "(analytic: dx = {:.2f} nm, eta = {:.4f})\n",
            to_string(protocol), rep.dx_numeric / kNm, rep.p_x0, rep.p_x1, rep.eta_numeric,
            rep.dx_analytic / kNm, rep.eta_analytic);
        for (const auto& e : rep.errors) *opts.log << "note: " << e << '\n';
    }
    return code;
}

ExitCode run_sweep(const RunConfig& cfg, std::span<const double> r_values, const CommandOptions& opts) {
    ensure_dir(opts.out_dir);
    Manifest manifest(cfg, "sweep", json{{"param", "r"}, {"values", std::vector<double>(r_values.begin(), r_values.end())}});

    SweepInputs in;
    in.base = cfg.field;
    in.atom = cfg.atom;
    in.lattice = cfg.lattice;
    in.integrator = cfg.integrator;
    in.grid = cfg.grid;
    in.a_const = cfg.a_const;
    in.parallel = opts.parallel;
    const std::vector<AddressingReport> rows = sweep_r(r_values, in);

    ExitCode code = ExitCode::ok;
    const auto path = opts.out_dir / "sweep_r.csv";
    {
        CsvWriter csv(path, cfg.digest, sweep_columns());
        for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
            const AddressingReport& s = rows[i];
            const AddressingReport& c = rows[i + 1];
            csv.row({s.r, s.eta_numeric, c.eta_numeric, s.eta_analytic, c.eta_analytic, s.p_x0, s.p_x1, c.p_x0,
                     c.p_x1});
        }
    }
    manifest.output(path);
    json table = json::array();
    for (const auto& row : rows) {
        table.push_back(report_json(row));
        for (const auto& e : row.errors) {
            manifest.error(fmt::format("R = {} {}: {}", row.r, to_string(row.protocol), e));
        }
        if (row.integration_failures > 0) code = ExitCode::runtime_failure;
    }
    const auto rep_path = opts.out_dir / "sweep_reports.json";
    {
        std::ofstream out(rep_path, std::ios::binary);
        out << json{{"config_digest", cfg.digest}, {"rows", table}}.dump(2) << '\n';
    }
    manifest.output(rep_path);
    if (code != ExitCode::ok) manifest.status("partial");

    if (opts.plot_script) {
        const auto script = opts.out_dir / "plot_sweep.gp";
        write_plot_script(script, cfg.digest,
                          fmt::format("set logscale x\nset xlabel 'R'\nset ylabel 'eta'\n"
                                      "plot '{0}' using 1:2 with points, '' using 1:3 with points, "
                                      "'' using 1:4 with lines, '' using 1:5 with lines\n",
                                      path.filename().string()));
        manifest.output(script);
    }
    manifest.write(opts.out_dir);

    if (opts.log) {
        *opts.log << "      R   eta_slap  eta_cpt  eta_slap_an  eta_cpt_an\n";
        for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
            *opts.log << fmt::format("{:7.3g}  {:8.4f}  {:7.4f}  {:11.4f}  {:10.4f}\n", rows[i].r,
                                     rows[i].eta_numeric, rows[i + 1].eta_numeric, rows[i].eta_analytic,
                                     rows[i + 1].eta_analytic);
        }
    }
    return code;
}

ExitCode run_design(const RunConfig& cfg, double dx_target, Technique technique, std::span<const double> w_p_values,
                    const CommandOptions& opts) {
    ensure_dir(opts.out_dir);
    const char* tname = technique == Technique::slap ? "slap" : "cpt";
    std::vector<double> w_ps(w_p_values.begin(), w_p_values.end());
    if (w_ps.empty()) w_ps.push_back(cfg.field.w_p);

    json wp_nm = json::array();
    for (double w : w_ps) wp_nm.push_back(w / kNm);
    Manifest manifest(cfg, "design",
                      json{{"target_fwhm_nm", dx_target / kNm}, {"technique", tname}, {"w_p_nm", wp_nm}});

    ExitCode code = ExitCode::ok;
    const auto path = opts.out_dir / fmt::format("design_{}.csv", tname);
    {
        CsvWriter csv(path, cfg.digest, design_columns());
        for (double w_p : w_ps) {
            DesignParams fixed{w_p, cfg.field.w_s, cfg.field.omega_s0, {cfg.a_const, cfg.field.delay()}};
            double r = kNaN;
            double check = kNaN;
            try {
                r = required_r(dx_target, technique, fixed);
                check = technique_fwhm(technique, fixed.with_ratio(r));
            } catch (const Error& e) {
                manifest.error(fmt::format("w_p = {:.6g} nm: {}", w_p / kNm, e.what()));
                code = ExitCode::infeasible;
            }
            csv.row({w_p / kNm, r, check / kNm});
            if (opts.log) {
                *opts.log << fmt::format("w_p = {:.2f} nm: R = {:.6g}\n", w_p / kNm, r);
            }
        }
    }
    manifest.output(path);
    if (code != ExitCode::ok) manifest.status("infeasible");
    if (opts.plot_script) {
        const auto script = opts.out_dir / fmt::format("plot_design_{}.gp", tname);
        write_plot_script(script, cfg.digest,
                          fmt::format("set logscale y\nset xlabel 'w_p (nm)'\nset ylabel 'R'\n"
                                      "plot '{0}' using 1:2 with linespoints\n",
                                      path.filename().string()));
        manifest.output(script);
    }
    manifest.write(opts.out_dir);
    return code;
}

}  // namespace slap
