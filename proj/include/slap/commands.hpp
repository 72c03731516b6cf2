#pragma once

// Subcommands of the slapsim tool. Each writes its tables into
// CommandOptions::out_dir together with a manifest_<subcommand>.json that
// records the configuration digest, derived quantities, timings and any
// per-row errors.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "slap/analytics.hpp"
#include "slap/config.hpp"

namespace slap {

inline constexpr const char* kToolName = "slapsim";
inline constexpr const char* kToolVersion = "1.0.0";

enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    runtime_failure = 3,
    infeasible = 4,
};

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    bool plot_script = false;
    bool refine = false;  ///< scan: double the grid until site probabilities settle
    ParallelOptions parallel;
    std::ostream* log = nullptr;  ///< human-readable summary; null to silence
};

/// Closed-form quantities for the configuration, as written by `analytic`.
nlohmann::json analytic_summary(const RunConfig& cfg);

ExitCode run_analytic(const RunConfig& cfg, const CommandOptions& opts);
ExitCode run_simulate(const RunConfig& cfg, double x, Protocol protocol, const CommandOptions& opts);
ExitCode run_scan(const RunConfig& cfg, Protocol protocol, const CommandOptions& opts);
ExitCode run_sweep(const RunConfig& cfg, std::span<const double> r_values, const CommandOptions& opts);
/// w_p_values empty means the configured w_p only.
ExitCode run_design(const RunConfig& cfg, double dx_target, Technique technique,
                    std::span<const double> w_p_values, const CommandOptions& opts);

/// CSV column sets, fixed so downstream tooling can rely on them.
const std::vector<std::string>& simulate_columns();
const std::vector<std::string>& scan_columns();
const std::vector<std::string>& sweep_columns();
const std::vector<std::string>& design_columns();

}  // namespace slap
