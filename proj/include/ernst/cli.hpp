#pragma once

// Configuration and subcommands of the ernst command-line tool.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ernst/potential.hpp"

namespace ernst::cli {

// Any problem with the configuration itself; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

struct GridSpec {
    double rho_min = 0.5;
    double rho_max = 1.5;
    double zeta_min = -0.5;
    double zeta_max = 0.5;
    int rho_count = 1;
    int zeta_count = 1;

    // rho-major, zeta-minor
    std::vector<WorldPoint> points() const;
};

struct Tolerances {
    double series_eps = 1e-12;
    double identity_tol = 1e-8;
    double pde_tol = 1e-4;
    std::optional<double> fd_step;
    double rho_min = 1e-3;
    double sep_min = 1e-6;
};

struct RunConfig {
    SolutionSpec spec;
    std::optional<GridSpec> grid;
    std::vector<WorldPoint> samples;
    std::vector<WorldPoint> path;
    std::optional<double> path_step;
    Tolerances tol;
    int quad_order = 64;
    OutputFormat format = OutputFormat::csv;
    bool with_residuals = false;
    int threads = 1;
    std::string output;  // empty means stdout

    EvalOptions eval_options() const;
    double fd_step(const WorldPoint& pt) const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Exit codes: 0 success, 1 failed check or evaluation error, 2 configuration error.
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_metric(const RunConfig& cfg, std::ostream& out, std::ostream& err);

std::string format_double(double v);

}  // namespace ernst::cli
