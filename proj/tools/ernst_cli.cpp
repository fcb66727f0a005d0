// ernst: evaluate and verify theta-functional Ernst potentials.
//
//   ernst verify --config run.json
//   ernst eval   --config run.json --format csv --output field.csv --threads 8
//   ernst metric --config run.json --format json

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ernst/cli.hpp"

int main(int argc, char** argv)
{
    using namespace ernst::cli;

    CLI::App app{"Theta-functional Ernst potentials: evaluation and identity checks"};
    app.require_subcommand(1);

    std::string config_path, output_path, format;
    bool with_residuals = false;
    std::optional<double> fd_step;
    std::optional<int> quad_order;
    int threads = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--output", output_path, "output file (default stdout)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--with-residuals", with_residuals, "add conj_res and pde_res columns");
        sub->add_option("--fd-step", fd_step, "finite-difference step");
        sub->add_option("--quad-order", quad_order, "quadrature order (>= 16)");
        sub->add_option("--threads", threads, "worker threads; output does not depend on it");
    };
    auto* verify = app.add_subcommand("verify", "run the identity checks over the sample points");
    auto* eval = app.add_subcommand("eval", "evaluate E on the configured grid");
    auto* metric = app.add_subcommand("metric", "integrate A and k along the configured path");
    for (auto* sub : {verify, eval, metric}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (!format.empty()) cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
    if (with_residuals) cfg.with_residuals = true;
    if (fd_step) cfg.tol.fd_step = *fd_step;
    if (quad_order) cfg.quad_order = *quad_order;
    cfg.threads = threads;
    if (!output_path.empty()) cfg.output = output_path;

    std::ofstream file;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) {
            std::cerr << "cannot open " << cfg.output << " for writing\n";
            return 2;
        }
    }
    std::ostream& out = cfg.output.empty() ? std::cout : file;

    try {
        if (verify->parsed()) return cmd_verify(cfg, out, std::cerr);
        if (eval->parsed()) return cmd_eval(cfg, out, std::cerr);
        return cmd_metric(cfg, out, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
