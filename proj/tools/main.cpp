#include "sobkan/errors.hpp"
#include "sobkan/harness.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

// Exit codes: 0 success, 1 check failure, 2 config error, 3 numerical failure.
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

sobkan::SuiteConfig load_with_overrides(const std::string& path, const std::string& out_dir,
                                        int workers, double tol_scale) {
    sobkan::SuiteConfig cfg = sobkan::load_config(path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (workers > 0) cfg.workers = workers;
    if (tol_scale > 0.0) cfg.tol_scale = tol_scale;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sobkan: numerical verification of Sobolev-Kantorovich inequalities "
                 "on discretized 1D model spaces"};
    app.require_subcommand(1);

    std::string config_path, out_dir, summary_path, grids_arg;
    int workers = 0;
    double tol_scale = 0.0;
    std::uint64_t seed = 7;
    int cases = 200;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "output directory for reports");
        cmd->add_option("--workers", workers, "worker thread count (0 = hardware)");
        cmd->add_option("--tol-scale", tol_scale, "scale factor for pass tolerances");
    };

    CLI::App* check = app.add_subcommand("check", "run a checker suite from a config file");
    check->add_option("config", config_path, "suite config file")->required();
    add_common(check);

    CLI::App* refine = app.add_subcommand("refine", "refinement study across grid sizes");
    refine->add_option("config", config_path, "suite config file")->required();
    refine->add_option("--grids", grids_arg, "comma-separated grid sizes, e.g. 256,512,1024")
        ->required();
    add_common(refine);

    CLI::App* oracle = app.add_subcommand("oracle", "cross-check transport solvers against the LP");
    oracle->add_option("--seed", seed, "random seed");
    oracle->add_option("--cases", cases, "number of random measure pairs");
    oracle->add_option("--out", out_dir, "output directory for reports");

    CLI::App* report = app.add_subcommand("report", "render a summary.json as a table");
    report->add_option("--summary", summary_path, "path to summary.json")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) {
            const auto cfg = load_with_overrides(config_path, out_dir, workers, tol_scale);
            return sobkan::run_suite(cfg, std::cerr).exit_code;
        }
        if (refine->parsed()) {
            std::vector<int> grids;
            std::stringstream ss(grids_arg);
            for (std::string tok; std::getline(ss, tok, ',');) {
                try {
                    grids.push_back(std::stoi(tok));
                } catch (const std::exception&) {
                    throw sobkan::ConfigError("--grids: '" + tok + "' is not an integer");
                }
            }
            const auto cfg = load_with_overrides(config_path, out_dir, workers, tol_scale);
            return sobkan::refine_study(cfg, grids, std::cerr).exit_code;
        }
        if (oracle->parsed()) {
            return sobkan::oracle_crosscheck(seed, cases, out_dir.empty() ? "reports" : out_dir,
                                             std::cerr)
                .exit_code;
        }
        if (report->parsed()) return sobkan::render_summary(summary_path, std::cout);
    } catch (const sobkan::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const sobkan::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
