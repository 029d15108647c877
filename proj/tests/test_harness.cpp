#include "sobkan/harness.hpp"

#include "sobkan/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sobkan;

namespace {

std::string tiny_config(const std::string& out_dir) {
    return R"({
  "seed": 42,
  "workers": 2,
  "out_dir": ")" + out_dir + R"(",
  "spaces": [
    {"name": "c", "kind": "circle", "n": 64},
    {"name": "g", "kind": "gauss_line", "n": 256, "half_width": 10.0}
  ],
  "families": [
    {"name": "trig", "space": "c", "type": "trig", "amplitudes": [0.3, 0.6], "frequencies": [1, 2]},
    {"name": "gr", "space": "g", "type": "gaussian_ratio", "means": [0.3], "sigmas": [1.0]}
  ],
  "checkers": [
    {"id": "hll_sqrt2", "families": ["trig", "gr"]},
    {"id": "hll_general", "families": ["trig"]},
    {"id": "harnack", "spaces": ["c"], "cases": 5},
    {"id": "seq_bound", "a": [2.0], "alpha": [1.0], "k_max": 40}
  ]
})";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("not json", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"checkers":[{"id":"bogus"}]})", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(
                        R"({"spaces":[{"name":"c","kind":"circle","n":64}],
                            "checkers":[{"id":"hll_sqrt2","families":["missing"]}]})",
                        "t"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"tol_scale": -1})", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"spaces":[{"name":"x","kind":"moebius","n":8}]})", "t"),
                    ConfigError);

    // Checker/space kind mismatches are config errors at job construction.
    const auto cfg = parse_config_text(
        R"({"spaces":[{"name":"g","kind":"gauss_line","n":64,"half_width":10.0}],
            "checkers":[{"id":"harnack","spaces":["g"],"cases":1}]})",
        "t");
    std::ostringstream log;
    CHECK_THROWS_AS(run_suite(cfg, log), ConfigError);
}

TEST_CASE("empty checker list succeeds with an empty report") {
    auto cfg = parse_config_text(R"({"out_dir": "build_test_reports/empty"})", "t");
    std::ostringstream log;
    const auto outcome = run_suite(cfg, log);
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.rows.empty());
    CHECK(std::filesystem::exists(outcome.csv_path));
}

TEST_CASE("run_suite produces deterministic reports") {
    const auto cfg = parse_config_text(tiny_config("build_test_reports/det"), "t");
    std::ostringstream log;
    const auto first = run_suite(cfg, log);
    CHECK(first.exit_code == 0);
    CHECK(first.failures == 0);
    const std::string csv1 = slurp(first.csv_path);
    const std::string json1 = slurp(first.json_path);
    const auto second = run_suite(cfg, log);
    CHECK(slurp(second.csv_path) == csv1);
    CHECK(slurp(second.json_path) == json1);
    CHECK(csv1.find("hll_sqrt2") != std::string::npos);
    CHECK(csv1.find("seq_bound") != std::string::npos);

    CHECK(render_summary(first.json_path, log) == 0);
    CHECK(render_summary("/nonexistent.json", log) == 2);
}

TEST_CASE("refine study flags movement between grids") {
    const auto cfg = parse_config_text(tiny_config("build_test_reports/refine"), "t");
    std::ostringstream log;
    const std::vector<int> grids = {64, 128};
    const auto outcome = refine_study(cfg, grids, log);
    CHECK(outcome.exit_code == 0);
    bool found = false;
    for (const auto& row : outcome.rows)
        if (row.checker == "hll_general" && row.family == "trig" && row.n == 128) {
            found = true;
            CHECK(row.sup_ratio > 0.0);
            CHECK(row.sup_ratio <= 2.0);
        }
    CHECK(found);
    CHECK(outcome.movement.count("hll_general/trig") == 1);

    const std::vector<int> one = {64};
    CHECK_THROWS_AS(refine_study(cfg, one, log), ConfigError);
}

TEST_CASE("oracle crosscheck smoke run") {
    std::ostringstream log;
    const auto outcome = oracle_crosscheck(7, 10, "build_test_reports/oracle", log);
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.max_quantile_vs_lp <= 1e-6);
    CHECK(outcome.max_circle_vs_lp <= 1e-6);
    CHECK(outcome.max_sinkhorn_rel <= 1e-3);
}

TEST_CASE("tolerance scaling changes pass thresholds") {
    // With an absurdly tight scale the harnack slack checks still pass (the
    // inequality is strict), while scaling way up never flips a pass to fail.
    auto cfg = parse_config_text(tiny_config("build_test_reports/tol"), "t");
    cfg.tol_scale = 1e3;
    std::ostringstream log;
    const auto loose = run_suite(cfg, log);
    CHECK(loose.failures == 0);
}
