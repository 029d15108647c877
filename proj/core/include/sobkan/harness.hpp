#pragma once

#include "sobkan/inequalities.hpp"
#include "sobkan/measure.hpp"
#include "sobkan/semigroup.hpp"
#include "sobkan/space.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sobkan {

struct SpaceSpec {
    std::string name;
    std::string kind; // circle | gauss_line | weighted_line
    int n = 0;
    double half_width = 10.0;
    std::string potential = "double_well"; // weighted_line: double_well | zero | quadratic
    double v2_lower = 0.0;
    double dimension_param = 0.0; // 0 selects the kind's default
};

struct FamilySpec {
    std::string name;
    std::string space;
    std::string type; // trig | gaussian_ratio | bump | plateau | gaussian_bumps
    std::vector<double> amplitudes;
    std::vector<int> frequencies;
    std::vector<double> means;
    std::vector<double> sigmas;
    std::vector<double> kappas;
    double floor = 0.05;
    double height = 9.5;
    double fraction = 0.115;
    double steep = 60.0;
};

struct CheckerSpec {
    std::string id;
    std::vector<std::string> families; // density-driven checkers
    std::vector<std::string> spaces;   // profile-driven checkers (harnack etc.)
    std::vector<double> p_grid;
    std::vector<double> q_grid;
    std::vector<double> N_grid;
    std::vector<double> t_grid;
    std::vector<double> u_grid;
    std::vector<double> a_grid;
    std::vector<double> alpha_grid;
    double level_floor = -1.0; // checker-dependent default when negative
    int cases = 100;
    int k_max = 80;
};

struct SuiteConfig {
    int schema = 1;
    std::uint64_t seed = 1;
    int workers = 0; // 0 = hardware concurrency
    double tol_scale = 1.0;
    std::string out_dir = "reports";
    std::vector<SpaceSpec> spaces;
    std::vector<FamilySpec> families;
    std::vector<CheckerSpec> checkers;
    std::string source_path;
};

/// Parses and validates a JSON-structured config file; throws ConfigError
/// with field diagnostics on any problem.
SuiteConfig load_config(const std::string& path);
SuiteConfig parse_config_text(const std::string& text, const std::string& origin);

/// Spaces, families and cached semigroups realized from a config.
struct BuiltSuite {
    std::deque<Space1D> spaces; // deque keeps addresses stable
    std::map<std::string, const Space1D*> space_by_name;
    std::map<std::string, std::vector<Density>> family_by_name;
    std::map<const Space1D*, std::shared_ptr<Semigroup>> semigroup_by_space;
    std::map<const Space1D*, double> lambda_by_space;

    const Space1D& space(const std::string& name) const;
    const Semigroup& semigroup(const Space1D& space) const;
    double lambda(const Space1D& space) const;
};

BuiltSuite build_suite(const SuiteConfig& config);

struct ReportRow {
    std::string checker;
    std::string space;
    std::string family;
    int member = -1; // density index within the family, -1 when not density-driven
    std::string params;
    InequalityReport report;
};

struct RunOutcome {
    int exit_code = 0;
    std::size_t failures = 0;
    std::size_t numerical_errors = 0;
    std::vector<ReportRow> rows;
    std::string csv_path;
    std::string json_path;
};

/// Runs every configured checker over its families and parameter grids,
/// writes report.csv and summary.json under the config's out_dir, and maps
/// outcomes to exit codes (0 ok, 1 check failure, 3 numerical failure).
RunOutcome run_suite(const SuiteConfig& config, std::ostream& log);

struct RefineRow {
    std::string checker;
    std::string family;
    int n = 0;
    double sup_ratio = 0.0;
};

struct RefineOutcome {
    int exit_code = 0;
    std::vector<RefineRow> rows;
    /// "checker/family" keys whose sup moved more than 2% between the two
    /// largest grids.
    std::vector<std::string> flagged;
    std::map<std::string, double> movement; // relative movement per key
    std::string csv_path;
    std::string json_path;
};

/// Re-runs the constant-free checkers across grid sizes and reports the
/// stability of the family-sup ratios.
RefineOutcome refine_study(const SuiteConfig& config, std::span<const int> n_list,
                           std::ostream& log);

struct OracleOutcome {
    int exit_code = 0;
    int cases = 0;
    double max_quantile_vs_lp = 0.0;
    double max_circle_vs_lp = 0.0;
    double max_sinkhorn_rel = 0.0;
    std::string csv_path;
    std::string json_path;
};

/// Seeded random small measure pairs: exact 1D solvers and Sinkhorn against
/// the LP ground truth.
OracleOutcome oracle_crosscheck(std::uint64_t seed, int cases, const std::string& out_dir,
                                std::ostream& log);

/// Renders a previously written summary.json as a human-readable table.
int render_summary(const std::string& json_path, std::ostream& out);

} // namespace sobkan
