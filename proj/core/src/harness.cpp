#include "sobkan/harness.hpp"

#include "sobkan/errors.hpp"
#include "sobkan/transport.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace sobkan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kKnownCheckers = {
    "hll_sqrt2",         "hll_general",        "sobolev_finite_n",
    "sobolev_infinite_n", "weak_type",          "orlicz",
    "entropy_regularization", "entropy_decay",  "harnack",
    "log_harnack",       "reverse_isoperimetry", "gradient_bound",
    "gaussian_weak_tail", "ou_difference",      "hopf_lax_duality",
    "seq_bound"};

const std::set<std::string> kDensityCheckers = {
    "hll_sqrt2",  "hll_general", "sobolev_finite_n", "sobolev_infinite_n",
    "weak_type",  "orlicz",      "entropy_regularization", "entropy_decay",
    "gaussian_weak_tail", "ou_difference", "hopf_lax_duality"};

const std::set<std::string> kSpaceCheckers = {"harnack", "log_harnack",
                                              "reverse_isoperimetry", "gradient_bound"};

const std::set<std::string> kRefinableCheckers = {
    "hll_sqrt2", "hll_general", "sobolev_finite_n", "sobolev_infinite_n",
    "weak_type", "orlicz",      "gradient_bound"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---- config parsing ---------------------------------------------------------

template <typename T>
T get_or(const json& node, const std::string& key, T fallback, const std::string& ctx) {
    if (!node.contains(key)) return fallback;
    try {
        return node.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(ctx + "." + key + ": " + e.what());
    }
}

template <typename T>
T require(const json& node, const std::string& key, const std::string& ctx) {
    if (!node.contains(key)) throw ConfigError(ctx + ": missing required field '" + key + "'");
    try {
        return node.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(ctx + "." + key + ": " + e.what());
    }
}

} // namespace

SuiteConfig parse_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text, nullptr, true, true); // allow // comments
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");

    SuiteConfig cfg;
    cfg.source_path = origin;
    cfg.schema = get_or<int>(root, "schema", 1, origin);
    cfg.seed = get_or<std::uint64_t>(root, "seed", 1, origin);
    cfg.workers = get_or<int>(root, "workers", 0, origin);
    cfg.tol_scale = get_or<double>(root, "tol_scale", 1.0, origin);
    cfg.out_dir = get_or<std::string>(root, "out_dir", "reports", origin);
    if (!(cfg.tol_scale > 0.0)) throw ConfigError(origin + ".tol_scale: must be positive");

    std::set<std::string> space_names;
    for (const auto& node : get_or<json>(root, "spaces", json::array(), origin)) {
        SpaceSpec s;
        const std::string ctx = origin + ".spaces[" + std::to_string(cfg.spaces.size()) + "]";
        s.name = require<std::string>(node, "name", ctx);
        s.kind = require<std::string>(node, "kind", ctx);
        s.n = require<int>(node, "n", ctx);
        s.half_width = get_or<double>(node, "half_width", 10.0, ctx);
        s.potential = get_or<std::string>(node, "potential", "double_well", ctx);
        s.v2_lower = get_or<double>(node, "v2_lower", 0.0, ctx);
        s.dimension_param = get_or<double>(node, "dimension_param", 0.0, ctx);
        if (s.kind != "circle" && s.kind != "gauss_line" && s.kind != "weighted_line")
            throw ConfigError(ctx + ".kind: unknown space kind '" + s.kind + "'");
        if (!space_names.insert(s.name).second)
            throw ConfigError(ctx + ".name: duplicate space name '" + s.name + "'");
        cfg.spaces.push_back(std::move(s));
    }

    std::set<std::string> family_names;
    for (const auto& node : get_or<json>(root, "families", json::array(), origin)) {
        FamilySpec f;
        const std::string ctx = origin + ".families[" + std::to_string(cfg.families.size()) + "]";
        f.name = require<std::string>(node, "name", ctx);
        f.space = require<std::string>(node, "space", ctx);
        f.type = require<std::string>(node, "type", ctx);
        f.amplitudes = get_or<std::vector<double>>(node, "amplitudes", {}, ctx);
        f.frequencies = get_or<std::vector<int>>(node, "frequencies", {}, ctx);
        f.means = get_or<std::vector<double>>(node, "means", {}, ctx);
        f.sigmas = get_or<std::vector<double>>(node, "sigmas", {}, ctx);
        f.kappas = get_or<std::vector<double>>(node, "kappas", {}, ctx);
        f.floor = get_or<double>(node, "floor", 0.05, ctx);
        f.height = get_or<double>(node, "height", 9.5, ctx);
        f.fraction = get_or<double>(node, "fraction", 0.115, ctx);
        f.steep = get_or<double>(node, "steep", 60.0, ctx);
        if (!space_names.count(f.space))
            throw ConfigError(ctx + ".space: unknown space '" + f.space + "'");
        if (f.type != "trig" && f.type != "gaussian_ratio" && f.type != "bump" &&
            f.type != "plateau" && f.type != "gaussian_bumps")
            throw ConfigError(ctx + ".type: unknown family type '" + f.type + "'");
        if (!family_names.insert(f.name).second)
            throw ConfigError(ctx + ".name: duplicate family name '" + f.name + "'");
        cfg.families.push_back(std::move(f));
    }

    for (const auto& node : get_or<json>(root, "checkers", json::array(), origin)) {
        CheckerSpec c;
        const std::string ctx = origin + ".checkers[" + std::to_string(cfg.checkers.size()) + "]";
        c.id = require<std::string>(node, "id", ctx);
        if (!kKnownCheckers.count(c.id))
            throw ConfigError(ctx + ".id: unknown checker '" + c.id + "'");
        c.families = get_or<std::vector<std::string>>(node, "families", {}, ctx);
        c.spaces = get_or<std::vector<std::string>>(node, "spaces", {}, ctx);
        c.p_grid = get_or<std::vector<double>>(node, "p", {}, ctx);
        c.q_grid = get_or<std::vector<double>>(node, "q", {}, ctx);
        c.N_grid = get_or<std::vector<double>>(node, "N", {}, ctx);
        c.t_grid = get_or<std::vector<double>>(node, "t", {}, ctx);
        c.u_grid = get_or<std::vector<double>>(node, "u", {}, ctx);
        c.a_grid = get_or<std::vector<double>>(node, "a", {}, ctx);
        c.alpha_grid = get_or<std::vector<double>>(node, "alpha", {}, ctx);
        c.level_floor = get_or<double>(node, "level_floor", -1.0, ctx);
        c.cases = get_or<int>(node, "cases", 100, ctx);
        c.k_max = get_or<int>(node, "k_max", 80, ctx);
        for (const auto& fam : c.families)
            if (!family_names.count(fam))
                throw ConfigError(ctx + ".families: unknown family '" + fam + "'");
        for (const auto& sp : c.spaces)
            if (!space_names.count(sp))
                throw ConfigError(ctx + ".spaces: unknown space '" + sp + "'");
        if (kDensityCheckers.count(c.id) && c.families.empty())
            throw ConfigError(ctx + ": checker '" + c.id + "' needs at least one family");
        if (kSpaceCheckers.count(c.id) && c.spaces.empty())
            throw ConfigError(ctx + ": checker '" + c.id + "' needs at least one space");
        if (c.cases < 1) throw ConfigError(ctx + ".cases: must be positive");
        cfg.checkers.push_back(std::move(c));
    }
    return cfg;
}

SuiteConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

// ---- suite construction -----------------------------------------------------

namespace {

double potential_double_well(double x) { return 0.25 * x * x * x * x - 0.5 * x * x; }

Space1D realize_space(const SpaceSpec& spec) {
    if (spec.kind == "circle")
        return build_circle(spec.n, spec.dimension_param > 0.0 ? spec.dimension_param : 1.0);
    if (spec.kind == "gauss_line") return build_gauss_line(spec.n, spec.half_width);
    std::function<double(double)> V;
    double v2 = spec.v2_lower;
    if (spec.potential == "double_well") {
        V = potential_double_well;
        if (v2 == 0.0) v2 = -1.0; // V'' = 3x^2 - 1 >= -1
    } else if (spec.potential == "zero") {
        V = [](double) { return 0.0; };
    } else if (spec.potential == "quadratic") {
        V = [](double x) { return 0.5 * x * x; };
        if (v2 == 0.0) v2 = 1.0;
    } else {
        throw ConfigError("space '" + spec.name + "': unknown potential '" + spec.potential + "'");
    }
    const double dim = spec.dimension_param > 0.0 ? spec.dimension_param
                                                  : std::numeric_limits<double>::infinity();
    return build_weighted_line(spec.n, spec.half_width, V, v2, dim);
}

std::vector<Density> realize_family(const FamilySpec& spec, const Space1D& space) {
    if (spec.type == "trig") return family_trig(space, spec.amplitudes, spec.frequencies);
    if (spec.type == "gaussian_ratio")
        return family_gaussian_ratio(space, spec.means, spec.sigmas);
    if (spec.type == "bump") {
        // Spiked circle density: floor + exp(kappa (cos theta - 1)).
        std::vector<Density> out;
        for (double kappa : spec.kappas)
            out.push_back(density_from_fn(space, [&](double th) {
                return spec.floor + std::exp(kappa * (std::cos(th) - 1.0));
            }));
        return out;
    }
    if (spec.type == "plateau") {
        // Smoothed high plateau over a fraction of the circle.
        const double a_half = std::numbers::pi * spec.fraction;
        std::vector<Density> out;
        out.push_back(density_from_fn(space, [&](double th) {
            const double s = 1.0 / (1.0 + std::exp(-spec.steep * (std::cos(th) - std::cos(a_half))));
            return spec.floor + (spec.height - spec.floor) * s;
        }));
        return out;
    }
    if (spec.type == "gaussian_bumps") {
        // Mixtures of Gaussian bumps for the weighted-line spaces.
        std::vector<Density> out;
        for (double m : spec.means)
            for (double s : spec.sigmas)
                out.push_back(density_from_fn(space, [&](double x) {
                    return 0.05 + std::exp(-0.5 * (x - m) * (x - m) / (s * s)) +
                           0.5 * std::exp(-0.5 * (x + m) * (x + m) / (s * s));
                }));
        return out;
    }
    throw ConfigError("family '" + spec.name + "': unknown type");
}

double estimate_lambda(const Space1D& space) {
    if (space.kind == SpaceKind::Circle) return 1.0;
    if (space.size() <= 1024)
        return Semigroup(space, SemigroupEngine::MatrixExp).spectral_gap();
    // Gap of the same measure on a coarser grid (dense eigensolve cap).
    if (space.kind == SpaceKind::GaussLine)
        return Semigroup(build_gauss_line(1024, *space.truncation), SemigroupEngine::MatrixExp)
            .spectral_gap();
    throw ConfigError("weighted line spaces are capped at n = 1024 for spectral estimates");
}

} // namespace

const Space1D& BuiltSuite::space(const std::string& name) const {
    auto it = space_by_name.find(name);
    if (it == space_by_name.end()) throw ConfigError("unknown space '" + name + "'");
    return *it->second;
}

const Semigroup& BuiltSuite::semigroup(const Space1D& sp) const {
    return *semigroup_by_space.at(&sp);
}

double BuiltSuite::lambda(const Space1D& sp) const { return lambda_by_space.at(&sp); }

BuiltSuite build_suite(const SuiteConfig& config) {
    BuiltSuite suite;
    for (const auto& spec : config.spaces) {
        suite.spaces.push_back(realize_space(spec));
        suite.space_by_name[spec.name] = &suite.spaces.back();
    }
    for (const auto& spec : config.families) {
        const Space1D& sp = suite.space(spec.space);
        suite.family_by_name[spec.name] = realize_family(spec, sp);
    }

    // Semigroups (and the dense spectral estimates behind lambda) are built
    // only for the spaces the configured checkers actually flow on.
    const std::set<std::string> semigroup_users = {"entropy_regularization", "entropy_decay",
                                                   "harnack", "log_harnack",
                                                   "reverse_isoperimetry", "gradient_bound"};
    std::set<const Space1D*> needs_semigroup;
    std::set<const Space1D*> needs_lambda;
    auto family_space = [&](const std::string& fam) -> const Space1D* {
        for (const auto& f : config.families)
            if (f.name == fam) return &suite.space(f.space);
        return nullptr;
    };
    for (const auto& checker : config.checkers) {
        if (!semigroup_users.count(checker.id)) continue;
        for (const auto& sp : checker.spaces) needs_semigroup.insert(&suite.space(sp));
        for (const auto& fam : checker.families)
            if (const Space1D* sp = family_space(fam)) needs_semigroup.insert(sp);
        if (checker.id == "entropy_decay")
            for (const auto& fam : checker.families)
                if (const Space1D* sp = family_space(fam)) needs_lambda.insert(sp);
    }
    for (const Space1D* sp : needs_semigroup)
        suite.semigroup_by_space[sp] = std::make_shared<Semigroup>(Semigroup::natural_for(*sp));
    for (const Space1D* sp : needs_lambda) suite.lambda_by_space[sp] = estimate_lambda(*sp);
    return suite;
}

// ---- job construction -------------------------------------------------------

namespace {

std::uint64_t mix_seed(std::uint64_t seed, const std::string& tag, int index) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ull;
    for (char c : tag) h = (h ^ static_cast<std::uint64_t>(c)) * 0x100000001b3ull;
    h ^= static_cast<std::uint64_t>(index) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

// Random strictly positive circle profile (trig polynomial, positive as a
// function, not just at the nodes).
std::vector<double> random_positive_profile(const Space1D& space, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> out(space.size(), 1.0);
    if (space.kind == SpaceKind::Circle) {
        double a1 = unif(rng), a2 = unif(rng), a3 = unif(rng);
        double ph1 = std::numbers::pi * unif(rng), ph2 = std::numbers::pi * unif(rng),
               ph3 = std::numbers::pi * unif(rng);
        const double scale = 0.85 / (std::abs(a1) + std::abs(a2) + std::abs(a3) + 1e-12);
        a1 *= scale;
        a2 *= scale;
        a3 *= scale;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double th = space.nodes[i];
            out[i] = 1.0 + a1 * std::cos(th + ph1) + a2 * std::cos(2.0 * th + ph2) +
                     a3 * std::cos(3.0 * th + ph3);
        }
    } else {
        std::uniform_real_distribution<double> center(-2.0, 2.0);
        std::uniform_real_distribution<double> width(0.5, 1.5);
        const double c1 = center(rng), c2 = center(rng), s1 = width(rng), s2 = width(rng);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double x = space.nodes[i];
            out[i] = 0.2 + std::exp(-0.5 * (x - c1) * (x - c1) / (s1 * s1)) +
                     0.7 * std::exp(-0.5 * (x - c2) * (x - c2) / (s2 * s2));
        }
    }
    return out;
}

std::vector<double> random_unit_interval_profile(const Space1D& space, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> out(space.size());
    if (space.kind == SpaceKind::Circle) {
        const double steep = 2.0 + 3.0 * std::abs(unif(rng));
        const double phase = std::numbers::pi * unif(rng);
        const double level = 0.6 * unif(rng);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = 1.0 / (1.0 + std::exp(-steep * (std::cos(space.nodes[i] + phase) - level)));
    } else {
        const double steep = 0.5 + 2.0 * std::abs(unif(rng));
        const double shift = 2.0 * unif(rng);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = 1.0 / (1.0 + std::exp(-steep * (space.nodes[i] - shift)));
    }
    return out;
}

struct Job {
    std::string checker;
    std::string space_name;
    std::string family;
    int member = -1;
    std::string params;
    std::function<InequalityReport()> run;
};

struct ParamString {
    std::string text;
    ParamString& add(const std::string& key, double v) {
        if (!text.empty()) text += ';';
        text += key + '=' + fmt6(v);
        return *this;
    }
    ParamString& add_int(const std::string& key, long v) {
        if (!text.empty()) text += ';';
        text += key + '=' + std::to_string(v);
        return *this;
    }
};

std::string space_of_family(const SuiteConfig& config, const std::string& family) {
    for (const auto& f : config.families)
        if (f.name == family) return f.space;
    throw ConfigError("unknown family '" + family + "'");
}

std::vector<double> default_grid(const std::vector<double>& grid, std::vector<double> fallback) {
    return grid.empty() ? fallback : grid;
}

std::vector<Job> make_jobs(const SuiteConfig& config, const BuiltSuite& suite) {
    std::vector<Job> jobs;

    // Space-kind compatibility is a config error, not a runtime one.
    for (const auto& spec : config.checkers) {
        if (spec.id == "harnack")
            for (const auto& sp : spec.spaces)
                if (suite.space(sp).kind != SpaceKind::Circle)
                    throw ConfigError("checker 'harnack' requires circle spaces, got '" + sp + "'");
        if (spec.id == "gaussian_weak_tail" || spec.id == "ou_difference")
            for (const auto& fam : spec.families)
                if (suite.space(space_of_family(config, fam)).kind != SpaceKind::GaussLine)
                    throw ConfigError("checker '" + spec.id + "' requires Gaussian-line families, got '" +
                                      fam + "'");
    }

    auto for_each_density = [&](const CheckerSpec& spec,
                                const std::function<void(const std::string&, const std::string&,
                                                         int, const Density&)>& fn) {
        for (const auto& fam_name : spec.families) {
            const auto& members = suite.family_by_name.at(fam_name);
            const std::string space_name = space_of_family(config, fam_name);
            for (std::size_t m = 0; m < members.size(); ++m)
                fn(space_name, fam_name, static_cast<int>(m), members[m]);
        }
    };

    for (const auto& spec : config.checkers) {
        const std::string& id = spec.id;

        if (id == "hll_sqrt2" || id == "hll_general") {
            for_each_density(spec, [&](const std::string& sp, const std::string& fam, int m,
                                       const Density& f) {
                jobs.push_back({id, sp, fam, m, "",
                                [&f, id] {
                                    return id == "hll_sqrt2" ? check_hll_sqrt2(f)
                                                             : check_hll_general(f);
                                }});
            });
        } else if (id == "sobolev_finite_n") {
            const auto ps = default_grid(spec.p_grid, {1.0});
            const auto qs = default_grid(spec.q_grid, {1.0});
            const auto Ns = default_grid(spec.N_grid, {1.0});
            for_each_density(spec, [&](const std::string& sp, const std::string& fam, int m,
                                       const Density& f) {
                for (double p : ps)
                    for (double q : qs)
                        for (double N : Ns)
                            jobs.push_back({id, sp, fam, m,
                                            ParamString().add("p", p).add("q", q).add("N", N).text,
                                            [&f, p, q, N] {
                                                return check_sobolev_finite_n(f, p, q, N);
                                            }});
            });
        } else if (id == "sobolev_infinite_n") {
            const auto qs = default_grid(spec.q_grid, {2.0});
            for_each_density(spec, [&](const std::string& sp, const std::string& fam, int m,
                                       const Density& f) {
                for (double q : qs)
                    jobs.push_back({id, sp, fam, m, ParamString().add("q", q).text,
                                    [&f, q] { return check_sobolev_infinite_n(f, q); }});
            });
        } else if (id == "weak_type") {
            const auto qs = default_grid(spec.q_grid, {2.0});
            const double floor = spec.level_floor > 0.0 ? spec.level_floor : 8.0;
            for_each_density(spec, [&](const std::string& sp, const std::string& fam, int m,
                                       const Density& f) {
                for (double q : qs)
                    jobs.push_back({id, sp, fam, m,
                                    ParamString().add("q", q).add("C", floor).text,
                                    [&f, q, floor] { return check_weak_type(f, q, floor); }});
            });
        } else if (id == "orlicz") {
            const auto qs = default_grid(spec.q_grid, {2.0});
            const double floor = spec.level_floor >= 0.0 ? spec.level_floor : 1.0;
            for_each_density(spec, [&](const std::string& sp, const std::string& fam, int m,
                                       const Density& f) {
                for (double q : qs)
                    jobs.push_back({id, sp, fam, m,
                                    ParamString().add("q", q).add("C", floor).text,
                                    [&f, q, floor] { return check_orlicz(f, q, floor); }});
            });
        } else if (id == "entropy_regularization") {
            const auto ts = default_grid(spec.t_grid, {0.1, 0.5, 1.0});
            for_each_density(spec, [&](const std::string& sp, const std::string& fam, int m,
                                       const Density& f) {
                const Space1D& space = f.space();
                EntropyRegMode mode = EntropyRegMode::CD0;
                if (space.kind == SpaceKind::GaussLine) mode = EntropyRegMode::Gauss;
                if (space.kind == SpaceKind::WeightedLine) mode = EntropyRegMode::NegK;
                const Semigroup& sg = suite.semigroup(space);
                for (double t : ts)
                    jobs.push_back({id, sp, fam, m, ParamString().add("t", t).text,
                                    [&f, t, mode, &sg] {
                                        return check_entropy_regularization(f, t, mode, sg);
                                    }});
            });
        } else if (id == "entropy_decay") {
            const auto ts = default_grid(spec.t_grid, {0.1, 0.5, 1.0});
            for_each_density(spec, [&](const std::string& sp, const std::string& fam, int m,
                                       const Density& f) {
                const Semigroup& sg = suite.semigroup(f.space());
                const double lambda = suite.lambda(f.space());
                for (double t : ts)
                    jobs.push_back({id, sp, fam, m,
                                    ParamString().add("t", t).add("lambda", lambda).text,
                                    [&f, t, lambda, &sg] {
                                        return check_entropy_decay(f, t, lambda, sg);
                                    }});
            });
        } else if (id == "gaussian_weak_tail") {
            const auto qs = default_grid(spec.q_grid, {1.0, 2.0});
            const auto us = default_grid(spec.u_grid, {8.0, 16.0, 32.0});
            const auto t_grid = geometric_t_grid(1e-3, 10.0, 60);
            for_each_density(spec, [&](const std::string& sp, const std::string& fam, int m,
                                       const Density& f) {
                for (double q : qs)
                    for (double u : us)
                        jobs.push_back({id, sp, fam, m,
                                        ParamString().add("q", q).add("u", u).text,
                                        [&f, q, u, t_grid] {
                                            return check_gaussian_weak_tail(f, q, u, t_grid);
                                        }});
            });
        } else if (id == "ou_difference") {
            const auto qs = default_grid(spec.q_grid, {1.0, 1.5, 2.0});
            const auto ts = default_grid(spec.t_grid, {0.05, 0.2, 1.0, 5.0});
            for_each_density(spec, [&](const std::string& sp, const std::string& fam, int m,
                                       const Density& f) {
                for (double q : qs)
                    for (double t : ts)
                        jobs.push_back({id, sp, fam, m,
                                        ParamString().add("q", q).add("t", t).text,
                                        [&f, q, t] { return check_ou_difference(f, q, t); }});
            });
        } else if (id == "hopf_lax_duality") {
            const auto ps = default_grid(spec.p_grid, {1.0, 2.0});
            for_each_density(spec, [&](const std::string& sp, const std::string& fam, int m,
                                       const Density& f) {
                for (int c = 0; c < spec.cases; ++c) {
                    for (double p : ps) {
                        jobs.push_back(
                            {id, sp, fam, m,
                             ParamString().add("p", p).add_int("case", c).text,
                             [&f, p, c, seed = config.seed] {
                                 std::mt19937_64 rng(mix_seed(seed, "hopf_lax_duality",
                                                              c * 31 + static_cast<int>(p)));
                                 std::uniform_real_distribution<double> unif(-1.0, 1.0);
                                 const Space1D& space = f.space();
                                 std::vector<double> phi(space.size());
                                 const double a = unif(rng), b = unif(rng), ph = unif(rng);
                                 for (std::size_t i = 0; i < phi.size(); ++i) {
                                     const double x = space.nodes[i];
                                     phi[i] = space.kind == SpaceKind::Circle
                                                  ? a * std::cos(x + ph) + b * std::sin(2.0 * x)
                                                  : a * std::tanh(x) + b * std::cos(x + ph);
                                 }
                                 const double eps = 0.05 + 1.95 * std::abs(unif(rng));
                                 return duality_gap_check(f, phi, eps, p);
                             }});
                    }
                }
            });
        } else if (id == "harnack" || id == "log_harnack" || id == "reverse_isoperimetry") {
            for (const auto& sp_name : spec.spaces) {
                const Space1D& space = suite.space(sp_name);
                const Semigroup& sg = suite.semigroup(space);
                for (int c = 0; c < spec.cases; ++c) {
                    jobs.push_back(
                        {id, sp_name, "", -1, ParamString().add_int("case", c).text,
                         [id, c, &space, &sg, seed = config.seed] {
                             std::mt19937_64 rng(mix_seed(seed, id, c));
                             std::uniform_real_distribution<double> unif(0.0, 1.0);
                             const double t = 0.05 + 0.95 * unif(rng);
                             const std::size_t i =
                                 static_cast<std::size_t>(unif(rng) * space.size()) % space.size();
                             const std::size_t j =
                                 static_cast<std::size_t>(unif(rng) * space.size()) % space.size();
                             if (id == "harnack") {
                                 const auto f = random_positive_profile(space, rng);
                                 return check_harnack(sg, f, t, i, j);
                             }
                             if (id == "log_harnack") {
                                 const auto g = random_positive_profile(space, rng);
                                 const double K = std::max(0.0, -space.curvature_lower);
                                 return check_log_harnack(sg, g, t, i, j, K);
                             }
                             const auto g = random_unit_interval_profile(space, rng);
                             return check_reverse_isoperimetry(sg, g, t);
                         }});
                }
            }
        } else if (id == "gradient_bound") {
            auto ts = spec.t_grid.empty() ? geometric_t_grid(0.01, 5.0, 13) : spec.t_grid;
            if (std::find(ts.begin(), ts.end(), 1.0) == ts.end()) ts.push_back(1.0);
            const auto qs = default_grid(spec.q_grid, {2.0});
            for (const auto& sp_name : spec.spaces) {
                const Space1D& space = suite.space(sp_name);
                const Semigroup& sg = suite.semigroup(space);
                for (double qc : qs) {
                    jobs.push_back({id, sp_name, "", -1, ParamString().add("qprime", qc).text,
                                    [&space, &sg, ts, qc] {
                                        std::vector<double> h(space.size());
                                        for (std::size_t i = 0; i < h.size(); ++i)
                                            h[i] = space.kind == SpaceKind::Circle
                                                       ? std::cos(space.nodes[i])
                                                       : space.nodes[i] / *space.truncation;
                                        return check_gradient_bound(sg, h, ts, qc);
                                    }});
                }
            }
        } else if (id == "seq_bound") {
            const auto as = default_grid(spec.a_grid, {1.5, 2.0, 4.0});
            const auto alphas = default_grid(spec.alpha_grid, {0.5, 1.0, 2.0});
            for (double a : as)
                for (double alpha : alphas)
                    jobs.push_back(
                        {id, "", "", -1,
                         ParamString().add("a", a).add("alpha", alpha).add_int("k_max", spec.k_max)
                             .text,
                         [a, alpha, k_max = spec.k_max] {
                             const auto res = seq_bound_constant(a, alpha, k_max);
                             InequalityReport rep;
                             rep.name = "seq_bound";
                             rep.lhs = res.constant;
                             rep.rhs = res.final_difference;
                             rep.ratio = res.final_difference;
                             rep.notes = "lhs = bound constant, rhs/ratio = last successive "
                                         "difference of the ratio sequence";
                             return rep;
                         }});
        }
    }
    return jobs;
}

// Base tolerance per explicit-constant checker, used when tol_scale != 1.
struct TolRule {
    enum Kind { RatioBound, SlackBound } kind;
    double base;
};

const std::map<std::string, TolRule> kTolRules = {
    {"hll_sqrt2", {TolRule::RatioBound, 1e-3}},
    {"entropy_regularization", {TolRule::RatioBound, 1e-3}},
    {"gaussian_weak_tail", {TolRule::RatioBound, 1e-3}},
    {"ou_difference", {TolRule::RatioBound, 1e-3}},
    {"harnack", {TolRule::RatioBound, 1e-6}},
    {"log_harnack", {TolRule::SlackBound, 1e-6}},
    {"reverse_isoperimetry", {TolRule::SlackBound, 1e-6}},
    {"hopf_lax_duality", {TolRule::SlackBound, 1e-9}},
};

void apply_tol_scale(ReportRow& row, double scale) {
    if (scale == 1.0 || !row.report.pass.has_value()) return;
    auto it = kTolRules.find(row.checker);
    if (it == kTolRules.end()) return;
    const TolRule& rule = it->second;
    if (rule.kind == TolRule::RatioBound)
        row.report.pass = row.report.ratio <= 1.0 + rule.base * scale;
    else
        row.report.pass = row.report.lhs <= row.report.rhs + rule.base * scale;
}

// ---- execution & reporting --------------------------------------------------

struct ExecutionResult {
    std::vector<ReportRow> rows;
    std::size_t numerical_errors = 0;
};

ExecutionResult execute_jobs(const std::vector<Job>& jobs, int workers, double tol_scale) {
    ExecutionResult result;
    result.rows.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> numerical{0};

    auto work = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            ReportRow row;
            row.checker = jobs[k].checker;
            row.space = jobs[k].space_name;
            row.family = jobs[k].family;
            row.member = jobs[k].member;
            row.params = jobs[k].params;
            try {
                row.report = jobs[k].run();
            } catch (const NumericalError& e) {
                row.report.name = jobs[k].checker;
                row.report.notes = std::string("numerical failure: ") + e.what();
                row.report.pass = false;
                numerical.fetch_add(1);
            } catch (const std::exception& e) {
                row.report.name = jobs[k].checker;
                row.report.notes = std::string("error: ") + e.what();
                row.report.pass = false;
            }
            apply_tol_scale(row, tol_scale);
            result.rows[k] = std::move(row);
        }
    };

    int pool = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    if (pool < 1) pool = 1;
    pool = std::min<int>(pool, std::max<std::size_t>(jobs.size(), 1));
    if (pool == 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (int i = 0; i < pool; ++i) threads.emplace_back(work);
        for (auto& th : threads) th.join();
    }
    result.numerical_errors = numerical.load();
    return result;
}

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    out << "# sobkan-report schema=1\n";
    out << "checker,space,family,member,params,lhs,rhs,ratio,pass,grid_n\n";
    for (const auto& row : rows) {
        out << row.checker << ',' << row.space << ',' << row.family << ',' << row.member << ','
            << row.params << ',' << fmt(row.report.lhs) << ',' << fmt(row.report.rhs) << ','
            << fmt(row.report.ratio) << ',';
        if (row.report.pass.has_value()) out << (*row.report.pass ? 1 : 0);
        out << ',' << row.report.grid_n << '\n';
    }
}

json summary_json(const SuiteConfig& config, const std::vector<ReportRow>& rows,
                  std::size_t failures, std::size_t numerical_errors) {
    // Family-sup of the ratio per (checker, family) with the argmax case.
    std::map<std::string, json> groups;
    for (const auto& row : rows) {
        const std::string key = row.checker + "/" + (row.family.empty() ? row.space : row.family);
        auto& g = groups[key];
        if (g.is_null()) {
            g = json{{"checker", row.checker},
                     {"family", row.family.empty() ? row.space : row.family},
                     {"rows", 0},
                     {"failures", 0},
                     {"sup_ratio", 0.0},
                     {"argmax", nullptr}};
        }
        g["rows"] = g["rows"].get<int>() + 1;
        if (row.report.pass.has_value() && !*row.report.pass)
            g["failures"] = g["failures"].get<int>() + 1;
        const double ratio = std::isfinite(row.report.ratio) ? row.report.ratio : -1.0;
        if (ratio > g["sup_ratio"].get<double>() || g["argmax"].is_null()) {
            g["sup_ratio"] = std::max(g["sup_ratio"].get<double>(), ratio);
            g["argmax"] = json{{"member", row.member},
                               {"params", row.params},
                               {"lhs", row.report.lhs},
                               {"rhs", row.report.rhs},
                               {"notes", row.report.notes}};
        }
    }
    json failures_list = json::array();
    for (const auto& row : rows)
        if (row.report.pass.has_value() && !*row.report.pass)
            failures_list.push_back(json{{"checker", row.checker},
                                         {"space", row.space},
                                         {"family", row.family},
                                         {"member", row.member},
                                         {"params", row.params},
                                         {"lhs", row.report.lhs},
                                         {"rhs", row.report.rhs},
                                         {"ratio", row.report.ratio},
                                         {"notes", row.report.notes}});

    json out;
    out["schema_version"] = 1;
    out["config"] = config.source_path;
    out["seed"] = config.seed;
    out["tol_scale"] = config.tol_scale;
    out["environment"] = json{{"tool", "sobkan"}, {"version", "0.1.0"}};
    out["groups"] = json::array();
    for (auto& [key, g] : groups) out["groups"].push_back(g);
    out["failures"] = failures_list;
    out["failure_count"] = failures;
    out["numerical_error_count"] = numerical_errors;
    return out;
}

} // namespace

RunOutcome run_suite(const SuiteConfig& config, std::ostream& log) {
    const BuiltSuite suite = build_suite(config);
    const auto jobs = make_jobs(config, suite);
    log << "sobkan: running " << jobs.size() << " checks\n";

    auto exec = execute_jobs(jobs, config.workers, config.tol_scale);

    RunOutcome outcome;
    outcome.rows = std::move(exec.rows);
    outcome.numerical_errors = exec.numerical_errors;
    for (const auto& row : outcome.rows)
        if (row.report.pass.has_value() && !*row.report.pass) ++outcome.failures;

    fs::create_directories(config.out_dir);
    outcome.csv_path = (fs::path(config.out_dir) / "report.csv").string();
    outcome.json_path = (fs::path(config.out_dir) / "summary.json").string();
    write_report_csv(outcome.csv_path, outcome.rows);
    {
        std::ofstream out(outcome.json_path, std::ios::trunc);
        out << summary_json(config, outcome.rows, outcome.failures, outcome.numerical_errors)
                   .dump(2)
            << '\n';
    }

    if (outcome.numerical_errors > 0)
        outcome.exit_code = 3;
    else if (outcome.failures > 0)
        outcome.exit_code = 1;
    log << "sobkan: " << outcome.failures << " failures, " << outcome.numerical_errors
        << " numerical errors -> exit " << outcome.exit_code << '\n';
    for (const auto& row : outcome.rows)
        if (row.report.pass.has_value() && !*row.report.pass)
            log << "  FAIL " << row.checker << ' ' << row.family << ' ' << row.params
                << " ratio=" << row.report.ratio << '\n';
    return outcome;
}

RefineOutcome refine_study(const SuiteConfig& config, std::span<const int> n_list,
                           std::ostream& log) {
    if (n_list.size() < 2) throw ConfigError("refine_study: need at least two grid sizes");

    RefineOutcome outcome;
    std::map<std::string, std::map<int, double>> sups; // key -> n -> sup

    for (int n : n_list) {
        SuiteConfig scaled = config;
        for (auto& sp : scaled.spaces) sp.n = n;
        scaled.checkers.erase(
            std::remove_if(scaled.checkers.begin(), scaled.checkers.end(),
                           [](const CheckerSpec& c) { return !kRefinableCheckers.count(c.id); }),
            scaled.checkers.end());
        const BuiltSuite suite = build_suite(scaled);
        const auto jobs = make_jobs(scaled, suite);
        auto exec = execute_jobs(jobs, scaled.workers, scaled.tol_scale);
        log << "refine: n=" << n << " -> " << jobs.size() << " checks\n";
        std::map<std::string, double> local;
        for (const auto& row : exec.rows) {
            const std::string key =
                row.checker + "/" + (row.family.empty() ? row.space : row.family);
            double& s = local[key];
            if (std::isfinite(row.report.ratio)) s = std::max(s, row.report.ratio);
        }
        for (const auto& [key, sup] : local) sups[key][n] = sup;
    }

    const int n_prev = n_list[n_list.size() - 2];
    const int n_last = n_list[n_list.size() - 1];
    for (const auto& [key, by_n] : sups) {
        for (const auto& [n, sup] : by_n) {
            auto slash = key.find('/');
            outcome.rows.push_back(RefineRow{key.substr(0, slash), key.substr(slash + 1), n, sup});
        }
        const double prev = by_n.at(n_prev);
        const double last = by_n.at(n_last);
        double movement = 0.0;
        if (prev == 0.0 && last == 0.0)
            movement = 0.0;
        else if (prev == 0.0)
            movement = std::numeric_limits<double>::infinity();
        else
            movement = std::abs(last - prev) / prev;
        outcome.movement[key] = movement;
        if (movement > 0.02) outcome.flagged.push_back(key);
    }

    fs::create_directories(config.out_dir);
    outcome.csv_path = (fs::path(config.out_dir) / "refine.csv").string();
    outcome.json_path = (fs::path(config.out_dir) / "refine.json").string();
    {
        std::ofstream out(outcome.csv_path, std::ios::trunc);
        out << "# sobkan-refine schema=1\n";
        out << "checker,family,n,sup_ratio\n";
        for (const auto& row : outcome.rows)
            out << row.checker << ',' << row.family << ',' << row.n << ',' << fmt(row.sup_ratio)
                << '\n';
    }
    {
        json j;
        j["schema_version"] = 1;
        j["grids"] = std::vector<int>(n_list.begin(), n_list.end());
        j["movement"] = outcome.movement;
        j["flagged"] = outcome.flagged;
        std::ofstream out(outcome.json_path, std::ios::trunc);
        out << j.dump(2) << '\n';
    }
    for (const auto& key : outcome.flagged)
        log << "refine: FLAG " << key << " moved " << outcome.movement[key] * 100.0 << "%\n";
    return outcome;
}

OracleOutcome oracle_crosscheck(std::uint64_t seed, int cases, const std::string& out_dir,
                                std::ostream& log) {
    if (cases < 1) throw ConfigError("oracle_crosscheck: need at least one case");
    OracleOutcome outcome;
    outcome.cases = cases;

    fs::create_directories(out_dir);
    outcome.csv_path = (fs::path(out_dir) / "oracle.csv").string();
    outcome.json_path = (fs::path(out_dir) / "oracle.json").string();
    std::ofstream csv(outcome.csv_path, std::ios::trunc);
    csv << "# sobkan-oracle schema=1\n";
    csv << "case,kind,n,p,lp,quantile_or_shift,sinkhorn,abs_err,sinkhorn_rel_err\n";

    const int circle_sizes[] = {8, 12, 16, 20, 24};
    const int line_sizes[] = {16, 20, 24, 28, 32};

    for (int c = 0; c < cases; ++c) {
        std::mt19937_64 rng(mix_seed(seed, "oracle", c));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const bool circle = (c % 2 == 0);
        const int n = circle ? circle_sizes[c / 2 % 5] : line_sizes[c / 2 % 5];
        const Space1D space = circle
                                  ? build_circle(n)
                                  : build_weighted_line(n, 1.0, [](double) { return 0.0; }, 0.0);

        std::vector<double> a(space.size()), b(space.size());
        for (auto& v : a) v = unif(rng) * unif(rng) + 1e-6;
        for (auto& v : b) v = unif(rng) * unif(rng) + 1e-6;
        if (c % 3 == 0)
            for (std::size_t i = 0; i < a.size(); ++i)
                if (unif(rng) < 0.4) a[i] = 0.0;
        if (c % 10 == 9) b = a; // identical-measure case
        double ta = 0.0, tb = 0.0;
        for (double v : a) ta += v;
        for (double v : b) tb += v;
        if (ta == 0.0) {
            a[0] = 1.0;
            ta = 1.0;
        }
        for (auto& v : a) v /= ta;
        for (auto& v : b) v /= tb;

        for (double p : {1.0, 2.0}) {
            const auto lp = wp_lp_oracle(p, a, b, space, false);
            const auto fast = circle ? wp_circle(p, a, b, space)
                                     : wp_quantile_line(p, a, b, space);
            const auto sink = wp_sinkhorn(p, a, b, space);
            const double abs_err = std::abs(fast.value - lp.value);
            const double rel_err =
                std::abs(sink.value - lp.value) / std::max(lp.value, 1e-9);
            if (circle)
                outcome.max_circle_vs_lp = std::max(outcome.max_circle_vs_lp, abs_err);
            else
                outcome.max_quantile_vs_lp = std::max(outcome.max_quantile_vs_lp, abs_err);
            outcome.max_sinkhorn_rel = std::max(outcome.max_sinkhorn_rel, rel_err);
            csv << c << ',' << (circle ? "circle" : "line") << ',' << n << ',' << p << ','
                << fmt(lp.value) << ',' << fmt(fast.value) << ',' << fmt(sink.value) << ','
                << fmt(abs_err) << ',' << fmt(rel_err) << '\n';
        }
    }

    const bool ok = outcome.max_quantile_vs_lp <= 1e-6 && outcome.max_circle_vs_lp <= 1e-6 &&
                    outcome.max_sinkhorn_rel <= 1e-3;
    outcome.exit_code = ok ? 0 : 1;
    {
        json j;
        j["schema_version"] = 1;
        j["cases"] = cases;
        j["max_quantile_vs_lp"] = outcome.max_quantile_vs_lp;
        j["max_circle_vs_lp"] = outcome.max_circle_vs_lp;
        j["max_sinkhorn_rel"] = outcome.max_sinkhorn_rel;
        j["pass"] = ok;
        std::ofstream out(outcome.json_path, std::ios::trunc);
        out << j.dump(2) << '\n';
    }
    log << "oracle: quantile " << outcome.max_quantile_vs_lp << ", circle "
        << outcome.max_circle_vs_lp << ", sinkhorn rel " << outcome.max_sinkhorn_rel
        << " -> exit " << outcome.exit_code << '\n';
    return outcome;
}

int render_summary(const std::string& json_path, std::ostream& out) {
    std::ifstream in(json_path);
    if (!in) {
        out << "report: cannot open " << json_path << '\n';
        return 2;
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        out << "report: " << e.what() << '\n';
        return 2;
    }
    out << "summary of " << j.value("config", std::string("?")) << " (seed "
        << j.value("seed", 0ull) << ")\n";
    out << "checker                    family            rows  fails  sup_ratio\n";
    for (const auto& g : j.value("groups", json::array())) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-26s %-16s %5d  %5d  %.6g",
                      g.value("checker", std::string()).c_str(),
                      g.value("family", std::string()).c_str(), g.value("rows", 0),
                      g.value("failures", 0), g.value("sup_ratio", 0.0));
        out << line << '\n';
    }
    out << "failures: " << j.value("failure_count", 0) << ", numerical errors: "
        << j.value("numerical_error_count", 0) << '\n';
    return 0;
}

} // namespace sobkan
