#pragma once

// Command-line front end. Subcommands:
//   slope-curve      bias-slope h(p, p, alpha) series plus the 4p(1-p) bound
//   mse-diff-curve   first-order MSE difference D(delta) for one setting
//   boundary-curve   delta*(p) decision boundary for fixed (alpha, n)
//   simulate         Monte Carlo vs analytic moments for one setting
//   verify           full oracle cross-check over the default grid
//   estimate         apply either estimator to user-supplied counts
//
// Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 validation/computation error.
//
// Seed resolution: --seed flag if given, else DRIFTCORRECT_SEED environment
// variable, else 42. The effective seed is echoed in the output metadata.
//
// Grid conventions: closed parameter ranges ([p-min, p-max]) are sampled at
// steps+1 inclusive points; open ranges (delta in (-alpha, 1-alpha), p in
// (0.5, 1)) are sampled at `steps` interior points lo + i*(hi-lo)/(steps+1),
// so endpoints that would be invalid inputs are never produced.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "driftcorrect/boundary.hpp"
#include "driftcorrect/errors.hpp"
#include "driftcorrect/estimators.hpp"
#include "driftcorrect/model.hpp"
#include "driftcorrect/moments.hpp"
#include "driftcorrect/output.hpp"
#include "driftcorrect/simulate.hpp"
#include "driftcorrect/verify.hpp"
#include "driftcorrect/version.hpp"

namespace driftcorrect::cli {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& tok, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(what + ": '" + tok + "' is not a number");
    }
}

inline long long parse_int(const std::string& tok, const std::string& what) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(what + ": '" + tok + "' is not an integer");
    }
}

inline std::string fmt_g(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return std::string(buf);
}

inline std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value) {
    if (flag_given) return flag_value;
    if (const char* env = std::getenv("DRIFTCORRECT_SEED")) {
        const std::string s(env);
        if (s.empty()) throw ValidationError("DRIFTCORRECT_SEED is set but empty");
        char* end = nullptr;
        const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
        if (end == nullptr || *end != '\0')
            throw ValidationError("DRIFTCORRECT_SEED='" + s +
                                  "' is not a valid unsigned integer");
        return static_cast<std::uint64_t>(v);
    }
    return 42;
}

// steps+1 inclusive points over the closed range [lo, hi]
inline std::vector<double> closed_grid(double lo, double hi, long long steps) {
    if (!(steps >= 1)) throw ValidationError("steps must be >= 1");
    if (!(hi > lo)) throw ValidationError("range must satisfy max > min");
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(steps) + 1);
    for (long long i = 0; i <= steps; ++i)
        g.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps));
    g.back() = hi;  // guard against rounding drift at the closed endpoint
    return g;
}

// `steps` interior points of the open range (lo, hi)
inline std::vector<double> open_grid(double lo, double hi, long long steps) {
    if (!(steps >= 1)) throw ValidationError("steps must be >= 1");
    if (!(hi > lo)) throw ValidationError("range must satisfy max > min");
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(steps));
    for (long long i = 1; i <= steps; ++i)
        g.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps + 1));
    return g;
}

inline int emit(const Table& table, const std::string& format, const std::string& output_path,
                std::ostream& out) {
    std::ofstream file;
    std::ostream* sink = &out;
    if (!output_path.empty() && output_path != "-") {
        file.open(output_path, std::ios::out | std::ios::binary | std::ios::trunc);
        if (!file) throw ValidationError("cannot open output file '" + output_path + "'");
        sink = &file;
    }
    if (format == "csv")
        write_csv(table, *sink);
    else
        write_json(table, *sink);
    return 0;
}

inline const char* kind_name(EstimatorKind k) {
    return k == EstimatorKind::misclassification ? "misclassification" : "calibration";
}

}  // namespace detail

// Runs the CLI on explicit argument vector (argv[0] excluded). Output goes
// to `out` unless --output is given; diagnostics go to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"bias-corrected base-rate estimation under prior probability shift"};
    app.name("driftcorrect");
    app.require_subcommand(1);

    // ---- slope-curve ----
    auto* cmd_slope = app.add_subcommand(
        "slope-curve", "bias slope h(p,p,alpha) vs p, one series per alpha, plus 4p(1-p)");
    std::string sl_alpha = "0.05,0.1,0.2,0.3";
    double sl_pmin = 0.5, sl_pmax = 1.0;
    long long sl_steps = 200;
    std::string sl_format = "csv", sl_output;
    cmd_slope->add_option("--alpha", sl_alpha, "comma-separated base rates")
        ->capture_default_str();
    cmd_slope->add_option("--p-min", sl_pmin, "lower end of the p range")->capture_default_str();
    cmd_slope->add_option("--p-max", sl_pmax, "upper end of the p range")->capture_default_str();
    cmd_slope->add_option("--steps", sl_steps, "number of grid intervals")->capture_default_str();
    cmd_slope->add_option("--format", sl_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd_slope->add_option("--output", sl_output, "output file (default: stdout)");

    // ---- mse-diff-curve ----
    auto* cmd_mse = app.add_subcommand(
        "mse-diff-curve", "first-order MSE(misclassification) - MSE(calibration) vs delta");
    double md_alpha = 0.3, md_p00 = 0.7, md_p11 = 0.7;
    long long md_n = 1000, md_steps = 400;
    std::string md_format = "csv", md_output;
    cmd_mse->add_option("--alpha", md_alpha, "base rate in (0,1)")->capture_default_str();
    cmd_mse->add_option("--n", md_n, "test-set size")->capture_default_str();
    cmd_mse->add_option("--p00", md_p00, "specificity")->capture_default_str();
    cmd_mse->add_option("--p11", md_p11, "sensitivity")->capture_default_str();
    cmd_mse->add_option("--delta-steps", md_steps, "number of interior delta grid points")
        ->capture_default_str();
    cmd_mse->add_option("--format", md_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd_mse->add_option("--output", md_output, "output file (default: stdout)");

    // ---- boundary-curve ----
    auto* cmd_bnd = app.add_subcommand(
        "boundary-curve", "decision boundary delta*(p) for fixed (alpha, n)");
    double bc_alpha = 0.3;
    long long bc_n = 1000, bc_steps = 200;
    std::string bc_format = "csv", bc_output;
    cmd_bnd->add_option("--alpha", bc_alpha, "base rate in (0,1)")->capture_default_str();
    cmd_bnd->add_option("--n", bc_n, "test-set size")->capture_default_str();
    cmd_bnd->add_option("--steps", bc_steps, "number of interior p grid points")
        ->capture_default_str();
    cmd_bnd->add_option("--format", bc_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd_bnd->add_option("--output", bc_output, "output file (default: stdout)");

    // ---- simulate ----
    auto* cmd_sim = app.add_subcommand(
        "simulate", "Monte Carlo moments of both estimators vs the analytic formulas");
    double sm_alpha = 0.3, sm_delta = 0.1, sm_p00 = 0.7, sm_p11 = 0.7, sm_tol = 1e-9;
    long long sm_n = 1000, sm_population = 1000000, sm_reps = 200000;
    std::uint64_t sm_seed = 42;
    int sm_workers = 1;
    std::string sm_policy = "exclude", sm_format = "csv", sm_output;
    cmd_sim->add_option("--alpha", sm_alpha, "base rate in (0,1)")->capture_default_str();
    cmd_sim->add_option("--delta", sm_delta, "drift in (-alpha, 1-alpha)")->capture_default_str();
    cmd_sim->add_option("--n", sm_n, "test-set size")->capture_default_str();
    cmd_sim->add_option("--p00", sm_p00, "specificity")->capture_default_str();
    cmd_sim->add_option("--p11", sm_p11, "sensitivity")->capture_default_str();
    cmd_sim->add_option("--population", sm_population, "scored population size N'")
        ->capture_default_str();
    cmd_sim->add_option("--reps", sm_reps, "number of replications")->capture_default_str();
    auto* sim_seed_opt = cmd_sim->add_option("--seed", sm_seed, "RNG seed (64-bit unsigned)");
    cmd_sim->add_option("--policy", sm_policy, "degeneracy policy")
        ->check(CLI::IsMember({"exclude", "abort"}))
        ->capture_default_str();
    cmd_sim->add_option("--singularity-tol", sm_tol,
                        "|p00_hat + p11_hat - 1| at or below this is degenerate")
        ->capture_default_str();
    cmd_sim->add_option("--workers", sm_workers, "worker threads (0 = hardware)")
        ->capture_default_str();
    cmd_sim->add_option("--format", sm_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd_sim->add_option("--output", sm_output, "output file (default: stdout)");

    // ---- verify ----
    auto* cmd_ver = app.add_subcommand(
        "verify", "cross-check analytic moments against Monte Carlo over the default grid");
    std::string vf_grid = "default";
    long long vf_reps = 200000, vf_population = 1000000;
    std::uint64_t vf_seed = 42;
    int vf_workers = 1;
    std::string vf_format = "csv", vf_output;
    cmd_ver->add_option("--grid", vf_grid, "verification grid name")->capture_default_str();
    cmd_ver->add_option("--reps", vf_reps, "replications per grid cell")->capture_default_str();
    auto* ver_seed_opt = cmd_ver->add_option("--seed", vf_seed, "RNG seed (64-bit unsigned)");
    cmd_ver->add_option("--population", vf_population, "scored population size N'")
        ->capture_default_str();
    cmd_ver->add_option("--workers", vf_workers, "worker threads (0 = hardware)")
        ->capture_default_str();
    cmd_ver->add_option("--format", vf_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd_ver->add_option("--output", vf_output, "output file (default: stdout)");

    // ---- estimate ----
    auto* cmd_est = app.add_subcommand(
        "estimate", "corrected point estimate(s) from confusion counts and a naive rate");
    std::string es_counts, es_method = "both";
    double es_alpha_star = -1.0, es_tol = 1e-9;
    std::string es_format = "csv", es_output;
    cmd_est->add_option("--counts", es_counts, "n11,n10,n01,n00 confusion counts")->required();
    cmd_est->add_option("--alpha-star", es_alpha_star, "naive predicted-positive rate in [0,1]")
        ->required();
    cmd_est->add_option("--method", es_method, "misclassification, calibration, or both")
        ->check(CLI::IsMember({"misclassification", "calibration", "both"}))
        ->capture_default_str();
    cmd_est->add_option("--singularity-tol", es_tol,
                        "|p00_hat + p11_hat - 1| at or below this is singular")
        ->capture_default_str();
    cmd_est->add_option("--format", es_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd_est->add_option("--output", es_output, "output file (default: stdout)");

    // ---- parse ----
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("driftcorrect");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*cmd_slope) {
            std::vector<std::string> tokens = detail::split(sl_alpha, ',');
            std::vector<double> alphas;
            for (const auto& t : tokens) alphas.push_back(detail::parse_double(t, "--alpha"));
            if (!(sl_pmin >= 0.5 && sl_pmax <= 1.0))
                throw ValidationError("slope-curve p range must lie within [0.5, 1]");
            const std::vector<double> grid = detail::closed_grid(sl_pmin, sl_pmax, sl_steps);
            const std::vector<CurveSeries> series = slope_curve(alphas, grid);

            Table t;
            t.meta = {{"command", "slope-curve"},
                      {"version", kVersion},
                      {"alpha", sl_alpha},
                      {"p-min", detail::fmt_g(sl_pmin)},
                      {"p-max", detail::fmt_g(sl_pmax)},
                      {"steps", std::to_string(sl_steps)},
                      {"format", sl_format}};
            t.columns.push_back("p");
            for (const auto& tok : tokens) t.columns.push_back("slope_alpha_" + tok);
            t.columns.push_back("lower_bound");
            for (std::size_t i = 0; i < grid.size(); ++i) {
                std::vector<Cell> row;
                row.emplace_back(grid[i]);
                for (const auto& s : series) row.emplace_back(s.points[i].second);
                t.rows.push_back(std::move(row));
            }
            return detail::emit(t, sl_format, sl_output, out);
        }

        if (*cmd_mse) {
            if (!(md_alpha > 0.0 && md_alpha < 1.0))
                throw AlphaOutOfRange("alpha must lie in (0, 1)");
            const std::vector<double> grid =
                detail::open_grid(-md_alpha, 1.0 - md_alpha, md_steps);
            const CurveSeries s = mse_diff_curve(md_alpha, md_n, md_p00, md_p11, grid);

            Table t;
            t.meta = {{"command", "mse-diff-curve"},
                      {"version", kVersion},
                      {"alpha", detail::fmt_g(md_alpha)},
                      {"n", std::to_string(md_n)},
                      {"p00", detail::fmt_g(md_p00)},
                      {"p11", detail::fmt_g(md_p11)},
                      {"delta-steps", std::to_string(md_steps)},
                      {"format", md_format}};
            t.columns = {"delta", "D"};
            for (const auto& [x, y] : s.points) t.rows.push_back({Cell{x}, Cell{y}});
            return detail::emit(t, md_format, md_output, out);
        }

        if (*cmd_bnd) {
            if (!(bc_alpha > 0.0 && bc_alpha < 1.0))
                throw AlphaOutOfRange("alpha must lie in (0, 1)");
            const std::vector<double> grid = detail::open_grid(0.5, 1.0, bc_steps);
            const BoundaryCurve bc = boundary_curve(bc_alpha, bc_n, grid);

            Table t;
            t.meta = {{"command", "boundary-curve"},
                      {"version", kVersion},
                      {"alpha", detail::fmt_g(bc_alpha)},
                      {"n", std::to_string(bc_n)},
                      {"steps", std::to_string(bc_steps)},
                      {"format", bc_format}};
            t.columns = {"p", "delta_star", "found_flag"};
            for (const auto& bp : bc.points_detail) {
                const bool found = bp.delta_star.has_value();
                t.rows.push_back({Cell{bp.p},
                                  Cell{found ? *bp.delta_star
                                             : std::numeric_limits<double>::quiet_NaN()},
                                  Cell{static_cast<long long>(found ? 1 : 0)}});
            }
            return detail::emit(t, bc_format, bc_output, out);
        }

        if (*cmd_sim) {
            const std::uint64_t seed = detail::resolve_seed(sim_seed_opt->count() > 0, sm_seed);
            const ErrorModel model(sm_p00, sm_p11);
            const Scenario sc(sm_alpha, sm_delta, sm_n);
            const DegeneracyPolicy policy =
                sm_policy == "abort" ? DegeneracyPolicy::abort : DegeneracyPolicy::exclude;
            const SimConfig cfg(model, sc, sm_population, sm_reps, seed, policy, sm_tol);
            const SimResult sim = simulate_moments(cfg, sm_workers);
            const MomentSet ap = analytic_moments(model, sc, EstimatorKind::misclassification);
            const MomentSet ac = analytic_moments(model, sc, EstimatorKind::calibration);

            const double rate = static_cast<double>(sim.degenerate_count) /
                                static_cast<double>(cfg.replications);
            Table t;
            t.meta = {{"command", "simulate"},
                      {"version", kVersion},
                      {"alpha", detail::fmt_g(sm_alpha)},
                      {"delta", detail::fmt_g(sm_delta)},
                      {"n", std::to_string(sm_n)},
                      {"p00", detail::fmt_g(sm_p00)},
                      {"p11", detail::fmt_g(sm_p11)},
                      {"population", std::to_string(sm_population)},
                      {"reps", std::to_string(sm_reps)},
                      {"seed", std::to_string(seed)},
                      {"policy", sm_policy},
                      {"singularity-tol", detail::fmt_g(sm_tol)},
                      {"workers", std::to_string(sm_workers)},
                      {"format", sm_format},
                      {"degenerate-count", std::to_string(sim.degenerate_count)},
                      {"effective-replications", std::to_string(sim.effective_replications)},
                      {"degeneracy-rate", format_full(rate)}};
            t.columns = {"estimator", "moment", "analytic", "empirical", "se"};
            const double nan = std::numeric_limits<double>::quiet_NaN();
            auto add = [&](const char* est, const char* mom, double a, double e, double s) {
                t.rows.push_back({Cell{std::string(est)}, Cell{std::string(mom)}, Cell{a},
                                  Cell{e}, Cell{s}});
            };
            add("misclassification", "bias", ap.bias, sim.moments_p.bias,
                sim.standard_errors.bias_p);
            add("misclassification", "variance", ap.variance, sim.moments_p.variance,
                sim.standard_errors.variance_p);
            add("misclassification", "mse", ap.mse, sim.moments_p.mse, nan);
            add("calibration", "bias", ac.bias, sim.moments_c.bias, sim.standard_errors.bias_c);
            add("calibration", "variance", ac.variance, sim.moments_c.variance,
                sim.standard_errors.variance_c);
            add("calibration", "mse", ac.mse, sim.moments_c.mse, nan);
            return detail::emit(t, sm_format, sm_output, out);
        }

        if (*cmd_ver) {
            if (vf_grid != "default")
                throw ValidationError("unknown verification grid '" + vf_grid +
                                      "' (only 'default' is available)");
            const std::uint64_t seed = detail::resolve_seed(ver_seed_opt->count() > 0, vf_seed);
            const VerifyReport report =
                run_default_grid_verification(vf_reps, seed, vf_population, vf_workers);

            long long failures = 0;
            for (const auto& c : report.checks)
                if (!c.pass) ++failures;

            Table t;
            t.meta = {{"command", "verify"},
                      {"version", kVersion},
                      {"grid", vf_grid},
                      {"reps", std::to_string(vf_reps)},
                      {"seed", std::to_string(seed)},
                      {"population", std::to_string(vf_population)},
                      {"workers", std::to_string(vf_workers)},
                      {"format", vf_format},
                      {"checks", std::to_string(report.checks.size())},
                      {"failures", std::to_string(failures)},
                      {"result", report.all_pass ? "PASS" : "FAIL"}};
            t.columns = {"alpha", "n",  "p00",       "p11",       "delta", "estimator",
                         "moment", "analytic", "empirical", "se",  "allowance", "deviation",
                         "pass"};
            for (const auto& c : report.checks) {
                t.rows.push_back({Cell{c.alpha}, Cell{c.n}, Cell{c.p00}, Cell{c.p11},
                                  Cell{c.delta}, Cell{std::string(detail::kind_name(c.kind))},
                                  Cell{std::string(c.moment)}, Cell{c.analytic},
                                  Cell{c.empirical}, Cell{c.se}, Cell{c.allowance},
                                  Cell{c.deviation},
                                  Cell{static_cast<long long>(c.pass ? 1 : 0)}});
            }
            detail::emit(t, vf_format, vf_output, out);
            if (!report.all_pass) {
                err << "verify: " << failures << " of " << report.checks.size()
                    << " checks failed\n";
                return 1;
            }
            err << "verify: all " << report.checks.size() << " checks passed\n";
            return 0;
        }

        if (*cmd_est) {
            const std::vector<std::string> tokens = detail::split(es_counts, ',');
            if (tokens.size() != 4)
                throw ValidationError("--counts expects exactly four values n11,n10,n01,n00");
            const ConfusionCounts counts(detail::parse_int(tokens[0], "--counts n11"),
                                         detail::parse_int(tokens[1], "--counts n10"),
                                         detail::parse_int(tokens[2], "--counts n01"),
                                         detail::parse_int(tokens[3], "--counts n00"));
            if (!(es_alpha_star >= 0.0 && es_alpha_star <= 1.0))
                throw ValidationError("--alpha-star must lie in [0, 1]");
            const EstimatedRates rates = estimate_rates(counts);

            Table t;
            t.meta = {{"command", "estimate"},
                      {"version", kVersion},
                      {"counts", es_counts},
                      {"alpha-star", detail::fmt_g(es_alpha_star)},
                      {"method", es_method},
                      {"singularity-tol", detail::fmt_g(es_tol)},
                      {"format", es_format}};
            t.columns = {"method", "estimate", "out_of_range"};
            if (es_method == "misclassification" || es_method == "both") {
                const MisclassificationEstimate e =
                    misclassification_estimate(es_alpha_star, rates, es_tol);
                t.rows.push_back({Cell{std::string("misclassification")}, Cell{e.value},
                                  Cell{static_cast<long long>(e.out_of_range ? 1 : 0)}});
            }
            if (es_method == "calibration" || es_method == "both") {
                const double e = calibration_estimate(es_alpha_star, rates);
                t.rows.push_back(
                    {Cell{std::string("calibration")}, Cell{e}, Cell{static_cast<long long>(0)}});
            }
            return detail::emit(t, es_format, es_output, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;  // no subcommand matched (unreachable with require_subcommand)
}

inline int run(int argc, char** argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace driftcorrect::cli
