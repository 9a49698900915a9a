// Command-line driver: single solves, convergence tables and identity checks.

#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "rlw/rlw.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

struct FlagSet {
    std::vector<std::pair<std::string, CLI::Option*>> options;
    std::vector<std::string> values;
};

// Registers string-valued flags so the explicitly given ones can be layered
// over the config file.
void add_flags(CLI::App* app, FlagSet& flags, const std::vector<std::pair<std::string, std::string>>& spec)
{
    flags.values.reserve(spec.size());
    for (const auto& [name, help] : spec) {
        flags.values.emplace_back();
        flags.options.emplace_back(name, app->add_option("--" + name, flags.values.back(), help));
    }
}

void apply_given(rlw::RunSettings& s, const FlagSet& flags)
{
    for (std::size_t q = 0; q < flags.options.size(); ++q) {
        if (flags.options[q].second->count() > 0) rlw::apply_setting(s, flags.options[q].first, flags.values[q]);
    }
}

const std::vector<std::pair<std::string, std::string>> kSchemeFlags = {
    {"problem", "example1|example2|example3|manufactured:<zero|poly|wave>"},
    {"k", "time step: auto (min(hx,hy)^(4/3)) or a number"},
    {"T", "final time (default: the problem's)"},
    {"boundary", "exact|paper-copy"},
    {"rhs-sign", "derived|paper"},
    {"leapfrog-alpha", "on|off"},
    {"split", "consistent|additive source split"},
    {"alpha", "alpha for manufactured problems"},
    {"beta", "beta for manufactured problems"},
    {"gamma", "gamma for manufactured problems"},
    {"svg", "SVG output path"},
};

void print_row_table(const std::vector<rlw::ConvergenceRow>& rows)
{
    std::printf("%-4s %-12s %-12s %-14s %-14s %-14s %-8s\n", "l", "h", "k", "|||u|||", "|||U|||",
                "|||e|||", "R");
    for (const auto& r : rows) {
        if (!r.ok) {
            std::printf("%-4d %-12.5g %-12.5g failed: %s\n", r.level, r.h, r.k, r.failure.c_str());
            continue;
        }
        std::printf("%-4d %-12.5g %-12.5g %-14.5e %-14.5e %-14.5e ", r.level, r.h, r.k, r.norm_u,
                    r.norm_U, r.error);
        if (r.rate) std::printf("%.4f\n", *r.rate);
        else std::printf("--\n");
    }
}

int run_solve(const rlw::RunSettings& s)
{
    const rlw::ProblemSpec problem = rlw::problem_from(s);
    const rlw::Grid2D grid = problem.grid(s.M);
    std::vector<double> dumps;
    if (s.dump_t) dumps.push_back(*s.dump_t);
    const auto rec = rlw::run(problem, grid, rlw::scheme_config(s), s.T.value_or(problem.T), dumps);

    std::printf("problem %s  M=%d  h=%.6g  k=%.6g  N=%d\n", problem.name.c_str(), grid.M, grid.hx,
                rec.time.k, rec.time.N);
    if (rec.has_exact) {
        std::printf("|||u|||_2,inf = %.6e  |||U|||_2,inf = %.6e  |||e|||_2,inf = %.6e\n",
                    rec.max_u.value(), rec.max_U.value(), rec.max_error.value());
        std::printf("|||u|||_H2,inf = %.6e  |||U|||_H2,inf = %.6e  |||e|||_H2,inf = %.6e\n",
                    rec.max_h2_u.value(), rec.max_h2_U.value(), rec.max_h2_error.value());
    } else {
        std::printf("|||U|||_2,inf = %.6e\n", rec.max_U.value());
    }
    std::printf("max Picard iterations %d\n", rec.diagnostics.max_picard_iterations());

    rlw::RunManifest manifest{"solve", s, grid.M, rec.time.k, rec.time.N, rlw::utc_timestamp(), {}};
    if (!s.out.empty()) {
        rlw::emit_levels_csv(rec, s.out);
        manifest.outputs.push_back(s.out);
    }
    if (!s.dump_path.empty() && !rec.dumps.empty()) {
        rlw::emit_solution_csv(rec.dumps.front(), s.dump_path);
        manifest.outputs.push_back(s.dump_path);
    }
    if (!s.svg.empty() && (rec.final_U || !rec.dumps.empty())) {
        rlw::emit_svg(rec.dumps.empty() ? *rec.final_U : rec.dumps.front().U, s.svg);
        manifest.outputs.push_back(s.svg);
    }
    if (!s.out.empty()) rlw::write_manifest(manifest, s.out + ".manifest.json");

    if (rec.failed) {
        std::fprintf(stderr, "numerical failure at level %d: %s\n", rec.failed_level, rec.failure.c_str());
        return kNumerical;
    }
    return kOk;
}

int run_convergence(const rlw::RunSettings& s)
{
    const rlw::ProblemSpec problem = rlw::problem_from(s);
    const auto rows = rlw::convergence_study(problem, s.level_from, s.level_to, rlw::scheme_config(s), s.T);
    print_row_table(rows);
    rlw::RunManifest manifest{"convergence", s, 0, 0.0, 0, rlw::utc_timestamp(), {}};
    if (!s.out.empty()) {
        rlw::emit_csv(rows, s.out);
        manifest.outputs.push_back(s.out);
    }
    if (!s.svg.empty()) {
        rlw::emit_svg(rows, s.svg);
        manifest.outputs.push_back(s.svg);
    }
    if (!s.out.empty()) rlw::write_manifest(manifest, s.out + ".manifest.json");
    for (const auto& r : rows) {
        if (!r.ok && r.failure.find("make_grid") == std::string::npos) return kNumerical;
    }
    return kOk;
}

int run_verify(const rlw::RunSettings& s)
{
    const auto report = rlw::verify_suite(s.M, s.seed);
    std::printf("verify M=%d seed=%u\n", report.M, report.seed);
    for (const auto& e : report.entries) {
        std::printf("[%s] %-62s %.3e (threshold %.1e)\n", e.pass ? "PASS" : "FAIL", e.name.c_str(),
                    e.max_residual, e.threshold);
    }
    return report.all_pass() ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Time-split Leapfrog/Crank-Nicolson solver for 2D Sobolev and RLW equations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", rlw::kVersion);
    std::string config_path;
    app.add_option("--config", config_path, "settings file (JSON object or key = value lines)");

    auto* solve = app.add_subcommand("solve", "single run");
    FlagSet solve_flags;
    auto solve_spec = kSchemeFlags;
    solve_spec.emplace_back("M", "subdivisions per axis");
    solve_spec.emplace_back("out", "per-level norms CSV");
    add_flags(solve, solve_flags, solve_spec);
    std::vector<std::string> dump_at;
    solve->add_option("--dump-at", dump_at, "<t> <csv>: field slice x,y,u,U,e at the level nearest t")
        ->expected(2);
    solve->add_option("--config", config_path, "settings file");

    auto* conv = app.add_subcommand("convergence", "convergence table over h = 2^-l");
    FlagSet conv_flags;
    auto conv_spec = kSchemeFlags;
    conv_spec.emplace_back("levels", "<a>..<b>");
    conv_spec.emplace_back("out", "table CSV h,k,norm_u,norm_U,error,rate");
    add_flags(conv, conv_flags, conv_spec);
    conv->add_option("--config", config_path, "settings file");

    auto* verify = app.add_subcommand("verify", "summation-by-parts identities and stencil order");
    FlagSet verify_flags;
    add_flags(verify, verify_flags, {{"M", "subdivisions per axis (>= 8)"}, {"seed", "random seed"}});
    verify->add_option("--config", config_path, "settings file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        rlw::RunSettings s;
        if (verify->parsed()) s.M = 12;
        if (!config_path.empty()) {
            for (const auto& [key, value] : rlw::load_config_file(config_path)) rlw::apply_setting(s, key, value);
        }
        if (solve->parsed()) {
            apply_given(s, solve_flags);
            if (!dump_at.empty()) {
                rlw::apply_setting(s, "dump-t", dump_at[0]);
                rlw::apply_setting(s, "dump-path", dump_at[1]);
            }
            return run_solve(s);
        }
        if (conv->parsed()) {
            apply_given(s, conv_flags);
            return run_convergence(s);
        }
        apply_given(s, verify_flags);
        if (s.M < 8) throw rlw::ConfigError("verify: M must be >= 8");
        return run_verify(s);
    } catch (const rlw::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfig;
    } catch (const rlw::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    } catch (const rlw::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kIo;
    }
}
