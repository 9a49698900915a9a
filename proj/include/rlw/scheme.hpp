#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rlw/norms.hpp"
#include "rlw/pentasolve.hpp"
#include "rlw/problems.hpp"

namespace rlw {

/// Sign of the explicit (k/4)(gamma D2 - beta D1) term on the right of the
/// Crank-Nicolson sub-steps. `derived` (+) is the trapezoidal discretisation;
/// `paper` (-) flips it and is kept for comparison runs.
enum class RhsSign { derived, paper };

/// Which node layers {0,1,M-1,M} are imposed at each (half-)level.
/// `exact`: all four from the exact solution. `paper_copy`: layers 0 and M
/// from g, layer 1 copied from 0 and M-1 from M (first-order consistent).
enum class BoundaryMode { exact, paper_copy };

struct SchemeConfig {
    RhsSign rhs_sign = RhsSign::derived;
    /// Carry alpha in the Leapfrog operator (I - alpha D2); off uses I - D2.
    bool leapfrog_alpha = true;
    BoundaryMode boundary = BoundaryMode::exact;
    double picard_tol = 1e-12;
    int picard_max_iters = 50;
    /// Fixed time step; empty selects k = min(hx, hy)^{4/3}.
    std::optional<double> k;
};

inline void validate(const SchemeConfig& cfg)
{
    if (!(cfg.picard_tol > 0.0)) throw ConfigError("picard_tol must be positive");
    if (cfg.picard_max_iters < 1) throw ConfigError("picard_max_iters must be >= 1");
    if (cfg.k && !(*cfg.k > 0.0)) throw ConfigError("time step k must be positive");
}

/// k = min(hx^{4/3}, hy^{4/3}).
inline double time_step_rule(double hx, double hy)
{
    if (!(hx > 0.0) || !(hy > 0.0)) throw ConfigError("time_step_rule: steps must be positive");
    return std::min(std::pow(hx, 4.0 / 3.0), std::pow(hy, 4.0 / 3.0));
}

/// N = round(T / k) (at least 1), then k := T / N so the run lands on T.
inline TimeGrid resolve_time_grid(double T, double k_raw)
{
    if (!(k_raw > 0.0)) throw ConfigError("time step must be positive");
    const int N = std::max(1, static_cast<int>(std::lround(T / k_raw)));
    return make_time_grid(T, N);
}

/// Overwrites layers {0,1,M-1,M} of `field` with boundary data at time t.
inline void fill_boundary_layers(Field& field, double t, const ProblemSpec& problem, BoundaryMode mode)
{
    const Grid2D& g = field.grid();
    const int M = g.M;
    const auto frame = [M](int i) { return i <= 1 || i >= M - 1; };
    if (mode == BoundaryMode::exact) {
        if (!problem.exact) {
            throw ConfigError(problem.name + ": exact boundary mode needs an exact solution");
        }
        const auto& u = problem.exact->u;
        for (int i = 0; i <= M; ++i) {
            for (int j = 0; j <= M; ++j) {
                if (frame(i) || frame(j)) field(i, j) = u(g.x(i), g.y(j), t);
            }
        }
        return;
    }
    for (int p = 0; p <= M; ++p) {
        field(0, p) = problem.g(g.x(0), g.y(p), t);
        field(M, p) = problem.g(g.x(M), g.y(p), t);
        field(p, 0) = problem.g(g.x(p), g.y(0), t);
        field(p, M) = problem.g(g.x(p), g.y(M), t);
    }
    for (int p = 0; p <= M; ++p) {
        field(1, p) = field(0, p);
        field(M - 1, p) = field(M, p);
    }
    for (int p = 0; p <= M; ++p) {
        field(p, 1) = field(p, 0);
        field(p, M - 1) = field(p, M);
    }
}

/// Two consecutive levels of the three-level scheme.
struct SchemeState {
    int n = 0;      ///< integer level held in `U_int`
    Field U_half;   ///< level n - 1/2
    Field U_int;    ///< level n
};

struct StepDiagnostics {
    std::vector<int> picard_iterations;   ///< one entry per implicit solve
    double max_picard_update = 0.0;       ///< last accepted ||dU|| / (1 + ||U||)
    std::vector<double> step_seconds;     ///< wall time per advance
    double dominance_ratio_x = 0.0;
    double dominance_ratio_y = 0.0;

    [[nodiscard]] int max_picard_iterations() const
    {
        int m = 0;
        for (int it : picard_iterations) m = std::max(m, it);
        return m;
    }
};

/// The three-level time-split Leapfrog / Crank-Nicolson stepper.
///
/// x-sweeps solve lines of constant j, y-sweeps lines of constant i; each
/// sweep direction keeps one factorization for the whole run.
class SplitScheme {
public:
    SplitScheme(ProblemSpec problem, const Grid2D& grid, double k, SchemeConfig cfg)
        : problem_(std::move(problem)), grid_(grid), k_(k), cfg_(cfg)
    {
        validate(problem_);
        validate(cfg_);
        if (!(k_ > 0.0)) throw ConfigError("time step must be positive");
        const double theta = k_ / 4.0;
        cn_x_bands_ = assemble_line_operator(grid_, Axis::X, problem_.alpha, problem_.beta,
                                             problem_.gamma, theta);
        cn_y_bands_ = assemble_line_operator(grid_, Axis::Y, problem_.alpha, problem_.beta,
                                             problem_.gamma, theta);
        leap_bands_ = assemble_line_operator(grid_, Axis::X, leapfrog_alpha(), 0.0, 0.0, 0.0);
        cn_x_ = factor(cn_x_bands_);
        cn_y_ = factor(cn_y_bands_);
        leap_ = factor(leap_bands_);
        diag_.dominance_ratio_x = std::max(cn_x_bands_.dominance_ratio(), leap_bands_.dominance_ratio());
        diag_.dominance_ratio_y = cn_y_bands_.dominance_ratio();
    }

    [[nodiscard]] const ProblemSpec& problem() const { return problem_; }
    [[nodiscard]] const Grid2D& grid() const { return grid_; }
    [[nodiscard]] double k() const { return k_; }
    [[nodiscard]] const SchemeConfig& config() const { return cfg_; }
    [[nodiscard]] const StepDiagnostics& diagnostics() const { return diag_; }

    /// U^0 sampled from u0 with layers imposed at t = 0.
    [[nodiscard]] Field initial_field() const
    {
        Field U0 = sample(grid_, [&](double x, double y, double) { return problem_.u0(x, y); }, 0.0);
        fill_boundary_layers(U0, 0.0, problem_, cfg_.boundary);
        return U0;
    }

    /// First half step t_0 -> t_{1/2}: Crank-Nicolson in x with source f1.
    Field init_half_step(const Field& U0)
    {
        return crank_nicolson(U0, 0.0, Axis::X);
    }

    /// Crank-Nicolson in y with source f2, t_from -> t_from + k/2.
    Field cn_y_step(const Field& U_from, double t_from)
    {
        return crank_nicolson(U_from, t_from, Axis::Y);
    }

    /// Leapfrog in x: U^{n-1/2}, U^n -> U^{n+1/2}, explicit in the source.
    Field leapfrog_x_step(const Field& U_half_prev, const Field& U_int, double t_n)
    {
        const double a = leapfrog_alpha();
        const ProblemSpec& p = problem_;
        Field rhs(grid_);
        for (int i = 2; i <= grid_.M - 2; ++i) {
            for (int j = 2; j <= grid_.M - 2; ++j) {
                const double ux = wide_first_at(U_int, Axis::X, i, j);
                const double lin = p.gamma * wide_second_at(U_int, Axis::X, i, j) - p.beta * ux;
                rhs(i, j) = U_half_prev(i, j) - a * wide_second_at(U_half_prev, Axis::X, i, j) +
                            k_ * lin + k_ * p.f1(grid_.x(i), grid_.y(j), t_n, U_int(i, j), ux);
            }
        }
        const double t_next = t_n + 0.5 * k_;
        Field out = U_int;
        fill_boundary_layers(out, t_next, problem_, cfg_.boundary);
        solve_lines(Axis::X, leap_bands_, leap_, rhs, out);
        require_finite(out, t_next);
        return out;
    }

    /// Runs the first two sub-steps, yielding the state at n = 1.
    SchemeState start(const Field& U0)
    {
        SchemeState s;
        s.U_half = init_half_step(U0);
        s.U_int = cn_y_step(s.U_half, 0.5 * k_);
        s.n = 1;
        return s;
    }

    /// n -> n + 1: Leapfrog x-sweep to n + 1/2, then Crank-Nicolson y-sweep.
    void advance(SchemeState& s)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const double t_n = s.n * k_;
        Field half = leapfrog_x_step(s.U_half, s.U_int, t_n);
        Field next = cn_y_step(half, t_n + 0.5 * k_);
        s.U_half = std::move(half);
        s.U_int = std::move(next);
        ++s.n;
        diag_.step_seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }

private:
    [[nodiscard]] double leapfrog_alpha() const { return cfg_.leapfrog_alpha ? problem_.alpha : 1.0; }

    [[nodiscard]] double source(Axis axis, double x, double y, double t, double u, double uz) const
    {
        return axis == Axis::X ? problem_.f1(x, y, t, u, uz) : problem_.f2(x, y, t, u, uz);
    }

    // (I - alpha D2 - theta L) U_new = (I - alpha D2 + s theta L) U_old
    //                                  + theta [f(t_new, U_new) + f(t_old, U_old)],
    // L = gamma D2 - beta D1, theta = k/4; Picard on the implicit source.
    Field crank_nicolson(const Field& U_old, double t_old, Axis axis)
    {
        const double theta = k_ / 4.0;
        const double sgn = cfg_.rhs_sign == RhsSign::derived ? 1.0 : -1.0;
        const double t_new = t_old + 0.5 * k_;
        const ProblemSpec& p = problem_;
        const int M = grid_.M;

        Field explicit_part(grid_);
        for (int i = 2; i <= M - 2; ++i) {
            for (int j = 2; j <= M - 2; ++j) {
                const double d2 = wide_second_at(U_old, axis, i, j);
                const double d1 = wide_first_at(U_old, axis, i, j);
                explicit_part(i, j) =
                    U_old(i, j) - p.alpha * d2 + sgn * theta * (p.gamma * d2 - p.beta * d1) +
                    theta * source(axis, grid_.x(i), grid_.y(j), t_old, U_old(i, j), d1);
            }
        }

        const PentaBands& bands = axis == Axis::X ? cn_x_bands_ : cn_y_bands_;
        const PentaFactorization& fact = axis == Axis::X ? cn_x_ : cn_y_;

        Field current = U_old;
        fill_boundary_layers(current, t_new, problem_, cfg_.boundary);
        std::ostringstream trace;
        for (int it = 1; it <= cfg_.picard_max_iters; ++it) {
            Field rhs(grid_);
            for (int i = 2; i <= M - 2; ++i) {
                for (int j = 2; j <= M - 2; ++j) {
                    const double d1 = wide_first_at(current, axis, i, j);
                    rhs(i, j) = explicit_part(i, j) +
                                theta * source(axis, grid_.x(i), grid_.y(j), t_new, current(i, j), d1);
                }
            }
            Field next = current;
            solve_lines(axis, bands, fact, rhs, next);
            require_finite(next, t_new);

            Field delta = next;
            for (std::size_t q = 0; q < delta.values().size(); ++q) {
                delta.values()[q] -= current.values()[q];
            }
            const double update = l2_norm(delta) / (1.0 + l2_norm(next));
            current = std::move(next);
            trace << ' ' << update;
            if (update <= cfg_.picard_tol) {
                diag_.picard_iterations.push_back(it);
                diag_.max_picard_update = std::max(diag_.max_picard_update, update);
                return current;
            }
        }
        throw NumericalError("Picard iteration did not converge at t=" + std::to_string(t_new) +
                             " after " + std::to_string(cfg_.picard_max_iters) +
                             " iterations; updates:" + trace.str());
    }

    // Solves every interior line along `axis`; rhs holds interior values, `out`
    // holds the boundary layers on entry and receives the interior solution.
    void solve_lines(Axis axis, const PentaBands& bands, const PentaFactorization& fact,
                     const Field& rhs, Field& out) const
    {
        const int M = grid_.M;
        const int n = M - 3;
        std::vector<double> line(n), sol(n);
        for (int m = 2; m <= M - 2; ++m) {
            const auto at = [&](int along) -> double& {
                return axis == Axis::X ? out(along, m) : out(m, along);
            };
            const auto corr = boundary_moveout(bands, {at(0), at(1)}, {at(M - 1), at(M)});
            for (int r = 0; r < n; ++r) {
                const int along = r + 2;
                line[r] = (axis == Axis::X ? rhs(along, m) : rhs(m, along)) + corr[r];
            }
            fact.solve(line, sol);
            for (int r = 0; r < n; ++r) at(r + 2) = sol[r];
        }
    }

    void require_finite(const Field& f, double t) const
    {
        if (!f.all_finite()) {
            throw NumericalError("non-finite value (blow-up) at t=" + std::to_string(t));
        }
    }

    ProblemSpec problem_;
    Grid2D grid_;
    double k_;
    SchemeConfig cfg_;
    PentaBands cn_x_bands_, cn_y_bands_, leap_bands_;
    PentaFactorization cn_x_, cn_y_, leap_;
    StepDiagnostics diag_;
};

// ---------------------------------------------------------------------------
// Whole runs.

struct LevelNorms {
    int n = 0;
    double t = 0.0;
    double norm_U = 0.0;
    double h2_U = 0.0;
    // present when the problem has an exact solution
    double norm_u = 0.0;
    double h2_u = 0.0;
    double error = 0.0;
    double h2_error = 0.0;
};

struct FieldDump {
    double requested_t = 0.0;
    int n = 0;
    double t = 0.0;
    Field U;
    std::optional<Field> u;
};

struct SolutionRecord {
    std::string problem;
    Grid2D grid;
    TimeGrid time;
    SchemeConfig config;
    bool has_exact = false;
    std::vector<LevelNorms> levels;
    RunningMax max_u, max_U, max_error;
    RunningMax max_h2_u, max_h2_U, max_h2_error;
    std::vector<FieldDump> dumps;
    std::optional<Field> final_U;
    StepDiagnostics diagnostics;
    bool failed = false;
    int failed_level = -1;
    std::string failure;
};

namespace detail {

inline Field difference(const Field& a, const Field& b)
{
    Field d = a;
    for (std::size_t q = 0; q < d.values().size(); ++q) d.values()[q] -= b.values()[q];
    return d;
}

}  // namespace detail

/// Runs (init x-half-step, first y-step) and then the Leapfrog/CN loop to T,
/// accumulating max-in-time norms over integer levels. Numerical failures
/// are recorded in the returned record rather than thrown.
inline SolutionRecord run(const ProblemSpec& problem, const Grid2D& grid, const SchemeConfig& cfg,
                          double T, const std::vector<double>& dump_times = {})
{
    validate(cfg);
    const double k_raw = cfg.k ? *cfg.k : time_step_rule(grid.hx, grid.hy);
    SolutionRecord rec;
    rec.problem = problem.name;
    rec.grid = grid;
    rec.time = resolve_time_grid(T, k_raw);
    rec.config = cfg;
    rec.has_exact = problem.exact.has_value();

    SplitScheme scheme(problem, grid, rec.time.k, cfg);
    std::vector<int> dump_levels;
    for (double t : dump_times) {
        const long n = std::lround(t / rec.time.k);
        dump_levels.push_back(static_cast<int>(std::clamp<long>(n, 0, rec.time.N)));
    }

    const auto record = [&](int n, const Field& U) {
        LevelNorms L;
        L.n = n;
        L.t = rec.time.t(n);
        const auto rU = h2_norm(U, problem.alpha);
        L.norm_U = rU.l2;
        L.h2_U = rU.h2;
        std::optional<Field> u;
        if (rec.has_exact) {
            u = sample(grid, problem.exact->u, L.t);
            const auto ru = h2_norm(*u, problem.alpha);
            const auto re = h2_norm(detail::difference(*u, U), problem.alpha);
            L.norm_u = ru.l2;
            L.h2_u = ru.h2;
            L.error = re.l2;
            L.h2_error = re.h2;
            rec.max_u.feed(L.norm_u);
            rec.max_h2_u.feed(L.h2_u);
            rec.max_error.feed(L.error);
            rec.max_h2_error.feed(L.h2_error);
        }
        rec.max_U.feed(L.norm_U);
        rec.max_h2_U.feed(L.h2_U);
        rec.levels.push_back(L);
        for (std::size_t d = 0; d < dump_levels.size(); ++d) {
            if (dump_levels[d] == n) rec.dumps.push_back({dump_times[d], n, L.t, U, u});
        }
    };

    int level = 0;
    try {
        const Field U0 = scheme.initial_field();
        record(0, U0);
        level = 1;
        SchemeState state = scheme.start(U0);
        record(1, state.U_int);
        while (state.n < rec.time.N) {
            level = state.n + 1;
            scheme.advance(state);
            record(state.n, state.U_int);
        }
        rec.final_U = state.U_int;
    } catch (const NumericalError& e) {
        rec.failed = true;
        rec.failed_level = level;
        rec.failure = e.what();
    }
    rec.diagnostics = scheme.diagnostics();
    return rec;
}

}  // namespace rlw
