#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rlw/scheme.hpp"

namespace rlw {

/// R = log2(e(2h) / e(h)); empty when either error is not a positive finite number.
inline std::optional<double> rate(double err_coarse, double err_fine)
{
    if (!(err_coarse > 0.0) || !(err_fine > 0.0) || !std::isfinite(err_coarse) ||
        !std::isfinite(err_fine)) {
        return std::nullopt;
    }
    return std::log2(err_coarse / err_fine);
}

/// One line of a convergence table.
struct ConvergenceRow {
    int level = 0;
    int M = 0;
    double h = 0.0;
    double k = 0.0;
    double norm_u = 0.0;   ///< |||u|||_{2,inf}
    double norm_U = 0.0;   ///< |||U|||_{2,inf}
    double error = 0.0;    ///< |||e|||_{2,inf}
    std::optional<double> rate;
    double h2_u = 0.0;
    double h2_U = 0.0;
    double h2_error = 0.0;
    int max_picard_iterations = 0;
    bool ok = true;
    std::string failure;
};

inline ConvergenceRow row_from_record(const SolutionRecord& rec, int level)
{
    ConvergenceRow row;
    row.level = level;
    row.M = rec.grid.M;
    row.h = rec.grid.hx;
    row.k = rec.time.k;
    row.norm_u = rec.max_u.value();
    row.norm_U = rec.max_U.value();
    row.error = rec.max_error.value();
    row.h2_u = rec.max_h2_u.value();
    row.h2_U = rec.max_h2_U.value();
    row.h2_error = rec.max_h2_error.value();
    row.max_picard_iterations = rec.diagnostics.max_picard_iterations();
    row.ok = !rec.failed;
    row.failure = rec.failure;
    return row;
}

/// One run per level l (M = 2^l, k from the configured rule), rates chained
/// between consecutive successful levels. Failed levels are kept as marked rows.
inline std::vector<ConvergenceRow> convergence_study(const ProblemSpec& problem, int level_from,
                                                     int level_to, const SchemeConfig& cfg,
                                                     std::optional<double> T = std::nullopt)
{
    if (level_from < 1 || level_to < level_from) throw ConfigError("convergence: bad level range");
    if (level_to > 6) throw ConfigError("convergence: levels above 6 are out of desk scale");
    const double t_final = T ? *T : problem.T;
    std::vector<ConvergenceRow> rows;
    for (int l = level_from; l <= level_to; ++l) {
        const int M = 1 << l;
        ConvergenceRow row;
        try {
            const Grid2D grid = problem.grid(M);
            row = row_from_record(run(problem, grid, cfg, t_final), l);
        } catch (const ConfigError& e) {
            row.level = l;
            row.M = M;
            row.h = (problem.L2 - problem.L1) / M;
            const double k_raw = cfg.k ? *cfg.k : std::pow(row.h, 4.0 / 3.0);
            row.k = resolve_time_grid(t_final, k_raw).k;
            row.ok = false;
            row.failure = e.what();
        }
        if (!rows.empty() && rows.back().ok && row.ok) row.rate = rate(rows.back().error, row.error);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Identity verification.

struct VerifyEntry {
    std::string name;
    double max_residual = 0.0;  ///< relative residual, or observed order for consistency checks
    double threshold = 0.0;
    bool pass = false;
};

struct VerifyReport {
    int M = 0;
    unsigned seed = 0;
    std::vector<VerifyEntry> entries;

    [[nodiscard]] bool all_pass() const
    {
        for (const auto& e : entries) {
            if (!e.pass) return false;
        }
        return true;
    }
};

struct VerifyOptions {
    int fields = 10;
    bool zero_fields = false;
    FirstDerivativeSign sign = FirstDerivativeSign::corrected;
    double tolerance = 1e-12;
    double min_order = 3.9;
};

/// Random field with values in [-1, 1] on the interior and zeros on the frame.
inline Field random_frame_vanishing(const Grid2D& grid, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field w(grid);
    for (int i = 2; i <= grid.M - 2; ++i) {
        for (int j = 2; j <= grid.M - 2; ++j) w(i, j) = dist(rng);
    }
    return w;
}

namespace detail {

// max of |op(u) - exact derivative| for u = sin(pi x) sin(pi y), taken at
// the interior nodes 2..M0-2 of the coarsest grid M0 so every refinement is
// measured at the same physical points. M must be a multiple of M0.
inline double truncation_error(int M, int M0, bool second, FirstDerivativeSign sign)
{
    using std::numbers::pi;
    const Grid2D g = make_grid(0.0, 1.0, 0.0, 1.0, M);
    const Field u = sample(g, [](double x, double y, double) { return std::sin(pi * x) * std::sin(pi * y); }, 0.0);
    const int stride = M / M0;
    double worst = 0.0;
    for (int a = 2; a <= M0 - 2; ++a) {
        for (int b = 2; b <= M0 - 2; ++b) {
            const int i = a * stride, j = b * stride;
            const double x = g.x(i), y = g.y(j);
            const double approx = second ? wide_second_at(u, Axis::X, i, j)
                                         : wide_first_at(u, Axis::X, i, j, sign);
            const double exact = second ? -pi * pi * std::sin(pi * x) * std::sin(pi * y)
                                        : pi * std::cos(pi * x) * std::sin(pi * y);
            worst = std::max(worst, std::abs(approx - exact));
        }
    }
    return worst;
}

}  // namespace detail

/// Minimum observed order of the wide stencils on sin(pi x) sin(pi y) over
/// the grid sequence M, 2M, 4M, measured at the interior nodes of grid M.
inline double observed_stencil_order(int M, bool second,
                                     FirstDerivativeSign sign = FirstDerivativeSign::corrected)
{
    double worst = 1e300;
    double prev = detail::truncation_error(M, M, second, sign);
    for (int m = 2 * M; m <= 4 * M; m *= 2) {
        const double cur = detail::truncation_error(m, M, second, sign);
        const auto r = rate(prev, cur);
        worst = std::min(worst, r ? *r : 0.0);
        prev = cur;
    }
    return worst;
}

/// Checks the summation-by-parts identities on random frame-vanishing
/// fields and the consistency order of the wide stencils.
inline VerifyReport verify_suite(int M, unsigned seed, const VerifyOptions& opt = {})
{
    const Grid2D grid = make_grid(0.0, 1.0, 0.0, 1.0, M);
    std::mt19937_64 rng(seed);
    VerifyReport report;
    report.M = M;
    report.seed = seed;

    const char* names[] = {"skew (w, wide_dx w) = 0",
                           "skew (w, wide_dy w) = 0",
                           "coercive -(wide_dxx w, w) = |dx w|^2 + h^2/12 |dxx w|^2",
                           "coercive -(wide_dyy w, w) = |dy w|^2 + h^2/12 |dyy w|^2",
                           "antisymmetry (wide_dx w, v) = -(wide_dx v, w)",
                           "antisymmetry (wide_dy w, v) = -(wide_dy v, w)",
                           "sbp (wide_dxx w, v) = -(dx w, dx v) - h^2/12 (dxx w, dxx v)",
                           "sbp (wide_dyy w, v) = -(dy w, dy v) - h^2/12 (dyy w, dyy v)"};
    double worst[8] = {};
    for (int f = 0; f < opt.fields; ++f) {
        const Field w = opt.zero_fields ? Field(grid) : random_frame_vanishing(grid, rng);
        const Field v = opt.zero_fields ? Field(grid) : random_frame_vanishing(grid, rng);
        const auto fr = frame_identity_residuals(w, opt.sign);
        const double r[8] = {fr.skew_x.relative(),
                             fr.skew_y.relative(),
                             fr.coercive_x.relative(),
                             fr.coercive_y.relative(),
                             antisymmetry_residual(w, v, Axis::X, opt.sign).relative(),
                             antisymmetry_residual(w, v, Axis::Y, opt.sign).relative(),
                             summation_by_parts_residual(w, v, Axis::X).relative(),
                             summation_by_parts_residual(w, v, Axis::Y).relative()};
        for (int q = 0; q < 8; ++q) worst[q] = std::max(worst[q], r[q]);
    }
    for (int q = 0; q < 8; ++q) {
        report.entries.push_back({names[q], worst[q], opt.tolerance, worst[q] <= opt.tolerance});
    }

    const double first_order = observed_stencil_order(M, false, opt.sign);
    const double second_order = observed_stencil_order(M, true);
    report.entries.push_back({"consistency order of wide_dx on sin(pi x)sin(pi y)", first_order,
                              opt.min_order, first_order >= opt.min_order});
    report.entries.push_back({"consistency order of wide_dxx on sin(pi x)sin(pi y)", second_order,
                              opt.min_order, second_order >= opt.min_order});
    return report;
}

// ---------------------------------------------------------------------------
// Output.

namespace detail {

inline std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

inline void finish(std::ofstream& out, const std::string& path)
{
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace detail

inline constexpr const char* kConvergenceHeader = "h,k,norm_u,norm_U,error,rate";

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows)
{
    using detail::num;
    std::ostringstream os;
    os << kConvergenceHeader << '\n';
    for (const auto& r : rows) {
        os << num(r.h) << ',' << num(r.k) << ',';
        if (r.ok) os << num(r.norm_u) << ',' << num(r.norm_U) << ',' << num(r.error);
        else os << ",,";
        os << ',' << (r.rate ? num(*r.rate) : std::string()) << '\n';
    }
    return os.str();
}

inline void emit_csv(const std::vector<ConvergenceRow>& rows, const std::string& path)
{
    auto out = detail::open_output(path);
    out << convergence_csv(rows);
    detail::finish(out, path);
}

/// Per-level history of a run.
inline void emit_levels_csv(const SolutionRecord& rec, const std::string& path)
{
    using detail::num;
    auto out = detail::open_output(path);
    out << "n,t,norm_u,norm_U,error,h2_u,h2_U,h2_error\n";
    for (const auto& L : rec.levels) {
        out << L.n << ',' << num(L.t) << ',';
        if (rec.has_exact) out << num(L.norm_u);
        out << ',' << num(L.norm_U) << ',';
        if (rec.has_exact) out << num(L.error);
        out << ',';
        if (rec.has_exact) out << num(L.h2_u);
        out << ',' << num(L.h2_U) << ',';
        if (rec.has_exact) out << num(L.h2_error);
        out << '\n';
    }
    detail::finish(out, path);
}

/// Field slice `x,y,u,U,e` at a dumped level; u and e blank without an exact solution.
inline void emit_solution_csv(const FieldDump& dump, const std::string& path)
{
    using detail::num;
    auto out = detail::open_output(path);
    const Grid2D& g = dump.U.grid();
    out << "x,y,u,U,e\n";
    for (int i = 0; i <= g.M; ++i) {
        for (int j = 0; j <= g.M; ++j) {
            out << num(g.x(i)) << ',' << num(g.y(j)) << ',';
            if (dump.u) out << num((*dump.u)(i, j));
            out << ',' << num(dump.U(i, j)) << ',';
            if (dump.u) out << num((*dump.u)(i, j) - dump.U(i, j));
            out << '\n';
        }
    }
    detail::finish(out, path);
}

/// Log-log convergence chart: log2(1/h) against log2(error), with a slope
/// -8/3 guide through the first point.
inline std::string convergence_svg(const std::vector<ConvergenceRow>& rows)
{
    using detail::num;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
        if (r.ok && r.error > 0.0) pts.emplace_back(std::log2(1.0 / r.h), std::log2(r.error));
    }
    constexpr double W = 480, H = 360, pad = 50;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!pts.empty()) {
        double x0 = pts.front().first, x1 = pts.back().first;
        double y0 = pts.front().second, y1 = y0;
        for (auto [x, y] : pts) {
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
        const double guide_end = pts.front().second - 8.0 / 3.0 * (x1 - x0);
        y0 = std::min(y0, guide_end);
        if (x1 - x0 < 1e-12) x1 = x0 + 1.0;
        if (y1 - y0 < 1e-12) y1 = y0 + 1.0;
        const auto sx = [&](double x) { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); };
        const auto sy = [&](double y) { return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad); };
        os << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\""
           << H - pad << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
           << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << num(sx(x0)) << "\" y1=\"" << num(sy(pts.front().second)) << "\" x2=\""
           << num(sx(x1)) << "\" y2=\"" << num(sy(guide_end))
           << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
        os << "<polyline fill=\"none\" stroke=\"blue\" points=\"";
        for (auto [x, y] : pts) os << num(sx(x)) << ',' << num(sy(y)) << ' ';
        os << "\"/>\n";
        for (auto [x, y] : pts) {
            os << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"3\" fill=\"blue\"/>\n";
        }
        os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">log2(1/h)</text>\n";
        os << "<text x=\"14\" y=\"" << H / 2 << "\" transform=\"rotate(-90 14 " << H / 2
           << ")\" text-anchor=\"middle\">log2(error)</text>\n";
        os << "<text x=\"" << W - pad << "\" y=\"" << pad - 10
           << "\" text-anchor=\"end\" fill=\"gray\">slope -8/3</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

/// Heatmap of a field (x to the right, y upwards), blue = min, red = max.
inline std::string field_svg(const Field& f)
{
    using detail::num;
    const Grid2D& g = f.grid();
    double lo = f.values().front(), hi = lo;
    for (double v : f.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo > 0.0 ? hi - lo : 1.0;
    constexpr double S = 400;
    const double cell = S / (g.M + 1);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << S << "\" height=\"" << S
       << "\" viewBox=\"0 0 " << S << ' ' << S << "\">\n";
    for (int i = 0; i <= g.M; ++i) {
        for (int j = 0; j <= g.M; ++j) {
            const double s = (f(i, j) - lo) / span;
            const int red = static_cast<int>(std::lround(255 * s));
            const int blue = 255 - red;
            os << "<rect x=\"" << num(i * cell) << "\" y=\"" << num((g.M - j) * cell) << "\" width=\""
               << num(cell) << "\" height=\"" << num(cell) << "\" fill=\"rgb(" << red << ",0," << blue
               << ")\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

inline void emit_svg(const std::vector<ConvergenceRow>& rows, const std::string& path)
{
    auto out = detail::open_output(path);
    out << convergence_svg(rows);
    detail::finish(out, path);
}

inline void emit_svg(const Field& field, const std::string& path)
{
    auto out = detail::open_output(path);
    out << field_svg(field);
    detail::finish(out, path);
}

}  // namespace rlw
