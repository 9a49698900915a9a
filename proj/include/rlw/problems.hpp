#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "rlw/grid.hpp"
#include "rlw/stencil.hpp"

namespace rlw {

/// Source of one directional sub-equation: f_z(x, y, t, u, u_z).
using DirectionalSource = std::function<double(double x, double y, double t, double u, double uz)>;
/// Full source f(x, y, t, u, u_x, u_y) of the unsplit model.
using FullSource =
    std::function<double(double x, double y, double t, double u, double ux, double uy)>;

/// An exact solution with the partial derivatives the source construction needs.
struct ExactSolution {
    SpaceTimeFunction u;
    SpaceTimeFunction u_t;
    SpaceTimeFunction u_x;
    SpaceTimeFunction u_y;
    SpaceTimeFunction u_xx;
    SpaceTimeFunction u_yy;
    SpaceTimeFunction u_txx;
    SpaceTimeFunction u_tyy;
};

/// How the full source is distributed over the two directional sub-equations.
///
/// Both sub-equations carry the full time derivative u_t, so the split that
/// makes the exact solution solve each of them has f1 + f2 = f + u_t
/// (`consistent`). `additive` enforces f1 + f2 = f; the scheme then converges
/// to the solution of the x sub-equation alone.
enum class SourceSplit { consistent, additive };

/// Model u_t - alpha Lap u_t - gamma Lap u + beta (u_x + u_y) = f on a rectangle,
/// split into x and y sub-equations with sources f1 and f2.
struct ProblemSpec {
    std::string name;
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 0.0;
    double L1 = 0.0, L2 = 1.0, L3 = 0.0, L4 = 1.0;
    double T = 1.0;
    SourceSplit split = SourceSplit::consistent;
    DirectionalSource f1;
    DirectionalSource f2;
    FullSource source;
    std::function<double(double x, double y)> u0;
    SpaceTimeFunction g;
    std::optional<ExactSolution> exact;

    [[nodiscard]] Grid2D grid(int M) const { return make_grid(L1, L2, L3, L4, M); }
};

/// u_t - alpha u_tzz - gamma u_zz + beta u_z of the exact solution along one axis.
inline double directional_defect(const ExactSolution& e, double alpha, double beta, double gamma,
                                 Axis axis, double x, double y, double t)
{
    if (axis == Axis::X) {
        return e.u_t(x, y, t) - alpha * e.u_txx(x, y, t) - gamma * e.u_xx(x, y, t) +
               beta * e.u_x(x, y, t);
    }
    return e.u_t(x, y, t) - alpha * e.u_tyy(x, y, t) - gamma * e.u_yy(x, y, t) +
           beta * e.u_y(x, y, t);
}

inline void validate(const ProblemSpec& p)
{
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw ConfigError(p.name + ": need 0 < alpha <= 1");
    if (!(std::abs(p.beta) <= 1.0)) throw ConfigError(p.name + ": need |beta| <= 1");
    if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) throw ConfigError(p.name + ": need 0 <= gamma <= 1");
    if (!(p.L1 < p.L2 && p.L3 < p.L4)) throw ConfigError(p.name + ": degenerate domain");
    if (!(p.T > 0.0)) throw ConfigError(p.name + ": need T > 0");
    if (!p.f1 || !p.f2 || !p.u0 || !p.g) throw ConfigError(p.name + ": incomplete problem data");
}

/// Max |u0 - exact(.,.,0)| and |g - exact| over sampled nodes and boundary points.
inline double compatibility_defect(const ProblemSpec& p, int samples = 17)
{
    if (!p.exact) return 0.0;
    double worst = 0.0;
    for (int a = 0; a <= samples; ++a) {
        for (int b = 0; b <= samples; ++b) {
            const double x = p.L1 + (p.L2 - p.L1) * a / samples;
            const double y = p.L3 + (p.L4 - p.L3) * b / samples;
            worst = std::max(worst, std::abs(p.u0(x, y) - p.exact->u(x, y, 0.0)));
        }
        const double s = static_cast<double>(a) / samples;
        for (double t : {0.0, 0.37 * p.T, p.T}) {
            const double xs = p.L1 + (p.L2 - p.L1) * s;
            const double ys = p.L3 + (p.L4 - p.L3) * s;
            for (auto [x, y] : {std::pair{p.L1, ys}, std::pair{p.L2, ys}, std::pair{xs, p.L3},
                                std::pair{xs, p.L4}}) {
                worst = std::max(worst, std::abs(p.g(x, y, t) - p.exact->u(x, y, t)));
            }
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Built-in problems.

/// u_t - Lap u_t - Lap u + u = 0 on (0,1)^2, u = e^{-t} sin(pi x) sin(pi y).
inline ProblemSpec example1(SourceSplit split = SourceSplit::consistent)
{
    using std::numbers::pi;
    ProblemSpec p;
    p.name = "example1";
    p.alpha = 1.0;
    p.beta = 0.0;
    p.gamma = 1.0;
    p.split = split;
    ExactSolution e;
    e.u = [](double x, double y, double t) { return std::exp(-t) * std::sin(pi * x) * std::sin(pi * y); };
    e.u_t = [u = e.u](double x, double y, double t) { return -u(x, y, t); };
    e.u_x = [](double x, double y, double t) {
        return pi * std::exp(-t) * std::cos(pi * x) * std::sin(pi * y);
    };
    e.u_y = [](double x, double y, double t) {
        return pi * std::exp(-t) * std::sin(pi * x) * std::cos(pi * y);
    };
    e.u_xx = [u = e.u](double x, double y, double t) { return -pi * pi * u(x, y, t); };
    e.u_yy = e.u_xx;
    e.u_txx = [u = e.u](double x, double y, double t) { return pi * pi * u(x, y, t); };
    e.u_tyy = e.u_txx;
    p.exact = e;
    // Reaction term -u: each sub-equation takes all of it under the consistent
    // split, half of it under the additive one.
    const double share = split == SourceSplit::consistent ? 1.0 : 0.5;
    p.f1 = [share](double, double, double, double u, double) { return -share * u; };
    p.f2 = p.f1;
    p.source = [](double, double, double, double u, double, double) { return -u; };
    p.u0 = [u = e.u](double x, double y) { return u(x, y, 0.0); };
    p.g = [](double, double, double) { return 0.0; };
    return p;
}

/// u_t - Lap u_t - Lap u = f with u = sin(pi x) sin(pi y) e^{x+y+t} and
/// f = (4 pi^2 - 3) u - 4 pi e^{x+y+t} [sin(pi x) cos(pi y) + cos(pi x) sin(pi y)].
inline ProblemSpec example2(SourceSplit split = SourceSplit::consistent)
{
    using std::numbers::pi;
    ProblemSpec p;
    p.name = "example2";
    p.alpha = 1.0;
    p.beta = 0.0;
    p.gamma = 1.0;
    p.split = split;
    ExactSolution e;
    e.u = [](double x, double y, double t) {
        return std::sin(pi * x) * std::sin(pi * y) * std::exp(x + y + t);
    };
    e.u_t = e.u;
    // d/dx [sin(pi x) e^x] = e^x (sin + pi cos); d2/dx2 = e^x ((1 - pi^2) sin + 2 pi cos)
    e.u_x = [](double x, double y, double t) {
        return std::exp(x + y + t) * std::sin(pi * y) * (std::sin(pi * x) + pi * std::cos(pi * x));
    };
    e.u_y = [](double x, double y, double t) {
        return std::exp(x + y + t) * std::sin(pi * x) * (std::sin(pi * y) + pi * std::cos(pi * y));
    };
    e.u_xx = [](double x, double y, double t) {
        return std::exp(x + y + t) * std::sin(pi * y) *
               ((1.0 - pi * pi) * std::sin(pi * x) + 2.0 * pi * std::cos(pi * x));
    };
    e.u_yy = [](double x, double y, double t) {
        return std::exp(x + y + t) * std::sin(pi * x) *
               ((1.0 - pi * pi) * std::sin(pi * y) + 2.0 * pi * std::cos(pi * y));
    };
    e.u_txx = e.u_xx;
    e.u_tyy = e.u_yy;
    p.exact = e;

    // cos(pi x) sin(pi y) arises from x-derivatives, so it belongs to f1.
    const auto forcing_x = [](double x, double y, double t) {
        return -4.0 * pi * std::exp(x + y + t) * std::cos(pi * x) * std::sin(pi * y);
    };
    const auto forcing_y = [](double x, double y, double t) {
        return -4.0 * pi * std::exp(x + y + t) * std::sin(pi * x) * std::cos(pi * y);
    };
    const double reaction = split == SourceSplit::consistent ? 2.0 * pi * pi - 1.0
                                                             : 0.5 * (4.0 * pi * pi - 3.0);
    p.f1 = [=](double x, double y, double t, double u, double) {
        return reaction * u + forcing_x(x, y, t);
    };
    p.f2 = [=](double x, double y, double t, double u, double) {
        return reaction * u + forcing_y(x, y, t);
    };
    p.source = [=](double x, double y, double t, double u, double, double) {
        return (4.0 * pi * pi - 3.0) * u + forcing_x(x, y, t) + forcing_y(x, y, t);
    };
    p.u0 = [u = e.u](double x, double y) { return u(x, y, 0.0); };
    p.g = [](double, double, double) { return 0.0; };
    return p;
}

inline double sech2(double s)
{
    const double c = std::cosh(s);
    return 1.0 / (c * c);
}

/// u_t - Lap u_t - (u_x + u_y) + u u_x + u u_y = 0 with the reference
/// solution sech^2(x + y - t). The reference solution does not satisfy this
/// equation exactly; under the consistent split its directional defects are
/// added as forcing so it solves both sub-equations.
inline ProblemSpec example3(SourceSplit split = SourceSplit::consistent)
{
    ProblemSpec p;
    p.name = "example3";
    p.alpha = 1.0;
    p.beta = -1.0;
    p.gamma = 0.0;
    p.split = split;
    // F = sech^2 s, F' = -2 F tanh s, F'' = F (4 - 6F), F''' = F' (4 - 12F)
    const auto F = [](double s) { return sech2(s); };
    const auto F1 = [](double s) { return -2.0 * sech2(s) * std::tanh(s); };
    const auto F2 = [](double s) {
        const double f = sech2(s);
        return f * (4.0 - 6.0 * f);
    };
    const auto F3 = [F1](double s) { return F1(s) * (4.0 - 12.0 * sech2(s)); };
    ExactSolution e;
    e.u = [F](double x, double y, double t) { return F(x + y - t); };
    e.u_t = [F1](double x, double y, double t) { return -F1(x + y - t); };
    e.u_x = [F1](double x, double y, double t) { return F1(x + y - t); };
    e.u_y = e.u_x;
    e.u_xx = [F2](double x, double y, double t) { return F2(x + y - t); };
    e.u_yy = e.u_xx;
    e.u_txx = [F3](double x, double y, double t) { return -F3(x + y - t); };
    e.u_tyy = e.u_txx;
    p.exact = e;

    const double alpha = p.alpha, beta = p.beta, gamma = p.gamma;
    if (split == SourceSplit::consistent) {
        p.f1 = [=](double x, double y, double t, double u, double ux) {
            const double ue = e.u(x, y, t);
            const double defect = directional_defect(e, alpha, beta, gamma, Axis::X, x, y, t) +
                                  ue * e.u_x(x, y, t);
            return -u * ux + defect;
        };
        p.f2 = [=](double x, double y, double t, double u, double uy) {
            const double ue = e.u(x, y, t);
            const double defect = directional_defect(e, alpha, beta, gamma, Axis::Y, x, y, t) +
                                  ue * e.u_y(x, y, t);
            return -u * uy + defect;
        };
    } else {
        p.f1 = [](double, double, double, double u, double ux) { return -u * ux; };
        p.f2 = [](double, double, double, double u, double uy) { return -u * uy; };
    }
    p.source = [](double, double, double, double u, double ux, double uy) { return -u * (ux + uy); };
    p.u0 = [u = e.u](double x, double y) { return u(x, y, 0.0); };
    // The four boundary traces; interior points fall back to the reference solution.
    p.g = [F](double x, double y, double t) {
        constexpr double eps = 1e-14;
        if (std::abs(x) < eps) return F(y - t);
        if (std::abs(x - 1.0) < eps) return F(y - t + 1.0);
        if (std::abs(y) < eps) return F(-x + t);
        if (std::abs(y - 1.0) < eps) return F(-x + t - 1.0);
        return F(x + y - t);
    };
    return p;
}

/// Problem whose source makes `exact` a solution, given analytic partials.
///
/// Under the consistent split f_z = u_t - alpha u_tzz - gamma u_zz + beta u_z
/// of the exact solution; under the additive split each f_z gives up u_t / 2.
inline ProblemSpec manufactured(double alpha, double beta, double gamma, ExactSolution exact,
                                SourceSplit split = SourceSplit::consistent,
                                std::string name = "manufactured")
{
    ProblemSpec p;
    p.name = std::move(name);
    p.alpha = alpha;
    p.beta = beta;
    p.gamma = gamma;
    p.split = split;
    p.exact = exact;
    const double shed = split == SourceSplit::consistent ? 0.0 : 0.5;
    const auto e = exact;
    p.f1 = [=](double x, double y, double t, double, double) {
        return directional_defect(e, alpha, beta, gamma, Axis::X, x, y, t) - shed * e.u_t(x, y, t);
    };
    p.f2 = [=](double x, double y, double t, double, double) {
        return directional_defect(e, alpha, beta, gamma, Axis::Y, x, y, t) - shed * e.u_t(x, y, t);
    };
    p.source = [=](double x, double y, double t, double, double, double) {
        return directional_defect(e, alpha, beta, gamma, Axis::X, x, y, t) +
               directional_defect(e, alpha, beta, gamma, Axis::Y, x, y, t) - e.u_t(x, y, t);
    };
    p.u0 = [u = e.u](double x, double y) { return u(x, y, 0.0); };
    p.g = e.u;
    return p;
}

/// Exact solutions available as manufactured presets.
namespace presets {

inline ExactSolution zero()
{
    const SpaceTimeFunction z = [](double, double, double) { return 0.0; };
    return {z, z, z, z, z, z, z, z};
}

inline ExactSolution constant(double c)
{
    ExactSolution e = zero();
    e.u = [c](double, double, double) { return c; };
    return e;
}

/// (1 + t) x^2 y^2
inline ExactSolution poly()
{
    ExactSolution e;
    e.u = [](double x, double y, double t) { return (1.0 + t) * x * x * y * y; };
    e.u_t = [](double x, double y, double) { return x * x * y * y; };
    e.u_x = [](double x, double y, double t) { return 2.0 * (1.0 + t) * x * y * y; };
    e.u_y = [](double x, double y, double t) { return 2.0 * (1.0 + t) * x * x * y; };
    e.u_xx = [](double, double y, double t) { return 2.0 * (1.0 + t) * y * y; };
    e.u_yy = [](double x, double, double t) { return 2.0 * (1.0 + t) * x * x; };
    e.u_txx = [](double, double y, double) { return 2.0 * y * y; };
    e.u_tyy = [](double x, double, double) { return 2.0 * x * x; };
    return e;
}

/// sin(x + 2y - t): a travelling wave with no symmetry between the axes.
inline ExactSolution wave()
{
    ExactSolution e;
    e.u = [](double x, double y, double t) { return std::sin(x + 2.0 * y - t); };
    e.u_t = [](double x, double y, double t) { return -std::cos(x + 2.0 * y - t); };
    e.u_x = [](double x, double y, double t) { return std::cos(x + 2.0 * y - t); };
    e.u_y = [](double x, double y, double t) { return 2.0 * std::cos(x + 2.0 * y - t); };
    e.u_xx = [](double x, double y, double t) { return -std::sin(x + 2.0 * y - t); };
    e.u_yy = [](double x, double y, double t) { return -4.0 * std::sin(x + 2.0 * y - t); };
    e.u_txx = [](double x, double y, double t) { return std::cos(x + 2.0 * y - t); };
    e.u_tyy = [](double x, double y, double t) { return 4.0 * std::cos(x + 2.0 * y - t); };
    return e;
}

}  // namespace presets

struct Coefficients {
    double alpha = 1.0;
    double beta = 0.5;
    double gamma = 0.5;
};

/// Resolves `example1|example2|example3|manufactured:<zero|poly|wave>`.
/// `coeffs` only applies to manufactured problems.
inline ProblemSpec problem_by_name(std::string_view name, SourceSplit split = SourceSplit::consistent,
                                   Coefficients coeffs = {})
{
    if (name == "example1") return example1(split);
    if (name == "example2") return example2(split);
    if (name == "example3") return example3(split);
    constexpr std::string_view prefix = "manufactured:";
    if (name.substr(0, prefix.size()) == prefix) {
        const std::string_view preset = name.substr(prefix.size());
        const std::string full(name);
        if (preset == "zero") {
            return manufactured(coeffs.alpha, coeffs.beta, coeffs.gamma, presets::zero(), split, full);
        }
        if (preset == "poly") {
            return manufactured(coeffs.alpha, coeffs.beta, coeffs.gamma, presets::poly(), split, full);
        }
        if (preset == "wave") {
            return manufactured(coeffs.alpha, coeffs.beta, coeffs.gamma, presets::wave(), split, full);
        }
    }
    throw ConfigError("unknown problem '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Residual of the exact solution in the unsplit model.

/// Ridders-extrapolated central difference of order 1 or 2 (Neville tableau
/// in h^2, step shrink 1.4, stops when the error estimate grows).
inline double extrapolated_derivative(const std::function<double(double)>& g, double x, int order,
                                      double h0)
{
    constexpr int kTable = 10;
    constexpr double kShrink = 1.4;
    constexpr double kShrink2 = kShrink * kShrink;
    const auto central = [&](double h) {
        if (order == 1) return (g(x + h) - g(x - h)) / (2.0 * h);
        return (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h);
    };
    double a[kTable][kTable];
    double h = h0;
    a[0][0] = central(h);
    double best = a[0][0];
    double err = 1e300;
    for (int i = 1; i < kTable; ++i) {
        h /= kShrink;
        a[0][i] = central(h);
        double fac = kShrink2;
        for (int j = 1; j <= i; ++j) {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= kShrink2;
            const double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
            if (e <= err) {
                err = e;
                best = a[j][i];
            }
        }
        if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * err) break;
    }
    return best;
}

struct ResidualCheck {
    double max_abs = 0.0;
    /// max of |residual| / (1 + sum of |individual terms|)
    double max_relative = 0.0;
    int points = 0;
};

/// Max residual of the exact solution in u_t - alpha Lap u_t - gamma Lap u +
/// beta (u_x + u_y) - f, sampled at random interior space-time points.
/// Derivatives come from extrapolated differences of exact.u only.
inline ResidualCheck residual_check(const ProblemSpec& p, int n_points, unsigned seed)
{
    if (!p.exact) throw ConfigError(p.name + ": residual_check needs an exact solution");
    if (!p.source) throw ConfigError(p.name + ": residual_check needs the full source");
    const auto& u = p.exact->u;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(p.L1 + 0.1 * (p.L2 - p.L1), p.L2 - 0.1 * (p.L2 - p.L1));
    std::uniform_real_distribution<double> uy(p.L3 + 0.1 * (p.L4 - p.L3), p.L4 - 0.1 * (p.L4 - p.L3));
    std::uniform_real_distribution<double> ut(0.1 * p.T, 0.9 * p.T);
    constexpr double h0 = 0.05;
    ResidualCheck r;
    for (int n = 0; n < n_points; ++n) {
        const double x = ux(rng), y = uy(rng), t = ut(rng);
        const auto d = [](const std::function<double(double)>& g, double at, int order) {
            return extrapolated_derivative(g, at, order, h0);
        };
        const double v = u(x, y, t);
        const double vt = d([&](double s) { return u(x, y, s); }, t, 1);
        const double vx = d([&](double s) { return u(s, y, t); }, x, 1);
        const double vy = d([&](double s) { return u(x, s, t); }, y, 1);
        const double vxx = d([&](double s) { return u(s, y, t); }, x, 2);
        const double vyy = d([&](double s) { return u(x, s, t); }, y, 2);
        const double vtxx = d([&](double s) { return d([&](double q) { return u(q, y, s); }, x, 2); }, t, 1);
        const double vtyy = d([&](double s) { return d([&](double q) { return u(x, q, s); }, y, 2); }, t, 1);
        const double terms[] = {vt, -p.alpha * (vtxx + vtyy), -p.gamma * (vxx + vyy),
                                p.beta * (vx + vy), -p.source(x, y, t, v, vx, vy)};
        double res = 0.0, mag = 0.0;
        for (double term : terms) {
            res += term;
            mag += std::abs(term);
        }
        r.max_abs = std::max(r.max_abs, std::abs(res));
        r.max_relative = std::max(r.max_relative, std::abs(res) / (1.0 + mag));
        ++r.points;
    }
    return r;
}

}  // namespace rlw
