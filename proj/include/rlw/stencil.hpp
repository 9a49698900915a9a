#pragma once

#include <array>
#include <cassert>

#include "rlw/grid.hpp"

namespace rlw {

enum class Axis { X, Y };

inline double step(const Grid2D& g, Axis axis) { return axis == Axis::X ? g.hx : g.hy; }

/// Sign convention of the wide first-derivative stencil.
///
/// `corrected` approximates +d/dz. `printed` is the opposite-signed variant
/// (-u[i-2] + 8u[i-1] - 8u[i+1] + u[i+2]) / 12h, which approximates -d/dz;
/// it exists only so the consistency checks can be shown to reject it.
enum class FirstDerivativeSign { corrected, printed };

namespace stencil {

// Offsets -2..+2. Weights before division by 12h (first) or 12h^2 (second).
inline constexpr std::array<double, 5> kWideFirst{1.0, -8.0, 0.0, 8.0, -1.0};
inline constexpr std::array<double, 5> kWideSecond{-1.0, 16.0, -30.0, 16.0, -1.0};

inline constexpr std::array<double, 5> wide_first_weights(FirstDerivativeSign sign)
{
    if (sign == FirstDerivativeSign::corrected) return kWideFirst;
    return {-1.0, 8.0, 0.0, -8.0, 1.0};
}

}  // namespace stencil

namespace detail {

// Value at offset `o` from (i,j) along `axis`.
inline double shifted(const Field& u, Axis axis, int i, int j, int o)
{
    return axis == Axis::X ? u(i + o, j) : u(i, j + o);
}

}  // namespace detail

/// Pointwise wide first derivative at (i,j); requires 2 <= index <= M-2 along axis.
inline double wide_first_at(const Field& u, Axis axis, int i, int j,
                            FirstDerivativeSign sign = FirstDerivativeSign::corrected)
{
    const auto w = stencil::wide_first_weights(sign);
    double s = 0.0;
    for (int o = -2; o <= 2; ++o) s += w[o + 2] * detail::shifted(u, axis, i, j, o);
    return s / (12.0 * step(u.grid(), axis));
}

inline double wide_second_at(const Field& u, Axis axis, int i, int j)
{
    const double h = step(u.grid(), axis);
    double s = 0.0;
    for (int o = -2; o <= 2; ++o) s += stencil::kWideSecond[o + 2] * detail::shifted(u, axis, i, j, o);
    return s / (12.0 * h * h);
}

/// Half-point differences along one axis.
///
/// For axis X, `(i, j)` holds (u[i+1][j] - u[i][j]) / hx, the value at
/// x_{i+1/2}; defined for i = 0..M-1. Index M along the axis is unused (zero).
struct StaggeredField {
    Axis axis = Axis::X;
    Field values;

    [[nodiscard]] double operator()(int i, int j) const { return values(i, j); }
};

inline StaggeredField half_diff(const Field& u, Axis axis)
{
    const Grid2D& g = u.grid();
    const double h = step(g, axis);
    StaggeredField out{axis, Field(g)};
    for (int i = 0; i <= g.M; ++i) {
        for (int j = 0; j <= g.M; ++j) {
            const int along = axis == Axis::X ? i : j;
            if (along > g.M - 1) continue;
            out.values(i, j) = (detail::shifted(u, axis, i, j, 1) - u(i, j)) / h;
        }
    }
    return out;
}

/// Three-point second difference, defined on 1..M-1 along `axis`; zero elsewhere.
inline Field second_diff(const Field& u, Axis axis)
{
    const Grid2D& g = u.grid();
    const double h = step(g, axis);
    Field out(g);
    for (int i = 0; i <= g.M; ++i) {
        for (int j = 0; j <= g.M; ++j) {
            const int along = axis == Axis::X ? i : j;
            if (along < 1 || along > g.M - 1) continue;
            out(i, j) = (detail::shifted(u, axis, i, j, -1) - 2.0 * u(i, j) +
                         detail::shifted(u, axis, i, j, 1)) /
                        (h * h);
        }
    }
    return out;
}

/// Fourth-order first derivative on 2..M-2 along `axis`; zero elsewhere.
inline Field wide_first(const Field& u, Axis axis,
                        FirstDerivativeSign sign = FirstDerivativeSign::corrected)
{
    const Grid2D& g = u.grid();
    Field out(g);
    for (int i = 0; i <= g.M; ++i) {
        for (int j = 0; j <= g.M; ++j) {
            const int along = axis == Axis::X ? i : j;
            if (along < 2 || along > g.M - 2) continue;
            out(i, j) = wide_first_at(u, axis, i, j, sign);
        }
    }
    return out;
}

/// Fourth-order second derivative on 2..M-2 along `axis`; zero elsewhere.
inline Field wide_second(const Field& u, Axis axis)
{
    const Grid2D& g = u.grid();
    Field out(g);
    for (int i = 0; i <= g.M; ++i) {
        for (int j = 0; j <= g.M; ++j) {
            const int along = axis == Axis::X ? i : j;
            if (along < 2 || along > g.M - 2) continue;
            out(i, j) = wide_second_at(u, axis, i, j);
        }
    }
    return out;
}

}  // namespace rlw
