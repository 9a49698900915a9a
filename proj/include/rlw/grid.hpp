#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "rlw/errors.hpp"

namespace rlw {

/// Uniform tensor grid over (L1,L2)x(L3,L4) with M subdivisions per axis.
///
/// Nodes are indexed 0..M along each axis. The scheme owns the interior
/// index set {2..M-2}^2; layers {0,1,M-1,M} are boundary-owned.
struct Grid2D {
    double L1 = 0.0;
    double L2 = 1.0;
    double L3 = 0.0;
    double L4 = 1.0;
    int M = 8;
    double hx = 0.125;
    double hy = 0.125;

    [[nodiscard]] double x(int i) const { return L1 + i * hx; }
    [[nodiscard]] double y(int j) const { return L3 + j * hy; }
    [[nodiscard]] int nodes_per_axis() const { return M + 1; }
    [[nodiscard]] std::size_t node_count() const
    {
        return static_cast<std::size_t>(M + 1) * static_cast<std::size_t>(M + 1);
    }
    // first/last index of the scheme's interior
    [[nodiscard]] int interior_begin() const { return 2; }
    [[nodiscard]] int interior_end() const { return M - 2; }
    [[nodiscard]] bool is_interior(int i, int j) const
    {
        return i >= 2 && i <= M - 2 && j >= 2 && j <= M - 2;
    }

    friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

inline constexpr int kMinSubdivisions = 4;

inline Grid2D make_grid(double L1, double L2, double L3, double L4, int M)
{
    if (!(L1 < L2) || !(L3 < L4)) {
        throw ConfigError("make_grid: degenerate domain bounds");
    }
    if (M < kMinSubdivisions) {
        throw ConfigError("make_grid: M must be >= 4 (got " + std::to_string(M) + ")");
    }
    Grid2D g;
    g.L1 = L1;
    g.L2 = L2;
    g.L3 = L3;
    g.L4 = L4;
    g.M = M;
    g.hx = (L2 - L1) / M;
    g.hy = (L4 - L3) / M;
    return g;
}

/// Scalar nodal values on the (M+1)x(M+1) grid, value(i,j) <-> (x_i, y_j).
class Field {
public:
    Field() = default;
    explicit Field(const Grid2D& grid, double fill = 0.0)
        : grid_(grid), values_(grid.node_count(), fill)
    {
    }

    [[nodiscard]] const Grid2D& grid() const { return grid_; }
    [[nodiscard]] int M() const { return grid_.M; }

    [[nodiscard]] double& operator()(int i, int j) { return values_[index(i, j)]; }
    [[nodiscard]] double operator()(int i, int j) const { return values_[index(i, j)]; }

    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] std::vector<double>& values() { return values_; }

    [[nodiscard]] bool all_finite() const
    {
        for (double v : values_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    friend bool operator==(const Field&, const Field&) = default;

private:
    [[nodiscard]] std::size_t index(int i, int j) const
    {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(grid_.M + 1) +
               static_cast<std::size_t>(j);
    }

    Grid2D grid_{};
    std::vector<double> values_;
};

/// Uniform time levels t_n = n k, with half levels (n + 1/2) k.
struct TimeGrid {
    double T = 1.0;
    int N = 1;
    double k = 1.0;

    [[nodiscard]] double t(int n) const { return n == N ? T : n * k; }
    [[nodiscard]] double t_half(int n) const { return (n + 0.5) * k; }
};

inline TimeGrid make_time_grid(double T, int N)
{
    if (!(T > 0.0) || N < 1) throw ConfigError("make_time_grid: need T > 0 and N >= 1");
    return TimeGrid{T, N, T / N};
}

using SpaceTimeFunction = std::function<double(double x, double y, double t)>;

/// values(i,j) = phi(x_i, y_j, t) on every node.
inline Field sample(const Grid2D& grid, const SpaceTimeFunction& phi, double t)
{
    Field f(grid);
    for (int i = 0; i <= grid.M; ++i) {
        for (int j = 0; j <= grid.M; ++j) {
            const double v = phi(grid.x(i), grid.y(j), t);
            if (!std::isfinite(v)) {
                throw NumericalError("sample: non-finite value at node (" + std::to_string(i) +
                                     "," + std::to_string(j) + ")");
            }
            f(i, j) = v;
        }
    }
    return f;
}

}  // namespace rlw
