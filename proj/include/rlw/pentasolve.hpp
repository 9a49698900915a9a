#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "rlw/stencil.hpp"

namespace rlw {

/// Constant diagonals (offsets -2..+2) of an n x n pentadiagonal line operator.
struct PentaBands {
    double c_mm = 0.0;
    double c_m = 0.0;
    double c_0 = 1.0;
    double c_p = 0.0;
    double c_pp = 0.0;
    int n = 1;

    [[nodiscard]] std::array<double, 5> coefficients() const { return {c_mm, c_m, c_0, c_p, c_pp}; }

    /// (sum of |off-diagonals|) / |c_0|; strictly dominant iff < 1.
    [[nodiscard]] double dominance_ratio() const
    {
        return (std::abs(c_mm) + std::abs(c_m) + std::abs(c_p) + std::abs(c_pp)) / std::abs(c_0);
    }
    [[nodiscard]] bool diagonally_dominant() const { return dominance_ratio() < 1.0; }
};

/// Bands of I - alpha D2 - theta (gamma D2 - beta D1) along `axis`, where D2 and
/// D1 are the wide second/first derivative stencils. Unknowns are i = 2..M-2.
inline PentaBands assemble_line_operator(const Grid2D& grid, Axis axis, double alpha, double beta,
                                         double gamma, double theta)
{
    if (!(alpha > 0.0)) throw ConfigError("assemble_line_operator: alpha must be positive");
    if (!(theta >= 0.0)) throw ConfigError("assemble_line_operator: theta must be >= 0");
    const double h = step(grid, axis);
    std::array<double, 5> c{};
    for (int o = 0; o < 5; ++o) {
        const double d2 = stencil::kWideSecond[o] / (12.0 * h * h);
        const double d1 = stencil::kWideFirst[o] / (12.0 * h);
        c[o] = (o == 2 ? 1.0 : 0.0) - alpha * d2 - theta * (gamma * d2 - beta * d1);
    }
    return {c[0], c[1], c[2], c[3], c[4], grid.M - 3};
}

/// y = A x for the banded operator.
inline std::vector<double> multiply(const PentaBands& a, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != a.n) throw ConfigError("multiply: length mismatch");
    const auto c = a.coefficients();
    std::vector<double> y(x.size(), 0.0);
    for (int r = 0; r < a.n; ++r) {
        double s = 0.0;
        for (int o = -2; o <= 2; ++o) {
            const int col = r + o;
            if (col >= 0 && col < a.n) s += c[o + 2] * x[col];
        }
        y[r] = s;
    }
    return y;
}

/// Banded LU factors (no pivoting) of a pentadiagonal matrix.
class PentaFactorization {
public:
    [[nodiscard]] int size() const { return static_cast<int>(diag_.size()); }

    /// Solves A x = rhs; rhs and x may not alias.
    void solve(std::span<const double> rhs, std::span<double> x) const
    {
        const int n = size();
        if (static_cast<int>(rhs.size()) != n || static_cast<int>(x.size()) != n) {
            throw ConfigError("solve_line: length mismatch (expected " + std::to_string(n) + ")");
        }
        for (int k = 0; k < n; ++k) {
            double v = rhs[k];
            if (k >= 1) v -= l1_[k] * x[k - 1];
            if (k >= 2) v -= l2_[k] * x[k - 2];
            x[k] = v;
        }
        for (int k = n - 1; k >= 0; --k) {
            double v = x[k];
            if (k + 1 < n) v -= upper1_[k] * x[k + 1];
            if (k + 2 < n) v -= upper2_ * x[k + 2];
            x[k] = v / diag_[k];
        }
    }

    friend PentaFactorization factor(const PentaBands& bands);

private:
    std::vector<double> l1_;      // multipliers for row k from row k-1
    std::vector<double> l2_;      // multipliers for row k from row k-2
    std::vector<double> diag_;
    std::vector<double> upper1_;
    double upper2_ = 0.0;         // second superdiagonal is untouched by elimination
};

inline PentaFactorization factor(const PentaBands& bands)
{
    const int n = bands.n;
    if (n < 1) throw ConfigError("factor: system size must be >= 1");
    PentaFactorization f;
    f.l1_.assign(n, 0.0);
    f.l2_.assign(n, 0.0);
    f.diag_.assign(n, bands.c_0);
    f.upper1_.assign(n, bands.c_p);
    f.upper2_ = bands.c_pp;
    std::vector<double> sub1(n, bands.c_m);
    const double tiny = 1e-300;
    for (int k = 0; k < n; ++k) {
        const double piv = f.diag_[k];
        if (!(std::abs(piv) > tiny) || !std::isfinite(piv)) {
            throw NumericalError("factor: zero pivot at row " + std::to_string(k));
        }
        if (k + 1 < n) {
            const double m = sub1[k + 1] / piv;
            f.l1_[k + 1] = m;
            f.diag_[k + 1] -= m * f.upper1_[k];
            f.upper1_[k + 1] -= m * f.upper2_;
        }
        if (k + 2 < n) {
            const double m = bands.c_mm / piv;
            f.l2_[k + 2] = m;
            sub1[k + 2] -= m * f.upper1_[k];
            f.diag_[k + 2] -= m * f.upper2_;
        }
    }
    return f;
}

inline std::vector<double> solve_line(const PentaFactorization& fact, std::span<const double> rhs)
{
    std::vector<double> x(rhs.size());
    fact.solve(rhs, x);
    return x;
}

/// RHS correction moving the known layers {0,1} (left) and {M-1,M} (right)
/// of a line out of the interior rows i = 2..M-2.
///
/// `left` = {U_0, U_1}, `right` = {U_{M-1}, U_M}.
inline std::vector<double> boundary_moveout(const PentaBands& bands, std::array<double, 2> left,
                                            std::array<double, 2> right)
{
    const int n = bands.n;
    const int M = n + 3;
    const auto c = bands.coefficients();
    std::vector<double> corr(n, 0.0);
    const std::array<std::pair<int, double>, 4> known{
        {{0, left[0]}, {1, left[1]}, {M - 1, right[0]}, {M, right[1]}}};
    for (const auto& [node, value] : known) {
        for (int row = 2; row <= M - 2; ++row) {
            const int o = node - row;
            if (o < -2 || o > 2) continue;
            corr[row - 2] -= c[o + 2] * value;
        }
    }
    return corr;
}

}  // namespace rlw
