#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rlw/stencil.hpp"

namespace rlw {

/// Deterministic pairwise (cascade) summation.
inline double pairwise_sum(std::span<const double> xs)
{
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// A discrete sum together with the sum of absolute summands, the natural
/// scale against which cancellation residuals are judged.
struct WeightedSum {
    double value = 0.0;
    double magnitude = 0.0;
};

namespace detail {

struct IndexBox {
    int i0, i1, j0, j1;
};

template <typename Term>
WeightedSum weighted_sum(const Grid2D& g, IndexBox box, Term&& term)
{
    std::vector<double> terms;
    std::vector<double> mags;
    for (int i = box.i0; i <= box.i1; ++i) {
        for (int j = box.j0; j <= box.j1; ++j) {
            const double t = term(i, j);
            terms.push_back(t);
            mags.push_back(std::abs(t));
        }
    }
    const double w = g.hx * g.hy;
    return {w * pairwise_sum(terms), w * pairwise_sum(mags)};
}

// Index ranges of the discrete scalar products. Asymmetric on purpose: the
// summation-by-parts identities only close with exactly these ranges.
inline IndexBox plain_box(const Grid2D& g) { return {2, g.M - 2, 2, g.M - 2}; }

inline IndexBox half_box(const Grid2D& g, Axis a)
{
    return a == Axis::X ? IndexBox{1, g.M - 2, 2, g.M - 2} : IndexBox{2, g.M - 2, 1, g.M - 2};
}

inline IndexBox second_box(const Grid2D& g, Axis a)
{
    return a == Axis::X ? IndexBox{1, g.M - 1, 2, g.M - 2} : IndexBox{2, g.M - 2, 1, g.M - 1};
}

inline void require_same_grid(const Field& u, const Field& v)
{
    if (!(u.grid() == v.grid())) throw ConfigError("inner: fields live on different grids");
}

}  // namespace detail

enum class InnerVariant {
    plain,        ///< (u, v)
    half_diff,    ///< (d_z u, d_z v) at half points
    second_diff,  ///< (d_z^2 u, d_z^2 v)
    wide_first,   ///< (wide d_z u, v)
    wide_second,  ///< (wide d_zz u, v)
};

inline WeightedSum inner_sum(const Field& u, const Field& v, InnerVariant variant,
                             Axis axis = Axis::X,
                             FirstDerivativeSign sign = FirstDerivativeSign::corrected)
{
    detail::require_same_grid(u, v);
    const Grid2D& g = u.grid();
    switch (variant) {
    case InnerVariant::plain:
        return detail::weighted_sum(g, detail::plain_box(g),
                                    [&](int i, int j) { return u(i, j) * v(i, j); });
    case InnerVariant::half_diff: {
        const auto du = half_diff(u, axis);
        const auto dv = half_diff(v, axis);
        return detail::weighted_sum(g, detail::half_box(g, axis),
                                    [&](int i, int j) { return du(i, j) * dv(i, j); });
    }
    case InnerVariant::second_diff: {
        const auto du = second_diff(u, axis);
        const auto dv = second_diff(v, axis);
        return detail::weighted_sum(g, detail::second_box(g, axis),
                                    [&](int i, int j) { return du(i, j) * dv(i, j); });
    }
    case InnerVariant::wide_first:
        return detail::weighted_sum(g, detail::plain_box(g), [&](int i, int j) {
            return wide_first_at(u, axis, i, j, sign) * v(i, j);
        });
    case InnerVariant::wide_second:
        return detail::weighted_sum(g, detail::plain_box(g), [&](int i, int j) {
            return wide_second_at(u, axis, i, j) * v(i, j);
        });
    }
    return {};
}

inline double inner(const Field& u, const Field& v, InnerVariant variant, Axis axis = Axis::X)
{
    return inner_sum(u, v, variant, axis).value;
}

inline double l2_norm(const Field& u) { return std::sqrt(inner(u, u, InnerVariant::plain)); }

/// Squared pieces of the discrete H^2 norm and the combined values.
struct NormReport {
    double l2 = 0.0;
    double h2 = 0.0;
    double l2_sq = 0.0;
    double dx_sq = 0.0;
    double dy_sq = 0.0;
    double dxx_sq = 0.0;
    double dyy_sq = 0.0;
};

namespace detail {

inline void require_alpha(double alpha)
{
    if (!(alpha > 0.0)) throw ConfigError("norms: alpha must be positive");
}

}  // namespace detail

/// ||u||_{H^2}^2 = ||u||^2 + alpha [ ||d_x u||^2 + ||d_y u||^2
///                 + h^2/12 (||d_x^2 u||^2 + ||d_y^2 u||^2) ].
/// With unequal steps the curvature terms are weighted by hx^2 and hy^2.
inline NormReport h2_norm(const Field& u, double alpha)
{
    detail::require_alpha(alpha);
    const Grid2D& g = u.grid();
    NormReport r;
    r.l2_sq = inner(u, u, InnerVariant::plain);
    r.dx_sq = inner(u, u, InnerVariant::half_diff, Axis::X);
    r.dy_sq = inner(u, u, InnerVariant::half_diff, Axis::Y);
    r.dxx_sq = inner(u, u, InnerVariant::second_diff, Axis::X);
    r.dyy_sq = inner(u, u, InnerVariant::second_diff, Axis::Y);
    r.l2 = std::sqrt(r.l2_sq);
    r.h2 = std::sqrt(r.l2_sq + alpha * (r.dx_sq + r.dy_sq + g.hx * g.hx / 12.0 * r.dxx_sq +
                                        g.hy * g.hy / 12.0 * r.dyy_sq));
    return r;
}

/// E_(z) = ||e||^2 + alpha (||d_z e||^2 + h_z^2/12 ||d_z^2 e||^2).
inline double directional_energy(const Field& e, Axis axis, double alpha)
{
    detail::require_alpha(alpha);
    const double h = step(e.grid(), axis);
    return inner(e, e, InnerVariant::plain) +
           alpha * (inner(e, e, InnerVariant::half_diff, axis) +
                    h * h / 12.0 * inner(e, e, InnerVariant::second_diff, axis));
}

/// Max of a norm over visited time levels.
class RunningMax {
public:
    void feed(double value)
    {
        max_ = count_ == 0 ? value : std::max(max_, value);
        ++count_;
    }
    [[nodiscard]] double value() const { return max_; }
    [[nodiscard]] int count() const { return count_; }

private:
    double max_ = 0.0;
    int count_ = 0;
};

// ---------------------------------------------------------------------------
// Summation-by-parts identities on frame-vanishing fields.

/// Absolute residual of an identity and the scale it is judged against.
struct IdentityResidual {
    double abs = 0.0;
    double scale = 0.0;

    [[nodiscard]] double relative() const { return scale > 0.0 ? abs / scale : abs; }
};

/// True when w vanishes on layers {0,1,M-1,M} along both axes.
inline bool vanishes_on_frame(const Field& w)
{
    const int M = w.M();
    for (int i = 0; i <= M; ++i) {
        for (int j = 0; j <= M; ++j) {
            if (!w.grid().is_interior(i, j) && w(i, j) != 0.0) return false;
        }
    }
    return true;
}

namespace detail {

inline void require_frame_vanishing(const Field& w, const char* who)
{
    if (!vanishes_on_frame(w)) {
        throw ConfigError(std::string(who) + ": field does not vanish on layers {0,1,M-1,M}");
    }
}

}  // namespace detail

/// (wide d_z w, v) + (wide d_z v, w) = 0.
inline IdentityResidual antisymmetry_residual(
    const Field& w, const Field& v, Axis axis,
    FirstDerivativeSign sign = FirstDerivativeSign::corrected)
{
    detail::require_frame_vanishing(w, "antisymmetry_residual");
    detail::require_frame_vanishing(v, "antisymmetry_residual");
    const auto a = inner_sum(w, v, InnerVariant::wide_first, axis, sign);
    const auto b = inner_sum(v, w, InnerVariant::wide_first, axis, sign);
    return {std::abs(a.value + b.value), a.magnitude + b.magnitude};
}

/// (wide d_zz w, v) = -(d_z w, d_z v) - h^2/12 (d_z^2 w, d_z^2 v).
inline IdentityResidual summation_by_parts_residual(const Field& w, const Field& v, Axis axis)
{
    detail::require_frame_vanishing(w, "summation_by_parts_residual");
    detail::require_frame_vanishing(v, "summation_by_parts_residual");
    const double h = step(w.grid(), axis);
    const auto lhs = inner_sum(w, v, InnerVariant::wide_second, axis);
    const auto grad = inner_sum(w, v, InnerVariant::half_diff, axis);
    const auto curv = inner_sum(w, v, InnerVariant::second_diff, axis);
    const double c = h * h / 12.0;
    return {std::abs(lhs.value + grad.value + c * curv.value),
            lhs.magnitude + grad.magnitude + c * curv.magnitude};
}

struct FrameIdentityResiduals {
    IdentityResidual skew_x;       ///< |(wide d_x w, w)|
    IdentityResidual skew_y;
    IdentityResidual coercive_x;   ///< |(-wide d_xx w, w) - ||d_x w||^2 - h^2/12 ||d_x^2 w||^2|
    IdentityResidual coercive_y;
};

inline FrameIdentityResiduals frame_identity_residuals(const Field& w,
                                        FirstDerivativeSign sign = FirstDerivativeSign::corrected)
{
    detail::require_frame_vanishing(w, "frame_identity_residuals");
    FrameIdentityResiduals r;
    for (Axis axis : {Axis::X, Axis::Y}) {
        const auto skew = inner_sum(w, w, InnerVariant::wide_first, axis, sign);
        const IdentityResidual s{std::abs(skew.value), skew.magnitude};
        const double h = step(w.grid(), axis);
        const auto lhs = inner_sum(w, w, InnerVariant::wide_second, axis);
        const auto grad = inner_sum(w, w, InnerVariant::half_diff, axis);
        const auto curv = inner_sum(w, w, InnerVariant::second_diff, axis);
        const double c = h * h / 12.0;
        const IdentityResidual k{std::abs(-lhs.value - grad.value - c * curv.value),
                                 lhs.magnitude + grad.magnitude + c * curv.magnitude};
        if (axis == Axis::X) {
            r.skew_x = s;
            r.coercive_x = k;
        } else {
            r.skew_y = s;
            r.coercive_y = k;
        }
    }
    return r;
}

}  // namespace rlw
