#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dense_oracle.hpp"

using namespace rlw;
using namespace rlw::testing;

namespace {

double max_interior_diff(const Field& a, const Field& b)
{
    double worst = 0.0;
    for (int i = 2; i <= a.M() - 2; ++i)
        for (int j = 2; j <= a.M() - 2; ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

double max_abs_diff(const Field& a, const Field& b)
{
    double worst = 0.0;
    for (std::size_t q = 0; q < a.values().size(); ++q)
        worst = std::max(worst, std::abs(a.values()[q] - b.values()[q]));
    return worst;
}

struct Draw {
    LinearProblem lp;
    double k;
    Grid2D grid;
};

Draw random_linear_problem(std::mt19937_64& rng, int M)
{
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    const double alpha = 1.0 - u01(rng);  // (0, 1]
    const double beta = u01(rng);
    const double gamma = u01(rng);
    LinearSource sx{sym(rng), 0.5 * sym(rng), nullptr};
    LinearSource sy{sym(rng), 0.5 * sym(rng), nullptr};
    const double a = sym(rng), b = sym(rng);
    sx.s = [a](double x, double y, double t) { return a * std::cos(x - y + t); };
    sy.s = [b](double x, double y, double t) { return b * x * y * (1.0 + t); };
    Draw d{linear_problem(alpha, beta, gamma, sx, sy, presets::wave()), 0.0, make_grid(0.0, 1.0, 0.0, 1.0, M)};
    d.k = time_step_rule(d.grid.hx, d.grid.hy);
    return d;
}

Field random_start(const Grid2D& g, std::mt19937_64& rng, double t)
{
    // smooth exact layers plus random interior noise
    Field U = sample(g, presets::wave().u, t);
    std::uniform_real_distribution<double> d(-0.1, 0.1);
    for (int i = 2; i <= g.M - 2; ++i)
        for (int j = 2; j <= g.M - 2; ++j) U(i, j) += d(rng);
    return U;
}

}  // namespace

TEST(TimeStep, RuleExamples)
{
    EXPECT_NEAR(time_step_rule(0.125, 0.125), 1.0 / 16.0, 1e-15);
    EXPECT_NEAR(time_step_rule(0.125, 0.5), 1.0 / 16.0, 1e-15);
    EXPECT_NEAR(time_step_rule(0.5, 0.125), 1.0 / 16.0, 1e-15);
    const TimeGrid a = resolve_time_grid(1.0, time_step_rule(0.125, 0.125));
    EXPECT_EQ(a.N, 16);
    EXPECT_DOUBLE_EQ(a.k, 1.0 / 16.0);
    const TimeGrid b = resolve_time_grid(1.0, time_step_rule(0.5, 0.5));
    EXPECT_EQ(b.N, 3);
    EXPECT_DOUBLE_EQ(b.k, 1.0 / 3.0);
    EXPECT_THROW(time_step_rule(0.0, 0.1), ConfigError);
    EXPECT_THROW(resolve_time_grid(1.0, -0.1), ConfigError);
}

TEST(SchemeConfigTest, Validation)
{
    SchemeConfig c;
    EXPECT_NO_THROW(validate(c));
    c.k = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.picard_max_iters = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.picard_tol = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(Boundary, ExactModeFillsFourLayers)
{
    const ProblemSpec p = example3();
    const Grid2D g = p.grid(8);
    Field f(g, 123.0);
    fill_boundary_layers(f, 0.3, p, BoundaryMode::exact);
    for (int i = 0; i <= 8; ++i) {
        for (int j = 0; j <= 8; ++j) {
            if (g.is_interior(i, j)) EXPECT_EQ(f(i, j), 123.0);
            else EXPECT_NEAR(f(i, j), p.exact->u(g.x(i), g.y(j), 0.3), 1e-15);
        }
    }
}

TEST(Boundary, PaperCopyModeCopiesOuterLayer)
{
    const ProblemSpec p = example3();
    const Grid2D g = p.grid(8);
    Field f(g, 123.0);
    fill_boundary_layers(f, 0.3, p, BoundaryMode::paper_copy);
    for (int q = 2; q <= 6; ++q) {
        EXPECT_EQ(f(1, q), f(0, q));
        EXPECT_EQ(f(7, q), f(8, q));
        EXPECT_EQ(f(q, 1), f(q, 0));
        EXPECT_EQ(f(q, 7), f(q, 8));
        EXPECT_NEAR(f(0, q), p.g(0.0, g.y(q), 0.3), 1e-15);
    }
    EXPECT_EQ(f(4, 4), 123.0);
}

TEST(SchemeOracle, EverySubStepMatchesDenseSystem)
{
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        Draw d = random_linear_problem(rng, 6);
        SplitScheme scheme(d.lp.spec, d.grid, d.k, SchemeConfig{});
        const Field U0 = random_start(d.grid, rng, 0.0);

        // s1: Crank-Nicolson in x over [0, k/2]
        const Field half = scheme.init_half_step(U0);
        const Field half_ref = oracle_crank_nicolson(d.lp, U0, 0.0, d.k, Axis::X);
        worst = std::max(worst, max_abs_diff(half, half_ref));

        // s2: Crank-Nicolson in y over [k/2, k]
        const Field one = scheme.cn_y_step(half, 0.5 * d.k);
        const Field one_ref = oracle_crank_nicolson(d.lp, half, 0.5 * d.k, d.k, Axis::Y);
        worst = std::max(worst, max_abs_diff(one, one_ref));

        // s3: Leapfrog in x from (n - 1/2, n) to n + 1/2
        const Field lf = scheme.leapfrog_x_step(half, one, d.k);
        const Field lf_ref = oracle_leapfrog(d.lp, half, one, d.k, d.k);
        worst = std::max(worst, max_abs_diff(lf, lf_ref));

        // s4: Crank-Nicolson in y from n + 1/2 to n + 1
        const Field two = scheme.cn_y_step(lf, 1.5 * d.k);
        const Field two_ref = oracle_crank_nicolson(d.lp, lf, 1.5 * d.k, d.k, Axis::Y);
        worst = std::max(worst, max_abs_diff(two, two_ref));

        // the composed advance reproduces s3 followed by s4
        SchemeState st{1, half, one};
        scheme.advance(st);
        EXPECT_EQ(st.n, 2);
        EXPECT_EQ(st.U_half, lf);
        EXPECT_EQ(st.U_int, two);
    }
    EXPECT_LE(worst, 1e-11);
}

TEST(SchemeOracle, ModeVariantsMatchDenseSystem)
{
    std::mt19937_64 rng(77);
    for (int draw = 0; draw < 5; ++draw) {
        Draw d = random_linear_problem(rng, 7);
        SchemeConfig cfg;
        cfg.rhs_sign = RhsSign::paper;
        cfg.leapfrog_alpha = false;
        SplitScheme scheme(d.lp.spec, d.grid, d.k, cfg);
        const Field U0 = random_start(d.grid, rng, 0.0);
        const Field half = scheme.init_half_step(U0);
        EXPECT_LE(max_abs_diff(half, oracle_crank_nicolson(d.lp, U0, 0.0, d.k, Axis::X, RhsSign::paper)), 1e-11);
        const Field one = random_start(d.grid, rng, d.k);
        const Field lf = scheme.leapfrog_x_step(half, one, d.k);
        EXPECT_LE(max_abs_diff(lf, oracle_leapfrog(d.lp, half, one, d.k, d.k, false)), 1e-11);
    }
}

TEST(SchemeInvariants, ZeroDataStaysZero)
{
    const ProblemSpec p = problem_by_name("manufactured:zero");
    const auto rec = run(p, p.grid(16), SchemeConfig{}, 1.0);
    ASSERT_FALSE(rec.failed) << rec.failure;
    ASSERT_TRUE(rec.final_U.has_value());
    for (double v : rec.final_U->values()) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(rec.max_U.value(), 0.0);
}

TEST(SchemeInvariants, ConstantsArePreserved)
{
    for (double c : {1.5, -0.25}) {
        const ProblemSpec p = manufactured(0.7, 0.4, 0.3, presets::constant(c), SourceSplit::consistent, "const");
        const auto rec = run(p, p.grid(12), SchemeConfig{}, 0.5);
        ASSERT_FALSE(rec.failed) << rec.failure;
        for (double v : rec.final_U->values()) EXPECT_NEAR(v, c, 1e-12 * std::abs(c));
        EXPECT_LE(rec.max_error.value(), 1e-12);
    }
}

TEST(SchemeInvariants, PolynomialManufacturedSolution)
{
    // x^2 y^2 is reproduced by the stencils; the error is temporal only
    const ProblemSpec p = problem_by_name("manufactured:poly");
    const auto rec = run(p, p.grid(8), SchemeConfig{}, 1.0);
    ASSERT_FALSE(rec.failed) << rec.failure;
    EXPECT_LE(rec.max_error.value(), 1e-10);
}

TEST(SchemeExample1, FirstStepsAndBounds)
{
    const ProblemSpec p = example1();
    const Grid2D g = p.grid(16);
    const double k = time_step_rule(g.hx, g.hy);
    SplitScheme s(p, g, k, SchemeConfig{});
    const Field U0 = s.initial_field();
    const Field half = s.init_half_step(U0);
    const Field exact_half = sample(g, p.exact->u, 0.5 * k);
    EXPECT_LT(max_interior_diff(half, exact_half), 0.05);

    const auto rec = run(p, g, SchemeConfig{}, 1.0);
    ASSERT_FALSE(rec.failed);
    EXPECT_LE(rec.max_U.value(), 0.55);
    EXPECT_LE(rec.diagnostics.max_picard_iterations(), 10);
    EXPECT_EQ(static_cast<int>(rec.levels.size()), rec.time.N + 1);
    EXPECT_DOUBLE_EQ(rec.levels.back().t, 1.0);
    // dominance is recorded, and never holds for these operators
    EXPECT_GT(rec.diagnostics.dominance_ratio_x, 1.0);
    EXPECT_GT(rec.diagnostics.dominance_ratio_y, 1.0);
}

TEST(SchemeExample1, ConsistentSplitConvergesAdditiveDoesNot)
{
    const auto err = [](SourceSplit split, int M) {
        const ProblemSpec p = example1(split);
        return run(p, p.grid(M), SchemeConfig{}, 1.0).max_error.value();
    };
    EXPECT_LT(err(SourceSplit::consistent, 16), err(SourceSplit::consistent, 8));
    EXPECT_GT(err(SourceSplit::additive, 16), err(SourceSplit::additive, 8));
}

TEST(SchemeFailures, BlowUpIsRecorded)
{
    ProblemSpec p = example1();
    p.f1 = [](double, double, double, double u, double) { return u * 1e300 * 1e300; };
    const auto rec = run(p, p.grid(8), SchemeConfig{}, 1.0);
    EXPECT_TRUE(rec.failed);
    EXPECT_GE(rec.failed_level, 1);
    EXPECT_FALSE(rec.failure.empty());
}

TEST(SchemeFailures, PicardNonConvergenceIsRecorded)
{
    ProblemSpec p = example1();
    p.f1 = [](double, double, double, double u, double) { return 1e4 * u; };
    SchemeConfig cfg;
    cfg.picard_max_iters = 3;
    const auto rec = run(p, p.grid(8), cfg, 1.0);
    EXPECT_TRUE(rec.failed);
    EXPECT_NE(rec.failure.find("Picard"), std::string::npos) << rec.failure;
}

TEST(SchemeFailures, ExactBoundaryNeedsExactSolution)
{
    ProblemSpec p = example1();
    p.exact.reset();
    EXPECT_THROW(run(p, p.grid(8), SchemeConfig{}, 1.0), ConfigError);
    SchemeConfig cfg;
    cfg.boundary = BoundaryMode::paper_copy;
    const auto rec = run(p, p.grid(8), cfg, 1.0);
    EXPECT_FALSE(rec.failed);
    EXPECT_FALSE(rec.has_exact);
}

TEST(SchemeRun, DumpsNearestLevel)
{
    const ProblemSpec p = example1();
    const auto rec = run(p, p.grid(8), SchemeConfig{}, 1.0, {0.5, 0.0});
    ASSERT_EQ(rec.dumps.size(), 2u);
    EXPECT_EQ(rec.dumps[0].n, 0);  // level 0 is recorded first
    EXPECT_EQ(rec.dumps[1].n, 8);
    EXPECT_DOUBLE_EQ(rec.dumps[1].t, 0.5);
    EXPECT_TRUE(rec.dumps[1].u.has_value());
}
