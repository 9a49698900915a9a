#include <cmath>

#include <gtest/gtest.h>

#include "rlw/rlw.hpp"

using namespace rlw;

TEST(Grid, StepsAndCoordinates)
{
    const Grid2D g = make_grid(0.0, 1.0, 0.0, 1.0, 8);
    EXPECT_DOUBLE_EQ(g.hx, 0.125);
    EXPECT_DOUBLE_EQ(g.hy, 0.125);
    EXPECT_DOUBLE_EQ(g.x(0), 0.0);
    EXPECT_DOUBLE_EQ(g.x(8), 1.0);
    EXPECT_DOUBLE_EQ(g.y(3), 0.375);
    EXPECT_EQ(g.node_count(), 81u);
}

TEST(Grid, RectangularDomain)
{
    const Grid2D g = make_grid(-1.0, 2.0, 0.5, 1.0, 6);
    EXPECT_DOUBLE_EQ(g.hx, 0.5);
    EXPECT_DOUBLE_EQ(g.hy, 0.5 / 6.0);
    EXPECT_DOUBLE_EQ(g.x(2), 0.0);
    EXPECT_DOUBLE_EQ(g.y(6), 1.0);
}

TEST(Grid, InteriorIsTwoToMMinusTwo)
{
    const Grid2D g4 = make_grid(0.0, 1.0, 0.0, 1.0, 4);
    int count = 0;
    for (int i = 0; i <= 4; ++i) {
        for (int j = 0; j <= 4; ++j) {
            if (g4.is_interior(i, j)) {
                ++count;
                EXPECT_EQ(i, 2);
                EXPECT_EQ(j, 2);
            }
        }
    }
    EXPECT_EQ(count, 1);

    const Grid2D g8 = make_grid(0.0, 1.0, 0.0, 1.0, 8);
    EXPECT_FALSE(g8.is_interior(1, 4));
    EXPECT_FALSE(g8.is_interior(4, 7));
    EXPECT_TRUE(g8.is_interior(2, 6));
}

TEST(Grid, RejectsTooFewSubdivisionsAndDegenerateDomains)
{
    EXPECT_THROW(make_grid(0.0, 1.0, 0.0, 1.0, 3), ConfigError);
    EXPECT_THROW(make_grid(0.0, 1.0, 0.0, 1.0, 2), ConfigError);
    EXPECT_THROW(make_grid(1.0, 1.0, 0.0, 1.0, 8), ConfigError);
    EXPECT_THROW(make_grid(0.0, 1.0, 2.0, 1.0, 8), ConfigError);
    EXPECT_NO_THROW(make_grid(0.0, 1.0, 0.0, 1.0, 4));
}

TEST(Grid, SampleMatchesFunction)
{
    const Grid2D g = make_grid(0.0, 1.0, 0.0, 1.0, 4);
    const Field f = sample(g, [](double x, double y, double t) { return std::exp(-(x + y + t)); }, 0.5);
    EXPECT_NEAR(f(0, 0), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(f(2, 0), 0.367879441171442, 1e-14);  // e^-1
    EXPECT_NEAR(f(4, 4), std::exp(-2.5), 1e-15);
    EXPECT_NEAR(f(1, 3), std::exp(-1.5), 1e-15);
}

TEST(Grid, SampleRejectsNonFinite)
{
    const Grid2D g = make_grid(0.0, 1.0, 0.0, 1.0, 4);
    try {
        (void)sample(g, [](double x, double y, double) { return (x == 0.5 && y == 0.25) ? NAN : 1.0; }, 0.0);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("(2,1)"), std::string::npos) << e.what();
    }
}

TEST(Grid, FieldIndexingIsRowMajor)
{
    const Grid2D g = make_grid(0.0, 1.0, 0.0, 1.0, 4);
    Field f(g);
    f(1, 2) = 7.0;
    EXPECT_EQ(f.values()[1 * 5 + 2], 7.0);
    EXPECT_TRUE(f.all_finite());
    f(0, 0) = INFINITY;
    EXPECT_FALSE(f.all_finite());
}

TEST(TimeGrid, LevelsAndHalfLevels)
{
    const TimeGrid tg = make_time_grid(1.0, 3);
    EXPECT_DOUBLE_EQ(tg.k, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(tg.t(3), 1.0);
    EXPECT_DOUBLE_EQ(tg.t(1), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(tg.t_half(0), 1.0 / 6.0);
    EXPECT_THROW(make_time_grid(0.0, 3), ConfigError);
    EXPECT_THROW(make_time_grid(1.0, 0), ConfigError);
}
