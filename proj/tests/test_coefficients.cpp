#include "support.hpp"

#include <gtest/gtest.h>

using namespace oscbound;

TEST(Coefficients, Identity) {
    auto f = make_field(IdentityKind{});
    EXPECT_EQ(f(Vec2{0.3, -2}), Mat2::identity());
    EXPECT_EQ(f.lambda, 1.0);
    EXPECT_EQ(f.Lambda, 1.0);
    auto rep = verify_ellipticity(f, 200, 3);
    EXPECT_TRUE(rep.pass);
    EXPECT_DOUBLE_EQ(rep.min_quotient, 1.0);
    EXPECT_DOUBLE_EQ(rep.max_quotient, 1.0);
}

TEST(Coefficients, ConstantEigenvalues) {
    auto f = make_field(ConstantKind{Mat2::diag(4, 1)});
    EXPECT_DOUBLE_EQ(f.lambda, 1.0);
    EXPECT_DOUBLE_EQ(f.Lambda, 4.0);
    EXPECT_THROW(make_field(ConstantKind{Mat2{1, 2, 1}}), CoefficientError);
}

TEST(Coefficients, DeclaredBoundViolated) {
    auto f = make_field(ConstantKind{Mat2::diag(4, 1)});
    f.lambda = 2.0;
    auto rep = verify_ellipticity(f, 50, 1);
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.min_quotient, 1.0, 1e-12);
    EXPECT_NEAR(std::abs(rep.worst_direction.y), 1.0, 1e-12);
    EXPECT_NEAR(rep.worst_direction.x, 0.0, 1e-12);
}

TEST(Coefficients, CheckerboardParity) {
    auto f = make_field(CheckerboardKind{0.1, Mat2::diag(1, 1), Mat2::diag(5, 5)});
    EXPECT_DOUBLE_EQ(f.lambda, 1.0);
    EXPECT_DOUBLE_EQ(f.Lambda, 5.0);
    // (0.05, 0.05) lies in cell (0, 0): even parity
    EXPECT_EQ(f(Vec2{0.05, 0.05}), Mat2::diag(1, 1));
    EXPECT_EQ(f(Vec2{0.15, 0.05}), Mat2::diag(5, 5));
    EXPECT_EQ(f(Vec2{-0.05, 0.05}), Mat2::diag(5, 5));
}

TEST(Coefficients, RandomFieldWithinRange) {
    auto f = make_field(RandomCellsKind{0.2, 1.0, 10.0, 0}, 17);
    auto rep = verify_ellipticity(f, 2000, 5);
    EXPECT_TRUE(rep.pass);
    EXPECT_GE(rep.min_quotient, 1.0 * (1 - 1e-12));
    EXPECT_LE(rep.max_quotient, 10.0 * (1 + 1e-12));
    // per-cell eigen-decomposition oracle
    for (double x = -1; x < 1; x += 0.13)
        for (double y = -1; y < 1; y += 0.17) {
            Mat2 a = f(Vec2{x, y});
            EXPECT_EQ(a.a12, a.a12); // symmetric storage
            double m = 0.5 * (a.a11 + a.a22), r = std::sqrt(0.25 * (a.a11 - a.a22) * (a.a11 - a.a22) + a.a12 * a.a12);
            EXPECT_GE(m - r, 1.0 - 1e-9);
            EXPECT_LE(m + r, 10.0 + 1e-9);
        }
}

TEST(Coefficients, RandomFieldReproducible) {
    auto a = make_field(RandomCellsKind{0.25, 1.0, 100.0, 0}, 42);
    auto b = make_field(RandomCellsKind{0.25, 1.0, 100.0, 0}, 42);
    auto c = make_field(RandomCellsKind{0.25, 1.0, 100.0, 0}, 43);
    bool differs = false;
    for (double x = -2; x < 2; x += 0.11)
        for (double y = -2; y < 2; y += 0.07) {
            EXPECT_EQ(a(Vec2{x, y}), b(Vec2{x, y}));
            differs = differs || !(a(Vec2{x, y}) == c(Vec2{x, y}));
        }
    EXPECT_TRUE(differs);
}

TEST(Coefficients, MatrixSqrt) {
    EXPECT_EQ(matrix_sqrt(Mat2::identity()), Mat2::identity());
    Mat2 d = matrix_sqrt(Mat2::diag(4, 1));
    EXPECT_DOUBLE_EQ(d.a11, 2.0);
    EXPECT_DOUBLE_EQ(d.a22, 1.0);
    EXPECT_DOUBLE_EQ(d.a12, 0.0);
    for (Mat2 a : {Mat2{2, 1, 2}, Mat2{10, -3, 1.5}, Mat2{1e-3, 0, 1e3}}) {
        Mat2 s = matrix_sqrt(a);
        double e11 = s.a11 * s.a11 + s.a12 * s.a12, e12 = s.a11 * s.a12 + s.a12 * s.a22,
               e22 = s.a12 * s.a12 + s.a22 * s.a22;
        double scale = std::max({std::abs(a.a11), std::abs(a.a12), std::abs(a.a22)});
        EXPECT_LE(std::abs(e11 - a.a11), 1e-12 * scale);
        EXPECT_LE(std::abs(e12 - a.a12), 1e-12 * scale);
        EXPECT_LE(std::abs(e22 - a.a22), 1e-12 * scale);
        EXPECT_GT(s.eigenvalues().first, 0.0);
    }
}

TEST(Coefficients, ConfigSection) {
    auto secs = parse_sections("[field]\nkind = constant\nmatrix = 2 1 1 2\n");
    auto f = field_from_section(secs.at(0));
    EXPECT_NEAR(f.lambda, 1.0, 1e-15);
    EXPECT_NEAR(f.Lambda, 3.0, 1e-15);
    auto bad = parse_sections("[field]\nkind = constant\nmatrix = 2 1 1 2\ncolour = red\n");
    EXPECT_THROW(field_from_section(bad.at(0)), ParseError);
}
