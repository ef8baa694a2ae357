#include "support.hpp"

#include <gtest/gtest.h>

using namespace oscbound;
using namespace testing_support;

TEST(MeanValue, FamilyIdentity) {
    auto f = build_family(make_field(IdentityKind{}), {0, 0}, unit_disk());
    EXPECT_EQ(f.shape, FamilyShape::ball);
    EXPECT_EQ(f.c, 1.0);
    EXPECT_EQ(f.C, 1.0);
    EXPECT_DOUBLE_EQ(f.r_max, 1.0);
}

TEST(MeanValue, FamilyEllipsoid) {
    auto f = build_family(make_field(ConstantKind{Mat2::diag(4, 1)}), {0, 0}, Domain::disk({0, 0}, 2));
    EXPECT_EQ(f.shape, FamilyShape::ellipsoid);
    EXPECT_DOUBLE_EQ(f.c, 1.0);
    EXPECT_DOUBLE_EQ(f.C, 2.0);
    EXPECT_DOUBLE_EQ(f.r_max, 1.0);
    // boundary points satisfy x1^2/4 + x2^2 = r^2
    for (double phi : {0.0, 0.5, 2.0, 4.0}) {
        Vec2 p = f.boundary_point(0.7, phi);
        EXPECT_NEAR(p.x * p.x / 4 + p.y * p.y, 0.49, 1e-14);
    }
}

TEST(MeanValue, VariableFieldRefused) {
    auto cb = make_field(CheckerboardKind{0.1, Mat2::diag(1, 1), Mat2::diag(5, 5)});
    try {
        build_family(cb, {0, 0}, unit_disk());
        FAIL();
    } catch (const MeanValueError& e) {
        EXPECT_NE(std::string(e.what()).find("out of scope for variable coefficients"), std::string::npos);
    }
}

TEST(MeanValue, LinearAverageExact) {
    auto s = reference_solution(Analytic::linear(1, 0, 0), disk_mesh(0.05));
    Vec2 x0{0.2, -0.1};
    auto f = build_family(make_field(IdentityKind{}), x0, unit_disk());
    for (double r : {0.1, 0.3, 0.6}) EXPECT_NEAR(set_average(s, f, r), 0.2, 1e-10);
}

TEST(MeanValue, SquaredRadiusAverage) {
    auto s = reference_solution(Analytic::squared_distance({0, 0}), disk_mesh(0.02));
    auto f = build_family(make_field(IdentityKind{}), {0, 0}, unit_disk());
    EXPECT_NEAR(set_average(s, f, 0.5), 0.125, 2e-4);
}

TEST(MeanValue, EllipsoidOddSymmetry) {
    auto s = reference_solution(Analytic::linear(1, 0, 0), disk_mesh(0.05));
    auto f = build_family(make_field(ConstantKind{Mat2::diag(4, 1)}), {0, 0}, Domain::disk({0, 0}, 1));
    for (double r : {0.1, 0.25, 0.5}) EXPECT_NEAR(set_average(s, f, r), 0.0, 1e-10);
}

TEST(MeanValue, EscapingSetRejected) {
    auto s = reference_solution(Analytic::linear(1, 0, 0), disk_mesh(0.1));
    auto f = build_family(make_field(IdentityKind{}), {0.5, 0}, unit_disk());
    EXPECT_THROW(set_average(s, f, 0.6), MeanValueError);
}

TEST(MeanValue, SubsolutionMonotone) {
    auto s = reference_solution(Analytic::squared_distance({0, 0}), disk_mesh(0.02));
    auto rep = check_mean_value_property(s, make_field(IdentityKind{}), unit_disk(), {0, 0}, {0.2, 0.4, 0.6});
    ASSERT_EQ(rep.rows.size(), 3u);
    const double want[] = {0.02, 0.08, 0.18};
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(rep.rows[k].average, want[k], 1e-4);
    EXPECT_TRUE(rep.subsolution_consistent());
    EXPECT_FALSE(rep.equality_ok);
    EXPECT_GE(rep.rows[0].average, rep.v_at_x0);
}

TEST(MeanValue, HarmonicEquality) {
    auto id = make_field(IdentityKind{});
    for (int k = 1; k <= 4; ++k) {
        auto s = assemble_and_solve_dirichlet(disk_mesh(0.02), id, Analytic::harmonic_poly(k));
        auto rep = check_mean_value_property(s, id, unit_disk(), {0.1, 0.2}, {0.15, 0.3, 0.45});
        EXPECT_TRUE(rep.equality_ok) << "k = " << k;
        EXPECT_TRUE(rep.subsolution_consistent());
    }
}

TEST(MeanValue, SuperharmonicFlagged) {
    auto s = reference_solution(Analytic::squared_distance({0, 0}), disk_mesh(0.02)).scaled_values(-1.0);
    auto rep = check_mean_value_property(s, make_field(IdentityKind{}), unit_disk(), {0, 0}, {0.2, 0.4, 0.6});
    EXPECT_FALSE(rep.subsolution_consistent());
    EXPECT_EQ(rep.verdict(), "not a subsolution consistency violation");
}

TEST(MeanValue, InclusionSandwich) {
    auto f = make_field(ConstantKind{Mat2{2, 1, 2}});
    auto s = reference_solution(Analytic::squared_distance({0, 0}), disk_mesh(0.05));
    auto rep = check_mean_value_property(s, f, unit_disk(), {0, 0}, {0.1, 0.3, 0.5});
    EXPECT_TRUE(rep.inclusion_ok);
    EXPECT_LE(rep.family.c, rep.family.C);
    EXPECT_NEAR(rep.family.c, 1.0, 1e-12);
    EXPECT_NEAR(rep.family.C, std::sqrt(3.0), 1e-12);
}

TEST(MeanValue, GaussLegendre) {
    auto [x, w] = detail::gauss_legendre_unit(10);
    double s3 = 0, s0 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s0 += w[i], s3 += w[i] * x[i] * x[i] * x[i];
    EXPECT_NEAR(s0, 1.0, 1e-14);
    EXPECT_NEAR(s3, 0.25, 1e-14);
}
