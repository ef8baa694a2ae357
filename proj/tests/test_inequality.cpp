#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace oscbound;
using namespace testing_support;

namespace {

// Independent minimum of 2 [A s^{-N/p} + B s^alpha] from the first-order condition.
double closed_form_minimum(double sem, double lp, double N, double alpha, double p, double q) {
    const double ap = alpha * p;
    return 2.0 * (1.0 + ap / N) * std::pow(N / ap, ap / (N + ap)) * std::pow(q, alpha * N / (N + ap)) *
           std::pow(sem, N / (N + ap)) * std::pow(lp, ap / (N + ap));
}

} // namespace

TEST(Inequality, BallBoundValues) {
    EXPECT_DOUBLE_EQ(k_bound(GeometryKind::ball(), 2, 1, 2, 1, 1), 4.0);
    EXPECT_NEAR(k_bound(GeometryKind::ball(), 2, 1, 1, 1, 1), 3.0 * std::cbrt(2.0), 1e-12);
    EXPECT_DOUBLE_EQ(k_bound(GeometryKind::smooth(2.0, 1.0), 2, 1, 2, 1, 1), 4.0);
}

TEST(Inequality, SmoothReducesToBall) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 100; ++i) {
        double N = 1 + std::floor(4 * u(rng)), alpha = 0.05 + 0.95 * u(rng), p = 1 + 9 * u(rng);
        double c = 0.5 + u(rng), C = c * (1 + 3 * u(rng));
        EXPECT_EQ(k_bound(GeometryKind::smooth(2.0, 1.0), N, alpha, p, c, C), k_bound(GeometryKind::ball(), N, alpha, p, c, C));
    }
}

TEST(Inequality, BoundMonotoneInGeometry) {
    // larger d/r_i, smaller cone height or larger b0 can only raise the bound
    EXPECT_LE(k_bound(GeometryKind::smooth(4, 1), 2, 1, 2, 1, 1), k_bound(GeometryKind::smooth(8, 1), 2, 1, 2, 1, 1));
    EXPECT_LE(k_bound(GeometryKind::cone(2, pi / 4, 0.5), 2, 1, 2, 1, 1),
              k_bound(GeometryKind::cone(2, pi / 4, 0.1), 2, 1, 2, 1, 1));
    EXPECT_LE(k_bound(GeometryKind::john(2, 3, 1), 2, 1, 2, 1, 1), k_bound(GeometryKind::john(2, 5, 1), 2, 1, 2, 1, 1));
}

TEST(Inequality, InvalidInputs) {
    EXPECT_THROW(k_bound(GeometryKind::ball(), 2, 1.5, 2, 1, 1), InequalityError);
    EXPECT_THROW(k_bound(GeometryKind::ball(), 2, 1, 0.5, 1, 1), InequalityError);
    EXPECT_THROW(k_bound(GeometryKind::ball(), 2, 1, 2, 2, 1), InequalityError);
    EXPECT_THROW(k_bound(GeometryKind::john(2, 1.0, 1), 2, 1, 2, 1, 1), InequalityError);
    EXPECT_THROW(rhs_of_sigma(1.0, 1, 0.5, 2, 1, 2, 1, 1), InequalityError);
    EXPECT_THROW(optimal_sigma(0.0, 0.5, 2, 1, 2, 1, 1), InequalityError);
}

TEST(Inequality, RhsOfSigma) {
    EXPECT_NEAR(rhs_of_sigma(0.70711, 1, 0.5, 2, 1, 2, 1, 1), 2 * (0.5 / 0.70711 + 0.70711), 1e-14);
    EXPECT_NEAR(rhs_of_sigma(0.5, 1, 0.5, 2, 1, 2, 1, 1), 3.0, 1e-14);
    EXPECT_NEAR(rhs_of_sigma(0.3, 1.7, 0.0, 2, 0.5, 2, 1, 1), 2 * 1.7 * std::sqrt(0.3), 1e-14);
}

TEST(Inequality, OptimalSigma) {
    auto a = optimal_sigma(1, 0.5, 2, 1, 2, 1, 1);
    EXPECT_NEAR(a.ratio, std::sqrt(0.5), 1e-15);
    EXPECT_EQ(a.branch, Branch::interior);
    auto b = optimal_sigma(1, 0.5, 2, 1, 2, 1, 2);
    EXPECT_NEAR(b.ratio, 1.0, 1e-15);
    EXPECT_EQ(b.branch, Branch::boundary);
    EXPECT_EQ(branch_name(b.branch), "boundary");
    auto z = optimal_sigma(1, 0.0, 2, 1, 2, 1, 1);
    EXPECT_EQ(z.ratio, 0.0);
    EXPECT_EQ(z.branch, Branch::interior);
}

TEST(Inequality, SigmaStarMinimizes) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    int interior = 0;
    for (int i = 0; i < 100; ++i) {
        double sem = 0.1 + 5 * u(rng), lp = 0.01 + u(rng), alpha = 0.1 + 0.9 * u(rng), p = 1 + 5 * u(rng);
        double q = 1 + 2 * u(rng);
        auto s = optimal_sigma(sem, lp, 2, alpha, p, 1, q);
        if (s.branch != Branch::interior) continue;
        ++interior;
        double best = rhs_of_sigma(s.ratio, sem, lp, 2, alpha, p, 1, q);
        EXPECT_LT(rel_err(best, closed_form_minimum(sem, lp, 2, alpha, p, q)), 1e-9);
        for (int k = 1; k <= 1000; ++k) EXPECT_LE(best, rhs_of_sigma(k / 1001.0, sem, lp, 2, alpha, p, 1, q) * (1 + 1e-14));
    }
    EXPECT_GT(interior, 20);
}

TEST(Inequality, CanonicalLinear) {
    NormReport n;
    n.alpha = 1;
    n.p = 2;
    n.seminorm = 1;
    n.lp_centered = 0.5;
    n.boundary_osc = 2;
    auto r = verify_inequality(n, GeometryKind::ball(), 1, 1, "x1");
    EXPECT_DOUBLE_EQ(r.k_bound, 4.0);
    EXPECT_NEAR(r.rhs, 2 * std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(r.slack, 1 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(r.sigma_star, 1 / std::sqrt(2.0), 1e-14);
    EXPECT_EQ(r.branch, "interior");
    EXPECT_TRUE(r.holds(0.02));
    EXPECT_NEAR(r.rhs_sigma_min, r.rhs, 1e-12);
    EXPECT_EQ(InequalityReport::csv_header(), "run_id,kind,alpha,p,c,C,k_bound,lhs,rhs,sigma_star,branch,slack");
}

TEST(Inequality, ConstantSample) {
    SolutionSample s;
    s.mesh = disk_mesh(0.1);
    s.values.assign(s.mesh->nodes.size(), 2.5);
    auto r = verify_inequality(s, GeometryKind::ball(), 1, 2, 1, 1);
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_EQ(r.rhs, 0.0);
    EXPECT_EQ(r.slack, 0.0);
    EXPECT_TRUE(r.holds(0.0));
}

TEST(Inequality, AnisotropicConstants) {
    auto f = make_field(ConstantKind{Mat2::diag(4, 1)});
    auto mvc = mean_value_constants(f);
    EXPECT_DOUBLE_EQ(mvc.c, 1.0);
    EXPECT_DOUBLE_EQ(mvc.C, 2.0);
    EXPECT_FALSE(mvc.exploratory);
    EXPECT_TRUE(mean_value_constants(make_field(CheckerboardKind{0.1, Mat2::diag(1, 1), Mat2::diag(4, 4)})).exploratory);
    auto s = assemble_and_solve_dirichlet(disk_mesh(0.05), f, Analytic::linear(1, 0, 0));
    auto r = verify_inequality(s, GeometryKind::ball(), 1, 2, mvc.c, mvc.C);
    EXPECT_NEAR(r.k_bound, 4.0 * std::sqrt(2.0), 1e-12);
    EXPECT_TRUE(r.holds(0.02));
}

TEST(Inequality, ScalingLeavesSlackAndBranch) {
    auto s = assemble_and_solve_dirichlet(disk_mesh(0.05), make_field(IdentityKind{}), random_fourier(8, 6));
    auto a = verify_inequality(s, GeometryKind::ball(), 0.7, 3, 1, 1);
    auto b = verify_inequality(s.scaled_values(13.0), GeometryKind::ball(), 0.7, 3, 1, 1);
    EXPECT_LT(rel_err(b.slack, a.slack), 1e-12);
    EXPECT_LT(rel_err(b.sigma_star, a.sigma_star), 1e-12);
    EXPECT_EQ(a.branch, b.branch);
}

TEST(Extremal, ShortSearchIsSandwichedAndDeterministic) {
    ExtremalOptions opt;
    opt.population = 8;
    opt.iterations = 6;
    opt.degree = 3;
    opt.mesh_h = 0.1;
    auto a = extremal_search(unit_disk(), make_field(IdentityKind{}), opt);
    opt.workers = 3;
    auto b = extremal_search(unit_disk(), make_field(IdentityKind{}), opt);
    EXPECT_EQ(a.k_est, b.k_est);
    EXPECT_LE(a.k_est, a.k_bound + 1e-9);
    EXPECT_EQ(a.k_bound, 4.0);
    ASSERT_EQ(a.trace.size(), 6u);
    for (std::size_t i = 1; i < a.trace.size(); ++i) EXPECT_GE(a.trace[i], a.trace[i - 1]);
    // cos(phi) is in the initial population
    auto cos1 = assemble_and_solve_dirichlet(disk_mesh(0.1), make_field(IdentityKind{}), FourierData{{0, 1}, {}, {}});
    auto r = verify_inequality(cos1, GeometryKind::ball(), 1, 2, 1, 1);
    EXPECT_GE(a.k_est, 4.0 * r.slack * (1 - 1e-9));
}

TEST(Extremal, RejectsVariableField) {
    EXPECT_THROW(extremal_search(unit_disk(), make_field(CheckerboardKind{0.1, Mat2::diag(1, 1), Mat2::diag(2, 2)})),
                 InequalityError);
    EXPECT_THROW(extremal_search(unit_square(), make_field(IdentityKind{})), InequalityError);
}
