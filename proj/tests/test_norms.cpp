#include "support.hpp"

#include <gtest/gtest.h>

using namespace oscbound;
using namespace testing_support;

namespace {

SolutionSample constant_sample(std::shared_ptr<const Mesh> m, double c) {
    SolutionSample s;
    s.mesh = std::move(m);
    s.values.assign(s.mesh->nodes.size(), c);
    return s;
}

// Brute-force Hölder quotient over all node pairs.
double brute_seminorm(const SolutionSample& s, double alpha) {
    const auto& x = s.mesh->nodes;
    double best = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            best = std::max(best, std::abs(s.values[i] - s.values[j]) / std::pow(distance(x[i], x[j]), alpha));
    return best * std::pow(0.5 * s.mesh->domain_diameter, alpha);
}

} // namespace

TEST(Norms, ConstantField) {
    auto s = constant_sample(disk_mesh(0.05), 3.0);
    EXPECT_EQ(holder_seminorm(s, 0.7).value, 0.0);
    for (double p : {1.0, 2.0, 3.5}) EXPECT_NEAR(normalized_lp_norm(s, p, false), 3.0, 1e-12);
    EXPECT_NEAR(mean_value(s), 3.0, 1e-12);
    EXPECT_EQ(boundary_oscillation(s), 0.0);
}

TEST(Norms, LinearClosedForms) {
    auto s = reference_solution(Analytic::linear(1, 0, 0), disk_mesh(0.02));
    EXPECT_NEAR(holder_seminorm(s, 1.0).value, 1.0, 1e-9);
    EXPECT_NEAR(holder_seminorm(s, 0.5).value, std::sqrt(2.0), 1e-6);
    // the polygon inscribed in the circle loses O(h^2) area
    EXPECT_NEAR(normalized_lp_norm(s, 2, false), 0.5, 1e-3);
    EXPECT_NEAR(normalized_lp_norm(s, 1, false), 4.0 / (3.0 * pi), 1e-3);
    EXPECT_NEAR(mean_value(s), 0.0, 1e-14);
    EXPECT_NEAR(boundary_oscillation(s), 2.0, 1e-12);
}

TEST(Norms, MeanOfSquaredRadius) {
    auto s = reference_solution(Analytic::squared_distance({0, 0}), disk_mesh(0.02));
    EXPECT_NEAR(mean_value(s), 0.5, 1e-3);
}

TEST(Norms, BoundaryOscillationQuadrupole) {
    auto s = reference_solution(Analytic::harmonic_poly(2), disk_mesh(0.02));
    EXPECT_NEAR(boundary_oscillation(s), 2.0, 1e-3);
}

TEST(Norms, ExactTriangleIntegralsAgainstQuadrature) {
    // Non-integer p on a single triangle, compared with a fine midpoint sum.
    for (auto vals : std::vector<std::array<double, 3>>{{0.2, 1.3, 0.7}, {-0.5, 1.0, 0.25}, {1.0, 1.0, 1.0000001}}) {
        for (double p : {1.0, 1.5, 2.0, 3.7}) {
            const int n = 600;
            double sum = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; i + j < n; ++j) {
                    // lower-left cell triangle and upper-right cell triangle centroids
                    for (int up = 0; up < 2; ++up) {
                        if (up && i + j + 1 >= n) continue;
                        double a = (i + (up ? 2.0 / 3 : 1.0 / 3)) / n, b = (j + (up ? 2.0 / 3 : 1.0 / 3)) / n;
                        double v = vals[0] * (1 - a - b) + vals[1] * a + vals[2] * b;
                        sum += std::pow(std::abs(v), p) * 0.5 / (double(n) * n);
                    }
                }
            double got = detail::abs_power_integral(0.5, vals[0], vals[1], vals[2], p);
            EXPECT_NEAR(got, sum, 2e-5 * std::max(1.0, sum)) << p;
        }
    }
}

TEST(Norms, ShiftInvariance) {
    auto s = assemble_and_solve_dirichlet(disk_mesh(0.05), make_field(IdentityKind{}), random_fourier(6, 2));
    auto t = s.shifted_values(7.25);
    for (double alpha : {0.5, 1.0})
        EXPECT_NEAR(holder_seminorm(t, alpha).value, holder_seminorm(s, alpha).value, 1e-12 * holder_seminorm(s, alpha).value);
    EXPECT_NEAR(boundary_oscillation(t), boundary_oscillation(s), 1e-12);
    for (double p : {1.0, 2.0, 4.0}) EXPECT_LT(rel_err(normalized_lp_norm(t, p, true), normalized_lp_norm(s, p, true)), 1e-10);
}

TEST(Norms, DilationInvariance) {
    auto s = assemble_and_solve_dirichlet(disk_mesh(0.05), make_field(IdentityKind{}), random_fourier(6, 4));
    auto t = s.transformed(10.0, {3.0, -1.0});
    for (double alpha : {0.3, 1.0})
        EXPECT_LT(rel_err(holder_seminorm(t, alpha).value, holder_seminorm(s, alpha).value), 1e-12);
    for (double p : {1.0, 2.5}) EXPECT_LT(rel_err(normalized_lp_norm(t, p, true), normalized_lp_norm(s, p, true)), 1e-12);
}

TEST(Norms, OscillationBoundedBySeminorm) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto s = assemble_and_solve_dirichlet(disk_mesh(0.05), make_field(IdentityKind{}), random_fourier(8, seed));
        for (double alpha : {0.25, 0.5, 1.0})
            EXPECT_LE(boundary_oscillation(s), std::pow(2.0, alpha) * holder_seminorm(s, alpha).value * (1 + 1e-12));
    }
}

TEST(Norms, ExhaustiveMatchesBruteForce) {
    auto s = assemble_and_solve_dirichlet(disk_mesh(0.1), make_field(IdentityKind{}), random_fourier(5, 8));
    for (double alpha : {0.4, 1.0}) {
        auto r = holder_seminorm(s, alpha);
        EXPECT_TRUE(r.exhaustive);
        EXPECT_LT(rel_err(r.value, brute_seminorm(s, alpha)), 1e-13);
    }
}

TEST(Norms, SampledNeverExceedsExhaustive) {
    auto s = assemble_and_solve_dirichlet(disk_mesh(0.05), make_field(IdentityKind{}), random_fourier(8, 21));
    SeminormOptions small;
    small.exhaustive_nodes = 10;
    small.pair_budget = 20000;
    for (double alpha : {0.5, 1.0}) {
        auto full = holder_seminorm(s, alpha);
        auto part = holder_seminorm(s, alpha, small);
        EXPECT_TRUE(full.exhaustive);
        EXPECT_FALSE(part.exhaustive);
        EXPECT_LE(part.value, full.value);
        EXPECT_GT(part.value, 0.9 * full.value);
    }
}

TEST(Norms, WorkerCountIrrelevant) {
    auto s = assemble_and_solve_dirichlet(disk_mesh(0.05), make_field(IdentityKind{}), random_fourier(8, 5));
    SeminormOptions one, four;
    four.workers = 4;
    EXPECT_EQ(holder_seminorm(s, 0.6, one).value, holder_seminorm(s, 0.6, four).value);
}

TEST(Norms, Report) {
    auto s = reference_solution(Analytic::linear(1, 0, 0), disk_mesh(0.05));
    auto r = compute_norms(s, 1.0, 2.0);
    EXPECT_EQ(NormReport::csv_header(), "sample_id,alpha,p,seminorm,lp_centered,mean,boundary_osc");
    EXPECT_EQ(r.csv_row().substr(0, 17), "linear 1 0 0,1,2,");
}
