#include "support.hpp"

#include <gtest/gtest.h>

using namespace oscbound;
using namespace testing_support;

TEST(Mesh, DiskBoundaryOnCircle) {
    Mesh m = mesh_domain(unit_disk(), 0.2);
    ASSERT_FALSE(m.boundary_nodes().empty());
    for (int i : m.boundary_nodes()) EXPECT_NEAR(norm(m.nodes[i]), 1.0, 1e-10);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) EXPECT_GT(m.triangle_area(t), 0.0);
}

TEST(Mesh, SquareCoveredExactly) {
    Mesh m = mesh_domain(unit_square(), 0.25);
    EXPECT_NEAR(m.area(), 1.0, 1e-14);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) EXPECT_GT(m.triangle_area(t), 0.0);
    EXPECT_THROW(mesh_domain(unit_square(), 0.5), Error); // above a quarter of the diagonal
}

TEST(Mesh, HalvingQuadruplesTriangles) {
    for (const auto& d : {unit_disk(), unit_square()}) {
        double ratio = double(mesh_domain(d, 0.05).triangles.size()) / mesh_domain(d, 0.1).triangles.size();
        EXPECT_GE(ratio, 3.0);
        EXPECT_LE(ratio, 5.0);
    }
}

TEST(Mesh, Deterministic) {
    Mesh a = mesh_domain(Domain::ellipse({0, 0}, 2, 1), 0.1), b = mesh_domain(Domain::ellipse({0, 0}, 2, 1), 0.1);
    ASSERT_EQ(a.nodes.size(), b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) EXPECT_EQ(a.nodes[i], b.nodes[i]);
    EXPECT_EQ(a.triangles, b.triangles);
}

TEST(Mesh, QualityAndSize) {
    auto m = disk_mesh(0.05);
    EXPECT_GT(m->min_angle(), 20.0 * pi / 180);
    EXPECT_LT(m->max_edge(), 2.0 * 0.05);
    EXPECT_NEAR(m->domain_diameter, 2.0, 1e-12);
}

TEST(Mesh, RoundTripText) {
    Mesh m = mesh_domain(unit_square(), 0.25);
    std::vector<double> v(m.nodes.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = m.nodes[i].x - 2 * m.nodes[i].y;
    std::stringstream ss;
    write_solution(ss, m, v);
    std::vector<double> back;
    Mesh r = read_mesh(ss, &back);
    ASSERT_EQ(r.nodes.size(), m.nodes.size());
    ASSERT_EQ(r.triangles.size(), m.triangles.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        EXPECT_EQ(r.nodes[i].x, m.nodes[i].x);
        EXPECT_EQ(back[i], v[i]);
    }
}

TEST(Solver, StiffnessSymmetricAndAnnihilatesConstants) {
    auto m = disk_mesh(0.1);
    for (auto field : {make_field(IdentityKind{}), make_field(ConstantKind{Mat2{2, 1, 2}}),
                       make_field(CheckerboardKind{0.3, Mat2::diag(1, 1), Mat2::diag(50, 2)})}) {
        SparseMatrix K = assemble_stiffness(*m, field);
        for (std::size_t i = 0; i < K.rows(); ++i)
            for (int k = K.row_start[i]; k < K.row_start[i + 1]; ++k)
                EXPECT_EQ(K.vals[k], K.at(K.cols[k], static_cast<int>(i)));
        std::vector<double> ones(m->nodes.size(), 1.0), y;
        K.multiply(ones, y);
        for (double v : y) EXPECT_NEAR(v, 0.0, 1e-10 * field.Lambda);
    }
}

TEST(Solver, LinearOnDiskWithinMeshError) {
    auto m = disk_mesh(0.05);
    auto s = assemble_and_solve_dirichlet(m, make_field(IdentityKind{}), [](Vec2 x) { return x.x; });
    double worst = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) worst = std::max(worst, std::abs(s.values[i] - m->nodes[i].x));
    EXPECT_LE(worst, 0.05 * 0.05);
    EXPECT_LE(s.stats.relative_residual, 1e-10);
}

TEST(Solver, LinearReproductionOnPolygons) {
    std::vector<Domain> polys = {unit_square(), Domain::polygon({{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 2}, {0, 2}}),
                                 Domain::polygon({{0, 0}, {1, 0}, {0.2, 0.3}, {0, 1}})};
    for (const auto& d : polys)
        for (auto field : {make_field(IdentityKind{}), make_field(ConstantKind{Mat2::diag(4, 1)}),
                           make_field(ConstantKind{Mat2{2, 1, 2}})}) {
            auto m = std::make_shared<const Mesh>(mesh_domain(d, 0.1));
            auto g = [](Vec2 x) { return 0.3 + 1.7 * x.x - 0.6 * x.y; };
            auto s = assemble_and_solve_dirichlet(m, field, g);
            for (std::size_t i = 0; i < s.values.size(); ++i) EXPECT_NEAR(s.values[i], g(m->nodes[i]), 1e-9);
        }
}

TEST(Solver, MaximumPrincipleEveryFieldKind) {
    auto m = disk_mesh(0.05);
    auto g = random_fourier(8, 11);
    for (auto field : {make_field(IdentityKind{}), make_field(ConstantKind{Mat2{2, 1, 2}}),
                       make_field(CheckerboardKind{0.1, Mat2::diag(1, 1), Mat2::diag(100, 100)}),
                       make_field(RandomCellsKind{0.15, 1.0, 50.0, 0}, 9)}) {
        auto s = assemble_and_solve_dirichlet(m, field, g);
        EXPECT_TRUE(s.stats.max_principle_ok) << field.describe() << " overshoot " << s.stats.max_principle_violation;
    }
}

TEST(Solver, ConvergenceOrderCubic) {
    auto exact = Analytic::harmonic_poly(3);
    std::vector<double> hs = {0.08, 0.04, 0.02}, lx, ly;
    for (double h : hs) {
        auto s = assemble_and_solve_dirichlet(disk_mesh(h), make_field(IdentityKind{}), exact);
        lx.push_back(std::log(h));
        ly.push_back(std::log(l2_error(s, exact)));
    }
    EXPECT_GE(harness::fit_slope(lx, ly), 1.5);
}

TEST(Solver, IterationCapReported) {
    auto m = disk_mesh(0.05);
    SolverOptions opt;
    opt.max_iterations = 2;
    try {
        assemble_and_solve_dirichlet(m, make_field(IdentityKind{}), random_fourier(8, 3), "x", opt);
        FAIL() << "converged in two iterations";
    } catch (const SolverError& e) {
        EXPECT_EQ(e.residual_history().size(), 3u); // initial residual plus two iterations
    }
}

TEST(Solver, WeakSubsolutionResidual) {
    auto m = disk_mesh(0.05);
    auto id = make_field(IdentityKind{});
    auto sq = reference_solution(Analytic::squared_distance({0, 0}), m);
    EXPECT_EQ(sq.provenance, Provenance::subsolution);
    auto rep = weak_subsolution_residual(sq, id);
    EXPECT_TRUE(rep.subsolution);
    EXPECT_GT(rep.min_residual, 0.0);

    auto neg = sq.scaled_values(-1.0);
    EXPECT_FALSE(weak_subsolution_residual(neg, id).subsolution);

    auto harm = assemble_and_solve_dirichlet(m, id, Analytic::harmonic_poly(2));
    auto hr = weak_subsolution_residual(harm, id);
    EXPECT_LE(std::max(std::abs(hr.min_residual), std::abs(hr.max_residual)), 1e-8 * hr.scale);

    for (Mat2 a : {Mat2::diag(4, 1), Mat2{2, 1, 2}}) {
        auto f = make_field(ConstantKind{a});
        EXPECT_TRUE(weak_subsolution_residual(sq, f).subsolution) << a.str();
    }
}

TEST(Solver, ReferenceSolutions) {
    auto m = disk_mesh(0.1);
    auto lin = reference_solution(Analytic::linear(1, 0, 0), m);
    for (std::size_t i = 0; i < lin.values.size(); ++i) EXPECT_EQ(lin.values[i], m->nodes[i].x);
    auto h2 = Analytic::harmonic_poly(2);
    EXPECT_TRUE(h2.harmonic());
    for (Vec2 x : {Vec2{0.3, 0.1}, Vec2{-0.5, 0.7}}) EXPECT_NEAR(h2(x), x.x * x.x - x.y * x.y, 1e-15);
    EXPECT_FALSE(Analytic::squared_distance({0, 0}).harmonic());
}

TEST(Solver, AnalyticParseRoundTrip) {
    for (std::string id : {"linear 1 0 0", "harmonic-poly re 3", "harmonic-poly im 2", "squared-distance 0.5 -1"}) {
        auto a = Analytic::parse(id);
        EXPECT_EQ(a.id(), id);
    }
    EXPECT_THROW(Analytic::parse("sine 3"), SolverError);
}

TEST(Solver, FourierHarmonicExtension) {
    FourierData f{{0.5, 1.0, -0.3}, {0.0, 0.2, 0.7}, {}};
    auto ext = f.harmonic_extension(1.0);
    for (double phi : {0.0, 0.4, 2.0, -2.5}) EXPECT_NEAR(ext(Vec2{std::cos(phi), std::sin(phi)}), f(Vec2{std::cos(phi), std::sin(phi)}), 1e-13);
    auto s = assemble_and_solve_dirichlet(disk_mesh(0.04), make_field(IdentityKind{}), f);
    EXPECT_LT(l2_error(s, ext), 5e-3);
}

TEST(Solver, RandomFourierDeterministic) {
    auto a = random_fourier(8, 5), b = random_fourier(8, 5);
    EXPECT_EQ(a.cos_coeffs, b.cos_coeffs);
    EXPECT_EQ(a.sin_coeffs, b.sin_coeffs);
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto f = random_fourier(8, s);
        EXPECT_GE(f.degree(), 1u);
        EXPECT_LE(f.degree(), 8u);
        EXPECT_EQ(f.sin_coeffs[0], 0.0);
    }
}
