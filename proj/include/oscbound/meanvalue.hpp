#pragma once

// Mean value sets D_r(x0) = x0 + S B_r for the Laplacian (S = I) and for
// constant coefficients (S = A^{1/2}), set averages of nodal fields over them,
// and the monotonicity check that subsolutions must pass.

#include "coefficients.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "solver.hpp"

#include <map>
#include <string>
#include <vector>

namespace oscbound {

class MeanValueError : public Error {
public:
    using Error::Error;
};

enum class FamilyShape { ball, ellipsoid };

struct MeanValueFamily {
    Vec2 x0;
    FamilyShape shape = FamilyShape::ball;
    Mat2 S = Mat2::identity(); ///< D_r(x0) = x0 + S B_r
    double c = 1.0;            ///< B_{cr}(x0) inside D_r(x0)
    double C = 1.0;            ///< D_r(x0) inside B_{Cr}(x0)
    double r_max = 0.0;        ///< dist(x0, boundary) / C

    /// Boundary point of D_r(x0) in direction phi of the reference disk.
    Vec2 boundary_point(double r, double phi) const { return x0 + r * (S * Vec2{std::cos(phi), std::sin(phi)}); }
};

inline MeanValueFamily build_family(const CoefficientField& field, Vec2 x0, const Domain& domain) {
    if (!field.is_constant())
        throw MeanValueError("family construction out of scope for variable coefficients "
                             "(requires the obstacle-problem construction)");
    if (!domain.strictly_inside(x0)) throw MeanValueError("center must lie strictly inside the domain");
    MeanValueFamily f;
    f.x0 = x0;
    if (field.is_identity()) {
        f.shape = FamilyShape::ball;
    } else {
        Mat2 A = field(x0);
        f.shape = FamilyShape::ellipsoid;
        f.S = matrix_sqrt(A);
        auto [lo, hi] = A.eigenvalues();
        f.c = std::sqrt(lo);
        f.C = std::sqrt(hi);
    }
    f.r_max = domain.distance_to_boundary(x0) / f.C;
    return f;
}

struct AverageOptions {
    int radial = 64;   ///< Gauss-Legendre nodes in the radius
    int angular = 128; ///< equispaced nodes in the angle (kept even)
};

namespace detail {

/// Gauss-Legendre nodes and weights on [0, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int n) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

} // namespace detail

/// (1/|D_r|) int_{D_r} v dy for the piecewise-linear interpolant of `sample`,
/// pulled back to the unit disk: polar Gauss-Legendre x equispaced angles.
inline double set_average(const SolutionSample& sample, const MeshLocator& locator, const MeanValueFamily& family,
                          double r, const AverageOptions& opt = {}) {
    if (!(r > 0.0)) throw MeanValueError("radius must be positive");
    if (r > family.r_max * (1.0 + 1e-12))
        throw MeanValueError("set escapes the domain: r = " + format_double(r) + " exceeds r_max = " +
                             format_double(family.r_max));
    auto [rho, w] = detail::gauss_legendre_unit(opt.radial);
    const int m = opt.angular + (opt.angular % 2);
    double sum = 0.0;
    for (int i = 0; i < opt.radial; ++i) {
        double ring = 0.0;
        for (int k = 0; k < m; ++k) ring += locator.interpolate(sample.values, family.boundary_point(r * rho[i], 2.0 * pi * k / m));
        sum += w[i] * rho[i] * ring / m;
    }
    // the polar measure rho d rho d phi / pi integrates to one over the unit disk
    return 2.0 * sum;
}

inline double set_average(const SolutionSample& sample, const MeanValueFamily& family, double r,
                          const AverageOptions& opt = {}) {
    MeshLocator loc(*sample.mesh);
    return set_average(sample, loc, family, r, opt);
}

struct MeanValueRow {
    double r = 0.0;
    double average = 0.0;
    bool monotone_ok = true;  ///< v(x0) <= avg(r_1) + tol for the first radius, avg nondecreasing after
    bool inclusion_ok = true; ///< B_{cr} inside D_r inside B_{Cr}, and B_{Cr} inside the domain
};

struct MeanValueReport {
    MeanValueFamily family;
    double v_at_x0 = 0.0;
    double tolerance = 0.0;
    double interpolation_bound = 0.0;
    std::vector<MeanValueRow> rows;
    bool base_ok = true;     ///< v(x0) <= first average + tol
    bool monotone_ok = true; ///< averages nondecreasing along the radii within tol
    bool inclusion_ok = true;
    bool equality_ok = true; ///< every average equals v(x0) within tol (expected for solutions)

    bool subsolution_consistent() const { return base_ok && monotone_ok && inclusion_ok; }
    std::string verdict() const {
        if (!inclusion_ok) return "inclusion violation";
        if (!base_ok || !monotone_ok) return "not a subsolution consistency violation";
        return equality_ok ? "consistent (equality within tolerance)" : "consistent";
    }

    static std::string csv_header() { return "x0x,x0y,r,average,v_at_x0,monotone_ok,inclusion_ok"; }
    std::vector<std::string> csv_rows() const {
        std::vector<std::string> out;
        for (const auto& row : rows)
            out.push_back(format_double(family.x0.x) + "," + format_double(family.x0.y) + "," + format_double(row.r) +
                          "," + format_double(row.average) + "," + format_double(v_at_x0) + "," +
                          (row.monotone_ok ? "1" : "0") + "," + (row.inclusion_ok ? "1" : "0"));
        return out;
    }
};

namespace detail {

/// Second-derivative proxy of a piecewise-linear field near x0: the largest
/// gradient jump across an interior edge divided by the distance between the
/// two triangle centroids, over triangles meeting B_radius(x0).
inline double hessian_proxy(const SolutionSample& sample, Vec2 x0, double radius) {
    const Mesh& m = *sample.mesh;
    const std::size_t nt = m.triangles.size();
    std::vector<Vec2> grad(nt), centroid(nt);
    std::vector<std::uint8_t> near(nt, 0);
    const double reach = radius + m.max_edge();
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tri = m.triangles[t];
        auto g = barycentric_gradients(m, t);
        grad[t] = sample.values[tri[0]] * g[0] + sample.values[tri[1]] * g[1] + sample.values[tri[2]] * g[2];
        centroid[t] = (m.nodes[tri[0]] + m.nodes[tri[1]] + m.nodes[tri[2]]) / 3.0;
        near[t] = distance(centroid[t], x0) <= reach;
    }
    std::map<std::pair<int, int>, int> edge_owner;
    double worst = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
        if (!near[t]) continue;
        const auto& tri = m.triangles[t];
        for (int k = 0; k < 3; ++k) {
            auto key = std::minmax(tri[k], tri[(k + 1) % 3]);
            auto [it, fresh] = edge_owner.emplace(key, static_cast<int>(t));
            if (fresh) continue;
            int o = it->second;
            worst = std::max(worst, norm(grad[t] - grad[o]) / distance(centroid[t], centroid[o]));
        }
    }
    return worst;
}

} // namespace detail

/// Checks, along increasing radii: v(x0) <= avg(r_1) + tol, avg(r_k) <= avg(r_{k+1}) + tol,
/// and the inclusion sandwich of the family. tol = 1e-6 (1 + |v(x0)|) plus an
/// interpolation bound h_max^2 H / 2 with H the local Hessian proxy.
/// The sample is expected to be a solution or subsolution for `field`; this is not re-verified.
inline MeanValueReport check_mean_value_property(const SolutionSample& sample, const CoefficientField& field,
                                                 const Domain& domain, Vec2 x0, const std::vector<double>& radii,
                                                 const AverageOptions& opt = {}) {
    if (radii.empty()) throw MeanValueError("radii list is empty");
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0)) throw MeanValueError("radii must be positive");
        if (k > 0 && !(radii[k] > radii[k - 1])) throw MeanValueError("radii must be strictly increasing");
    }
    MeanValueReport rep;
    rep.family = build_family(field, x0, domain);
    const auto& fam = rep.family;
    MeshLocator loc(*sample.mesh);
    rep.v_at_x0 = loc.interpolate(sample.values, x0);
    double hmax = sample.mesh->max_edge();
    rep.interpolation_bound = 0.5 * hmax * hmax * detail::hessian_proxy(sample, x0, fam.C * radii.back());
    rep.tolerance = 1e-6 * (1.0 + std::abs(rep.v_at_x0)) + rep.interpolation_bound;

    const double dist = domain.distance_to_boundary(x0);
    double prev = rep.v_at_x0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        MeanValueRow row;
        row.r = radii[k];
        row.average = set_average(sample, loc, fam, row.r, opt);
        row.monotone_ok = prev <= row.average + rep.tolerance;
        if (k == 0) rep.base_ok = row.monotone_ok;
        else rep.monotone_ok = rep.monotone_ok && row.monotone_ok;
        prev = row.average;
        // sandwich on sampled boundary points of D_r
        bool inc = fam.C * row.r <= dist * (1.0 + 1e-12);
        for (int j = 0; j < 256 && inc; ++j) {
            double rho = distance(fam.boundary_point(row.r, 2.0 * pi * j / 256), x0);
            inc = rho >= fam.c * row.r * (1.0 - 1e-12) && rho <= fam.C * row.r * (1.0 + 1e-12);
        }
        row.inclusion_ok = inc;
        rep.inclusion_ok = rep.inclusion_ok && inc;
        rep.equality_ok = rep.equality_ok && std::abs(row.average - rep.v_at_x0) <= rep.tolerance;
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace oscbound
