#pragma once

// Piecewise-linear Galerkin discretization of L v = div(A grad v) = 0 with
// Dirichlet data, discrete subsolution residuals, and closed-form reference
// members of the solution class.

#include "coefficients.hpp"
#include "core.hpp"
#include "mesh.hpp"
#include "text.hpp"

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace oscbound {

class SolverError : public Error {
public:
    SolverError(const std::string& msg, std::vector<double> history = {})
        : Error(msg), history_(std::move(history)) {}
    const std::vector<double>& residual_history() const { return history_; }

private:
    std::vector<double> history_;
};

/// Compressed sparse row matrix over all mesh nodes.
struct SparseMatrix {
    std::vector<int> row_start;
    std::vector<int> cols;
    std::vector<double> vals;

    std::size_t rows() const { return row_start.empty() ? 0 : row_start.size() - 1; }

    double at(int i, int j) const {
        auto b = cols.begin() + row_start[i], e = cols.begin() + row_start[i + 1];
        auto it = std::lower_bound(b, e, j);
        return (it != e && *it == j) ? vals[static_cast<std::size_t>(it - cols.begin())] : 0.0;
    }

    void multiply(const std::vector<double>& x, std::vector<double>& y) const {
        y.assign(rows(), 0.0);
        for (std::size_t i = 0; i < rows(); ++i) {
            double s = 0.0;
            for (int k = row_start[i]; k < row_start[i + 1]; ++k) s += vals[k] * x[cols[k]];
            y[i] = s;
        }
    }
};

/// Gradients of the three barycentric coordinates of triangle t.
inline std::array<Vec2, 3> barycentric_gradients(const Mesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    Vec2 a = mesh.nodes[tri[0]], b = mesh.nodes[tri[1]], c = mesh.nodes[tri[2]];
    double twice = orient(a, b, c);
    return {Vec2{b.y - c.y, c.x - b.x} / twice, Vec2{c.y - a.y, a.x - c.x} / twice, Vec2{a.y - b.y, b.x - a.x} / twice};
}

/// Stiffness matrix K_ij = int A grad(phi_j) . grad(phi_i), with A taken at each
/// element centroid. Exactly symmetric: element blocks are mirrored.
inline SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& field) {
    const std::size_t n = mesh.nodes.size();
    std::vector<std::vector<int>> adj(n);
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) adj[t[k]].push_back(t[l]);
    SparseMatrix K;
    K.row_start.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = adj[i];
        a.push_back(static_cast<int>(i));
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        K.row_start[i + 1] = K.row_start[i] + static_cast<int>(a.size());
    }
    K.cols.reserve(K.row_start[n]);
    for (const auto& a : adj) K.cols.insert(K.cols.end(), a.begin(), a.end());
    K.vals.assign(K.cols.size(), 0.0);
    auto slot = [&](int i, int j) -> double& {
        auto b = K.cols.begin() + K.row_start[i], e = K.cols.begin() + K.row_start[i + 1];
        return K.vals[static_cast<std::size_t>(std::lower_bound(b, e, j) - K.cols.begin())];
    };
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        auto g = barycentric_gradients(mesh, t);
        double area = mesh.triangle_area(t);
        Vec2 centroid = (mesh.nodes[tri[0]] + mesh.nodes[tri[1]] + mesh.nodes[tri[2]]) / 3.0;
        Mat2 A = field(centroid);
        for (int k = 0; k < 3; ++k) {
            for (int l = k; l < 3; ++l) {
                double v = area * dot(g[k], A * g[l]);
                slot(tri[k], tri[l]) += v;
                if (l != k) slot(tri[l], tri[k]) += v;
            }
        }
    }
    return K;
}

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> residual_history;
    double max_principle_violation = 0.0; ///< max(0, overshoot beyond [min g, max g])
    bool max_principle_ok = true;
};

enum class Provenance { dirichlet_solve, subsolution, reference };

inline std::string provenance_name(Provenance p) {
    switch (p) {
        case Provenance::dirichlet_solve: return "dirichlet-solve";
        case Provenance::subsolution: return "subsolution";
        case Provenance::reference: return "reference";
    }
    return "unknown";
}

/// Nodal scalar field on a mesh, representing a member of the solution class.
struct SolutionSample {
    std::shared_ptr<const Mesh> mesh;
    std::vector<double> values;
    Provenance provenance = Provenance::reference;
    std::string id; ///< field / boundary data / analytic identifier
    double alpha = 1.0;
    SolveStats stats;

    /// Same sample with coordinates mapped by x -> scale * x + shift.
    SolutionSample transformed(double scale, Vec2 shift = {}) const {
        SolutionSample s = *this;
        s.mesh = std::make_shared<const Mesh>(mesh->transformed(scale, shift));
        return s;
    }

    SolutionSample shifted_values(double c) const {
        SolutionSample s = *this;
        for (auto& v : s.values) v += c;
        return s;
    }

    SolutionSample scaled_values(double t) const {
        SolutionSample s = *this;
        for (auto& v : s.values) v *= t;
        return s;
    }
};

struct SolverOptions {
    double tolerance = 1e-10;
    int max_iterations = -1; ///< -1: 50 sqrt(n) + 1000
};

/// Preconditioned conjugate gradients on the interior block of K.
inline std::vector<double> solve_interior(const SparseMatrix& K, const std::vector<int>& interior,
                                          const std::vector<int>& unknown_of, std::vector<double> rhs,
                                          const SolverOptions& opt, SolveStats& stats) {
    const std::size_t n = interior.size();
    std::vector<double> x(n, 0.0), diag(n), r = std::move(rhs), z(n), p(n), q(n);
    for (std::size_t u = 0; u < n; ++u) diag[u] = K.at(interior[u], interior[u]);
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t u = 0; u < n; ++u) {
            int i = interior[u];
            double s = 0.0;
            for (int k = K.row_start[i]; k < K.row_start[i + 1]; ++k) {
                int c = unknown_of[K.cols[k]];
                if (c >= 0) s += K.vals[k] * in[c];
            }
            out[u] = s;
        }
    };
    auto dotv = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    const double bnorm = std::sqrt(dotv(r, r));
    const int cap = opt.max_iterations > 0 ? opt.max_iterations
                                           : static_cast<int>(50.0 * std::sqrt(static_cast<double>(n))) + 1000;
    stats.residual_history.clear();
    stats.residual_history.push_back(1.0);
    if (bnorm == 0.0 || n == 0) {
        stats.relative_residual = 0.0;
        return x;
    }
    for (std::size_t u = 0; u < n; ++u) z[u] = r[u] / diag[u];
    p = z;
    double rz = dotv(r, z);
    for (int it = 1; it <= cap; ++it) {
        apply(p, q);
        double alpha = rz / dotv(p, q);
        for (std::size_t u = 0; u < n; ++u) {
            x[u] += alpha * p[u];
            r[u] -= alpha * q[u];
        }
        double rel = std::sqrt(dotv(r, r)) / bnorm;
        stats.residual_history.push_back(rel);
        stats.iterations = it;
        stats.relative_residual = rel;
        if (rel <= opt.tolerance) return x;
        for (std::size_t u = 0; u < n; ++u) z[u] = r[u] / diag[u];
        double rz_new = dotv(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t u = 0; u < n; ++u) p[u] = z[u] + beta * p[u];
    }
    throw SolverError("conjugate gradients did not converge in " + std::to_string(cap) +
                          " iterations (relative residual " + format_double(stats.relative_residual) + ")",
                      stats.residual_history);
}

/// Galerkin solution of div(A grad v) = 0 with v = g at boundary nodes.
template <class BoundaryData>
SolutionSample assemble_and_solve_dirichlet(std::shared_ptr<const Mesh> mesh, const CoefficientField& field,
                                            const BoundaryData& g, std::string id = {},
                                            const SolverOptions& opt = {}) {
    const Mesh& m = *mesh;
    const std::size_t n = m.nodes.size();
    std::vector<double> values(n, 0.0);
    double gmin = std::numeric_limits<double>::infinity(), gmax = -gmin;
    std::vector<int> interior, unknown_of(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (m.boundary[i]) {
            values[i] = g(m.nodes[i]);
            if (!std::isfinite(values[i])) throw SolverError("boundary data is not finite at node " + std::to_string(i));
            gmin = std::min(gmin, values[i]);
            gmax = std::max(gmax, values[i]);
        } else {
            unknown_of[i] = static_cast<int>(interior.size());
            interior.push_back(static_cast<int>(i));
        }
    }
    SparseMatrix K = assemble_stiffness(m, field);
    std::vector<double> rhs(interior.size(), 0.0);
    for (std::size_t u = 0; u < interior.size(); ++u) {
        int i = interior[u];
        double s = 0.0;
        for (int k = K.row_start[i]; k < K.row_start[i + 1]; ++k)
            if (m.boundary[K.cols[k]]) s -= K.vals[k] * values[K.cols[k]];
        rhs[u] = s;
    }
    SolutionSample out;
    out.mesh = std::move(mesh);
    out.provenance = Provenance::dirichlet_solve;
    out.id = id;
    auto x = solve_interior(K, interior, unknown_of, std::move(rhs), opt, out.stats);
    for (std::size_t u = 0; u < interior.size(); ++u) values[interior[u]] = x[u];
    const double eps = 1e-8 * (gmax - gmin);
    double worst = 0.0;
    for (double v : values) worst = std::max({worst, gmin - v, v - gmax});
    out.stats.max_principle_violation = worst;
    out.stats.max_principle_ok = worst <= eps;
    out.values = std::move(values);
    return out;
}

struct SubsolutionReport {
    std::vector<double> residual; ///< -(K v)_i at interior nodes, 0 at boundary nodes
    double min_residual = 0.0;
    double max_residual = 0.0;
    double scale = 0.0;
    bool subsolution = false;
};

/// Discrete weak test of L v >= 0 against interior hat functions.
inline SubsolutionReport weak_subsolution_residual(const SolutionSample& sample, const CoefficientField& field) {
    const Mesh& m = *sample.mesh;
    if (sample.values.size() != m.nodes.size()) throw SolverError("sample and mesh sizes differ");
    SparseMatrix K = assemble_stiffness(m, field);
    std::vector<double> kv;
    K.multiply(sample.values, kv);
    SubsolutionReport rep;
    rep.residual.assign(m.nodes.size(), 0.0);
    rep.min_residual = std::numeric_limits<double>::infinity();
    rep.max_residual = -rep.min_residual;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        double s = 0.0;
        for (int k = K.row_start[i]; k < K.row_start[i + 1]; ++k) s += std::abs(K.vals[k] * sample.values[K.cols[k]]);
        rep.scale = std::max(rep.scale, s);
        if (m.boundary[i]) continue;
        rep.residual[i] = -kv[i];
        rep.min_residual = std::min(rep.min_residual, rep.residual[i]);
        rep.max_residual = std::max(rep.max_residual, rep.residual[i]);
    }
    rep.subsolution = rep.min_residual >= -1e-9 * std::max(rep.scale, 1e-300);
    return rep;
}

// ---------------------------------------------------------------------------
// Closed-form members
// ---------------------------------------------------------------------------

enum class AnalyticKind { linear, harmonic_poly, squared_distance, fourier_disk };

/// Closed-form scalar field: linear a x + b y + c; Re/Im (x + i y)^k;
/// |x - x0|^2; or sum_k (r/R)^k (a_k cos k phi + b_k sin k phi) on a disk.
struct Analytic {
    AnalyticKind kind = AnalyticKind::linear;
    double a = 0.0, b = 0.0, c = 0.0;
    int degree = 0;
    bool imaginary = false;
    Vec2 point;
    double radius = 1.0;
    std::vector<double> cos_coeffs, sin_coeffs;

    static Analytic linear(double a, double b, double c) {
        Analytic f;
        f.a = a;
        f.b = b;
        f.c = c;
        return f;
    }
    static Analytic harmonic_poly(int k, bool imaginary = false) {
        if (k < 0 || k > 6) throw SolverError("harmonic-poly degree must lie in [0, 6]");
        Analytic f;
        f.kind = AnalyticKind::harmonic_poly;
        f.degree = k;
        f.imaginary = imaginary;
        return f;
    }
    static Analytic squared_distance(Vec2 x0) {
        Analytic f;
        f.kind = AnalyticKind::squared_distance;
        f.point = x0;
        return f;
    }
    static Analytic fourier_disk(std::vector<double> cos_k, std::vector<double> sin_k, Vec2 center = {},
                                 double radius = 1.0) {
        Analytic f;
        f.kind = AnalyticKind::fourier_disk;
        f.cos_coeffs = std::move(cos_k);
        f.sin_coeffs = std::move(sin_k);
        f.point = center;
        f.radius = radius;
        return f;
    }

    double operator()(Vec2 x) const {
        switch (kind) {
            case AnalyticKind::linear: return a * x.x + b * x.y + c;
            case AnalyticKind::harmonic_poly: {
                double re = 1.0, im = 0.0;
                for (int k = 0; k < degree; ++k) {
                    double nr = re * x.x - im * x.y;
                    im = re * x.y + im * x.x;
                    re = nr;
                }
                return imaginary ? im : re;
            }
            case AnalyticKind::squared_distance: {
                Vec2 d = x - point;
                return dot(d, d);
            }
            case AnalyticKind::fourier_disk: {
                Vec2 d = x - point;
                double r = norm(d) / radius, phi = std::atan2(d.y, d.x);
                double s = 0.0, rk = 1.0;
                std::size_t deg = std::max(cos_coeffs.size(), sin_coeffs.size());
                for (std::size_t k = 0; k < deg; ++k) {
                    double ak = k < cos_coeffs.size() ? cos_coeffs[k] : 0.0;
                    double bk = k < sin_coeffs.size() ? sin_coeffs[k] : 0.0;
                    s += rk * (ak * std::cos(k * phi) + bk * std::sin(k * phi));
                    rk *= r;
                }
                return s;
            }
        }
        return 0.0;
    }

    /// True when the field solves every constant-coefficient equation it is used with
    /// (linear), or the Laplace equation (harmonic families).
    bool harmonic() const { return kind != AnalyticKind::squared_distance; }

    std::string id() const {
        switch (kind) {
            case AnalyticKind::linear:
                return "linear " + format_double(a) + " " + format_double(b) + " " + format_double(c);
            case AnalyticKind::harmonic_poly:
                return std::string("harmonic-poly ") + (imaginary ? "im " : "re ") + std::to_string(degree);
            case AnalyticKind::squared_distance:
                return "squared-distance " + format_double(point.x) + " " + format_double(point.y);
            case AnalyticKind::fourier_disk: {
                std::string s = "fourier-harmonic cos";
                for (double v : cos_coeffs) s += " " + format_double(v);
                s += " sin";
                for (double v : sin_coeffs) s += " " + format_double(v);
                return s;
            }
        }
        return "unknown";
    }

    /// Parses `linear a b c`, `harmonic-poly re|im k`, `squared-distance x y`,
    /// `fourier-harmonic cos a0 a1 ... sin b0 b1 ...`.
    static Analytic parse(const std::string& text) {
        auto tok = split_ws(text);
        if (tok.empty()) throw SolverError("empty analytic id");
        auto num = [&](std::size_t i) {
            double v = 0.0;
            if (i >= tok.size() || !parse_double(tok[i], v)) throw SolverError("malformed analytic id '" + text + "'");
            return v;
        };
        if (tok[0] == "linear") return linear(num(1), num(2), num(3));
        if (tok[0] == "harmonic-poly") {
            if (tok.size() != 3 || (tok[1] != "re" && tok[1] != "im")) throw SolverError("expected 'harmonic-poly re|im k'");
            return harmonic_poly(static_cast<int>(num(2)), tok[1] == "im");
        }
        if (tok[0] == "squared-distance") return squared_distance({num(1), num(2)});
        if (tok[0] == "fourier-harmonic") {
            std::vector<double> cs, ss;
            std::vector<double>* cur = nullptr;
            for (std::size_t i = 1; i < tok.size(); ++i) {
                if (tok[i] == "cos") cur = &cs;
                else if (tok[i] == "sin") cur = &ss;
                else if (cur) cur->push_back(num(i));
                else throw SolverError("expected 'cos' or 'sin' in '" + text + "'");
            }
            return fourier_disk(std::move(cs), std::move(ss));
        }
        throw SolverError("unknown analytic id '" + tok[0] + "'");
    }
};

/// Nodal evaluation of a closed form; squared distances are tagged as subsolutions.
inline SolutionSample reference_solution(const Analytic& f, std::shared_ptr<const Mesh> mesh) {
    SolutionSample s;
    s.values.resize(mesh->nodes.size());
    for (std::size_t i = 0; i < mesh->nodes.size(); ++i) s.values[i] = f(mesh->nodes[i]);
    s.mesh = std::move(mesh);
    s.provenance = f.harmonic() ? Provenance::reference : Provenance::subsolution;
    s.id = f.id();
    return s;
}

/// Trigonometric boundary data g = sum_k a_k cos(k phi) + b_k sin(k phi), with
/// phi measured around `center`.
struct FourierData {
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
    Vec2 center;

    double operator()(Vec2 x) const {
        double phi = std::atan2(x.y - center.y, x.x - center.x);
        double s = 0.0;
        for (std::size_t k = 0; k < cos_coeffs.size(); ++k) s += cos_coeffs[k] * std::cos(k * phi);
        for (std::size_t k = 0; k < sin_coeffs.size(); ++k) s += sin_coeffs[k] * std::sin(k * phi);
        return s;
    }

    std::size_t degree() const {
        std::size_t d = std::max(cos_coeffs.size(), sin_coeffs.size());
        return d == 0 ? 0 : d - 1;
    }

    std::string id() const {
        std::string s = "fourier cos";
        for (double v : cos_coeffs) s += " " + format_double(v);
        s += " sin";
        for (double v : sin_coeffs) s += " " + format_double(v);
        return s;
    }

    /// Harmonic extension into the disk of the given radius around `center`.
    Analytic harmonic_extension(double radius) const {
        return Analytic::fourier_disk(cos_coeffs, sin_coeffs, center, radius);
    }
};

/// Seeded random trigonometric data: degree uniform in [1, max_degree],
/// coefficients standard normal for every mode up to that degree.
inline FourierData random_fourier(std::size_t max_degree, std::uint64_t seed, Vec2 center = {}) {
    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_int_distribution<std::size_t> deg(1, std::max<std::size_t>(1, max_degree));
    std::normal_distribution<double> nd(0.0, 1.0);
    std::size_t d = deg(rng);
    FourierData f;
    f.center = center;
    f.cos_coeffs.resize(d + 1);
    f.sin_coeffs.resize(d + 1);
    for (std::size_t k = 0; k <= d; ++k) {
        f.cos_coeffs[k] = nd(rng);
        f.sin_coeffs[k] = k == 0 ? 0.0 : nd(rng);
    }
    return f;
}

/// sqrt(int (v_h - f)^2) with a degree-5 seven-point rule per triangle.
template <class F>
double l2_error(const SolutionSample& sample, const F& exact) {
    static constexpr double w[7] = {0.225,
                                    0.132394152788506, 0.132394152788506, 0.132394152788506,
                                    0.125939180544827, 0.125939180544827, 0.125939180544827};
    static constexpr double a1 = 0.059715871789770, b1 = 0.470142064105115;
    static constexpr double a2 = 0.797426985353087, b2 = 0.101286507323456;
    static constexpr double bary[7][3] = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                                          {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
    const Mesh& m = *sample.mesh;
    double sum = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        double area = m.triangle_area(t);
        double acc = 0.0;
        for (int q = 0; q < 7; ++q) {
            Vec2 x = bary[q][0] * m.nodes[tri[0]] + bary[q][1] * m.nodes[tri[1]] + bary[q][2] * m.nodes[tri[2]];
            double vh = bary[q][0] * sample.values[tri[0]] + bary[q][1] * sample.values[tri[1]] +
                        bary[q][2] * sample.values[tri[2]];
            double e = vh - exact(x);
            acc += w[q] * e * e;
        }
        sum += area * acc;
    }
    return std::sqrt(sum);
}

} // namespace oscbound
