#pragma once

// Triangular meshes of planar domains: incremental Delaunay triangulation of
// boundary nodes plus a smoothed triangular lattice, a point locator, and the
// plaintext mesh dump.

#include "core.hpp"
#include "geometry.hpp"

#include <array>
#include <ostream>
#include <string>
#include <vector>

namespace oscbound {

class MeshError : public Error {
public:
    using Error::Error;
};

struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles; ///< counterclockwise
    std::vector<std::uint8_t> boundary;        ///< 1 for nodes on the domain boundary
    double h = 0.0;                            ///< target edge length
    double domain_diameter = 0.0;              ///< d_Omega of the meshed domain

    std::size_t node_count() const { return nodes.size(); }

    double triangle_area(std::size_t t) const {
        const auto& tri = triangles[t];
        return 0.5 * orient(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
    }

    double area() const {
        double a = 0.0;
        for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
        return a;
    }

    std::vector<int> boundary_nodes() const {
        std::vector<int> out;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (boundary[i]) out.push_back(static_cast<int>(i));
        return out;
    }

    /// Smallest interior angle over all triangles, in radians.
    double min_angle() const {
        double m = pi;
        for (const auto& t : triangles) {
            for (int k = 0; k < 3; ++k) {
                Vec2 a = nodes[t[k]], b = nodes[t[(k + 1) % 3]], c = nodes[t[(k + 2) % 3]];
                m = std::min(m, std::atan2(std::abs(cross(b - a, c - a)), dot(b - a, c - a)));
            }
        }
        return m;
    }

    double max_angle() const {
        double m = 0.0;
        for (const auto& t : triangles) {
            for (int k = 0; k < 3; ++k) {
                Vec2 a = nodes[t[k]], b = nodes[t[(k + 1) % 3]], c = nodes[t[(k + 2) % 3]];
                m = std::max(m, std::atan2(std::abs(cross(b - a, c - a)), dot(b - a, c - a)));
            }
        }
        return m;
    }

    double max_edge() const {
        double m = 0.0;
        for (const auto& t : triangles)
            for (int k = 0; k < 3; ++k) m = std::max(m, distance(nodes[t[k]], nodes[t[(k + 1) % 3]]));
        return m;
    }

    /// Image of the mesh under x -> scale * x + shift.
    Mesh transformed(double scale, Vec2 shift = {}) const {
        Mesh m = *this;
        for (auto& p : m.nodes) p = scale * p + shift;
        m.h *= scale;
        m.domain_diameter *= scale;
        return m;
    }
};

namespace detail {

/// Incremental Bowyer-Watson triangulation with a walking point locator.
class Delaunay {
public:
    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> nbr; ///< nbr[k] lies across the edge opposite v[k]
        bool alive = true;
    };

    explicit Delaunay(const std::vector<Vec2>& points) : pts_(points) {
        Vec2 lo = pts_[0], hi = pts_[0];
        for (auto p : pts_) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
        }
        Vec2 c = 0.5 * (lo + hi);
        double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-300});
        n_real_ = static_cast<int>(pts_.size());
        const double big = 64.0 * span;
        pts_.push_back(c + Vec2{-big, -big});
        pts_.push_back(c + Vec2{big, -big});
        pts_.push_back(c + Vec2{0.0, big});
        tris_.push_back(Tri{{n_real_, n_real_ + 1, n_real_ + 2}, {-1, -1, -1}, true});
        for (int i = 0; i < n_real_; ++i) insert(i);
    }

    /// Triangles without super-vertices, counterclockwise.
    std::vector<std::array<int, 3>> triangles() const {
        std::vector<std::array<int, 3>> out;
        for (const auto& t : tris_) {
            if (!t.alive) continue;
            if (t.v[0] >= n_real_ || t.v[1] >= n_real_ || t.v[2] >= n_real_) continue;
            out.push_back(t.v);
        }
        return out;
    }

private:
    bool in_circumcircle(const Tri& t, Vec2 p) const {
        Vec2 a = pts_[t.v[0]] - p, b = pts_[t.v[1]] - p, c = pts_[t.v[2]] - p;
        long double a2 = static_cast<long double>(a.x) * a.x + static_cast<long double>(a.y) * a.y;
        long double b2 = static_cast<long double>(b.x) * b.x + static_cast<long double>(b.y) * b.y;
        long double c2 = static_cast<long double>(c.x) * c.x + static_cast<long double>(c.y) * c.y;
        long double det = a2 * (static_cast<long double>(b.x) * c.y - static_cast<long double>(c.x) * b.y) -
                          b2 * (static_cast<long double>(a.x) * c.y - static_cast<long double>(c.x) * a.y) +
                          c2 * (static_cast<long double>(a.x) * b.y - static_cast<long double>(b.x) * a.y);
        return det > 0.0L;
    }

    int locate(Vec2 p) const {
        int t = last_;
        if (t < 0 || !tris_[t].alive) {
            for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
                if (tris_[i].alive) { t = i; break; }
        }
        std::size_t guard = 0;
        const std::size_t limit = 4 * tris_.size() + 16;
        while (guard++ < limit) {
            const Tri& tr = tris_[t];
            int next = -1;
            for (int k = 0; k < 3; ++k) {
                int k0 = (k + rot_) % 3;
                Vec2 a = pts_[tr.v[(k0 + 1) % 3]], b = pts_[tr.v[(k0 + 2) % 3]];
                if (orient(a, b, p) < 0.0) {
                    next = tr.nbr[k0];
                    break;
                }
            }
            if (next < 0) return t;
            t = next;
            rot_ = (rot_ + 1) % 3;
        }
        // fall back to exhaustive search
        for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
            const Tri& tr = tris_[i];
            if (!tr.alive) continue;
            if (orient(pts_[tr.v[0]], pts_[tr.v[1]], p) >= 0.0 && orient(pts_[tr.v[1]], pts_[tr.v[2]], p) >= 0.0 &&
                orient(pts_[tr.v[2]], pts_[tr.v[0]], p) >= 0.0)
                return i;
        }
        throw MeshError("Delaunay point location failed");
    }

    void insert(int pi_) {
        const Vec2 p = pts_[pi_];
        int start = locate(p);
        cavity_.clear();
        stack_.clear();
        stack_.push_back(start);
        mark_.resize(tris_.size(), 0);
        ++stamp_;
        mark_[start] = stamp_;
        while (!stack_.empty()) {
            int t = stack_.back();
            stack_.pop_back();
            cavity_.push_back(t);
            for (int k = 0; k < 3; ++k) {
                int n = tris_[t].nbr[k];
                if (n < 0 || mark_[n] == stamp_) continue;
                if (in_circumcircle(tris_[n], p)) {
                    mark_[n] = stamp_;
                    stack_.push_back(n);
                }
            }
        }
        // boundary edges of the cavity, each as (a, b, outside neighbor)
        bedges_.clear();
        for (int t : cavity_) {
            const Tri& tr = tris_[t];
            for (int k = 0; k < 3; ++k) {
                int n = tr.nbr[k];
                if (n >= 0 && mark_[n] == stamp_) continue;
                bedges_.push_back({tr.v[(k + 1) % 3], tr.v[(k + 2) % 3], n});
            }
        }
        for (int t : cavity_) tris_[t].alive = false;
        const int base = static_cast<int>(tris_.size());
        for (std::size_t e = 0; e < bedges_.size(); ++e) {
            const auto& be = bedges_[e];
            tris_.push_back(Tri{{pi_, be.a, be.b}, {be.out, -1, -1}, true});
            if (be.out >= 0) {
                Tri& o = tris_[be.out];
                for (int k = 0; k < 3; ++k) {
                    if (o.v[k] != be.a && o.v[k] != be.b) {
                        o.nbr[k] = base + static_cast<int>(e);
                        break;
                    }
                }
            }
        }
        // link the fan: the triangle starting at b follows the one ending at b
        for (std::size_t e = 0; e < bedges_.size(); ++e) {
            Tri& t = tris_[base + e];
            for (std::size_t f = 0; f < bedges_.size(); ++f) {
                if (bedges_[f].a == t.v[2]) t.nbr[1] = base + static_cast<int>(f);
                if (bedges_[f].b == t.v[1]) t.nbr[2] = base + static_cast<int>(f);
            }
        }
        mark_.resize(tris_.size(), 0);
        last_ = base;
    }

    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    int n_real_ = 0;
    int last_ = 0;
    mutable int rot_ = 0;
    std::vector<int> cavity_, stack_;
    std::vector<unsigned> mark_;
    unsigned stamp_ = 0;
    struct BEdgeStore { int a, b, out; };
    std::vector<BEdgeStore> bedges_;
};

inline std::size_t boundary_node_count(const Domain& domain, double h) {
    std::size_t n = static_cast<std::size_t>(std::ceil(domain.boundary_length() / h));
    n = std::max<std::size_t>(n, 8);
    return (n + 3) / 4 * 4; // multiple of 4 keeps disk samples symmetric
}

inline std::vector<Vec2> polygon_boundary_nodes(const Domain& domain, double h) {
    const auto& v = domain.as_polygon().vertices;
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        Vec2 a = v[i], b = v[(i + 1) % v.size()];
        int segs = std::max(1, static_cast<int>(std::ceil(distance(a, b) / h - 1e-9)));
        for (int k = 0; k < segs; ++k) out.push_back(a + (static_cast<double>(k) / segs) * (b - a));
    }
    return out;
}

} // namespace detail

/// Deterministic triangulation of `domain` with target edge length h.
/// Boundary nodes lie on the boundary (polygons are covered exactly); interior
/// nodes come from a triangular lattice, relaxed by a few smoothing sweeps.
inline Mesh mesh_domain(const Domain& domain, double h) {
    const auto dm = diameter_and_measure(domain);
    if (!(h > 0.0) || !(h < dm.diameter / 4.0)) throw MeshError("mesh size must satisfy 0 < h < diameter/4");

    std::vector<Vec2> bnodes;
    if (domain.is_polygon()) {
        bnodes = detail::polygon_boundary_nodes(domain, h);
    } else {
        for (const auto& bp : boundary_sample(domain, detail::boundary_node_count(domain, h))) bnodes.push_back(bp.point);
    }

    // lattice interior nodes, kept away from the boundary
    auto [lo, hi] = domain.bounding_box();
    const double dy = h * std::sqrt(3.0) / 2.0;
    const double keep_out = 0.6 * h;
    std::vector<Vec2> inodes;
    Vec2 c = domain.center();
    int jmin = static_cast<int>(std::floor((lo.y - c.y) / dy)) - 1, jmax = static_cast<int>(std::ceil((hi.y - c.y) / dy)) + 1;
    int imin = static_cast<int>(std::floor((lo.x - c.x) / h)) - 2, imax = static_cast<int>(std::ceil((hi.x - c.x) / h)) + 2;
    for (int j = jmin; j <= jmax; ++j) {
        for (int i = imin; i <= imax; ++i) {
            Vec2 p{c.x + (i + 0.5 * (j & 1)) * h, c.y + j * dy};
            if (!domain.strictly_inside(p, keep_out)) continue;
            inodes.push_back(p);
        }
    }

    std::vector<Vec2> pts = bnodes;
    pts.insert(pts.end(), inodes.begin(), inodes.end());
    const std::size_t nb = bnodes.size();

    auto triangulate = [&]() {
        detail::Delaunay del(pts);
        auto tris = del.triangles();
        if (domain.is_polygon() && !domain.is_convex()) {
            std::vector<std::array<int, 3>> kept;
            for (const auto& t : tris) {
                Vec2 g = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
                if (domain.strictly_inside(g)) kept.push_back(t);
            }
            tris = std::move(kept);
        }
        // drop slivers made only of collinear boundary nodes
        std::vector<std::array<int, 3>> good;
        for (const auto& t : tris) {
            double a = orient(pts[t[0]], pts[t[1]], pts[t[2]]);
            if (a > 1e-12 * h * h) good.push_back(t);
        }
        return good;
    };

    auto tris = triangulate();
    // Laplacian smoothing of interior nodes, then retriangulate
    for (int sweep = 0; sweep < 2; ++sweep) {
        std::vector<Vec2> sum(pts.size(), Vec2{});
        std::vector<int> cnt(pts.size(), 0);
        for (const auto& t : tris) {
            for (int k = 0; k < 3; ++k) {
                for (int l = 0; l < 3; ++l) {
                    if (k == l) continue;
                    sum[t[k]] += pts[t[l]];
                    ++cnt[t[k]];
                }
            }
        }
        for (std::size_t i = nb; i < pts.size(); ++i) {
            if (cnt[i] == 0) continue;
            Vec2 target = sum[i] / static_cast<double>(cnt[i]);
            if (domain.strictly_inside(target, 0.25 * h)) pts[i] = target;
        }
        tris = triangulate();
    }

    Mesh mesh;
    mesh.nodes = std::move(pts);
    mesh.triangles = std::move(tris);
    mesh.boundary.assign(mesh.nodes.size(), 0);
    for (std::size_t i = 0; i < nb; ++i) mesh.boundary[i] = 1;
    mesh.h = h;
    mesh.domain_diameter = dm.diameter;

    // every node must be used and the triangulation must cover the domain
    std::vector<std::uint8_t> used(mesh.nodes.size(), 0);
    for (const auto& t : mesh.triangles)
        for (int k : t) used[k] = 1;
    for (std::size_t i = 0; i < used.size(); ++i)
        if (!used[i]) throw MeshError("meshing failure: node " + std::to_string(i) + " not covered by any triangle");
    if (domain.is_polygon()) {
        if (std::abs(mesh.area() - dm.area) > 1e-9 * dm.area)
            throw MeshError("meshing failure: triangulation area " + format_double(mesh.area()) +
                            " differs from polygon area " + format_double(dm.area));
    }
    return mesh;
}

/// Point location in a mesh via a uniform bucket grid over triangle bounding boxes.
class MeshLocator {
public:
    explicit MeshLocator(const Mesh& mesh) : mesh_(&mesh) {
        Vec2 lo = mesh.nodes[0], hi = mesh.nodes[0];
        for (auto p : mesh.nodes) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
        }
        lo_ = lo;
        double span = std::max(hi.x - lo.x, hi.y - lo.y);
        nx_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.triangles.size())) / 1.5));
        ny_ = nx_;
        cw_ = std::max(hi.x - lo.x, 1e-300 * span) / nx_;
        ch_ = std::max(hi.y - lo.y, 1e-300 * span) / ny_;
        buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto& tri = mesh.triangles[t];
            Vec2 a = mesh.nodes[tri[0]], b = mesh.nodes[tri[1]], c = mesh.nodes[tri[2]];
            int i0 = cell_x(std::min({a.x, b.x, c.x})), i1 = cell_x(std::max({a.x, b.x, c.x}));
            int j0 = cell_y(std::min({a.y, b.y, c.y})), j1 = cell_y(std::max({a.y, b.y, c.y}));
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(t));
        }
    }

    struct Hit {
        int triangle = -1;
        std::array<double, 3> bary{};
        bool inside = false; ///< false when the point lies outside every triangle (nearest used)
    };

    /// Triangle containing p; outside the mesh, the nearest triangle of the
    /// surrounding buckets with its (extrapolating) barycentric coordinates.
    Hit locate(Vec2 p) const {
        int ci = cell_x(p.x), cj = cell_y(p.y);
        Hit best;
        double best_out = std::numeric_limits<double>::infinity();
        for (int ring = 0; ring <= std::max(nx_, ny_); ++ring) {
            for (int j = cj - ring; j <= cj + ring; ++j) {
                for (int i = ci - ring; i <= ci + ring; ++i) {
                    if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
                    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
                    for (int t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
                        auto bary = barycentric(t, p);
                        double out = -std::min({bary[0], bary[1], bary[2]});
                        if (out <= 1e-12) return {t, bary, true};
                        if (out < best_out) {
                            best_out = out;
                            best = {t, bary, false};
                        }
                    }
                }
            }
            if (best.triangle >= 0 && ring >= 1) return best;
        }
        return best;
    }

    double interpolate(const std::vector<double>& values, Vec2 p) const {
        Hit h = locate(p);
        if (h.triangle < 0) throw MeshError("point location failed");
        const auto& tri = mesh_->triangles[h.triangle];
        return h.bary[0] * values[tri[0]] + h.bary[1] * values[tri[1]] + h.bary[2] * values[tri[2]];
    }

private:
    int cell_x(double x) const { return std::clamp(static_cast<int>(std::floor((x - lo_.x) / cw_)), 0, nx_ - 1); }
    int cell_y(double y) const { return std::clamp(static_cast<int>(std::floor((y - lo_.y) / ch_)), 0, ny_ - 1); }

    std::array<double, 3> barycentric(int t, Vec2 p) const {
        const auto& tri = mesh_->triangles[t];
        Vec2 a = mesh_->nodes[tri[0]], b = mesh_->nodes[tri[1]], c = mesh_->nodes[tri[2]];
        double det = orient(a, b, c);
        double l1 = orient(p, b, c) / det;
        double l2 = orient(a, p, c) / det;
        return {l1, l2, 1.0 - l1 - l2};
    }

    const Mesh* mesh_;
    Vec2 lo_;
    int nx_ = 1, ny_ = 1;
    double cw_ = 1.0, ch_ = 1.0;
    std::vector<std::vector<int>> buckets_;
};

/// Header `nodes E elements F`, node lines `x y flag`, element lines `i j k`.
inline void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << "nodes " << mesh.nodes.size() << " elements " << mesh.triangles.size() << "\n";
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
        os << format_double(mesh.nodes[i].x) << " " << format_double(mesh.nodes[i].y) << " "
           << static_cast<int>(mesh.boundary[i]) << "\n";
    for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
}

/// Mesh dump followed by one `value` line per node.
inline void write_solution(std::ostream& os, const Mesh& mesh, const std::vector<double>& values) {
    write_mesh(os, mesh);
    for (double v : values) os << format_double(v) << "\n";
}

/// Reads a mesh dump; when `values` is given, trailing node values are read as well.
inline Mesh read_mesh(std::istream& is, std::vector<double>* values = nullptr) {
    std::string w1, w2;
    std::size_t ne = 0, nf = 0;
    if (!(is >> w1 >> ne >> w2 >> nf) || w1 != "nodes" || w2 != "elements")
        throw MeshError("mesh dump must start with 'nodes E elements F'");
    Mesh m;
    m.nodes.resize(ne);
    m.boundary.resize(ne);
    for (std::size_t i = 0; i < ne; ++i) {
        int flag = 0;
        if (!(is >> m.nodes[i].x >> m.nodes[i].y >> flag)) throw MeshError("truncated node section");
        m.boundary[i] = static_cast<std::uint8_t>(flag != 0);
    }
    m.triangles.resize(nf);
    for (std::size_t t = 0; t < nf; ++t) {
        auto& tri = m.triangles[t];
        if (!(is >> tri[0] >> tri[1] >> tri[2])) throw MeshError("truncated element section");
        for (int k : tri)
            if (k < 0 || static_cast<std::size_t>(k) >= ne) throw MeshError("element index out of range");
    }
    if (values) {
        values->resize(ne);
        for (std::size_t i = 0; i < ne; ++i)
            if (!(is >> (*values)[i])) throw MeshError("truncated value section");
    }
    return m;
}

} // namespace oscbound
