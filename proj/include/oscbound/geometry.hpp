#pragma once

// Planar domains and the geometric parameters that enter the oscillation
// bounds: diameter, measure, interior sphere radius, interior cone and local
// John certificates.

#include "core.hpp"
#include "text.hpp"

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace oscbound {

struct Disk {
    Vec2 center;
    double radius = 1.0;
};

/// Axis-aligned ellipse with semi-axes a >= b along x and y.
struct Ellipse {
    Vec2 center;
    double a = 1.0;
    double b = 1.0;
};

/// Counterclockwise polygon.
struct Polygon {
    std::vector<Vec2> vertices;
};

enum class PolygonCheck {
    simple,      ///< reject every self-intersection
    allow_slits, ///< accept zero-width slits (collinear overlaps, touching vertices)
};

class GeometryError : public Error {
public:
    using Error::Error;
};

struct BoundaryPoint {
    Vec2 point;
    std::optional<Vec2> normal; ///< exterior unit normal; absent at polygon corners
    int edge = -1;              ///< polygon edge index, -1 for curved boundaries
    bool vertex = false;        ///< true when the point is a polygon vertex (edge holds the vertex index)
    double arclength = 0.0;
};

namespace detail {

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return distance(p, a + t * ab);
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

inline bool on_segment(Vec2 p, Vec2 a, Vec2 b) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

enum class Crossing { none, touch, proper, collinear };

inline Crossing classify_crossing(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    int d1 = sign(orient(q1, q2, p1));
    int d2 = sign(orient(q1, q2, p2));
    int d3 = sign(orient(p1, p2, q1));
    int d4 = sign(orient(p1, p2, q2));
    if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) {
        bool overlap = on_segment(q1, p1, p2) || on_segment(q2, p1, p2) || on_segment(p1, q1, q2) ||
                       on_segment(p2, q1, q2);
        return overlap ? Crossing::collinear : Crossing::none;
    }
    if (d1 * d2 < 0 && d3 * d4 < 0) return Crossing::proper;
    if ((d1 == 0 && on_segment(p1, q1, q2)) || (d2 == 0 && on_segment(p2, q1, q2)) ||
        (d3 == 0 && on_segment(q1, p1, p2)) || (d4 == 0 && on_segment(q2, p1, p2)))
        return Crossing::touch;
    return Crossing::none;
}

// Robust point-to-ellipse distance for a query in the first quadrant
// (bisection on the Lagrange-multiplier root).
inline double ellipse_root(double r0, double z0, double z1, double g) {
    double n0 = r0 * z0;
    double s0 = z1 - 1.0;
    double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
    double s = 0.0;
    for (int i = 0; i < 1100; ++i) {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1) break;
        double ratio0 = n0 / (s + r0);
        double ratio1 = z1 / (s + 1.0);
        double gg = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if (gg > 0.0) s0 = s;
        else if (gg < 0.0) s1 = s;
        else break;
    }
    return s;
}

inline double ellipse_distance_quadrant(double e0, double e1, double y0, double y1) {
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            double z0 = y0 / e0, z1 = y1 / e1;
            double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) return 0.0;
            double r0 = (e0 / e1) * (e0 / e1);
            double sbar = ellipse_root(r0, z0, z1, g);
            double x0 = r0 * y0 / (sbar + r0);
            double x1 = y1 / (sbar + 1.0);
            return std::hypot(x0 - y0, x1 - y1);
        }
        return std::abs(y1 - e1);
    }
    double numer0 = e0 * y0;
    double denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0) {
        double xde0 = numer0 / denom0;
        double x0 = e0 * xde0;
        double x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
        return std::hypot(x0 - y0, x1);
    }
    return std::abs(y0 - e0);
}

/// Cumulative arc length of an ellipse over a uniform parameter grid.
struct EllipseArcTable {
    std::vector<double> t;
    std::vector<double> s;

    EllipseArcTable(double a, double b, int segments = 4096) {
        t.resize(segments + 1);
        s.resize(segments + 1);
        auto speed = [&](double u) { return std::hypot(a * std::sin(u), b * std::cos(u)); };
        double dt = 2.0 * pi / segments;
        s[0] = 0.0;
        t[0] = 0.0;
        // three-point Gauss-Legendre per segment
        const double g = std::sqrt(0.6);
        for (int i = 0; i < segments; ++i) {
            double m = (i + 0.5) * dt, hw = 0.5 * dt;
            double seg = hw * (5.0 * speed(m - g * hw) + 8.0 * speed(m) + 5.0 * speed(m + g * hw)) / 9.0;
            t[i + 1] = (i + 1) * dt;
            s[i + 1] = s[i] + seg;
        }
    }

    double perimeter() const { return s.back(); }

    /// Parameter at arc length `target` (Newton polish from the table).
    double parameter_at(double target, double a, double b) const {
        auto it = std::upper_bound(s.begin(), s.end(), target);
        std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - s.begin()), 1, s.size() - 1) - 1;
        double frac = (s[i + 1] > s[i]) ? (target - s[i]) / (s[i + 1] - s[i]) : 0.0;
        double u = t[i] + frac * (t[i + 1] - t[i]);
        auto speed = [&](double v) { return std::hypot(a * std::sin(v), b * std::cos(v)); };
        for (int k = 0; k < 3; ++k) {
            // arc from t[i] to u by 5-point Gauss-Legendre
            static constexpr double x5[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                              0.9061798459386640};
            static constexpr double w5[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                             0.4786286704993665, 0.2369268850561891};
            double mid = 0.5 * (t[i] + u), hw = 0.5 * (u - t[i]);
            double arc = 0.0;
            for (int q = 0; q < 5; ++q) arc += w5[q] * speed(mid + hw * x5[q]);
            arc *= hw;
            u -= (s[i] + arc - target) / speed(u);
        }
        return u;
    }
};

} // namespace detail

/// Bounded planar domain: disk, axis-aligned ellipse or counterclockwise polygon.
class Domain {
public:
    using Shape = std::variant<Disk, Ellipse, Polygon>;

    static Domain disk(Vec2 center, double radius) {
        if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("disk radius must be positive");
        return Domain(Disk{center, radius});
    }

    static Domain ellipse(Vec2 center, double a, double b) {
        if (!(b > 0.0) || !(a >= b) || !std::isfinite(a))
            throw GeometryError("ellipse semi-axes must satisfy a >= b > 0");
        return Domain(Ellipse{center, a, b});
    }

    static Domain polygon(std::vector<Vec2> vertices, PolygonCheck check = PolygonCheck::simple) {
        const std::size_t n = vertices.size();
        if (n < 3) throw GeometryError("polygon needs at least 3 vertices");
        double twice_area = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(vertices[i].x) || !std::isfinite(vertices[i].y))
                throw GeometryError("polygon vertex is not finite");
            twice_area += cross(vertices[i], vertices[(i + 1) % n]);
        }
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) scale = std::max(scale, distance(vertices[i], vertices[j]));
        if (!(std::abs(twice_area) > 1e-14 * scale * scale)) throw GeometryError("degenerate polygon (zero area)");
        if (twice_area < 0.0) throw GeometryError("polygon must be counterclockwise (positively oriented)");
        for (std::size_t i = 0; i < n; ++i) {
            if (vertices[i] == vertices[(i + 1) % n]) throw GeometryError("polygon has repeated consecutive vertices");
        }
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 a = vertices[i], b = vertices[(i + 1) % n];
            for (std::size_t j = i + 1; j < n; ++j) {
                Vec2 c = vertices[j], d = vertices[(j + 1) % n];
                bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
                auto kind = detail::classify_crossing(a, b, c, d);
                if (kind == detail::Crossing::none) continue;
                if (adjacent) {
                    // adjacent edges share exactly one endpoint unless they fold back
                    if (kind != detail::Crossing::collinear) continue;
                    Vec2 shared = (j == i + 1) ? b : a;
                    Vec2 u = (j == i + 1) ? a - shared : b - shared;
                    Vec2 w = (j == i + 1) ? d - shared : c - shared;
                    if (dot(u, w) <= 0.0) continue; // straight continuation
                    if (check == PolygonCheck::allow_slits) continue;
                    throw GeometryError("polygon is not simple: edges " + std::to_string(i) + " and " +
                                        std::to_string(j) + " fold back");
                }
                if (check == PolygonCheck::allow_slits && kind != detail::Crossing::proper) continue;
                throw GeometryError("polygon is not simple: edges " + std::to_string(i) + " and " +
                                    std::to_string(j) + " intersect");
            }
        }
        return Domain(Polygon{std::move(vertices)});
    }

    static Domain rectangle(Vec2 lo, Vec2 hi) {
        return polygon({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
    }

    const Shape& shape() const { return shape_; }
    bool is_disk() const { return std::holds_alternative<Disk>(shape_); }
    bool is_ellipse() const { return std::holds_alternative<Ellipse>(shape_); }
    bool is_polygon() const { return std::holds_alternative<Polygon>(shape_); }
    const Disk& as_disk() const { return std::get<Disk>(shape_); }
    const Ellipse& as_ellipse() const { return std::get<Ellipse>(shape_); }
    const Polygon& as_polygon() const { return std::get<Polygon>(shape_); }

    std::string kind_name() const {
        return std::visit([](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>) return "disk";
            else if constexpr (std::is_same_v<T, Ellipse>) return "ellipse";
            else return "polygon";
        }, shape_);
    }

    /// Reference point used for angular boundary data (center, or vertex centroid).
    Vec2 center() const {
        if (is_disk()) return as_disk().center;
        if (is_ellipse()) return as_ellipse().center;
        const auto& v = as_polygon().vertices;
        double a2 = 0.0;
        Vec2 c{};
        for (std::size_t i = 0; i < v.size(); ++i) {
            Vec2 p = v[i], q = v[(i + 1) % v.size()];
            double w = cross(p, q);
            a2 += w;
            c += w * (p + q);
        }
        return c / (3.0 * a2);
    }

    /// Closed-domain membership with absolute tolerance `tol` (outside distance).
    bool contains(Vec2 p, double tol = 0.0) const {
        if (is_polygon()) {
            if (winding(p) != 0) return true;
            return tol > 0.0 && distance_to_boundary(p) <= tol;
        }
        double f = level(p);
        if (f <= 1.0) return true;
        return tol > 0.0 && distance_to_boundary(p) <= tol;
    }

    /// Open-domain membership at distance greater than `margin` from the boundary.
    bool strictly_inside(Vec2 p, double margin = 0.0) const {
        if (is_polygon()) {
            if (winding(p) == 0) return false;
        } else if (!(level(p) < 1.0)) {
            return false;
        }
        return distance_to_boundary(p) > margin;
    }

    double distance_to_boundary(Vec2 p) const {
        return std::visit([&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return std::abs(distance(p, s.center) - s.radius);
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                Vec2 q = p - s.center;
                if (s.a == s.b) return std::abs(norm(q) - s.a);
                return detail::ellipse_distance_quadrant(s.a, s.b, std::abs(q.x), std::abs(q.y));
            } else {
                double d = std::numeric_limits<double>::infinity();
                const auto& v = s.vertices;
                for (std::size_t i = 0; i < v.size(); ++i)
                    d = std::min(d, detail::segment_distance(p, v[i], v[(i + 1) % v.size()]));
                return d;
            }
        }, shape_);
    }

    /// Exterior unit normal at a point of a curved boundary.
    Vec2 exterior_normal(Vec2 on_boundary) const {
        if (is_disk()) return normalized(on_boundary - as_disk().center);
        if (is_ellipse()) {
            const auto& e = as_ellipse();
            Vec2 q = on_boundary - e.center;
            return normalized(Vec2{q.x / (e.a * e.a), q.y / (e.b * e.b)});
        }
        throw GeometryError("exterior_normal requires a curved boundary; use boundary_sample for polygons");
    }

    /// Interior angle at polygon vertex i, in (0, 2*pi].
    double interior_angle(std::size_t i) const {
        const auto& v = as_polygon().vertices;
        std::size_t n = v.size();
        Vec2 to_next = v[(i + 1) % n] - v[i];
        Vec2 to_prev = v[(i + n - 1) % n] - v[i];
        double ang = std::atan2(cross(to_next, to_prev), dot(to_next, to_prev));
        if (ang <= 0.0) ang += 2.0 * pi;
        return ang;
    }

    /// Unit direction bisecting the interior angle at polygon vertex i.
    Vec2 interior_bisector(std::size_t i) const {
        const auto& v = as_polygon().vertices;
        Vec2 u = normalized(v[(i + 1) % v.size()] - v[i]);
        double half = 0.5 * interior_angle(i);
        return {u.x * std::cos(half) - u.y * std::sin(half), u.x * std::sin(half) + u.y * std::cos(half)};
    }

    bool is_convex() const {
        if (!is_polygon()) return true;
        for (std::size_t i = 0; i < as_polygon().vertices.size(); ++i)
            if (interior_angle(i) > pi + 1e-12) return false;
        return true;
    }

    double boundary_length() const {
        return std::visit([&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>) return 2.0 * pi * s.radius;
            else if constexpr (std::is_same_v<T, Ellipse>) return detail::EllipseArcTable(s.a, s.b).perimeter();
            else {
                double L = 0.0;
                for (std::size_t i = 0; i < s.vertices.size(); ++i)
                    L += distance(s.vertices[i], s.vertices[(i + 1) % s.vertices.size()]);
                return L;
            }
        }, shape_);
    }

    std::pair<Vec2, Vec2> bounding_box() const {
        return std::visit([&](const auto& s) -> std::pair<Vec2, Vec2> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return {s.center - Vec2{s.radius, s.radius}, s.center + Vec2{s.radius, s.radius}};
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                return {s.center - Vec2{s.a, s.b}, s.center + Vec2{s.a, s.b}};
            } else {
                Vec2 lo = s.vertices[0], hi = s.vertices[0];
                for (auto v : s.vertices) {
                    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
                    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
                }
                return {lo, hi};
            }
        }, shape_);
    }

    /// Image under x -> scale * x + shift.
    Domain transformed(double scale, Vec2 shift = {}) const {
        return std::visit([&](const auto& s) -> Domain {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>) return Domain(Disk{scale * s.center + shift, scale * s.radius});
            else if constexpr (std::is_same_v<T, Ellipse>)
                return Domain(Ellipse{scale * s.center + shift, scale * s.a, scale * s.b});
            else {
                Polygon p = s;
                for (auto& v : p.vertices) v = scale * v + shift;
                return Domain(std::move(p));
            }
        }, shape_);
    }

    /// Polygon image under a rotation by `angle` about the origin followed by `shift`.
    Domain rotated(double angle, Vec2 shift = {}) const {
        double c = std::cos(angle), s = std::sin(angle);
        auto rot = [&](Vec2 v) { return Vec2{c * v.x - s * v.y, s * v.x + c * v.y} + shift; };
        if (is_disk()) return Domain(Disk{rot(as_disk().center), as_disk().radius});
        if (is_ellipse()) throw GeometryError("ellipses are axis-aligned; rotation is only defined for disks and polygons");
        Polygon p = as_polygon();
        for (auto& v : p.vertices) v = rot(v);
        return Domain(std::move(p));
    }

    /// Plaintext block: `kind = ...` followed by numeric parameters.
    std::string to_block() const {
        auto pt = [](Vec2 v) { return format_double(v.x) + " " + format_double(v.y); };
        return std::visit([&](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>)
                return "kind = disk\ncenter = " + pt(s.center) + "\nradius = " + format_double(s.radius) + "\n";
            else if constexpr (std::is_same_v<T, Ellipse>)
                return "kind = ellipse\ncenter = " + pt(s.center) + "\na = " + format_double(s.a) +
                       "\nb = " + format_double(s.b) + "\n";
            else {
                std::string out = "kind = polygon\nvertices =";
                for (auto v : s.vertices) out += " " + pt(v);
                return out + "\n";
            }
        }, shape_);
    }

    /// One-line summary used in CSV parameter echoes.
    std::string describe() const {
        std::string b = to_block();
        std::string out;
        for (char c : b) out += (c == '\n') ? ';' : c;
        if (!out.empty() && out.back() == ';') out.pop_back();
        return out;
    }

    static Domain from_section(const Section& s) {
        const Entry& kind = require(s, "kind");
        auto wrap = [&](auto&& f) -> Domain {
            try {
                return f();
            } catch (const GeometryError& e) {
                throw ParseError(kind.line, e.what());
            }
        };
        if (kind.value == "disk") {
            check_keys(s, {"kind", "center", "radius"});
            Vec2 c = s.has("center") ? entry_point(*s.find("center")) : Vec2{};
            double r = s.has("radius") ? entry_number(*s.find("radius")) : 1.0;
            return wrap([&] { return disk(c, r); });
        }
        if (kind.value == "ellipse") {
            check_keys(s, {"kind", "center", "a", "b"});
            Vec2 c = s.has("center") ? entry_point(*s.find("center")) : Vec2{};
            double a = entry_number(require(s, "a"));
            double b = entry_number(require(s, "b"));
            return wrap([&] { return ellipse(c, a, b); });
        }
        if (kind.value == "polygon" || kind.value == "slit-polygon") {
            check_keys(s, {"kind", "vertices"});
            const Entry& ve = require(s, "vertices");
            auto nums = entry_numbers(ve);
            if (nums.size() % 2 != 0) throw ParseError(ve.line, "polygon vertices need an even number of coordinates");
            std::vector<Vec2> v;
            for (std::size_t i = 0; i < nums.size(); i += 2) v.push_back({nums[i], nums[i + 1]});
            auto check = kind.value == "polygon" ? PolygonCheck::simple : PolygonCheck::allow_slits;
            return wrap([&] { return polygon(std::move(v), check); });
        }
        throw ParseError(kind.line, "unknown domain kind '" + kind.value + "' (expected disk, ellipse, polygon)");
    }

private:
    explicit Domain(Shape s) : shape_(std::move(s)) {}

    double level(Vec2 p) const {
        if (is_disk()) {
            const auto& d = as_disk();
            Vec2 q = (p - d.center) / d.radius;
            return dot(q, q);
        }
        const auto& e = as_ellipse();
        Vec2 q = p - e.center;
        return (q.x / e.a) * (q.x / e.a) + (q.y / e.b) * (q.y / e.b);
    }

    int winding(Vec2 p) const {
        const auto& v = as_polygon().vertices;
        int wn = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            Vec2 a = v[i], b = v[(i + 1) % v.size()];
            if (a.y <= p.y) {
                if (b.y > p.y && orient(a, b, p) > 0.0) ++wn;
            } else if (b.y <= p.y && orient(a, b, p) < 0.0) {
                --wn;
            }
        }
        return wn;
    }

    Shape shape_;
};

struct DiameterMeasure {
    double diameter = 0.0;
    double area = 0.0;
};

inline DiameterMeasure diameter_and_measure(const Domain& domain) {
    return std::visit([&](const auto& s) -> DiameterMeasure {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) return {2.0 * s.radius, pi * s.radius * s.radius};
        else if constexpr (std::is_same_v<T, Ellipse>) return {2.0 * s.a, pi * s.a * s.b};
        else {
            const auto& v = s.vertices;
            double d = 0.0, a2 = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                a2 += cross(v[i], v[(i + 1) % v.size()]);
                for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, distance(v[i], v[j]));
            }
            if (!(a2 > 0.0)) throw GeometryError("degenerate polygon (zero area)");
            return {d, 0.5 * a2};
        }
    }, domain.shape());
}

/// n points on the boundary, approximately equispaced in arc length, starting at
/// angle 0 (curved boundaries) or at vertex 0 (polygons).
inline std::vector<BoundaryPoint> boundary_sample(const Domain& domain, std::size_t n) {
    if (n < 3) throw GeometryError("boundary_sample needs n >= 3");
    std::vector<BoundaryPoint> out;
    out.reserve(n);
    if (domain.is_disk()) {
        const auto& d = domain.as_disk();
        for (std::size_t k = 0; k < n; ++k) {
            double phi = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
            Vec2 u{std::cos(phi), std::sin(phi)};
            out.push_back({d.center + d.radius * u, u, -1, false, d.radius * phi});
        }
        return out;
    }
    if (domain.is_ellipse()) {
        const auto& e = domain.as_ellipse();
        detail::EllipseArcTable table(e.a, e.b);
        double L = table.perimeter();
        for (std::size_t k = 0; k < n; ++k) {
            double s = L * static_cast<double>(k) / static_cast<double>(n);
            double t = k == 0 ? 0.0 : table.parameter_at(s, e.a, e.b);
            Vec2 p = e.center + Vec2{e.a * std::cos(t), e.b * std::sin(t)};
            out.push_back({p, domain.exterior_normal(p), -1, false, s});
        }
        return out;
    }
    const auto& v = domain.as_polygon().vertices;
    const std::size_t m = v.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + distance(v[i], v[(i + 1) % m]);
    const double L = cum[m];
    const double snap = 1e-12 * L;
    std::size_t edge = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double s = L * static_cast<double>(k) / static_cast<double>(n);
        while (edge + 1 < m && cum[edge + 1] <= s + snap) ++edge;
        double local = s - cum[edge];
        Vec2 a = v[edge], b = v[(edge + 1) % m];
        double len = cum[edge + 1] - cum[edge];
        if (std::abs(local) <= snap) {
            out.push_back({a, std::nullopt, static_cast<int>(edge), true, s});
        } else {
            Vec2 t = (b - a) / len;
            out.push_back({a + local * t, Vec2{t.y, -t.x}, static_cast<int>(edge), false, s});
        }
    }
    return out;
}

/// Largest distance from an interior point to the boundary, with its maximizer.
struct Inball {
    Vec2 center;
    double radius = 0.0;
};

inline Inball largest_inscribed_ball(const Domain& domain) {
    if (domain.is_disk()) return {domain.as_disk().center, domain.as_disk().radius};
    if (domain.is_ellipse()) return {domain.as_ellipse().center, domain.as_ellipse().b};
    auto [lo, hi] = domain.bounding_box();
    const int grid = 64;
    Inball best{domain.center(), -1.0};
    for (int i = 0; i <= grid; ++i) {
        for (int j = 0; j <= grid; ++j) {
            Vec2 p{lo.x + (hi.x - lo.x) * i / grid, lo.y + (hi.y - lo.y) * j / grid};
            if (!domain.strictly_inside(p)) continue;
            double d = domain.distance_to_boundary(p);
            if (d > best.radius) best = {p, d};
        }
    }
    if (best.radius <= 0.0) throw GeometryError("no interior grid point found; domain too thin");
    double step = std::max(hi.x - lo.x, hi.y - lo.y) / grid;
    while (step > 1e-13 * std::max(1.0, best.radius)) {
        bool moved = false;
        for (Vec2 dir : {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, -1}}) {
            Vec2 p = best.center + step * dir;
            if (!domain.strictly_inside(p)) continue;
            double d = domain.distance_to_boundary(p);
            if (d > best.radius) {
                best = {p, d};
                moved = true;
            }
        }
        if (!moved) step *= 0.5;
    }
    return best;
}

/// Sampling densities for certificate validation.
struct CertificateSampling {
    std::size_t boundary_points = 256;
    std::size_t local_points = 1024; ///< test points per local check

    CertificateSampling doubled() const { return {2 * boundary_points, 2 * local_points}; }
};

/// Outcome of a sampled validation; `point` and `detail` describe the first violation.
struct CertificateCheck {
    bool ok = true;
    Vec2 point;
    double radius = 0.0; ///< John checks: the radius r of the violating ball
    Vec2 partner;        ///< John checks: the boundary point z of the violating path
    std::string detail;
};

class CertificateError : public GeometryError {
public:
    CertificateError(const std::string& msg, CertificateCheck check)
        : GeometryError(msg), check_(std::move(check)) {}
    const CertificateCheck& check() const { return check_; }

private:
    CertificateCheck check_;
};

inline bool interior_sphere_holds(const Domain& domain, double radius, const CertificateSampling& sampling,
                                  CertificateCheck* report = nullptr) {
    const double tol = 1e-9 * diameter_and_measure(domain).diameter;
    const std::size_t ring = std::max<std::size_t>(8, sampling.local_points / 8);
    for (const auto& bp : boundary_sample(domain, sampling.boundary_points)) {
        Vec2 c = bp.point - radius * *bp.normal;
        for (std::size_t layer = 1; layer <= 8; ++layer) {
            double rr = radius * static_cast<double>(layer) / 8.0;
            for (std::size_t k = 0; k < ring; ++k) {
                double phi = 2.0 * pi * static_cast<double>(k) / static_cast<double>(ring);
                Vec2 q = c + rr * Vec2{std::cos(phi), std::sin(phi)};
                if (!domain.contains(q, tol)) {
                    if (report) *report = {false, bp.point, radius, q, "ball escapes the domain"};
                    return false;
                }
            }
        }
    }
    return true;
}

/// Uniform interior sphere radius of a C^2 boundary (disk or ellipse): the
/// smallest curvature radius along the boundary, re-validated by sampling.
inline double interior_sphere_radius(const Domain& domain, const CertificateSampling& sampling = {}) {
    if (domain.is_polygon()) throw GeometryError("no uniform interior sphere at corners");
    double r = 0.0;
    if (domain.is_disk()) {
        r = domain.as_disk().radius;
    } else {
        const auto& e = domain.as_ellipse();
        r = std::numeric_limits<double>::infinity();
        const int n = 1 << 14;
        for (int k = 0; k < n; ++k) {
            double t = 2.0 * pi * k / n;
            double sp = std::hypot(e.a * std::sin(t), e.b * std::cos(t));
            r = std::min(r, sp * sp * sp / (e.a * e.b));
        }
    }
    CertificateCheck check;
    if (!interior_sphere_holds(domain, r, sampling, &check))
        throw CertificateError("interior sphere validation failed", check);
    return r;
}

// ---------------------------------------------------------------------------
// Uniform interior cone condition
// ---------------------------------------------------------------------------

/// Axis direction of the interior cone at a boundary point: inward normal on
/// curved boundaries; at polygon corners and on edges near a convex corner the
/// interior bisector of that corner, otherwise the inward edge normal.
inline Vec2 cone_axis(const Domain& domain, const BoundaryPoint& bp) {
    if (!domain.is_polygon()) return -domain.exterior_normal(bp.point);
    const auto& v = domain.as_polygon().vertices;
    const std::size_t m = v.size();
    if (bp.vertex) return domain.interior_bisector(static_cast<std::size_t>(bp.edge));
    std::size_t a = static_cast<std::size_t>(bp.edge), b = (a + 1) % m;
    std::size_t nearest = distance(bp.point, v[a]) <= distance(bp.point, v[b]) ? a : b;
    if (domain.interior_angle(nearest) < pi) return domain.interior_bisector(nearest);
    return -*bp.normal;
}

/// Boundary points used by cone checks: the arc-length sample plus all corners.
inline std::vector<BoundaryPoint> cone_test_points(const Domain& domain, std::size_t n) {
    auto pts = boundary_sample(domain, n);
    if (domain.is_polygon()) {
        const auto& v = domain.as_polygon().vertices;
        for (std::size_t i = 0; i < v.size(); ++i) {
            bool present = false;
            for (const auto& p : pts) present = present || (p.vertex && p.edge == static_cast<int>(i));
            if (!present) pts.push_back({v[i], std::nullopt, static_cast<int>(i), true, 0.0});
        }
    }
    return pts;
}

/// Samples the sector {y : |y - x| <= h, angle(y - x, axis) <= theta} at every
/// test point: all samples must lie in the open domain (the closure meets the
/// boundary only at the vertex).
inline CertificateCheck validate_cone(const Domain& domain, double theta, double h,
                                      const CertificateSampling& sampling = {}) {
    if (!(theta > 0.0 && theta <= pi / 2) || !(h > 0.0)) return {false, {}, 0.0, {}, "invalid cone parameters"};
    const double d = diameter_and_measure(domain).diameter;
    const double margin = 1e-12 * d;
    const std::size_t side = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::sqrt(
                                                          static_cast<double>(sampling.local_points)))));
    for (const auto& bp : cone_test_points(domain, sampling.boundary_points)) {
        Vec2 axis = cone_axis(domain, bp);
        for (std::size_t j = 0; j < side; ++j) {
            double psi = -theta + 2.0 * theta * static_cast<double>(j) / static_cast<double>(side - 1);
            Vec2 dir{axis.x * std::cos(psi) - axis.y * std::sin(psi), axis.x * std::sin(psi) + axis.y * std::cos(psi)};
            for (std::size_t k = 1; k <= side; ++k) {
                Vec2 q = bp.point + (h * static_cast<double>(k) / static_cast<double>(side)) * dir;
                if (!domain.strictly_inside(q, margin))
                    return {false, bp.point, h, q, "cone sample leaves the open domain"};
            }
        }
    }
    return {};
}

struct ConeCertificate {
    double theta = 0.0; ///< half-aperture
    double h = 0.0;     ///< height (sector radius)
    std::vector<BoundaryPoint> points;
    std::vector<Vec2> axes; ///< axes[i] belongs to points[i]
};

inline ConeCertificate cone_parameters(const Domain& domain, const CertificateSampling& sampling = {}) {
    double beta = pi;
    if (domain.is_polygon()) {
        for (std::size_t i = 0; i < domain.as_polygon().vertices.size(); ++i)
            beta = std::min(beta, domain.interior_angle(i));
    }
    const double theta = beta / 4.0;
    double h = 0.5 * largest_inscribed_ball(domain).radius;
    CertificateCheck last;
    for (int attempt = 0; attempt < 40; ++attempt, h *= 0.5) {
        last = validate_cone(domain, theta, h, sampling);
        if (!last.ok) continue;
        ConeCertificate cert{theta, h, cone_test_points(domain, sampling.boundary_points), {}};
        for (const auto& bp : cert.points) cert.axes.push_back(cone_axis(domain, bp));
        return cert;
    }
    throw CertificateError("cone validation failed after the shrink schedule at (" + format_double(last.point.x) +
                               ", " + format_double(last.point.y) + ")",
                           last);
}

// ---------------------------------------------------------------------------
// Local John condition
// ---------------------------------------------------------------------------

struct JohnCertificate {
    double b0 = 0.0;
    double R = 0.0;
    Vec2 anchor; ///< John centers are placed on segments toward this point

    /// John center of Delta_r(x): half-way (r/2) from x toward the anchor.
    Vec2 center(Vec2 x, double r) const { return x + (0.5 * r) * normalized(anchor - x); }

    /// Straight John path from z to the center, parameterized on [0, 1].
    static Vec2 path(Vec2 z, Vec2 center, double t) { return z + t * (center - z); }
};

namespace detail {

// Exact check that the half-open segment (z, c] avoids the polygon boundary:
// an edge through z may only meet the segment at z itself.
inline bool segment_leaves_polygon(const Domain& domain, Vec2 z, Vec2 c) {
    if (!domain.is_polygon()) return false;
    const auto& v = domain.as_polygon().vertices;
    const double tol = 1e-12 * std::max(1.0, distance(z, c));
    for (std::size_t i = 0; i < v.size(); ++i) {
        Vec2 a = v[i], b = v[(i + 1) % v.size()];
        auto kind = classify_crossing(z, c, a, b);
        if (kind == Crossing::none) continue;
        if (segment_distance(z, a, b) > tol) return true;
        if (kind == Crossing::collinear) return true;
    }
    return false;
}

} // namespace detail

/// Largest ratio appearing in the John inequalities for the straight-path
/// construction (infinite when a path touches the boundary); the certificate
/// holds for every b0 strictly above it. `first` receives the worst sample.
inline double john_worst_ratio(const Domain& domain, Vec2 anchor, double R, const CertificateSampling& sampling,
                               CertificateCheck* worst = nullptr) {
    const JohnCertificate geom{0.0, R, anchor};
    const std::size_t radii = 8;
    const std::size_t path_points = 32;
    auto xs = boundary_sample(domain, sampling.boundary_points);
    auto zs = boundary_sample(domain, sampling.local_points);
    if (domain.is_polygon()) {
        for (std::size_t i = 0; i < domain.as_polygon().vertices.size(); ++i)
            zs.push_back({domain.as_polygon().vertices[i], std::nullopt, static_cast<int>(i), true, 0.0});
    }
    double q = 0.0;
    auto bump = [&](double val, Vec2 x, double r, Vec2 z, const char* what) {
        if (val > q) {
            q = val;
            if (worst) *worst = {false, x, r, z, what};
        }
    };
    for (const auto& xp : xs) {
        const Vec2 x = xp.point;
        for (std::size_t k = 1; k <= radii; ++k) {
            const double r = R * static_cast<double>(k) / static_cast<double>(radii);
            const Vec2 c = geom.center(x, r);
            const double dc = domain.strictly_inside(c) ? domain.distance_to_boundary(c) : 0.0;
            bump(dc > 0.0 ? r / dc : std::numeric_limits<double>::infinity(), x, r, x, "John ball leaves the domain");
            if (distance(c, x) >= r) bump(std::numeric_limits<double>::infinity(), x, r, x, "John center outside B_r(x)");
            for (const auto& zp : zs) {
                const Vec2 z = zp.point;
                if (distance(z, x) > r) continue;
                bump(distance(z, c) / r, x, r, z, "John path too long");
                if (detail::segment_leaves_polygon(domain, z, c)) {
                    bump(std::numeric_limits<double>::infinity(), x, r, z, "John path crosses the boundary");
                    continue;
                }
                for (std::size_t t = 1; t <= path_points; ++t) {
                    Vec2 p = JohnCertificate::path(z, c, static_cast<double>(t) / static_cast<double>(path_points));
                    double dp = domain.strictly_inside(p) ? domain.distance_to_boundary(p) : 0.0;
                    double lhs = distance(p, z);
                    bump(dp > 0.0 ? lhs / dp : std::numeric_limits<double>::infinity(), x, r, z,
                         "John path too close to the boundary");
                }
            }
        }
    }
    return q;
}

inline CertificateCheck validate_john(const Domain& domain, const JohnCertificate& cert,
                                      const CertificateSampling& sampling = {}) {
    if (!(cert.b0 > 1.0) || !(cert.R > 0.0)) return {false, {}, 0.0, {}, "invalid John parameters"};
    CertificateCheck worst;
    double q = john_worst_ratio(domain, cert.anchor, cert.R, sampling, &worst);
    if (q < cert.b0) return {};
    worst.ok = false;
    return worst;
}

/// Feasible (b0, R) for straight John paths toward the center of the largest
/// inscribed ball; R is that ball's radius and b0 the smallest integer above the
/// worst sampled ratio.
inline JohnCertificate john_parameters(const Domain& domain, const CertificateSampling& sampling = {}) {
    Inball ball = largest_inscribed_ball(domain);
    JohnCertificate cert{0.0, ball.radius, ball.center};
    CertificateCheck worst;
    double q = john_worst_ratio(domain, cert.anchor, cert.R, sampling, &worst);
    if (!std::isfinite(q)) {
        worst.ok = false;
        throw CertificateError("John validation failed at x = (" + format_double(worst.point.x) + ", " +
                                   format_double(worst.point.y) + "), r = " + format_double(worst.radius) +
                                   ", z = (" + format_double(worst.partner.x) + ", " +
                                   format_double(worst.partner.y) + "): " + worst.detail,
                               worst);
    }
    cert.b0 = std::max(2.0, std::floor(q) + 1.0);
    return cert;
}

} // namespace oscbound
