#pragma once

// Coefficient fields A(x) for L v = div(A(x) grad v): symmetric 2x2 matrices
// with certified ellipticity bounds lambda |xi|^2 <= <A xi, xi> <= Lambda |xi|^2.

#include "core.hpp"
#include "text.hpp"

#include <random>
#include <string>
#include <variant>

namespace oscbound {

/// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Mat2 {
    double a11 = 1.0;
    double a12 = 0.0;
    double a22 = 1.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 1.0}; }
    static constexpr Mat2 diag(double d1, double d2) { return {d1, 0.0, d2}; }

    constexpr Vec2 operator*(Vec2 v) const { return {a11 * v.x + a12 * v.y, a12 * v.x + a22 * v.y}; }
    constexpr double trace() const { return a11 + a22; }
    constexpr double det() const { return a11 * a22 - a12 * a12; }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;

    /// Eigenvalues in ascending order.
    std::pair<double, double> eigenvalues() const {
        double m = 0.5 * (a11 + a22);
        double r = std::hypot(0.5 * (a11 - a22), a12);
        return {m - r, m + r};
    }

    /// Unit eigenvector for the smaller eigenvalue.
    Vec2 min_eigenvector() const {
        auto [lo, hi] = eigenvalues();
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) return {1.0, 0.0};
        Vec2 v = std::abs(a11 - lo) >= std::abs(a22 - lo) ? Vec2{-a12, a11 - lo} : Vec2{a22 - lo, -a12};
        return normalized(v);
    }

    double quadratic(Vec2 xi) const { return dot(*this * xi, xi); }

    std::string str() const {
        return "[[" + format_double(a11) + "," + format_double(a12) + "],[" + format_double(a12) + "," +
               format_double(a22) + "]]";
    }
};

class CoefficientError : public Error {
public:
    using Error::Error;
};

struct IdentityKind {};
struct ConstantKind {
    Mat2 matrix;
};
/// Cell (i, j) = (floor(x/cell), floor(y/cell)); even i+j takes `even`, odd takes `odd`.
struct CheckerboardKind {
    double cell = 0.1;
    Mat2 even;
    Mat2 odd;
};
/// Independent SPD matrix per cell: eigenvalues log-uniform in [lo, hi], random rotation.
struct RandomCellsKind {
    double cell = 0.1;
    double lo = 1.0;
    double hi = 10.0;
    std::uint64_t seed = 0;
};

using FieldKind = std::variant<IdentityKind, ConstantKind, CheckerboardKind, RandomCellsKind>;

namespace detail {

inline std::pair<long long, long long> cell_index(Vec2 x, double cell) {
    return {static_cast<long long>(std::floor(x.x / cell)), static_cast<long long>(std::floor(x.y / cell))};
}

inline Mat2 random_cell_matrix(const RandomCellsKind& k, long long i, long long j) {
    std::uint64_t h = hash_combine(hash_combine(k.seed, static_cast<std::uint64_t>(i)), static_cast<std::uint64_t>(j));
    std::mt19937_64 rng(h);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double llo = std::log(k.lo), lhi = std::log(k.hi);
    double e1 = std::exp(llo + (lhi - llo) * u(rng));
    double e2 = std::exp(llo + (lhi - llo) * u(rng));
    double th = pi * u(rng);
    double c = std::cos(th), s = std::sin(th);
    // R diag(e1, e2) R^T
    return {e1 * c * c + e2 * s * s, (e1 - e2) * c * s, e1 * s * s + e2 * c * c};
}

} // namespace detail

/// A(x) with declared ellipticity bounds. Immutable once built.
struct CoefficientField {
    FieldKind kind;
    double lambda = 1.0;
    double Lambda = 1.0;

    Mat2 operator()(Vec2 x) const {
        return std::visit([&](const auto& k) -> Mat2 {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, IdentityKind>) return Mat2::identity();
            else if constexpr (std::is_same_v<T, ConstantKind>) return k.matrix;
            else if constexpr (std::is_same_v<T, CheckerboardKind>) {
                auto [i, j] = detail::cell_index(x, k.cell);
                return ((i + j) % 2 == 0) ? k.even : k.odd;
            } else {
                auto [i, j] = detail::cell_index(x, k.cell);
                return detail::random_cell_matrix(k, i, j);
            }
        }, kind);
    }

    bool is_identity() const { return std::holds_alternative<IdentityKind>(kind); }
    bool is_constant() const { return is_identity() || std::holds_alternative<ConstantKind>(kind); }

    std::string kind_name() const {
        return std::visit([](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, IdentityKind>) return "identity";
            else if constexpr (std::is_same_v<T, ConstantKind>) return "constant";
            else if constexpr (std::is_same_v<T, CheckerboardKind>) return "checkerboard";
            else return "random";
        }, kind);
    }

    std::string describe() const {
        return std::visit([](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, IdentityKind>) return "identity";
            else if constexpr (std::is_same_v<T, ConstantKind>) return "constant " + k.matrix.str();
            else if constexpr (std::is_same_v<T, CheckerboardKind>)
                return "checkerboard cell=" + format_double(k.cell) + " even=" + k.even.str() + " odd=" + k.odd.str();
            else
                return "random cell=" + format_double(k.cell) + " range=[" + format_double(k.lo) + "," +
                       format_double(k.hi) + "] seed=" + std::to_string(k.seed);
        }, kind);
    }
};

namespace detail {

inline void require_spd(const Mat2& m, const char* what) {
    if (!std::isfinite(m.a11) || !std::isfinite(m.a12) || !std::isfinite(m.a22))
        throw CoefficientError(std::string(what) + " has non-finite entries");
    if (!(m.eigenvalues().first > 0.0))
        throw CoefficientError(std::string(what) + " is not positive definite (nonpositive eigenvalue)");
}

} // namespace detail

/// Builds a field and its declared bounds. `seed` only affects random fields and
/// overrides the seed carried by RandomCellsKind when nonzero.
inline CoefficientField make_field(FieldKind kind, std::uint64_t seed = 0) {
    return std::visit([&](auto k) -> CoefficientField {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, IdentityKind>) {
            return {k, 1.0, 1.0};
        } else if constexpr (std::is_same_v<T, ConstantKind>) {
            detail::require_spd(k.matrix, "constant coefficient matrix");
            auto [lo, hi] = k.matrix.eigenvalues();
            return {k, lo, hi};
        } else if constexpr (std::is_same_v<T, CheckerboardKind>) {
            if (!(k.cell > 0.0)) throw CoefficientError("cell size must be positive");
            detail::require_spd(k.even, "checkerboard matrix");
            detail::require_spd(k.odd, "checkerboard matrix");
            auto [l0, h0] = k.even.eigenvalues();
            auto [l1, h1] = k.odd.eigenvalues();
            return {k, std::min(l0, l1), std::max(h0, h1)};
        } else {
            if (!(k.cell > 0.0)) throw CoefficientError("cell size must be positive");
            if (!(k.lo > 0.0) || !(k.hi >= k.lo) || !std::isfinite(k.hi))
                throw CoefficientError("eigenvalue range must satisfy 0 < lo <= hi < inf");
            if (seed != 0) k.seed = seed;
            return {k, k.lo, k.hi};
        }
    }, std::move(kind));
}

struct EllipticityReport {
    bool pass = true;
    double min_quotient = 0.0;
    double max_quotient = 0.0;
    Vec2 worst_point;
    Vec2 worst_direction;
    double worst_margin = 0.0; ///< signed; negative when a bound is violated
};

/// Samples points in `window` and unit directions (random plus each sample's
/// eigenvectors) and compares Rayleigh quotients with the declared bounds.
inline EllipticityReport verify_ellipticity(const CoefficientField& field, std::size_t n_samples, std::uint64_t seed,
                                            std::pair<Vec2, Vec2> window = {{-1.0, -1.0}, {1.0, 1.0}}) {
    if (n_samples < 1) throw CoefficientError("verify_ellipticity needs at least one sample");
    const double eps = 1e-12;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    EllipticityReport rep;
    rep.min_quotient = std::numeric_limits<double>::infinity();
    rep.max_quotient = -std::numeric_limits<double>::infinity();
    rep.worst_margin = std::numeric_limits<double>::infinity();
    auto consider = [&](Vec2 x, Vec2 xi, double q) {
        rep.min_quotient = std::min(rep.min_quotient, q);
        rep.max_quotient = std::max(rep.max_quotient, q);
        double margin = std::min(q - field.lambda * (1.0 - eps), field.Lambda * (1.0 + eps) - q);
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_point = x;
            rep.worst_direction = xi;
        }
    };
    for (std::size_t s = 0; s < n_samples; ++s) {
        Vec2 x{window.first.x + (window.second.x - window.first.x) * u(rng),
               window.first.y + (window.second.y - window.first.y) * u(rng)};
        Mat2 a = field(x);
        if (!std::isfinite(a.a11) || !std::isfinite(a.a12) || !std::isfinite(a.a22)) {
            rep.pass = false;
            rep.worst_point = x;
            continue;
        }
        double th = 2.0 * pi * u(rng);
        Vec2 xi{std::cos(th), std::sin(th)};
        consider(x, xi, a.quadratic(xi));
        Vec2 e = a.min_eigenvector();
        consider(x, e, a.quadratic(e));
        Vec2 f = perp(e);
        consider(x, f, a.quadratic(f));
    }
    rep.pass = rep.pass && rep.worst_margin >= 0.0;
    return rep;
}

/// Symmetric positive-definite square root, closed form for 2x2:
/// S = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A)).
inline Mat2 matrix_sqrt(const Mat2& a) {
    detail::require_spd(a, "matrix_sqrt input");
    double s = std::sqrt(a.det());
    double t = std::sqrt(a.trace() + 2.0 * s);
    return {(a.a11 + s) / t, a.a12 / t, (a.a22 + s) / t};
}

inline Mat2 matrix_sqrt(const CoefficientField& field, Vec2 x = {}) { return matrix_sqrt(field(x)); }

/// Parses a `[field]` section: kind = identity | constant | checkerboard | random.
inline CoefficientField field_from_section(const Section& s, std::uint64_t default_seed = 0) {
    const Entry& kind = require(s, "kind");
    auto mat = [&](const char* key) -> Mat2 {
        const Entry& e = require(s, key);
        auto v = entry_numbers(e);
        if (v.size() == 2) return Mat2::diag(v[0], v[1]);
        if (v.size() == 3) return {v[0], v[1], v[2]};
        if (v.size() == 4) {
            if (v[1] != v[2]) throw ParseError(e.line, "matrix '" + e.key + "' must be symmetric");
            return {v[0], v[1], v[3]};
        }
        throw ParseError(e.line, "matrix '" + e.key + "' expects 2 (diagonal), 3 (a11 a12 a22) or 4 entries");
    };
    std::uint64_t seed = default_seed;
    if (const Entry* e = s.find("seed")) {
        double v = entry_number(*e);
        if (v < 0 || v != std::floor(v)) throw ParseError(e->line, "seed must be a nonnegative integer");
        seed = static_cast<std::uint64_t>(v);
    }
    try {
        if (kind.value == "identity") {
            check_keys(s, {"kind", "seed"});
            return make_field(IdentityKind{});
        }
        if (kind.value == "constant") {
            check_keys(s, {"kind", "matrix", "seed"});
            return make_field(ConstantKind{mat("matrix")});
        }
        if (kind.value == "checkerboard") {
            check_keys(s, {"kind", "cell", "even", "odd", "seed"});
            return make_field(CheckerboardKind{entry_number(require(s, "cell")), mat("even"), mat("odd")});
        }
        if (kind.value == "random") {
            check_keys(s, {"kind", "cell", "range", "seed"});
            const Entry& r = require(s, "range");
            auto v = entry_numbers(r);
            if (v.size() != 2) throw ParseError(r.line, "range expects two numbers");
            return make_field(RandomCellsKind{entry_number(require(s, "cell")), v[0], v[1], seed}, seed);
        }
    } catch (const CoefficientError& e) {
        throw ParseError(kind.line, e.what());
    }
    throw ParseError(kind.line, "unknown field kind '" + kind.value + "' (expected identity, constant, checkerboard, random)");
}

} // namespace oscbound
