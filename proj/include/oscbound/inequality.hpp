#pragma once

// Explicit constants of the oscillation inequality
//   osc_Gamma v <= K [v]^{N/(N+ap)} ||v - v_Omega||_p^{ap/(N+ap)}
// for balls, interior-sphere, interior-cone and local John domains, the
// sigma-parameterized two-term bound, its closed-form minimizer, and the
// end-to-end check on a discrete sample.

#include "coefficients.hpp"
#include "geometry.hpp"
#include "norms.hpp"

#include <cmath>
#include <string>

namespace oscbound {

class InequalityError : public Error {
public:
    using Error::Error;
};

enum class GeometryClass { ball, smooth, cone, john };

inline std::string geometry_class_name(GeometryClass g) {
    switch (g) {
        case GeometryClass::ball: return "ball";
        case GeometryClass::smooth: return "smooth";
        case GeometryClass::cone: return "cone";
        case GeometryClass::john: return "john";
    }
    return "unknown";
}

/// Geometric data entering K: ball; smooth(d, r_i); cone(d, theta, h); john(d, b0, R).
struct GeometryKind {
    GeometryClass kind = GeometryClass::ball;
    double d = 2.0;
    double r_i = 1.0;
    double theta = pi / 2;
    double h = 1.0;
    double b0 = 2.0;
    double R = 1.0;

    static GeometryKind ball() { return {}; }
    static GeometryKind smooth(double d, double r_i) {
        GeometryKind g;
        g.kind = GeometryClass::smooth;
        g.d = d;
        g.r_i = r_i;
        return g;
    }
    static GeometryKind cone(double d, double theta, double h) {
        GeometryKind g;
        g.kind = GeometryClass::cone;
        g.d = d;
        g.theta = theta;
        g.h = h;
        return g;
    }
    static GeometryKind john(double d, double b0, double R) {
        GeometryKind g;
        g.kind = GeometryClass::john;
        g.d = d;
        g.b0 = b0;
        g.R = R;
        return g;
    }

    std::string name() const { return geometry_class_name(kind); }

    void validate() const {
        auto positive = [](double v, const char* what) {
            if (!(v > 0.0) || !std::isfinite(v)) throw InequalityError(std::string(what) + " must be positive");
        };
        switch (kind) {
            case GeometryClass::ball: break;
            case GeometryClass::smooth:
                positive(d, "diameter");
                positive(r_i, "interior sphere radius");
                break;
            case GeometryClass::cone:
                positive(d, "diameter");
                positive(h, "cone height");
                if (!(theta > 0.0 && theta <= pi / 2)) throw InequalityError("cone angle must lie in (0, pi/2]");
                break;
            case GeometryClass::john:
                positive(d, "diameter");
                positive(R, "John radius");
                if (!(b0 > 1.0) || !std::isfinite(b0)) throw InequalityError("John constant b0 must exceed 1");
                break;
        }
    }

    /// Factor q multiplying ||v|| inside the two-term bound, as a power q^{N/p}.
    double norm_factor(double c, double C) const {
        switch (kind) {
            case GeometryClass::cone: return C / (c * std::sin(theta));
            case GeometryClass::john: return C * b0 / c;
            default: return C / c;
        }
    }

    /// Upper end of the admissible probe-depth ratio (sigma/r for balls, 2 sigma/d otherwise).
    double ratio_threshold() const {
        switch (kind) {
            case GeometryClass::ball: return 1.0;
            case GeometryClass::smooth: return 2.0 * r_i / d;
            case GeometryClass::cone: return 2.0 * h / (d * (1.0 + std::sin(theta)));
            case GeometryClass::john: return 2.0 * R / (d * b0);
        }
        return 1.0;
    }

    std::string describe() const {
        switch (kind) {
            case GeometryClass::ball: return "ball";
            case GeometryClass::smooth: return "smooth d=" + format_double(d) + " r_i=" + format_double(r_i);
            case GeometryClass::cone:
                return "cone d=" + format_double(d) + " theta=" + format_double(theta) + " h=" + format_double(h);
            case GeometryClass::john:
                return "john d=" + format_double(d) + " b0=" + format_double(b0) + " R=" + format_double(R);
        }
        return "unknown";
    }
};

namespace detail {

inline void check_exponents(double N, double alpha, double p) {
    if (!(N >= 1.0) || !std::isfinite(N)) throw InequalityError("dimension N must be at least 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InequalityError("alpha must lie in (0, 1]");
    if (!(p >= 1.0) || !std::isfinite(p)) throw InequalityError("p must lie in [1, inf)");
}

inline void check_constants(double c, double C) {
    if (!(c > 0.0) || !(C >= c) || !std::isfinite(C)) throw InequalityError("constants must satisfy 0 < c <= C");
}

} // namespace detail

inline double k_bound(const GeometryKind& g, double N, double alpha, double p, double c, double C) {
    detail::check_exponents(N, alpha, p);
    detail::check_constants(c, C);
    g.validate();
    const double ap = alpha * p;
    const double lead = 2.0 * (1.0 + ap / N);
    const double e1 = ap / (N + ap), e2 = alpha * N / (N + ap);
    const double mid = std::pow(N / ap, e1);
    switch (g.kind) {
        case GeometryClass::ball: return lead * mid * std::pow(C / c, e2);
        case GeometryClass::smooth: return std::max(lead, std::pow(g.d / g.r_i, alpha)) * mid * std::pow(C / c, e2);
        case GeometryClass::cone: {
            double s = std::sin(g.theta);
            return std::max(lead, std::pow(g.d / g.h, alpha) * std::pow(1.0 + s, alpha)) * mid *
                   std::pow(C / (c * s), e2);
        }
        case GeometryClass::john:
            return std::max(lead, std::pow(g.d * g.b0 / g.R, alpha)) * mid * std::pow(C * g.b0 / c, e2);
    }
    return 0.0;
}

/// 2 [ q^{N/p} ||v|| s^{-N/p} + [v] s^alpha ] at probe-depth ratio s in (0, 1).
inline double rhs_of_sigma(double s, double seminorm, double lp, double N, double alpha, double p, double c,
                           double C, const GeometryKind& g = GeometryKind::ball()) {
    if (!(s > 0.0 && s < 1.0)) throw InequalityError("sigma ratio must lie in (0, 1)");
    detail::check_exponents(N, alpha, p);
    detail::check_constants(c, C);
    if (seminorm < 0.0 || lp < 0.0) throw InequalityError("norms must be nonnegative");
    const double q = g.norm_factor(c, C);
    double first = lp == 0.0 ? 0.0 : std::pow(q, N / p) * lp * std::pow(s, -N / p);
    return 2.0 * (first + seminorm * std::pow(s, alpha));
}

enum class Branch { interior, boundary };

inline std::string branch_name(Branch b) { return b == Branch::interior ? "interior" : "boundary"; }

struct SigmaChoice {
    double ratio = 0.0;     ///< sigma*/r (ball) or 2 sigma*/d
    double threshold = 1.0; ///< geometric limit of the ratio
    Branch branch = Branch::interior;
};

/// Closed-form minimizer [ (N/ap) q^{N/p} ||v|| / [v] ]^{p/(N+ap)} of rhs_of_sigma.
inline SigmaChoice optimal_sigma(double seminorm, double lp, double N, double alpha, double p, double c, double C,
                                 const GeometryKind& g = GeometryKind::ball()) {
    detail::check_exponents(N, alpha, p);
    detail::check_constants(c, C);
    if (!(seminorm > 0.0)) throw InequalityError("degenerate: v constant");
    const double q = g.norm_factor(c, C);
    SigmaChoice out;
    out.ratio = std::pow(N / (alpha * p) * std::pow(q, N / p) * lp / seminorm, p / (N + alpha * p));
    out.threshold = g.ratio_threshold();
    out.branch = out.ratio < out.threshold ? Branch::interior : Branch::boundary;
    return out;
}

/// Mean-value constants for a field: c = C = 1 for the identity, sqrt(lambda),
/// sqrt(Lambda) otherwise. Variable fields are flagged exploratory.
struct MeanValueConstants {
    double c = 1.0;
    double C = 1.0;
    bool exploratory = false;
};

inline MeanValueConstants mean_value_constants(const CoefficientField& field) {
    if (field.is_identity()) return {1.0, 1.0, false};
    return {std::sqrt(field.lambda), std::sqrt(field.Lambda), !field.is_constant()};
}

struct InequalityReport {
    std::string run_id;
    std::string kind;
    double alpha = 1.0, p = 2.0, c = 1.0, C = 1.0;
    double k_bound = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double sigma_star = 0.0;
    std::string branch = "interior";
    double slack = 0.0;
    double rhs_sigma_min = 0.0; ///< rhs_of_sigma at sigma*; 0 when sigma* >= 1
    bool degenerate = false;
    NormReport norms;

    bool holds(double tolerance) const { return slack <= 1.0 + tolerance; }

    static std::string csv_header() { return "run_id,kind,alpha,p,c,C,k_bound,lhs,rhs,sigma_star,branch,slack"; }
    std::string csv_row() const {
        return run_id + "," + kind + "," + format_double(alpha) + "," + format_double(p) + "," + format_double(c) +
               "," + format_double(C) + "," + format_double(k_bound) + "," + format_double(lhs) + "," +
               format_double(rhs) + "," + format_double(sigma_star) + "," + branch + "," + format_double(slack);
    }
};

/// Evaluates both sides on precomputed norms (N = 2).
inline InequalityReport verify_inequality(const NormReport& norms, const GeometryKind& g, double c, double C,
                                          std::string run_id = {}) {
    constexpr double N = 2.0;
    const double alpha = norms.alpha, p = norms.p;
    InequalityReport r;
    r.run_id = std::move(run_id);
    r.kind = g.name();
    r.alpha = alpha;
    r.p = p;
    r.c = c;
    r.C = C;
    r.norms = norms;
    r.k_bound = k_bound(g, N, alpha, p, c, C);
    r.lhs = norms.boundary_osc;
    if (!(norms.seminorm > 0.0)) {
        r.degenerate = true;
        r.lhs = r.rhs = r.slack = 0.0;
        r.branch = "degenerate";
        return r;
    }
    const double ap = alpha * p;
    r.rhs = r.k_bound * std::pow(norms.seminorm, N / (N + ap)) * std::pow(norms.lp_centered, ap / (N + ap));
    auto sig = optimal_sigma(norms.seminorm, norms.lp_centered, N, alpha, p, c, C, g);
    r.sigma_star = sig.ratio;
    r.branch = branch_name(sig.branch);
    if (sig.ratio > 0.0 && sig.ratio < 1.0)
        r.rhs_sigma_min = rhs_of_sigma(sig.ratio, norms.seminorm, norms.lp_centered, N, alpha, p, c, C, g);
    r.slack = r.rhs > 0.0 ? r.lhs / r.rhs : (r.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    return r;
}

inline InequalityReport verify_inequality(const SolutionSample& sample, const GeometryKind& g, double alpha, double p,
                                          double c, double C, const SeminormOptions& opt = {}) {
    return verify_inequality(compute_norms(sample, alpha, p, opt), g, c, C, sample.id);
}

} // namespace oscbound
