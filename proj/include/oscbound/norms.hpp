#pragma once

// Scale-invariant quantities of a nodal field: Hölder seminorm, normalized
// L^p norm, domain mean and boundary oscillation.

#include "core.hpp"
#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace oscbound {

class NormError : public Error {
public:
    using Error::Error;
};

struct SeminormOptions {
    std::size_t exhaustive_nodes = 4000; ///< all pairs when the node count is at most this
    std::size_t pair_budget = 8'000'000; ///< total pairs examined by the sampled estimate
    int ring_depth = 4;                  ///< mesh-graph neighbourhood always included
    unsigned workers = 1;
};

struct SeminormResult {
    double value = 0.0;
    bool exhaustive = true;
    std::size_t pairs = 0;
    int i = -1, j = -1; ///< maximizing node pair
};

namespace detail {

struct PairMax {
    double q = 0.0;
    int i = -1, j = -1;
    std::size_t pairs = 0;

    void merge(const PairMax& o) {
        pairs += o.pairs;
        if (o.q > q || (o.q == q && o.i >= 0 && (i < 0 || std::pair(o.i, o.j) < std::pair(i, j)))) {
            q = o.q;
            i = o.i;
            j = o.j;
        }
    }
};

/// |v_i - v_j| / |x_i - x_j|^alpha; coincident nodes contribute nothing.
struct Quotient {
    const std::vector<Vec2>& x;
    const std::vector<double>& v;
    double alpha;

    void operator()(int i, int j, PairMax& m) const {
        ++m.pairs;
        double dx = x[i].x - x[j].x, dy = x[i].y - x[j].y;
        double d2 = dx * dx + dy * dy;
        if (d2 == 0.0) return;
        double dv = std::abs(v[i] - v[j]);
        double den = alpha == 1.0 ? std::sqrt(d2) : alpha == 0.5 ? std::sqrt(std::sqrt(d2)) : std::pow(d2, 0.5 * alpha);
        double q = dv / den;
        int a = std::min(i, j), b = std::max(i, j);
        if (q > m.q || (q == m.q && m.i >= 0 && std::pair(a, b) < std::pair(m.i, m.j))) {
            m.q = q;
            m.i = a;
            m.j = b;
        }
    }
};

inline std::vector<std::vector<int>> node_adjacency(const Mesh& mesh) {
    std::vector<std::vector<int>> adj(mesh.nodes.size());
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            adj[t[k]].push_back(t[(k + 1) % 3]);
            adj[t[k]].push_back(t[(k + 2) % 3]);
        }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

} // namespace detail

/// Nodal estimate of sup (d/2)^alpha |v(x1) - v(x2)| / |x1 - x2|^alpha.
///
/// The sup is taken over mesh nodes only, so the result never exceeds the
/// continuum seminorm of the interpolant. Above `exhaustive_nodes` nodes the pair
/// set is: mesh-graph rings up to `ring_depth`, every boundary-boundary pair,
/// every pair touching a global or boundary extremum node, and index-offset
/// strata filling the remaining budget. All of it depends on node indices only,
/// so it is unchanged by dilations and by adding constants to v.
inline SeminormResult holder_seminorm(const SolutionSample& sample, double alpha, const SeminormOptions& opt = {}) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw NormError("alpha must lie in (0, 1]");
    const Mesh& mesh = *sample.mesh;
    const auto& x = mesh.nodes;
    const auto& v = sample.values;
    const std::size_t n = x.size();
    if (n < 2) throw NormError("seminorm needs at least 2 nodes");
    if (v.size() != n) throw NormError("sample and mesh sizes differ");
    detail::Quotient quot{x, v, alpha};
    const unsigned workers = std::max(1u, opt.workers);
    SeminormResult res;
    detail::PairMax best;

    auto run_chunks = [&](std::size_t chunks, auto&& body) {
        std::vector<detail::PairMax> part(chunks);
        parallel_for(chunks, workers, [&](std::size_t c) { body(c, part[c]); });
        for (const auto& p : part) best.merge(p);
    };

    if (n <= opt.exhaustive_nodes) {
        // strided rows give every chunk a similar share of the triangle of pairs
        const std::size_t chunks = 64;
        run_chunks(chunks, [&](std::size_t c, detail::PairMax& m) {
            for (std::size_t i = c; i < n; i += chunks)
                for (std::size_t j = i + 1; j < n; ++j) quot(static_cast<int>(i), static_cast<int>(j), m);
        });
        res.exhaustive = true;
    } else {
        res.exhaustive = false;
        const auto adj = detail::node_adjacency(mesh);
        const std::size_t chunks = 64;
        // graph rings
        run_chunks(chunks, [&](std::size_t c, detail::PairMax& m) {
            std::vector<int> seen_stamp(n, -1), frontier, next;
            for (std::size_t i = c; i < n; i += chunks) {
                frontier.assign(1, static_cast<int>(i));
                seen_stamp[i] = static_cast<int>(i);
                for (int depth = 0; depth < opt.ring_depth; ++depth) {
                    next.clear();
                    for (int a : frontier)
                        for (int b : adj[a])
                            if (seen_stamp[b] != static_cast<int>(i)) {
                                seen_stamp[b] = static_cast<int>(i);
                                next.push_back(b);
                                if (b > static_cast<int>(i)) quot(static_cast<int>(i), b, m);
                            }
                    frontier.swap(next);
                }
            }
        });
        // boundary-boundary pairs
        const auto bnodes = mesh.boundary_nodes();
        run_chunks(chunks, [&](std::size_t c, detail::PairMax& m) {
            for (std::size_t a = c; a < bnodes.size(); a += chunks)
                for (std::size_t b = a + 1; b < bnodes.size(); ++b) quot(bnodes[a], bnodes[b], m);
        });
        // extremum nodes against everything
        std::vector<int> ext;
        auto arg = [&](auto better, bool boundary_only) {
            int k = -1;
            for (std::size_t i = 0; i < n; ++i) {
                if (boundary_only && !mesh.boundary[i]) continue;
                if (k < 0 || better(v[i], v[k])) k = static_cast<int>(i);
            }
            if (k >= 0 && std::find(ext.begin(), ext.end(), k) == ext.end()) ext.push_back(k);
        };
        arg(std::greater<>{}, false);
        arg(std::less<>{}, false);
        arg(std::greater<>{}, true);
        arg(std::less<>{}, true);
        run_chunks(ext.size(), [&](std::size_t c, detail::PairMax& m) {
            for (std::size_t j = 0; j < n; ++j)
                if (static_cast<int>(j) != ext[c]) quot(ext[c], static_cast<int>(j), m);
        });
        // index-offset strata
        if (best.pairs < opt.pair_budget) {
            std::size_t remaining = opt.pair_budget - best.pairs;
            std::size_t strata = std::max<std::size_t>(1, remaining / n);
            std::vector<std::size_t> offsets(strata);
            for (std::size_t s = 0; s < strata; ++s) offsets[s] = 1 + splitmix64(0x5eed0000ULL + s) % (n - 1);
            run_chunks(chunks, [&](std::size_t c, detail::PairMax& m) {
                for (std::size_t s = c; s < strata; s += chunks)
                    for (std::size_t i = 0; i < n; ++i)
                        quot(static_cast<int>(i), static_cast<int>((i + offsets[s]) % n), m);
            });
        }
    }
    res.pairs = best.pairs;
    res.i = best.i;
    res.j = best.j;
    res.value = std::pow(0.5 * mesh.domain_diameter, alpha) * best.q;
    return res;
}

namespace detail {

/// Complete homogeneous symmetric polynomial h_k(a, b, c).
inline double complete_homogeneous(int k, double a, double b, double c) {
    // h_k(a,b,c) = sum_{i+j<=k} a^i b^j c^(k-i-j)
    double s = 0.0, ai = 1.0;
    for (int i = 0; i <= k; ++i) {
        double bj = 1.0;
        for (int j = 0; j <= k - i; ++j) {
            s += ai * bj * std::pow(c, k - i - j);
            bj *= b;
        }
        ai *= a;
    }
    return s;
}

/// Second divided difference of g(t) = t^(p+2) / ((p+1)(p+2)) at 0 <= a <= b <= c.
inline double power_divided_difference(double p, double a, double b, double c) {
    auto g = [p](double t) { return std::pow(t, p + 2.0) / ((p + 1.0) * (p + 2.0)); };
    auto g1 = [p](double t) { return std::pow(t, p + 1.0) / (p + 1.0); };
    auto g3 = [p](double t) { return p == 0.0 ? 0.0 : p * std::pow(t, p - 1.0); };
    auto first = [&](double x, double y) {
        double d = y - x;
        if (d <= 1e-4 * y) {
            double m = 0.5 * (x + y);
            return g1(m) + g3(m) * d * d / 24.0;
        }
        return (g(y) - g(x)) / d;
    };
    return (first(b, c) - first(a, b)) / (c - a);
}

/// Integral of l^p over a triangle of the given area where l >= 0 is linear
/// with vertex values a, b, c.
inline double nonnegative_power_integral(double area, double a, double b, double c, double p) {
    if (p == std::floor(p) && p <= 64.0)
        return 2.0 * area * complete_homogeneous(static_cast<int>(p), a, b, c) / ((p + 1.0) * (p + 2.0));
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    if (c == 0.0) return 0.0;
    if (c - a <= 1e-3 * c) {
        // nearly constant: degree-5 rule is accurate to (spread/c)^6
        static constexpr double w[7] = {0.225, 0.132394152788506, 0.132394152788506, 0.132394152788506,
                                        0.125939180544827, 0.125939180544827, 0.125939180544827};
        static constexpr double a1 = 0.059715871789770, b1 = 0.470142064105115;
        static constexpr double a2 = 0.797426985353087, b2 = 0.101286507323456;
        static constexpr double bary[7][3] = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                                              {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
        double s = 0.0;
        for (int q = 0; q < 7; ++q) s += w[q] * std::pow(bary[q][0] * a + bary[q][1] * b + bary[q][2] * c, p);
        return area * s;
    }
    return 2.0 * area * power_divided_difference(p, a, b, c);
}

/// Integral of |l|^p over a triangle; l linear with vertex values a, b, c.
inline double abs_power_integral(double area, double a, double b, double c, double p) {
    bool pos = a >= 0 && b >= 0 && c >= 0, neg = a <= 0 && b <= 0 && c <= 0;
    if (pos || neg) return nonnegative_power_integral(area, std::abs(a), std::abs(b), std::abs(c), p);
    // move the vertex that is alone on its strict side of the zero line to `a`
    int npos = (a > 0) + (b > 0) + (c > 0);
    if (npos == 1) {
        if (b > 0) std::swap(a, b);
        else if (c > 0) std::swap(a, c);
    } else {
        if (b < 0) std::swap(a, b);
        else if (c < 0) std::swap(a, c);
    }
    // zero crossings on edges a-b and a-c at parameters tb, tc from a
    double tb = a / (a - b), tc = a / (a - c);
    double apq = area * tb * tc;
    double pbc = area * (1.0 - tb);
    double pcq = area - apq - pbc;
    return nonnegative_power_integral(apq, std::abs(a), 0.0, 0.0, p) +
           nonnegative_power_integral(pbc, 0.0, std::abs(b), std::abs(c), p) +
           nonnegative_power_integral(std::max(pcq, 0.0), 0.0, std::abs(c), 0.0, p);
}

} // namespace detail

/// (1/|Omega|) int v dx, exact on the piecewise-linear field over the mesh area.
inline double mean_value(const SolutionSample& sample) {
    const Mesh& m = *sample.mesh;
    double s = 0.0, area = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        double a = m.triangle_area(t);
        area += a;
        s += a * (sample.values[tri[0]] + sample.values[tri[1]] + sample.values[tri[2]]) / 3.0;
    }
    return s / area;
}

/// ((1/|Omega|) int |v - c|^p dx)^(1/p), c = v_Omega when centered, else 0.
inline double normalized_lp_norm(const SolutionSample& sample, double p, bool centered) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw NormError("p must lie in [1, inf)");
    const Mesh& m = *sample.mesh;
    const double c = centered ? mean_value(sample) : 0.0;
    double s = 0.0, area = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        double a = m.triangle_area(t);
        area += a;
        s += detail::abs_power_integral(a, sample.values[tri[0]] - c, sample.values[tri[1]] - c,
                                        sample.values[tri[2]] - c, p);
    }
    return std::pow(s / area, 1.0 / p);
}

/// max - min of the nodal values on the boundary.
inline double boundary_oscillation(const SolutionSample& sample) {
    const Mesh& m = *sample.mesh;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t count = 0;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        if (!m.boundary[i]) continue;
        lo = std::min(lo, sample.values[i]);
        hi = std::max(hi, sample.values[i]);
        ++count;
    }
    if (count < 3) throw NormError("boundary oscillation needs at least 3 boundary nodes");
    return hi - lo;
}

struct NormReport {
    std::string sample_id;
    double alpha = 1.0;
    double p = 2.0;
    double seminorm = 0.0;
    double lp_centered = 0.0;
    double mean = 0.0;
    double boundary_osc = 0.0;
    bool seminorm_exhaustive = true;
    std::size_t seminorm_pairs = 0;

    /// The seminorm is a nodal sup and so a lower estimate of the continuum value.
    static constexpr const char* seminorm_bias = "lower estimate (sup over mesh nodes)";

    static std::string csv_header() { return "sample_id,alpha,p,seminorm,lp_centered,mean,boundary_osc"; }
    std::string csv_row() const {
        return sample_id + "," + format_double(alpha) + "," + format_double(p) + "," + format_double(seminorm) + "," +
               format_double(lp_centered) + "," + format_double(mean) + "," + format_double(boundary_osc);
    }
};

inline NormReport compute_norms(const SolutionSample& sample, double alpha, double p,
                                const SeminormOptions& opt = {}) {
    NormReport r;
    r.sample_id = sample.id;
    r.alpha = alpha;
    r.p = p;
    auto sn = holder_seminorm(sample, alpha, opt);
    r.seminorm = sn.value;
    r.seminorm_exhaustive = sn.exhaustive;
    r.seminorm_pairs = sn.pairs;
    r.lp_centered = normalized_lp_norm(sample, p, true);
    r.mean = mean_value(sample);
    r.boundary_osc = boundary_oscillation(sample);
    return r;
}

} // namespace oscbound
