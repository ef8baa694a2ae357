#pragma once

// Derivative-free search for boundary data maximizing
//   osc_Gamma v / ([v]^{N/(N+ap)} ||v - v_Omega||_p^{ap/(N+ap)})
// over trigonometric Dirichlet data, giving a lower estimate of the optimal K.

#include "inequality.hpp"
#include "mesh.hpp"
#include "norms.hpp"
#include "solver.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

namespace oscbound {

struct ExtremalOptions {
    double alpha = 1.0;
    double p = 2.0;
    int degree = 8;
    int population = 32;
    int iterations = 200;
    std::uint64_t seed = 1;
    double mesh_h = 0.05;
    double initial_step = 0.3;
    unsigned workers = 1;
    std::optional<GeometryKind> geometry; ///< defaults to the ball for disks
};

struct ExtremalResult {
    double k_est = 0.0;
    double k_bound = 0.0;
    FourierData best;                 ///< normalized so the objective denominator is 1
    std::vector<double> trace;        ///< best-so-far objective after each iteration
    std::size_t evaluations = 0;
    std::size_t skipped = 0;          ///< degenerate candidates
    std::size_t mesh_nodes = 0;
};

namespace detail {

/// Objective on a fixed mesh with precomputed pair weights (d/2)^a / |x_i - x_j|^a.
class ExtremalObjective {
public:
    ExtremalObjective(std::shared_ptr<const Mesh> mesh, double alpha, double p)
        : mesh_(std::move(mesh)), alpha_(alpha), p_(p) {
        const auto& x = mesh_->nodes;
        const std::size_t n = x.size();
        weights_.reserve(n * (n - 1) / 2);
        const double scale = std::pow(0.5 * mesh_->domain_diameter, alpha);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double d = distance(x[i], x[j]);
                weights_.push_back(d > 0.0 ? scale / std::pow(d, alpha) : 0.0);
            }
    }

    struct Value {
        double objective = 0.0;
        double denominator = 0.0;
        bool degenerate = false;
    };

    Value operator()(const std::vector<double>& v) const {
        const std::size_t n = v.size();
        double sem = 0.0;
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double vi = v[i];
            for (std::size_t j = i + 1; j < n; ++j, ++k) sem = std::max(sem, std::abs(vi - v[j]) * weights_[k]);
        }
        SolutionSample s;
        s.mesh = mesh_;
        s.values = v;
        Value out;
        if (!(sem > 0.0)) {
            out.degenerate = true;
            return out;
        }
        const double lp = normalized_lp_norm(s, p_, true);
        const double N = 2.0, ap = alpha_ * p_;
        out.denominator = std::pow(sem, N / (N + ap)) * std::pow(lp, ap / (N + ap));
        if (!(out.denominator > 0.0)) {
            out.degenerate = true;
            return out;
        }
        out.objective = boundary_oscillation(s) / out.denominator;
        return out;
    }

private:
    std::shared_ptr<const Mesh> mesh_;
    double alpha_, p_;
    std::vector<double> weights_;
};

} // namespace detail

/// Evolution strategy with rank-weighted recombination and an elite carried
/// over every generation. Offspring are drawn on the calling thread before each
/// parallel evaluation, so the result does not depend on the worker count.
inline ExtremalResult extremal_search(const Domain& domain, const CoefficientField& field,
                                      const ExtremalOptions& opt = {}) {
    if (!field.is_constant())
        throw InequalityError("extremal search needs an identity or constant coefficient field");
    if (opt.degree < 1 || opt.degree > 12) throw InequalityError("fourier degree must lie in [1, 12]");
    if (opt.population < 2) throw InequalityError("population must be at least 2");
    if (opt.iterations < 0) throw InequalityError("iterations must be nonnegative");
    auto mvc = mean_value_constants(field);
    GeometryKind geom;
    if (opt.geometry) geom = *opt.geometry;
    else if (!domain.is_disk()) throw InequalityError("a geometry kind is required for non-disk domains");
    ExtremalResult res;
    res.k_bound = k_bound(geom, 2.0, opt.alpha, opt.p, mvc.c, mvc.C);

    auto mesh = std::make_shared<const Mesh>(mesh_domain(domain, opt.mesh_h));
    res.mesh_nodes = mesh->nodes.size();
    const Vec2 center = domain.center();
    const int dim = 2 * opt.degree; // a_1..a_deg, b_1..b_deg; a_0 only shifts v

    // one discrete solution per boundary mode; v is linear in the coefficients
    std::vector<std::vector<double>> basis(dim);
    parallel_for(dim, opt.workers, [&](std::size_t m) {
        FourierData g;
        g.center = center;
        int k = static_cast<int>(m % opt.degree) + 1;
        auto& coeffs = m < static_cast<std::size_t>(opt.degree) ? g.cos_coeffs : g.sin_coeffs;
        coeffs.assign(k + 1, 0.0);
        coeffs[k] = 1.0;
        basis[m] = assemble_and_solve_dirichlet(mesh, field, g).values;
    });
    detail::ExtremalObjective objective(mesh, opt.alpha, opt.p);

    auto synthesize = [&](const std::vector<double>& z) {
        std::vector<double> v(mesh->nodes.size(), 0.0);
        for (int m = 0; m < dim; ++m)
            if (z[m] != 0.0)
                for (std::size_t i = 0; i < v.size(); ++i) v[i] += z[m] * basis[m][i];
        return v;
    };

    struct Candidate {
        std::vector<double> z;
        double f = -1.0;
        bool valid = false;
    };
    auto evaluate = [&](std::vector<Candidate>& pop) {
        parallel_for(pop.size(), opt.workers, [&](std::size_t i) {
            auto val = objective(synthesize(pop[i].z));
            pop[i].valid = !val.degenerate;
            if (pop[i].valid) {
                pop[i].f = val.objective;
                for (double& c : pop[i].z) c /= val.denominator;
            }
        });
        for (const auto& c : pop) {
            ++res.evaluations;
            if (!c.valid) ++res.skipped;
        }
    };

    std::mt19937_64 rng(splitmix64(opt.seed));
    std::normal_distribution<double> nd(0.0, 1.0);
    const int lambda = opt.population;
    const int mu = std::max(1, lambda / 4);
    std::vector<double> rank_w(mu);
    double wsum = 0.0;
    for (int i = 0; i < mu; ++i) wsum += rank_w[i] = std::log(mu + 0.5) - std::log(i + 1.0);
    for (double& w : rank_w) w /= wsum;

    std::vector<Candidate> pop(lambda);
    for (int i = 0; i < lambda; ++i) {
        pop[i].z.assign(dim, 0.0);
        if (i == 0) pop[i].z[0] = 1.0; // cos(phi)
        else
            for (double& c : pop[i].z) c = nd(rng);
    }
    evaluate(pop);

    Candidate elite;
    auto by_rank = [](const Candidate& a, const Candidate& b) {
        if (a.valid != b.valid) return a.valid;
        return a.f > b.f;
    };
    auto update_elite = [&] {
        for (const auto& c : pop)
            if (c.valid && (!elite.valid || c.f > elite.f)) elite = c;
    };
    update_elite();
    double step = opt.initial_step;

    for (int it = 0; it < opt.iterations; ++it) {
        std::stable_sort(pop.begin(), pop.end(), by_rank);
        std::vector<double> mean(dim, 0.0);
        int used = 0;
        for (int i = 0; i < mu && pop[i].valid; ++i, ++used)
            for (int m = 0; m < dim; ++m) mean[m] += rank_w[i] * pop[i].z[m];
        if (used == 0) mean = elite.valid ? elite.z : std::vector<double>(dim, 0.0);
        const double parent_best = pop[0].valid ? pop[0].f : -1.0;

        std::vector<Candidate> next(lambda);
        next[0] = elite;
        for (int i = 1; i < lambda; ++i) {
            next[i].z.resize(dim);
            for (int m = 0; m < dim; ++m) next[i].z[m] = mean[m] + step * nd(rng);
        }
        next[0].valid = false; // re-evaluated below to keep the bookkeeping uniform
        evaluate(next);
        int better = 0;
        for (int i = 1; i < lambda; ++i) better += next[i].valid && next[i].f > parent_best;
        // success-rate step control around a one-fifth target
        double rate = static_cast<double>(better) / (lambda - 1);
        step *= std::exp(0.6 * (rate - 0.2));
        step = std::clamp(step, 1e-6, 2.0);
        pop = std::move(next);
        update_elite();
        if (elite.valid) res.trace.push_back(elite.f);
        else res.trace.push_back(0.0);
    }
    if (!elite.valid) throw InequalityError("extremal search found no valid candidate");
    res.k_est = elite.f;
    res.best.center = center;
    res.best.cos_coeffs.assign(opt.degree + 1, 0.0);
    res.best.sin_coeffs.assign(opt.degree + 1, 0.0);
    for (int k = 1; k <= opt.degree; ++k) {
        res.best.cos_coeffs[k] = elite.z[k - 1];
        res.best.sin_coeffs[k] = elite.z[opt.degree + k - 1];
    }
    return res;
}

} // namespace oscbound
