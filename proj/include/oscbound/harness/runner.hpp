#pragma once

// Run planning and the verify / sweep / meanvalue / extremal / compare pipelines.
// Work fans out over a worker pool; rows are collected by index and written once,
// in configuration order.

#include "../extremal.hpp"
#include "../inequality.hpp"
#include "../meanvalue.hpp"
#include "compare.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "svg.hpp"

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace oscbound::harness {

struct PlannedRun {
    std::string run_id;
    int data = 0;
    double p = 2.0;
    double h = 0.02;
};

inline int data_count(const ExperimentConfig& cfg) {
    return cfg.data.kind == DataKind::random ? cfg.data.count : 1;
}

/// Cartesian product data x p x h, in that nesting order.
inline std::vector<PlannedRun> plan_runs(const ExperimentConfig& cfg) {
    std::vector<PlannedRun> out;
    const int nd = data_count(cfg);
    for (int d = 0; d < nd; ++d)
        for (double p : cfg.p)
            for (double h : cfg.h) {
                std::string n = std::to_string(out.size() + 1);
                out.push_back({cfg.id + "-" + std::string(n.size() < 4 ? 4 - n.size() : 0, '0') + n, d, p, h});
            }
    return out;
}

/// Boundary data (or closed-form sample) for one data index, with the exact
/// solution when one is known for the configured field.
struct DataInstance {
    std::string id;
    std::variant<Analytic, FourierData> source;
    bool solve = true;
    double scale = 1.0;
    std::optional<Analytic> exact;
};

inline DataInstance make_data(const ExperimentConfig& cfg, int index) {
    const Domain& dom = *cfg.domain;
    const Vec2 center = dom.center();
    DataInstance d;
    auto disk_extension = [&](const FourierData& f) -> std::optional<Analytic> {
        if (dom.is_disk() && cfg.field.is_identity() && dom.as_disk().center == f.center)
            return f.harmonic_extension(dom.as_disk().radius);
        return std::nullopt;
    };
    switch (cfg.data.kind) {
        case DataKind::reference: {
            const Analytic& a = cfg.data.analytic;
            d.source = a;
            d.solve = cfg.data.solve;
            d.scale = cfg.data.scale;
            d.id = a.id();
            if (!d.solve && d.scale != 1.0) d.id = format_double(d.scale) + " * " + d.id;
            bool exact = a.kind == AnalyticKind::linear ? cfg.field.is_constant()
                                                        : (a.harmonic() && cfg.field.is_identity());
            if (d.solve && exact) d.exact = a;
            break;
        }
        case DataKind::fourier: {
            FourierData f = cfg.data.fourier;
            f.center = center;
            d.id = f.id();
            d.exact = disk_extension(f);
            d.source = std::move(f);
            break;
        }
        case DataKind::random: {
            FourierData f = random_fourier(static_cast<std::size_t>(cfg.data.degree),
                                           hash_combine(cfg.seed, static_cast<std::uint64_t>(index)), center);
            d.id = f.id();
            d.exact = disk_extension(f);
            d.source = std::move(f);
            break;
        }
    }
    return d;
}

inline SolutionSample produce_sample(const ExperimentConfig& cfg, const DataInstance& d,
                                     std::shared_ptr<const Mesh> mesh) {
    SolutionSample s;
    if (const auto* a = std::get_if<Analytic>(&d.source)) {
        if (!d.solve) {
            s = reference_solution(*a, std::move(mesh));
            if (d.scale != 1.0) {
                s = s.scaled_values(d.scale);
                if (d.scale < 0.0 && s.provenance == Provenance::subsolution) s.provenance = Provenance::reference;
            }
        } else {
            s = assemble_and_solve_dirichlet(std::move(mesh), cfg.field, *a);
        }
    } else {
        s = assemble_and_solve_dirichlet(std::move(mesh), cfg.field, std::get<FourierData>(d.source));
    }
    s.id = d.id;
    s.alpha = cfg.alpha;
    return s;
}

/// Geometry data for the constant: ball for disks, interior sphere for
/// ellipses, cone certificate for polygons unless `geometry` says otherwise.
inline GeometryKind resolve_geometry(const ExperimentConfig& cfg) {
    const Domain& dom = *cfg.domain;
    std::string g = cfg.geometry;
    if (g == "auto") g = dom.is_disk() ? "ball" : dom.is_ellipse() ? "smooth" : "cone";
    const double d = diameter_and_measure(dom).diameter;
    if (g == "ball") {
        if (!dom.is_disk()) throw Error("geometry 'ball' needs a disk domain");
        return GeometryKind::ball();
    }
    if (g == "smooth") return GeometryKind::smooth(d, interior_sphere_radius(dom));
    if (g == "cone") {
        auto cert = cone_parameters(dom);
        return GeometryKind::cone(d, cert.theta, cert.h);
    }
    auto cert = john_parameters(dom);
    return GeometryKind::john(d, cert.b0, cert.R);
}

struct RunOptions {
    std::string out_dir; ///< empty: use the configured output directory
    unsigned workers = default_workers();
    bool write_files = true;
    std::ostream* log = &std::cerr;
};

struct VerifyRow {
    PlannedRun plan;
    std::string data_id;
    InequalityReport report;
    std::string provenance;
    std::size_t nodes = 0;
    double l2_error = std::numeric_limits<double>::quiet_NaN();
    bool gated = false;
    bool passed = true;
    std::string status = "ok";
};

struct ExtremalRow {
    std::string run_id;
    double p = 2.0;
    ExtremalResult result;
    bool sandwich_ok = false;
    bool trace_monotone = false;
    std::string status = "ok";
};

struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> files;
    std::vector<VerifyRow> verify;
    std::vector<MeanValueReport> meanvalue;
    std::vector<ExtremalRow> extremal;
    std::optional<RefinementSummary> refinement;
    std::size_t gated_failures = 0;
    std::size_t errors = 0;
};

namespace detail {

inline std::string verify_header() {
    return InequalityReport::csv_header() +
           ",h,nodes,domain,field,data,seed,geometry,provenance,gated,status,l2_error,seminorm,lp_centered,mean,boundary_osc";
}

inline std::string verify_csv_row(const ExperimentConfig& cfg, const GeometryKind* geom, const VerifyRow& r) {
    const auto& q = r.report;
    auto num = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
    bool ok = r.status == "ok";
    return csv_join({r.plan.run_id, geom ? geom->name() : "", format_double(cfg.alpha), format_double(r.plan.p),
                     ok ? format_double(q.c) : "", ok ? format_double(q.C) : "", ok ? format_double(q.k_bound) : "",
                     ok ? format_double(q.lhs) : "", ok ? format_double(q.rhs) : "",
                     ok ? format_double(q.sigma_star) : "", ok ? q.branch : "", ok ? format_double(q.slack) : "",
                     format_double(r.plan.h), std::to_string(r.nodes), cfg.domain->describe(), cfg.field.describe(),
                     r.data_id, std::to_string(cfg.seed), geom ? geom->describe() : "", r.provenance,
                     r.gated ? "1" : "0", r.status, num(r.l2_error), ok ? format_double(q.norms.seminorm) : "",
                     ok ? format_double(q.norms.lp_centered) : "", ok ? format_double(q.norms.mean) : "",
                     ok ? format_double(q.norms.boundary_osc) : ""});
}

inline std::map<double, std::shared_ptr<const Mesh>> build_meshes(const Domain& dom, const std::vector<double>& hs,
                                                                  unsigned workers,
                                                                  std::map<double, std::string>& failures) {
    std::vector<std::shared_ptr<const Mesh>> meshes(hs.size());
    std::vector<std::string> errs(hs.size());
    parallel_for(hs.size(), workers, [&](std::size_t k) {
        try {
            meshes[k] = std::make_shared<const Mesh>(mesh_domain(dom, hs[k]));
        } catch (const Error& e) {
            errs[k] = e.what();
        }
    });
    std::map<double, std::shared_ptr<const Mesh>> out;
    for (std::size_t k = 0; k < hs.size(); ++k) {
        if (meshes[k]) out[hs[k]] = meshes[k];
        else failures[hs[k]] = errs[k];
    }
    return out;
}

inline std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

} // namespace detail

class Runner {
public:
    Runner(ExperimentConfig cfg, RunOptions opt) : cfg_(std::move(cfg)), opt_(std::move(opt)) {
        if (opt_.out_dir.empty()) opt_.out_dir = cfg_.output;
        opt_.workers = std::max(1u, opt_.workers);
    }

    RunOutcome run() {
        RunOutcome out;
        if (opt_.write_files) std::filesystem::create_directories(opt_.out_dir);
        switch (cfg_.mode) {
            case Mode::verify: run_verify(out, false); break;
            case Mode::sweep: run_verify(out, true); break;
            case Mode::meanvalue: run_meanvalue(out); break;
            case Mode::extremal: run_extremal(out); break;
            case Mode::compare: run_compare(out); break;
        }
        out.exit_code = (out.gated_failures == 0 && out.errors == 0) ? 0 : 1;
        return out;
    }

private:
    std::string path(const std::string& name) const { return (std::filesystem::path(opt_.out_dir) / name).string(); }

    void emit(RunOutcome& out, const std::string& name, const std::string& text) {
        if (!opt_.write_files) return;
        write_text(path(name), text);
        out.files.push_back(path(name));
    }

    void say(const std::string& s) const {
        if (opt_.log) *opt_.log << s << "\n";
    }

    void run_verify(RunOutcome& out, bool sweep) {
        const auto plan = plan_runs(cfg_);
        std::optional<GeometryKind> geom;
        std::string geom_error;
        try {
            geom = resolve_geometry(cfg_);
        } catch (const Error& e) {
            geom_error = "geometry: " + std::string(e.what());
        }
        std::map<double, std::string> mesh_fail;
        auto meshes = detail::build_meshes(*cfg_.domain, cfg_.h, opt_.workers, mesh_fail);
        const auto mvc = mean_value_constants(cfg_.field);
        const int nd = data_count(cfg_);

        // one solve and one seminorm per (data, h); the p loop reuses them
        struct Task {
            int data;
            double h;
            std::vector<VerifyRow> rows; // one per p
        };
        std::vector<Task> tasks;
        for (int d = 0; d < nd; ++d)
            for (double h : cfg_.h) tasks.push_back({d, h, {}});
        parallel_for(tasks.size(), opt_.workers, [&](std::size_t t) {
            Task& task = tasks[t];
            DataInstance data = make_data(cfg_, task.data);
            std::optional<SolutionSample> sample;
            std::optional<SeminormResult> sn;
            std::string error = geom_error;
            if (error.empty() && mesh_fail.count(task.h)) error = "mesh: " + mesh_fail.at(task.h);
            double l2 = std::numeric_limits<double>::quiet_NaN();
            if (error.empty()) {
                try {
                    sample = produce_sample(cfg_, data, meshes.at(task.h));
                    sn = holder_seminorm(*sample, cfg_.alpha);
                    if (data.exact) l2 = l2_error(*sample, *data.exact);
                } catch (const Error& e) {
                    error = e.what();
                }
            }
            for (double p : cfg_.p) {
                VerifyRow row;
                row.data_id = data.id;
                row.l2_error = l2;
                row.plan.p = p;
                row.plan.h = task.h;
                row.plan.data = task.data;
                if (sample) {
                    row.nodes = sample->mesh->nodes.size();
                    row.provenance = provenance_name(sample->provenance);
                }
                row.gated = cfg_.is_gated() && (!sample || sample->provenance != Provenance::subsolution);
                if (error.empty()) {
                    try {
                        NormReport nr;
                        nr.sample_id = data.id;
                        nr.alpha = cfg_.alpha;
                        nr.p = p;
                        nr.seminorm = sn->value;
                        nr.seminorm_exhaustive = sn->exhaustive;
                        nr.seminorm_pairs = sn->pairs;
                        nr.lp_centered = normalized_lp_norm(*sample, p, true);
                        nr.mean = mean_value(*sample);
                        nr.boundary_osc = boundary_oscillation(*sample);
                        row.report = verify_inequality(nr, *geom, mvc.c, mvc.C, "");
                        row.passed = row.report.holds(cfg_.tolerance) && sample->stats.max_principle_ok;
                        if (!sample->stats.max_principle_ok) row.status = "max-principle-violation";
                    } catch (const Error& e) {
                        row.status = "error: " + detail::one_line(e.what());
                        row.passed = false;
                    }
                } else {
                    row.status = "error: " + detail::one_line(error);
                    row.passed = false;
                }
                task.rows.push_back(std::move(row));
            }
        });
        // reassemble in plan order: data -> p -> h
        std::map<std::tuple<int, double, double>, VerifyRow*> index;
        for (auto& t : tasks)
            for (auto& r : t.rows) index[{r.plan.data, r.plan.p, r.plan.h}] = &r;
        std::string csv = detail::verify_header() + "\n";
        std::string norms = NormReport::csv_header() + "\n";
        for (const auto& pr : plan) {
            VerifyRow row = *index.at({pr.data, pr.p, pr.h});
            row.plan.run_id = pr.run_id;
            row.report.run_id = pr.run_id;
            if (row.status != "ok" && row.status.rfind("error", 0) == 0) ++out.errors;
            else if (row.gated && !row.passed) ++out.gated_failures;
            csv += detail::verify_csv_row(cfg_, geom ? &*geom : nullptr, row) + "\n";
            if (row.status == "ok") {
                NormReport nr = row.report.norms;
                nr.sample_id = pr.run_id;
                norms += nr.csv_row() + "\n";
            }
            out.verify.push_back(std::move(row));
        }
        emit(out, "inequality.csv", csv);
        emit(out, "norms.csv", norms);

        if (cfg_.h.size() > 1) {
            auto table = parse_csv(csv);
            out.refinement = compare_tables({table}, 1);
            if (sweep) emit(out, "refinement.csv", out.refinement->csv());
            Chart chart{"slack under refinement", "h", "slack", true, true, {}, {}, {1.0}};
            std::map<std::pair<int, double>, Series> lines;
            for (const auto& r : out.verify) {
                if (r.status != "ok") continue;
                auto& s = lines[{r.plan.data, r.plan.p}];
                s.label = "data " + std::to_string(r.plan.data + 1) + ", p=" + format_double(r.plan.p);
                s.markers = true;
                s.x.push_back(r.plan.h);
                s.y.push_back(r.report.slack);
            }
            for (auto& [k, s] : lines) chart.series.push_back(std::move(s));
            emit(out, "slack_vs_h.svg", render_svg(chart));
        }
        for (const auto& r : out.verify) {
            if (r.status != "ok" || r.plan.h != cfg_.h.back() || r.report.degenerate) continue;
            emit(out, "rhs_sigma.svg", render_svg(rhs_sigma_chart(r)));
            break;
        }
        std::size_t ok = 0;
        for (const auto& r : out.verify) ok += r.status == "ok";
        say(mode_name(cfg_.mode) + ": " + std::to_string(out.verify.size()) + " runs, " + std::to_string(ok) +
            " completed, " + std::to_string(out.gated_failures) + " gated failures, " + std::to_string(out.errors) +
            " errors");
    }

    Chart rhs_sigma_chart(const VerifyRow& r) const {
        const auto& q = r.report;
        GeometryKind g = resolve_geometry(cfg_);
        Chart c{"two-term bound versus probe depth (" + r.plan.run_id + ")", "sigma ratio", "bound", false, true, {}, {}, {q.lhs}};
        Series s;
        s.label = "rhs(sigma)";
        double top = std::min(0.999, std::max(g.ratio_threshold(), 1.25 * q.sigma_star));
        for (int i = 1; i <= 200; ++i) {
            double x = top * i / 200.0;
            s.x.push_back(x);
            s.y.push_back(rhs_of_sigma(x, q.norms.seminorm, q.norms.lp_centered, 2.0, q.alpha, q.p, q.c, q.C, g));
        }
        const double s_end_x = s.x.back(), s_end_y = s.y.back();
        c.series.push_back(std::move(s));
        if (q.rhs_sigma_min > 0.0) c.markers.push_back({q.sigma_star, q.rhs_sigma_min, "sigma* (" + q.branch + ")"});
        else c.markers.push_back({s_end_x, s_end_y, "sigma* >= 1 (" + q.branch + ")"});
        return c;
    }

    void run_meanvalue(RunOutcome& out) {
        struct Job {
            int data;
            double h;
            Vec2 center;
            std::optional<MeanValueReport> report;
            std::string expectation;
            std::string status = "ok";
        };
        std::vector<Job> jobs;
        for (int d = 0; d < data_count(cfg_); ++d)
            for (double h : cfg_.h)
                for (Vec2 c : cfg_.centers) jobs.push_back({d, h, c, std::nullopt, "", "ok"});
        std::map<double, std::string> mesh_fail;
        auto meshes = detail::build_meshes(*cfg_.domain, cfg_.h, opt_.workers, mesh_fail);
        std::vector<std::string> ids(jobs.size());
        parallel_for(jobs.size(), opt_.workers, [&](std::size_t j) {
            Job& job = jobs[j];
            try {
                if (mesh_fail.count(job.h)) throw Error("mesh: " + mesh_fail.at(job.h));
                DataInstance data = make_data(cfg_, job.data);
                ids[j] = data.id;
                SolutionSample s = produce_sample(cfg_, data, meshes.at(job.h));
                job.expectation = s.provenance == Provenance::subsolution ? "subsolution"
                                  : (data.solve || s.provenance == Provenance::reference) && !(d_scale_negative(data))
                                      ? "solution"
                                      : "none";
                job.report = check_mean_value_property(s, cfg_.field, *cfg_.domain, job.center, cfg_.radii);
            } catch (const Error& e) {
                job.status = "error: " + detail::one_line(e.what());
            }
        });
        std::string csv = MeanValueReport::csv_header() + ",sample_id,h,tolerance,expectation,verdict,gated,status\n";
        Chart chart{"set averages versus radius", "r", "average", false, false, {}, {}, {}};
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            const Job& job = jobs[j];
            const bool gated = cfg_.is_gated() && job.expectation != "none";
            if (!job.report) {
                ++out.errors;
                csv += csv_join({format_double(job.center.x), format_double(job.center.y), "", "", "", "", "", ids[j],
                                 format_double(job.h), "", job.expectation, "", gated ? "1" : "0", job.status}) +
                       "\n";
                continue;
            }
            const auto& rep = *job.report;
            if (gated && !rep.subsolution_consistent()) ++out.gated_failures;
            auto rows = rep.csv_rows();
            for (const auto& line : rows)
                csv += line + "," + csv_join({ids[j], format_double(job.h), format_double(rep.tolerance), job.expectation,
                                              rep.verdict(), gated ? "1" : "0", job.status}) +
                       "\n";
            if (job.h == cfg_.h.back() && job.data == 0) {
                Series s;
                s.label = "x0=(" + format_double(job.center.x) + "," + format_double(job.center.y) + ")";
                s.markers = true;
                for (const auto& r : rep.rows) s.x.push_back(r.r), s.y.push_back(r.average);
                chart.series.push_back(std::move(s));
                if (chart.hlines.empty()) chart.hlines.push_back(rep.v_at_x0);
            }
            out.meanvalue.push_back(rep);
        }
        emit(out, "meanvalue.csv", csv);
        emit(out, "averages_vs_r.svg", render_svg(chart));
        say("meanvalue: " + std::to_string(jobs.size()) + " checks, " + std::to_string(out.gated_failures) +
            " gated failures, " + std::to_string(out.errors) + " errors");
    }

    static bool d_scale_negative(const DataInstance& d) { return !d.solve && d.scale < 0.0; }

    void run_extremal(RunOutcome& out) {
        std::optional<GeometryKind> geom;
        std::string geom_error;
        try {
            geom = resolve_geometry(cfg_);
        } catch (const Error& e) {
            geom_error = e.what();
        }
        std::string csv = "run_id,alpha,p,degree,population,iterations,seed,h,k_est,k_bound,sandwich_ok,trace_monotone,"
                          "evaluations,skipped,best_cos,best_sin,domain,field,geometry,status\n";
        std::string trace_csv = "run_id,iteration,best_objective\n";
        Chart chart{"best objective per iteration", "iteration", "best objective", false, false, {}, {}, {}};
        int k = 0;
        for (double p : cfg_.p) {
            ExtremalRow row;
            row.run_id = cfg_.id + "-x" + std::to_string(++k);
            row.p = p;
            try {
                if (!geom) throw Error("geometry: " + geom_error);
                ExtremalOptions o;
                o.alpha = cfg_.alpha;
                o.p = p;
                o.degree = cfg_.extremal.degree;
                o.population = cfg_.extremal.population;
                o.iterations = cfg_.extremal.iterations;
                o.seed = cfg_.seed;
                o.mesh_h = cfg_.extremal.h;
                o.workers = opt_.workers;
                o.geometry = geom;
                row.result = extremal_search(*cfg_.domain, cfg_.field, o);
                row.sandwich_ok = row.result.k_est <= row.result.k_bound + 1e-9;
                row.trace_monotone = std::is_sorted(row.result.trace.begin(), row.result.trace.end());
                if (cfg_.is_gated() && !(row.sandwich_ok && row.trace_monotone)) ++out.gated_failures;
            } catch (const Error& e) {
                row.status = "error: " + detail::one_line(e.what());
                ++out.errors;
            }
            const auto& r = row.result;
            auto coeffs = [](const std::vector<double>& v) {
                std::string s;
                for (double c : v) s += (s.empty() ? "" : " ") + format_double(c);
                return s;
            };
            bool ok = row.status == "ok";
            csv += csv_join({row.run_id, format_double(cfg_.alpha), format_double(p), std::to_string(cfg_.extremal.degree),
                             std::to_string(cfg_.extremal.population), std::to_string(cfg_.extremal.iterations),
                             std::to_string(cfg_.seed), format_double(cfg_.extremal.h), ok ? format_double(r.k_est) : "",
                             ok ? format_double(r.k_bound) : "", row.sandwich_ok ? "1" : "0", row.trace_monotone ? "1" : "0",
                             std::to_string(r.evaluations), std::to_string(r.skipped), coeffs(r.best.cos_coeffs),
                             coeffs(r.best.sin_coeffs), cfg_.domain->describe(), cfg_.field.describe(),
                             geom ? geom->describe() : "", row.status}) +
                   "\n";
            if (ok) {
                Series s;
                s.label = "p=" + format_double(p);
                for (std::size_t i = 0; i < r.trace.size(); ++i) {
                    trace_csv += row.run_id + "," + std::to_string(i + 1) + "," + format_double(r.trace[i]) + "\n";
                    s.x.push_back(static_cast<double>(i + 1));
                    s.y.push_back(r.trace[i]);
                }
                chart.series.push_back(std::move(s));
                chart.hlines.push_back(r.k_bound);
                say("extremal p=" + format_double(p) + ": K_est = " + format_double(r.k_est) + ", bound " +
                    format_double(r.k_bound));
            }
            out.extremal.push_back(std::move(row));
        }
        emit(out, "extremal.csv", csv);
        emit(out, "extremal_trace.csv", trace_csv);
        emit(out, "best_objective.svg", render_svg(chart));
    }

    void run_compare(RunOutcome& out) {
        try {
            out.refinement = compare_runs(cfg_.compare_inputs);
        } catch (const Error& e) {
            say(std::string("compare: ") + e.what());
            ++out.errors;
            return;
        }
        const auto& s = *out.refinement;
        emit(out, "refinement.csv", s.csv());
        bool refined = false;
        for (const auto& r : s.rows) refined = refined || r.h.size() > 1;
        if (!refined) say("compare: no refinement (all inputs share the same mesh size)");
        else
            say("compare: " + std::to_string(s.rows.size()) + " series, minimum observed order " +
                (std::isnan(s.min_order) ? std::string("undefined") : format_double(s.min_order)) + ", " +
                std::to_string(s.warnings) + " slack warnings");
    }

    ExperimentConfig cfg_;
    RunOptions opt_;
};

inline RunOutcome run(const ExperimentConfig& cfg, const RunOptions& opt = {}) { return Runner(cfg, opt).run(); }

} // namespace oscbound::harness
