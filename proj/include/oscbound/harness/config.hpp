#pragma once

// Experiment configuration: `[section]` blocks of `key = value` lines.
//
//   [run]        mode, id, seed, gated, output
//   [domain]     kind = disk | ellipse | polygon | slit-polygon, plus shape keys
//   [field]      kind = identity | constant | checkerboard | random, plus parameters
//   [data]       analytic = <id> | cos/sin coefficient lists | count + degree (random)
//   [inequality] alpha, p (list), geometry, tolerance
//   [mesh]       h (strictly decreasing list)
//   [meanvalue]  centers (x y pairs), radii
//   [extremal]   degree, population, iterations, h
//   [compare]    inputs (CSV paths)

#include "../coefficients.hpp"
#include "../geometry.hpp"
#include "../solver.hpp"
#include "../text.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace oscbound::harness {

struct Diagnostic {
    int line = 0;
    std::string message;

    std::string str() const { return line > 0 ? "line " + std::to_string(line) + ": " + message : message; }
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<Diagnostic> d) : Error(join(d)), diagnostics_(std::move(d)) {}
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    static std::string join(const std::vector<Diagnostic>& d) {
        std::string s;
        for (const auto& x : d) s += (s.empty() ? "" : "\n") + x.str();
        return s;
    }
    std::vector<Diagnostic> diagnostics_;
};

enum class Mode { verify, meanvalue, extremal, sweep, compare };

inline std::string mode_name(Mode m) {
    switch (m) {
        case Mode::verify: return "verify";
        case Mode::meanvalue: return "meanvalue";
        case Mode::extremal: return "extremal";
        case Mode::sweep: return "sweep";
        case Mode::compare: return "compare";
    }
    return "unknown";
}

inline std::optional<Mode> parse_mode(const std::string& s) {
    if (s == "verify") return Mode::verify;
    if (s == "meanvalue") return Mode::meanvalue;
    if (s == "extremal") return Mode::extremal;
    if (s == "sweep") return Mode::sweep;
    if (s == "compare") return Mode::compare;
    return std::nullopt;
}

enum class DataKind { reference, fourier, random };

struct DataSpec {
    DataKind kind = DataKind::reference;
    Analytic analytic = Analytic::linear(1.0, 0.0, 0.0);
    bool solve = true;  ///< reference data: solve with the closed form as boundary data, or evaluate it
    double scale = 1.0; ///< multiplies the evaluated closed form (solve = false)
    FourierData fourier;
    int count = 1;  ///< random data: number of samples
    int degree = 8; ///< random data: maximal degree
};

struct ExtremalSpec {
    int degree = 8;
    int population = 32;
    int iterations = 200;
    double h = 0.05;
};

struct ExperimentConfig {
    Mode mode = Mode::verify;
    std::string id = "run";
    std::uint64_t seed = 1;
    std::optional<bool> gated; ///< unset: gated iff the field has constant coefficients
    std::string output = "out";
    std::optional<Domain> domain;
    CoefficientField field = make_field(IdentityKind{});
    DataSpec data;
    double alpha = 1.0;
    std::vector<double> p = {2.0};
    std::string geometry = "auto";
    double tolerance = 0.02;
    std::vector<double> h = {0.02};
    std::vector<Vec2> centers = {Vec2{0.0, 0.0}};
    std::vector<double> radii = {0.2, 0.4, 0.6};
    ExtremalSpec extremal;
    std::vector<std::string> compare_inputs;

    bool is_gated() const { return gated.value_or(field.is_constant()); }
};

namespace detail {

inline bool parse_bool(const Entry& e) {
    if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
    if (e.value == "false" || e.value == "no" || e.value == "0") return false;
    throw ParseError(e.line, "key '" + e.key + "' expects true or false");
}

inline long long parse_integer(const Entry& e, long long lo, long long hi) {
    double v = entry_number(e);
    if (v != std::floor(v) || v < static_cast<double>(lo) || v > static_cast<double>(hi))
        throw ParseError(e.line, "key '" + e.key + "' must be an integer in [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "]");
    return static_cast<long long>(v);
}

} // namespace detail

/// Parses and validates a configuration; every problem found is reported with its line.
inline ExperimentConfig parse_config(std::string_view text) {
    std::vector<Diagnostic> diags;
    std::vector<Section> sections;
    try {
        sections = parse_sections(text);
    } catch (const ParseError& e) {
        throw ConfigError({{e.line(), e.message()}});
    }
    ExperimentConfig cfg;
    auto guarded = [&](auto&& f) {
        try {
            f();
        } catch (const ParseError& e) {
            diags.push_back({e.line(), e.message()});
        } catch (const Error& e) {
            diags.push_back({0, e.what()});
        }
    };
    auto find = [&](const char* name) -> const Section* {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    };
    static const char* known[] = {"run", "domain", "field", "data", "inequality", "mesh", "meanvalue", "extremal", "compare"};
    for (std::size_t i = 0; i < sections.size(); ++i) {
        const auto& s = sections[i];
        bool ok = false;
        for (const char* k : known) ok = ok || s.name == k;
        if (!ok) {
            int line = s.line > 0 ? s.line : (s.entries.empty() ? 0 : s.entries.front().line);
            diags.push_back({line, s.name.empty() ? "entries must follow a [section] header" : "unknown section [" + s.name + "]"});
        }
        for (std::size_t j = 0; j < i; ++j)
            if (sections[j].name == s.name && ok) diags.push_back({s.line, "duplicate section [" + s.name + "]"});
    }

    const Section* run = find("run");
    if (!run) {
        diags.push_back({0, "missing required section [run]"});
    } else {
        guarded([&] {
            check_keys(*run, {"mode", "id", "seed", "gated", "output"});
            const Entry& m = require(*run, "mode");
            auto mode = parse_mode(m.value);
            if (!mode) throw ParseError(m.line, "unknown mode '" + m.value + "' (expected verify, meanvalue, extremal, sweep, compare)");
            cfg.mode = *mode;
        });
        guarded([&] {
            if (const Entry* e = run->find("id")) {
                if (e->value.empty() || e->value.find_first_of(",\"") != std::string::npos)
                    throw ParseError(e->line, "run id must be nonempty and free of commas and quotes");
                cfg.id = e->value;
            }
        });
        guarded([&] {
            if (const Entry* e = run->find("seed"))
                cfg.seed = static_cast<std::uint64_t>(detail::parse_integer(*e, 0, (1LL << 53)));
        });
        guarded([&] {
            if (const Entry* e = run->find("gated")) cfg.gated = detail::parse_bool(*e);
        });
        guarded([&] {
            if (const Entry* e = run->find("output")) cfg.output = e->value;
        });
    }
    const bool needs_domain = cfg.mode != Mode::compare;

    if (const Section* s = find("domain")) {
        guarded([&] { cfg.domain = Domain::from_section(*s); });
    } else if (needs_domain && run) {
        diags.push_back({0, "missing required section [domain]"});
    }
    if (const Section* s = find("field")) guarded([&] { cfg.field = field_from_section(*s, cfg.seed); });

    if (const Section* s = find("data")) {
        guarded([&] {
            check_keys(*s, {"kind", "analytic", "solve", "scale", "cos", "sin", "count", "degree"});
            auto& d = cfg.data;
            if (const Entry* k = s->find("kind")) {
                if (k->value == "reference") d.kind = DataKind::reference;
                else if (k->value == "fourier") d.kind = DataKind::fourier;
                else if (k->value == "random") d.kind = DataKind::random;
                else throw ParseError(k->line, "unknown data kind '" + k->value + "' (expected reference, fourier, random)");
            } else if (s->has("cos") || s->has("sin")) {
                d.kind = DataKind::fourier;
            } else if (s->has("count") || s->has("degree")) {
                d.kind = DataKind::random;
            }
            if (d.kind == DataKind::reference) {
                const Entry& a = require(*s, "analytic");
                try {
                    d.analytic = Analytic::parse(a.value);
                } catch (const SolverError& e) {
                    throw ParseError(a.line, e.what());
                }
                if (const Entry* e = s->find("solve")) d.solve = detail::parse_bool(*e);
                if (const Entry* e = s->find("scale")) d.scale = entry_number(*e);
                if (d.scale != 1.0 && d.solve)
                    throw ParseError(s->find("scale")->line, "scale applies only with solve = false");
            } else if (d.kind == DataKind::fourier) {
                if (const Entry* e = s->find("cos")) d.fourier.cos_coeffs = entry_numbers(*e);
                if (const Entry* e = s->find("sin")) d.fourier.sin_coeffs = entry_numbers(*e);
                if (d.fourier.cos_coeffs.empty() && d.fourier.sin_coeffs.empty())
                    throw ParseError(s->line, "fourier data needs 'cos' or 'sin' coefficients");
            } else {
                if (const Entry* e = s->find("count")) d.count = static_cast<int>(detail::parse_integer(*e, 1, 100000));
                if (const Entry* e = s->find("degree")) d.degree = static_cast<int>(detail::parse_integer(*e, 1, 12));
            }
        });
    } else if (run && (cfg.mode == Mode::verify || cfg.mode == Mode::sweep || cfg.mode == Mode::meanvalue)) {
        diags.push_back({0, "missing required section [data]"});
    }

    if (const Section* s = find("inequality")) {
        guarded([&] { check_keys(*s, {"alpha", "p", "geometry", "tolerance"}); });
        guarded([&] {
            if (const Entry* e = s->find("alpha")) {
                cfg.alpha = entry_number(*e);
                if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw ParseError(e->line, "alpha must lie in (0,1]");
            }
        });
        guarded([&] {
            if (const Entry* e = s->find("p")) {
                cfg.p = entry_numbers(*e);
                if (cfg.p.empty()) throw ParseError(e->line, "p list is empty");
                for (double v : cfg.p)
                    if (!(v >= 1.0)) throw ParseError(e->line, "p values must lie in [1, inf)");
            }
        });
        guarded([&] {
            if (const Entry* e = s->find("geometry")) {
                if (e->value != "auto" && e->value != "ball" && e->value != "smooth" && e->value != "cone" &&
                    e->value != "john")
                    throw ParseError(e->line, "geometry must be auto, ball, smooth, cone or john");
                cfg.geometry = e->value;
            }
        });
        guarded([&] {
            if (const Entry* e = s->find("tolerance")) {
                cfg.tolerance = entry_number(*e);
                if (!(cfg.tolerance >= 0.0)) throw ParseError(e->line, "tolerance must be nonnegative");
            }
        });
    }

    if (const Section* s = find("mesh")) {
        guarded([&] {
            check_keys(*s, {"h"});
            if (const Entry* e = s->find("h")) {
                cfg.h = entry_numbers(*e);
                if (cfg.h.empty()) throw ParseError(e->line, "h list is empty");
                for (std::size_t i = 0; i < cfg.h.size(); ++i) {
                    if (!(cfg.h[i] > 0.0)) throw ParseError(e->line, "mesh sizes must be positive");
                    if (i > 0 && !(cfg.h[i] < cfg.h[i - 1])) throw ParseError(e->line, "h list must be strictly decreasing");
                }
                if (cfg.domain) {
                    double d = diameter_and_measure(*cfg.domain).diameter;
                    if (!(cfg.h.front() < d / 4)) throw ParseError(e->line, "mesh size must be below a quarter of the diameter");
                }
            }
        });
    }

    if (const Section* s = find("meanvalue")) {
        guarded([&] {
            check_keys(*s, {"centers", "radii"});
            if (const Entry* e = s->find("centers")) {
                auto v = entry_numbers(*e);
                if (v.empty() || v.size() % 2 != 0) throw ParseError(e->line, "centers expects x y pairs");
                cfg.centers.clear();
                for (std::size_t i = 0; i < v.size(); i += 2) cfg.centers.push_back({v[i], v[i + 1]});
                if (cfg.domain)
                    for (auto c : cfg.centers)
                        if (!cfg.domain->strictly_inside(c)) throw ParseError(e->line, "center lies outside the domain");
            }
            if (const Entry* e = s->find("radii")) {
                cfg.radii = entry_numbers(*e);
                if (cfg.radii.empty()) throw ParseError(e->line, "radii list is empty");
                for (std::size_t i = 0; i < cfg.radii.size(); ++i)
                    if (!(cfg.radii[i] > 0.0) || (i > 0 && !(cfg.radii[i] > cfg.radii[i - 1])))
                        throw ParseError(e->line, "radii must be positive and strictly increasing");
            }
        });
    }

    if (const Section* s = find("extremal")) {
        guarded([&] {
            check_keys(*s, {"degree", "population", "iterations", "h"});
            auto& x = cfg.extremal;
            if (const Entry* e = s->find("degree")) x.degree = static_cast<int>(detail::parse_integer(*e, 1, 12));
            if (const Entry* e = s->find("population")) x.population = static_cast<int>(detail::parse_integer(*e, 2, 100000));
            if (const Entry* e = s->find("iterations")) x.iterations = static_cast<int>(detail::parse_integer(*e, 0, 1000000));
            if (const Entry* e = s->find("h")) {
                x.h = entry_number(*e);
                if (!(x.h > 0.0)) throw ParseError(e->line, "mesh size must be positive");
            }
        });
    }

    if (const Section* s = find("compare")) {
        guarded([&] {
            check_keys(*s, {"inputs"});
            cfg.compare_inputs = split_ws(require(*s, "inputs").value);
        });
    }
    if (run && cfg.mode == Mode::compare && cfg.compare_inputs.size() < 2)
        diags.push_back({0, "compare mode needs [compare] inputs with at least two CSV paths"});

    if (!diags.empty()) throw ConfigError(std::move(diags));
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{0, "cannot open configuration '" + path + "'"}});
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentConfig cfg = parse_config(ss.str());
    // compare inputs are relative to the configuration file
    auto base = std::filesystem::path(path).parent_path();
    for (auto& in_path : cfg.compare_inputs)
        if (std::filesystem::path(in_path).is_relative()) in_path = (base / in_path).lexically_normal().string();
    return cfg;
}

} // namespace oscbound::harness
