#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace oscbound;
using namespace oscbound::harness;
using namespace testing_support;

namespace {

const char* minimal = R"([run]
mode = verify

[domain]
kind = disk

[field]
kind = identity

[data]
analytic = linear 1 0 0
)";

std::vector<Diagnostic> diagnostics_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.diagnostics();
    }
    return {};
}

RunOptions quiet() {
    RunOptions o;
    o.write_files = false;
    o.log = nullptr;
    o.workers = 2;
    return o;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("oscbound_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace

TEST(Config, MinimalDefaults) {
    auto cfg = parse_config(minimal);
    EXPECT_EQ(cfg.mode, Mode::verify);
    ASSERT_EQ(cfg.h.size(), 1u);
    EXPECT_EQ(cfg.h[0], 0.02);
    ASSERT_EQ(cfg.p.size(), 1u);
    EXPECT_EQ(cfg.p[0], 2.0);
    EXPECT_EQ(cfg.alpha, 1.0);
    EXPECT_TRUE(cfg.is_gated());
    EXPECT_TRUE(cfg.domain->is_disk());
}

TEST(Config, AlphaOutOfRange) {
    auto d = diagnostics_of(std::string(minimal) + "\n[inequality]\nalpha = 1.5\n");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].message, "alpha must lie in (0,1]");
    EXPECT_EQ(d[0].line, 14);
    EXPECT_EQ(d[0].str(), "line 14: alpha must lie in (0,1]");
}

TEST(Config, SeveralProblemsReportedTogether) {
    auto d = diagnostics_of(R"([run]
mode = verify
colour = blue

[domain]
kind = disk
radius = abc

[data]
analytic = linear 1 0 0

[mesh]
h = 0.01 0.02
)");
    ASSERT_GE(d.size(), 3u);
    std::set<int> lines;
    for (const auto& x : d) lines.insert(x.line);
    EXPECT_TRUE(lines.count(3));  // unknown key
    EXPECT_TRUE(lines.count(7));  // malformed number
    EXPECT_TRUE(lines.count(13)); // not decreasing
}

TEST(Config, MissingSections) {
    auto d = diagnostics_of("[run]\nmode = verify\n");
    std::set<std::string> msgs;
    for (const auto& x : d) msgs.insert(x.message);
    EXPECT_TRUE(msgs.count("missing required section [domain]"));
    EXPECT_TRUE(msgs.count("missing required section [data]"));
    EXPECT_FALSE(diagnostics_of("[domain]\nkind = disk\n").empty());
}

TEST(Config, UnknownModeAndSection) {
    auto d = diagnostics_of("[run]\nmode = dance\n[domain]\nkind = disk\n[data]\nanalytic = linear 1 0 0\n[extra]\nx = 1\n");
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0].line, 7);
    EXPECT_EQ(d[1].line, 2);
}

TEST(Config, VariableFieldIsExploratoryByDefault) {
    auto cfg = parse_config(R"([run]
mode = verify
[domain]
kind = disk
[field]
kind = checkerboard
cell = 0.2
even = 1 1
odd = 4 4
[data]
analytic = linear 1 0 0
)");
    EXPECT_FALSE(cfg.is_gated());
}

TEST(Config, SweepPlansCartesianProduct) {
    auto cfg = parse_config(R"([run]
mode = sweep
id = s
[domain]
kind = disk
[data]
analytic = harmonic-poly re 3
[inequality]
p = 1 2 4
[mesh]
h = 0.08 0.04 0.02
)");
    auto plan = plan_runs(cfg);
    ASSERT_EQ(plan.size(), 9u);
    EXPECT_EQ(plan.front().run_id, "s-0001");
    EXPECT_EQ(plan.back().run_id, "s-0009");
    std::set<std::pair<double, double>> combos;
    for (const auto& r : plan) combos.insert({r.p, r.h});
    EXPECT_EQ(combos.size(), 9u);
}

TEST(Csv, QuotingRoundTrip) {
    std::vector<std::string> cells = {"a", "b,c", "say \"hi\"", ""};
    EXPECT_EQ(csv_split(csv_join(cells)), cells);
    auto t = parse_csv("x,y\n1,\"2,3\"\n");
    EXPECT_EQ(t.cell(0, "y"), "2,3");
    EXPECT_DOUBLE_EQ(t.number(0, "x"), 1.0);
    EXPECT_THROW(parse_csv("x,y\n1\n"), Error);
}

TEST(Svg, WellFormedChart) {
    Chart c{"t<1>", "h", "slack", true, true, {{"s", {0.1, 0.01}, {0.5, 0.4}, true}}, {{0.05, 0.45, "m"}}, {1.0}};
    auto svg = render_svg(c);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("t&lt;1&gt;"), std::string::npos);
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
}

TEST(Compare, ObservedOrderAndTrend) {
    auto make = [](double h, double slack, double err) {
        CsvTable t;
        t.header = {"kind", "alpha", "p", "c", "C", "domain", "field", "data", "geometry", "h", "slack", "l2_error", "status"};
        t.rows.push_back({"ball", "1", "2", "1", "1", "disk", "identity", "d", "ball", format_double(h), format_double(slack),
                          format_double(err), "ok"});
        return t;
    };
    auto s = compare_tables({make(0.08, 0.5, 6.4e-3), make(0.04, 0.49, 1.6e-3), make(0.02, 0.48, 4e-4)});
    ASSERT_EQ(s.rows.size(), 1u);
    EXPECT_NEAR(s.min_order, 2.0, 1e-12);
    EXPECT_EQ(s.rows[0].slack_trend, "non-increasing");
    EXPECT_FALSE(s.rows[0].warning);

    auto up = compare_tables({make(0.08, 0.5, 1e-3), make(0.04, 0.6, 5e-4)});
    EXPECT_TRUE(up.rows[0].warning);
    EXPECT_EQ(up.warnings, 1u);

    auto same = compare_tables({make(0.04, 0.5, 1e-3), make(0.04, 0.5, 1e-3)});
    EXPECT_EQ(same.rows[0].slack_trend, "no refinement");
    EXPECT_TRUE(std::isnan(same.min_order));

    auto other = make(0.02, 0.5, 1e-3);
    other.rows[0][2] = "4";
    EXPECT_THROW(compare_tables({make(0.04, 0.5, 1e-3), other}), Error);
    EXPECT_THROW(compare_tables({make(0.04, 0.5, 1e-3)}), Error);
}

TEST(Runner, CanonicalVerify) {
    auto cfg = parse_config(minimal);
    auto out = run(cfg, quiet());
    EXPECT_EQ(out.exit_code, 0);
    ASSERT_EQ(out.verify.size(), 1u);
    const auto& r = out.verify[0].report;
    EXPECT_NEAR(r.slack, 1 / std::sqrt(2.0), 1e-3);
    EXPECT_EQ(out.verify[0].status, "ok");
}

TEST(Runner, GatedFailureSetsExitCode) {
    auto cfg = parse_config(std::string(minimal) + "[inequality]\ntolerance = 0\n");
    cfg.tolerance = -0.5; // slack 0.707 > 0.5
    auto out = run(cfg, quiet());
    EXPECT_EQ(out.gated_failures, 1u);
    EXPECT_EQ(out.exit_code, 1);
    cfg.gated = false;
    EXPECT_EQ(run(cfg, quiet()).exit_code, 0);
}

TEST(Runner, ErrorsRecordedInStatus) {
    auto cfg = parse_config(R"([run]
mode = verify
[domain]
kind = polygon
vertices = 0 0 1 0 1 1 0 1
[data]
analytic = linear 1 0 0
[inequality]
geometry = smooth
[mesh]
h = 0.1
)");
    auto out = run(cfg, quiet());
    ASSERT_EQ(out.verify.size(), 1u);
    EXPECT_EQ(out.verify[0].status.rfind("error", 0), 0u);
    EXPECT_EQ(out.exit_code, 1);
}

TEST(Runner, MeanValueAverages) {
    auto cfg = parse_config(R"([run]
mode = meanvalue
[domain]
kind = disk
[data]
analytic = squared-distance 0 0
solve = false
[mesh]
h = 0.02
[meanvalue]
centers = 0 0
radii = 0.2 0.4 0.6
)");
    auto out = run(cfg, quiet());
    EXPECT_EQ(out.exit_code, 0);
    ASSERT_EQ(out.meanvalue.size(), 1u);
    const double want[] = {0.02, 0.08, 0.18};
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(out.meanvalue[0].rows[k].average, want[k], 1e-4);
}

TEST(Runner, DeterministicFiles) {
    std::string text = R"([run]
mode = sweep
id = det
seed = 5
[domain]
kind = disk
[data]
count = 3
degree = 6
[inequality]
p = 1 3
[mesh]
h = 0.1 0.05
)";
    auto cfg = parse_config(text);
    auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
    RunOptions oa = quiet(), ob = quiet();
    oa.write_files = ob.write_files = true;
    oa.out_dir = a.string();
    ob.out_dir = b.string();
    oa.workers = 1;
    ob.workers = 3;
    run(cfg, oa);
    run(cfg, ob);
    for (const char* f : {"inequality.csv", "norms.csv", "refinement.csv", "slack_vs_h.svg"}) {
        auto ta = read_csv((a / "inequality.csv").string()).str();
        std::ifstream fa(a / f), fb(b / f);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        EXPECT_FALSE(sa.str().empty()) << f;
        EXPECT_EQ(sa.str(), sb.str()) << f;
    }
    auto table = read_csv((a / "inequality.csv").string());
    EXPECT_EQ(table.rows.size(), 12u);
    // every row echoes the parameters needed to re-run it
    for (const char* col : {"alpha", "p", "h", "domain", "field", "data", "seed", "geometry"})
        EXPECT_GE(table.column(col), 0) << col;
}

TEST(Runner, CompareFromFiles) {
    auto dir = scratch_dir("cmp");
    std::vector<std::string> paths;
    for (double h : {0.08, 0.04, 0.02}) {
        auto cfg = parse_config(std::string(R"([run]
mode = verify
[domain]
kind = disk
[data]
analytic = harmonic-poly re 3
[mesh]
h = )") + format_double(h) + "\n");
        RunOptions o = quiet();
        o.write_files = true;
        o.out_dir = (dir / format_double(h)).string();
        run(cfg, o);
        paths.push_back((dir / format_double(h) / "inequality.csv").string());
    }
    auto s = compare_runs(paths);
    ASSERT_EQ(s.rows.size(), 1u);
    EXPECT_GE(s.min_order, 1.5);
    EXPECT_EQ(s.rows[0].h.size(), 3u);

    auto same = compare_runs({paths[0], paths[0]});
    EXPECT_EQ(same.rows[0].slack_trend, "no refinement");
}
