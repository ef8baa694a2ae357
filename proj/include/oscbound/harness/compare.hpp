#pragma once

// Refinement summaries over inequality CSVs that differ only in the mesh size.

#include "csv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oscbound::harness {

struct RefinementRow {
    std::string key;
    std::vector<double> h;     ///< coarse to fine
    std::vector<double> slack; ///< matching h
    std::vector<double> l2;    ///< matching h; NaN when no closed form
    double l2_order = std::numeric_limits<double>::quiet_NaN();
    std::string slack_trend = "no refinement"; ///< non-increasing | increasing | no refinement
    bool warning = false;
};

struct RefinementSummary {
    std::vector<RefinementRow> rows;
    double min_order = std::numeric_limits<double>::quiet_NaN();
    std::size_t non_increasing = 0;
    std::size_t increasing = 0;
    std::size_t warnings = 0;

    static std::string csv_header() {
        return "key,levels,h_coarse,h_fine,l2_order,slack_coarse,slack_fine,slack_trend,warning";
    }
    std::string csv() const {
        std::string out = csv_header() + "\n";
        for (const auto& r : rows)
            out += csv_join({r.key, std::to_string(r.h.size()), format_double(r.h.front()), format_double(r.h.back()),
                             std::isnan(r.l2_order) ? "" : format_double(r.l2_order), format_double(r.slack.front()),
                             format_double(r.slack.back()), r.slack_trend, r.warning ? "1" : "0"}) +
                   "\n";
        return out;
    }
};

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (n * sxy - sx * sy) / den;
}

/// Slack trend under refinement: sign of the fitted slope of slack against -log h.
inline std::string slack_trend(const std::vector<double>& h, const std::vector<double>& slack) {
    if (h.size() < 2) return "no refinement";
    std::vector<double> level(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) level[i] = -std::log(h[i]);
    return fit_slope(level, slack) <= 0.0 ? "non-increasing" : "increasing";
}

/// Errors below this are solver round-off (exactly reproduced data) and carry no order.
inline constexpr double error_floor = 1e-8;

/// Observed convergence order: fitted slope of log(error) against log(h).
inline double observed_order(const std::vector<double>& h, const std::vector<double>& err) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (err[i] > error_floor && std::isfinite(err[i])) lx.push_back(std::log(h[i])), ly.push_back(std::log(err[i]));
    if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return fit_slope(lx, ly);
}

/// Rows match on every parameter column except h, run_id and the measured values.
inline RefinementSummary compare_tables(const std::vector<CsvTable>& tables, std::size_t min_tables = 2) {
    if (tables.size() < min_tables) throw Error("comparison needs at least two CSV tables");
    static const char* key_cols[] = {"kind", "alpha", "p", "c", "C", "domain", "field", "data", "geometry"};
    auto key_of = [](const CsvTable& t, std::size_t r) {
        std::string k;
        for (const char* c : key_cols) k += (k.empty() ? "" : "|") + t.cell(r, c);
        return k;
    };
    std::vector<std::set<std::string>> keysets;
    std::map<std::string, std::map<double, std::pair<double, double>, std::greater<>>> series;
    std::vector<std::string> order;
    for (const auto& t : tables) {
        for (const char* c : {"h", "slack", "l2_error", "status"})
            if (t.column(c) < 0) throw Error(std::string("CSV lacks column '") + c + "'");
        std::set<std::string> keys;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (t.cell(r, "status") != "ok") continue;
            std::string k = key_of(t, r);
            keys.insert(k);
            if (!series.count(k)) order.push_back(k);
            series[k][t.number(r, "h")] = {t.number(r, "slack"), t.number(r, "l2_error")};
        }
        keysets.push_back(std::move(keys));
    }
    for (std::size_t i = 1; i < keysets.size(); ++i)
        if (keysets[i] != keysets[0]) throw Error("mismatched configurations: the CSVs differ in more than the mesh size");

    RefinementSummary s;
    for (const auto& k : order) {
        RefinementRow row;
        row.key = k;
        for (const auto& [h, v] : series[k]) {
            row.h.push_back(h);
            row.slack.push_back(v.first);
            row.l2.push_back(v.second);
        }
        row.slack_trend = slack_trend(row.h, row.slack);
        if (row.h.size() >= 2) row.l2_order = observed_order(row.h, row.l2);
        row.warning = row.slack_trend == "increasing";
        if (row.slack_trend == "non-increasing") ++s.non_increasing;
        if (row.warning) ++s.increasing, ++s.warnings;
        if (!std::isnan(row.l2_order)) s.min_order = std::isnan(s.min_order) ? row.l2_order : std::min(s.min_order, row.l2_order);
        s.rows.push_back(std::move(row));
    }
    return s;
}

inline RefinementSummary compare_runs(const std::vector<std::string>& paths) {
    std::vector<CsvTable> tables;
    for (const auto& p : paths) tables.push_back(read_csv(p));
    return compare_tables(tables);
}

} // namespace oscbound::harness
