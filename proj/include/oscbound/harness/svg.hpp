#pragma once

// Minimal static line charts: axes, ticks, polylines, point markers, labels.

#include "../core.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace oscbound::harness {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
};

struct Marker {
    double x = 0.0, y = 0.0;
    std::string label;
};

struct Chart {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool logx = false;
    bool logy = false;
    std::vector<Series> series;
    std::vector<Marker> markers;
    std::vector<double> hlines; ///< horizontal reference lines (data coordinates)
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) { return format_fixed(v, 2); }

inline std::string tick_label(double v) {
    std::string s = format_double(v);
    if (s.size() > 8) s = format_fixed(v, 4);
    return s;
}

} // namespace detail

inline std::string render_svg(const Chart& chart) {
    constexpr double W = 640, H = 420, L = 70, R = 160, T = 40, B = 50;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    auto tx = [&](double v) { return chart.logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return chart.logy ? std::log10(v) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto take = [&](double x, double y) {
        if ((chart.logx && !(x > 0)) || (chart.logy && !(y > 0)) || !std::isfinite(x) || !std::isfinite(y)) return;
        x0 = std::min(x0, tx(x));
        x1 = std::max(x1, tx(x));
        y0 = std::min(y0, ty(y));
        y1 = std::max(y1, ty(y));
    };
    for (const auto& s : chart.series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) take(s.x[i], s.y[i]);
    for (const auto& m : chart.markers) take(m.x, m.y);
    for (double h : chart.hlines)
        if (std::isfinite(x0)) take(chart.logx ? std::pow(10.0, x0) : x0, h);
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) {
        double pad = std::max(0.5, std::abs(y0) * 0.05);
        y0 -= pad, y1 += pad;
    }
    double py = 0.05 * (y1 - y0);
    y0 -= py, y1 += py;
    auto sx = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
    auto sy = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(W) + "\" height=\"" +
                      detail::num(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + detail::num(W / 2 - R / 2 + L / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           detail::xml_escape(chart.title) + "</text>\n";
    svg += "<line x1=\"" + detail::num(L) + "\" y1=\"" + detail::num(H - B) + "\" x2=\"" + detail::num(W - R) +
           "\" y2=\"" + detail::num(H - B) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + detail::num(L) + "\" y1=\"" + detail::num(T) + "\" x2=\"" + detail::num(L) + "\" y2=\"" +
           detail::num(H - B) + "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double fx = x0 + (x1 - x0) * k / 4, fy = y0 + (y1 - y0) * k / 4;
        double vx = chart.logx ? std::pow(10.0, fx) : fx, vy = chart.logy ? std::pow(10.0, fy) : fy;
        double px = sx(vx), pyy = sy(vy);
        svg += "<line x1=\"" + detail::num(px) + "\" y1=\"" + detail::num(H - B) + "\" x2=\"" + detail::num(px) +
               "\" y2=\"" + detail::num(H - B + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + detail::num(px) + "\" y=\"" + detail::num(H - B + 18) + "\" text-anchor=\"middle\">" +
               detail::xml_escape(detail::tick_label(vx)) + "</text>\n";
        svg += "<line x1=\"" + detail::num(L - 5) + "\" y1=\"" + detail::num(pyy) + "\" x2=\"" + detail::num(L) +
               "\" y2=\"" + detail::num(pyy) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + detail::num(L - 8) + "\" y=\"" + detail::num(pyy + 4) + "\" text-anchor=\"end\">" +
               detail::xml_escape(detail::tick_label(vy)) + "</text>\n";
    }
    svg += "<text x=\"" + detail::num(L + (W - L - R) / 2) + "\" y=\"" + detail::num(H - 10) +
           "\" text-anchor=\"middle\">" + detail::xml_escape(chart.xlabel + (chart.logx ? " (log)" : "")) + "</text>\n";
    svg += "<text x=\"16\" y=\"" + detail::num(T + (H - T - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           detail::num(T + (H - T - B) / 2) + ")\">" + detail::xml_escape(chart.ylabel + (chart.logy ? " (log)" : "")) +
           "</text>\n";
    for (double h : chart.hlines) {
        if (chart.logy && !(h > 0)) continue;
        svg += "<line x1=\"" + detail::num(L) + "\" y1=\"" + detail::num(sy(h)) + "\" x2=\"" + detail::num(W - R) +
               "\" y2=\"" + detail::num(sy(h)) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        const char* color = palette[k % 8];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if ((chart.logx && !(s.x[i] > 0)) || (chart.logy && !(s.y[i] > 0))) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            pts += detail::num(sx(s.x[i])) + "," + detail::num(sy(s.y[i])) + " ";
            if (s.markers)
                svg += "<circle cx=\"" + detail::num(sx(s.x[i])) + "\" cy=\"" + detail::num(sy(s.y[i])) +
                       "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        if (k < 12)
            svg += "<text x=\"" + detail::num(W - R + 10) + "\" y=\"" + detail::num(T + 14 * k + 10) + "\" fill=\"" +
                   color + "\">" + detail::xml_escape(s.label) + "</text>\n";
    }
    for (const auto& m : chart.markers) {
        svg += "<circle cx=\"" + detail::num(sx(m.x)) + "\" cy=\"" + detail::num(sy(m.y)) +
               "\" r=\"5\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + detail::num(sx(m.x) + 8) + "\" y=\"" + detail::num(sy(m.y) - 8) + "\">" +
               detail::xml_escape(m.label) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace oscbound::harness
