#include "mscope/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mscope::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kPanelHeight = 320.0;
constexpr double kLeft = 70.0, kRight = 150.0, kTop = 40.0, kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
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

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void settle() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (lo == hi) lo -= 0.5, hi += 0.5;
    }
};

// One panel of axes, ticks and series at vertical offset `y0`.
std::string panel(double y0, const std::string& title, const std::string& x_label, const std::string& y_label,
                  const std::vector<Series>& series) {
    Range xr, yr;
    for (const auto& s : series) {
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(v);
    }
    xr.settle();
    yr.settle();
    const double pw = kWidth - kLeft - kRight;
    const double ph = kPanelHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return y0 + kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::string out;
    out += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"" + fmt(y0 + 22) +
           "\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) + "</text>\n";
    out += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(y0 + kTop) + "\" width=\"" + fmt(pw) + "\" height=\"" +
           fmt(ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = xr.lo + (xr.hi - xr.lo) * t / 4.0;
        const double yv = yr.lo + (yr.hi - yr.lo) * t / 4.0;
        out += "<line x1=\"" + fmt(px(xv)) + "\" y1=\"" + fmt(y0 + kTop + ph) + "\" x2=\"" + fmt(px(xv)) +
               "\" y2=\"" + fmt(y0 + kTop + ph + 5) + "\" stroke=\"#333\"/>\n";
        out += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(y0 + kTop + ph + 18) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + tick_label(xv) + "</text>\n";
        out += "<line x1=\"" + fmt(kLeft - 5) + "\" y1=\"" + fmt(py(yv)) + "\" x2=\"" + fmt(kLeft) + "\" y2=\"" +
               fmt(py(yv)) + "\" stroke=\"#333\"/>\n";
        out += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(py(yv) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + tick_label(yv) + "</text>\n";
    }
    out += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(y0 + kPanelHeight - 10) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + escape(x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + fmt(y0 + kTop + ph / 2) + "\" text-anchor=\"middle\" font-size=\"12\" " +
           "transform=\"rotate(-90 16 " + fmt(y0 + kTop + ph / 2) + ")\">" + escape(y_label) + "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        std::string points;
        for (std::size_t i = 0; i < std::min(series[s].x.size(), series[s].y.size()); ++i) {
            if (!std::isfinite(series[s].x[i]) || !std::isfinite(series[s].y[i])) continue;
            if (!points.empty()) points += ' ';
            points += fmt(px(series[s].x[i])) + "," + fmt(py(series[s].y[i]));
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" +
               points + "\"/>\n";
        const double ly = y0 + kTop + 14 + 18 * static_cast<double>(s);
        out += "<line x1=\"" + fmt(kWidth - kRight + 12) + "\" y1=\"" + fmt(ly) + "\" x2=\"" +
               fmt(kWidth - kRight + 32) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fmt(kWidth - kRight + 38) + "\" y=\"" + fmt(ly + 4) + "\" font-size=\"11\">" +
               escape(series[s].name) + "</text>\n";
    }
    return out;
}

std::string document(double height, const std::string& body) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(height) +
           "\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(height) + "\">\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body + "</svg>\n";
}

} // namespace

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series) {
    return document(kPanelHeight, panel(0.0, title, x_label, y_label, series));
}

std::string profile_chart(const std::string& title, const std::vector<Series>& id_series,
                          const std::vector<Series>& mapc_series) {
    return document(2 * kPanelHeight, panel(0.0, title + " - intrinsic dimension", "layer", "ID", id_series) +
                                          panel(kPanelHeight, title + " - MAPC", "layer", "MAPC", mapc_series));
}

std::string histogram_chart(const std::string& title, const Histogram& h) {
    const double pw = kWidth - kLeft - kRight;
    const double ph = kPanelHeight - kTop - kBottom;
    const std::size_t peak = h.counts.empty() ? 1 : std::max<std::size_t>(1, *std::max_element(h.counts.begin(), h.counts.end()));
    std::string body;
    body += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
            "</text>\n";
    body += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
            "\" fill=\"none\" stroke=\"#333\"/>\n";
    const double bw = h.counts.empty() ? pw : pw / static_cast<double>(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double bh = ph * static_cast<double>(h.counts[i]) / static_cast<double>(peak);
        body += "<rect x=\"" + fmt(kLeft + bw * static_cast<double>(i)) + "\" y=\"" + fmt(kTop + ph - bh) +
                "\" width=\"" + fmt(bw) + "\" height=\"" + fmt(bh) + "\" fill=\"#1f77b4\" stroke=\"white\"/>\n";
    }
    if (!h.bin_edges.empty()) {
        for (int t = 0; t <= 4; ++t) {
            const double x = kLeft + pw * t / 4.0;
            const double v = h.bin_edges.front() + (h.bin_edges.back() - h.bin_edges.front()) * t / 4.0;
            body += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kTop + ph + 18) +
                    "\" text-anchor=\"middle\" font-size=\"11\">" + tick_label(v) + "</text>\n";
        }
    }
    body += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(kTop + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
            std::to_string(peak) + "</text>\n";
    body += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kPanelHeight - 10) +
            "\" text-anchor=\"middle\" font-size=\"12\">principal curvature</text>\n";
    return document(kPanelHeight, body);
}

} // namespace mscope::svg
