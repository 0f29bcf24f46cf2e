#include "ccr/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "ccr/csv.hpp"

namespace ccr {

namespace {

constexpr double kPanelWidth = 360.0;
constexpr double kPanelHeight = 300.0;
constexpr double kMarginLeft = 62.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 34.0;
constexpr double kMarginBottom = 46.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
}

struct Series {
    std::vector<double> n;
    std::vector<double> mean;
    std::vector<double> lo;
    std::vector<double> hi;
};

}  // namespace

std::string render_mse_plot(const std::vector<SummaryRecord>& summaries) {
    if (summaries.empty()) {
        throw InvalidInputError("render_mse_plot: no summary rows");
    }

    // Panels keyed by (regime, delta); series keyed by estimator name.
    std::set<std::pair<int, double>> panel_keys;
    std::set<std::string> estimator_names;
    for (const auto& s : summaries) {
        panel_keys.insert({static_cast<int>(s.regime), s.delta});
        estimator_names.insert(s.estimator);
    }

    std::map<std::string, std::size_t> color_of;
    std::size_t color_idx = 0;
    for (const auto& name : estimator_names) {
        color_of[name] = color_idx++ % (sizeof(kPalette) / sizeof(kPalette[0]));
    }

    double y_min = std::numeric_limits<double>::infinity();
    double y_max = 0.0;
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = 0.0;
    for (const auto& s : summaries) {
        for (const double v : {s.mean_mse, s.q025, s.q975}) {
            if (std::isfinite(v) && v > 0.0) {
                y_min = std::min(y_min, v);
                y_max = std::max(y_max, v);
            }
        }
        x_min = std::min(x_min, static_cast<double>(s.n));
        x_max = std::max(x_max, static_cast<double>(s.n));
    }
    if (!(y_min < std::numeric_limits<double>::infinity())) {
        y_min = 1e-12;
        y_max = 1.0;
    }
    if (y_max <= y_min) y_max = y_min * 10.0;
    if (x_max <= x_min) x_max = x_min + 1.0;

    const double lx_min = std::log10(x_min);
    const double lx_max = std::log10(x_max);
    const double ly_min = std::log10(y_min);
    const double ly_max = std::log10(y_max);

    const std::size_t panels = panel_keys.size();
    const double total_width = kPanelWidth * static_cast<double>(panels);
    const double total_height = kPanelHeight;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(total_width) +
           "\" height=\"" + fmt(total_height) + "\" viewBox=\"0 0 " + fmt(total_width) + " " +
           fmt(total_height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    std::size_t panel_idx = 0;
    for (const auto& [regime_int, delta] : panel_keys) {
        const double ox = kPanelWidth * static_cast<double>(panel_idx);
        const double plot_x0 = ox + kMarginLeft;
        const double plot_x1 = ox + kPanelWidth - kMarginRight;
        const double plot_y0 = kMarginTop;
        const double plot_y1 = kPanelHeight - kMarginBottom;

        const auto x_of = [&](double n) {
            const double t = (std::log10(n) - lx_min) / std::max(lx_max - lx_min, 1e-12);
            return plot_x0 + t * (plot_x1 - plot_x0);
        };
        const auto y_of = [&](double v) {
            const double clamped = std::min(std::max(v, y_min), y_max);
            const double t = (std::log10(clamped) - ly_min) / std::max(ly_max - ly_min, 1e-12);
            return plot_y1 - t * (plot_y1 - plot_y0);
        };

        svg += "<rect x=\"" + fmt(plot_x0) + "\" y=\"" + fmt(plot_y0) + "\" width=\"" +
               fmt(plot_x1 - plot_x0) + "\" height=\"" + fmt(plot_y1 - plot_y0) +
               "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
        const DimRegime regime = static_cast<DimRegime>(regime_int);
        svg += "<text x=\"" + fmt((plot_x0 + plot_x1) / 2.0) + "\" y=\"" + fmt(plot_y0 - 12.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
               dim_regime_name(regime) + ", delta=" + fmt(delta) + "</text>\n";
        svg += "<text x=\"" + fmt((plot_x0 + plot_x1) / 2.0) + "\" y=\"" +
               fmt(plot_y1 + 32.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">n</text>\n";
        svg += "<text x=\"" + fmt(plot_x0 - 46.0) + "\" y=\"" +
               fmt((plot_y0 + plot_y1) / 2.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
               "transform=\"rotate(-90 " +
               fmt(plot_x0 - 46.0) + " " + fmt((plot_y0 + plot_y1) / 2.0) +
               ")\">MSE (log)</text>\n";
        svg += "<text x=\"" + fmt(plot_x0) + "\" y=\"" + fmt(plot_y1 + 16.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
               fmt(x_min) + "</text>\n";
        svg += "<text x=\"" + fmt(plot_x1) + "\" y=\"" + fmt(plot_y1 + 16.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
               fmt(x_max) + "</text>\n";
        svg += "<text x=\"" + fmt(plot_x0 - 6.0) + "\" y=\"" + fmt(plot_y1 + 4.0) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
               fmt(y_min) + "</text>\n";
        svg += "<text x=\"" + fmt(plot_x0 - 6.0) + "\" y=\"" + fmt(plot_y0 + 4.0) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
               fmt(y_max) + "</text>\n";

        // Collect this panel's series sorted by estimator name, points by n.
        std::map<std::string, Series> series;
        for (const auto& s : summaries) {
            if (static_cast<int>(s.regime) != regime_int || s.delta != delta) continue;
            Series& ser = series[s.estimator];
            ser.n.push_back(static_cast<double>(s.n));
            ser.mean.push_back(s.mean_mse);
            ser.lo.push_back(s.q025);
            ser.hi.push_back(s.q975);
        }
        for (auto& [name, ser] : series) {
            std::vector<std::size_t> order(ser.n.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return ser.n[a] < ser.n[b]; });
            const std::string color = kPalette[color_of[name]];

            std::string band;
            for (const std::size_t i : order) {
                if (!std::isfinite(ser.hi[i]) || ser.hi[i] <= 0.0) continue;
                band += fmt(x_of(ser.n[i])) + "," + fmt(y_of(ser.hi[i])) + " ";
            }
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                if (!std::isfinite(ser.lo[*it]) || ser.lo[*it] <= 0.0) continue;
                band += fmt(x_of(ser.n[*it])) + "," + fmt(y_of(ser.lo[*it])) + " ";
            }
            if (!band.empty()) {
                svg += "<polygon points=\"" + band + "\" fill=\"" + color +
                       "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
            }

            std::string line;
            for (const std::size_t i : order) {
                if (!std::isfinite(ser.mean[i]) || ser.mean[i] <= 0.0) continue;
                line += fmt(x_of(ser.n[i])) + "," + fmt(y_of(ser.mean[i])) + " ";
            }
            if (!line.empty()) {
                svg += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + color +
                       "\" stroke-width=\"1.8\"/>\n";
            }
            for (const std::size_t i : order) {
                if (!std::isfinite(ser.mean[i]) || ser.mean[i] <= 0.0) continue;
                svg += "<circle cx=\"" + fmt(x_of(ser.n[i])) + "\" cy=\"" +
                       fmt(y_of(ser.mean[i])) + "\" r=\"2.4\" fill=\"" + color + "\"/>\n";
            }
        }

        if (panel_idx == 0) {
            double ly = plot_y0 + 8.0;
            for (const auto& name : estimator_names) {
                const std::string color = kPalette[color_of[name]];
                svg += "<rect x=\"" + fmt(plot_x0 + 8.0) + "\" y=\"" + fmt(ly) +
                       "\" width=\"14\" height=\"4\" fill=\"" + color + "\"/>\n";
                svg += "<text x=\"" + fmt(plot_x0 + 26.0) + "\" y=\"" + fmt(ly + 5.0) +
                       "\" font-family=\"sans-serif\" font-size=\"11\">" + name + "</text>\n";
                ly += 15.0;
            }
        }
        ++panel_idx;
    }

    svg += "</svg>\n";
    return svg;
}

void write_mse_plot(const std::vector<SummaryRecord>& summaries, const std::string& path) {
    const std::string svg = render_mse_plot(summaries);
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace ccr
