#include "netfx/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "netfx/error.hpp"

namespace netfx {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

} // namespace

std::string render_line_plot(const SvgPlotSpec& spec, const std::vector<SvgSeries>& series) {
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_min = x_min;
    double y_max = -x_min;
    auto tx = [&](double x) { return spec.log_x ? std::log10(x) : x; };
    auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw ConfigError("svg series length mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (spec.log_x && s.x[i] <= 0.0) throw ConfigError("log axis needs positive x");
            if (spec.log_y && s.y[i] <= 0.0) continue; // skip nonpositive points on log axes
            x_min = std::min(x_min, tx(s.x[i]));
            x_max = std::max(x_max, tx(s.x[i]));
            y_min = std::min(y_min, ty(s.y[i]));
            y_max = std::max(y_max, ty(s.y[i]));
        }
    }
    if (!(x_min < x_max)) { x_min -= 0.5; x_max += 0.5; }
    if (!(y_min < y_max)) { y_min -= 0.5; y_max += 0.5; }
    const double x_pad = 0.05 * (x_max - x_min);
    const double y_pad = 0.08 * (y_max - y_min);
    x_min -= x_pad; x_max += x_pad;
    y_min -= y_pad; y_max += y_pad;

    const double left = 70, right = 150, top = 40, bottom = 50;
    const double plot_w = spec.width - left - right;
    const double plot_h = spec.height - top - bottom;
    auto px = [&](double x) { return left + (tx(x) - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return top + (y_max - ty(y)) / (y_max - y_min) * plot_h; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
        << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << spec.title << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";

    // four ticks per axis in transformed coordinates
    for (int t = 0; t <= 3; ++t) {
        const double fx = x_min + (x_max - x_min) * t / 3.0;
        const double fy = y_min + (y_max - y_min) * t / 3.0;
        const double sx = left + plot_w * t / 3.0;
        const double sy = top + plot_h - plot_h * t / 3.0;
        const double label_x = spec.log_x ? std::pow(10.0, fx) : fx;
        const double label_y = spec.log_y ? std::pow(10.0, fy) : fy;
        out << "<text x=\"" << sx << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\">" << num(label_x) << "</text>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">"
            << num(label_y) << "</text>\n";
        out << "<line x1=\"" << sx << "\" y1=\"" << top + plot_h << "\" x2=\"" << sx << "\" y2=\""
            << top + plot_h + 5 << "\" stroke=\"#444\"/>\n";
        out << "<line x1=\"" << left - 5 << "\" y1=\"" << sy << "\" x2=\"" << left << "\" y2=\""
            << sy << "\" stroke=\"#444\"/>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << spec.height - 10
        << "\" text-anchor=\"middle\">" << spec.x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << top + plot_h / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << top + plot_h / 2 << ")\">"
        << spec.y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::ostringstream points;
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (spec.log_y && series[s].y[i] <= 0.0) continue;
            points << px(series[s].x[i]) << "," << py(series[s].y[i]) << " ";
        }
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
            << points.str() << "\"/>\n";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (spec.log_y && series[s].y[i] <= 0.0) continue;
            out << "<circle cx=\"" << px(series[s].x[i]) << "\" cy=\"" << py(series[s].y[i])
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = top + 16.0 * (s + 1);
        out << "<line x1=\"" << left + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\""
            << left + plot_w + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + plot_w + 35 << "\" y=\"" << ly + 4 << "\">"
            << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace netfx
