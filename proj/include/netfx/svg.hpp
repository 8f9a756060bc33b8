#pragma once

#include <string>
#include <vector>

namespace netfx {

// Minimal batch SVG line plot: one polyline per series on log-log or semilog
// axes, a legend, and tick labels. No display dependencies.
struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgPlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = true;
    bool log_y = false;
    int width = 640;
    int height = 420;
};

std::string render_line_plot(const SvgPlotSpec& spec, const std::vector<SvgSeries>& series);

} // namespace netfx
