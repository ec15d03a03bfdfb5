#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace comapipe::svg {

struct Series {
    std::string label;
    std::string color; // any SVG color token
    std::vector<std::pair<double, double>> points;
};

struct ChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 640;
    int height = 420;
    std::optional<double> vline_x;  // dashed vertical marker (e.g. FPR cap)
    bool diagonal = false;          // y = x reference line
    std::optional<std::pair<double, double>> x_range; // default: data extent
    std::optional<std::pair<double, double>> y_range;
};

// Polyline chart with axes, ticks and a legend. Pure string generation;
// no external assets, so the output renders anywhere.
std::string line_chart(const std::vector<Series>& series, const ChartOptions& opts);

// Horizontal bars in the given order (callers sort beforehand).
std::string bar_chart(const std::vector<std::string>& names, const std::vector<double>& values,
                      const ChartOptions& opts);

// Row-major matrix as colored cells; row 0 is drawn at the bottom so an
// ascending frequency axis reads upward. Values clamp to [vmin, vmax].
std::string heatmap(const std::vector<std::vector<double>>& rows, double vmin, double vmax,
                    const ChartOptions& opts);

} // namespace comapipe::svg
