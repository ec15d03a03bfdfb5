#include "comapipe/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "comapipe/errors.hpp"

namespace comapipe::svg {

namespace {

constexpr int kMarginLeft = 62;
constexpr int kMarginRight = 18;
constexpr int kMarginTop = 34;
constexpr int kMarginBottom = 48;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Frame {
    double x_lo, x_hi, y_lo, y_hi;
    int width, height;

    double px(double x) const {
        const double span = x_hi - x_lo;
        const double t = span == 0.0 ? 0.5 : (x - x_lo) / span;
        return kMarginLeft + t * (width - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        const double span = y_hi - y_lo;
        const double t = span == 0.0 ? 0.5 : (y - y_lo) / span;
        return height - kMarginBottom - t * (height - kMarginTop - kMarginBottom);
    }
};

std::string open_svg(int w, int h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
           "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " +
           std::to_string(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const std::string& anchor,
                 int size = 12, const std::string& extra = "") {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
           std::to_string(size) + "\" text-anchor=\"" + anchor + "\"" + extra + ">" + escape(s) +
           "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const std::string& stroke,
                 const std::string& extra = "") {
    return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
           num(y2) + "\" stroke=\"" + stroke + "\"" + extra + "/>\n";
}

// Axes, ticks, grid, title and axis labels shared by the chart kinds.
std::string chrome(const Frame& f, const ChartOptions& o) {
    std::string out;
    const double x0 = kMarginLeft, x1 = f.width - kMarginRight;
    const double y0 = f.height - kMarginBottom, y1 = kMarginTop;
    out += line(x0, y0, x1, y0, "black");
    out += line(x0, y0, x0, y1, "black");
    for (int i = 0; i <= 4; ++i) {
        const double tx = f.x_lo + (f.x_hi - f.x_lo) * i / 4.0;
        const double ty = f.y_lo + (f.y_hi - f.y_lo) * i / 4.0;
        const double px = f.px(tx), py = f.py(ty);
        out += line(px, y0, px, y0 + 4, "black");
        out += text(px, y0 + 17, tick_label(tx), "middle", 11);
        out += line(x0 - 4, py, x0, py, "black");
        out += text(x0 - 7, py + 4, tick_label(ty), "end", 11);
        if (i > 0) {
            out += line(px, y0, px, y1, "#dddddd", " stroke-width=\"0.5\"");
            out += line(x0, py, x1, py, "#dddddd", " stroke-width=\"0.5\"");
        }
    }
    if (!o.title.empty()) out += text((x0 + x1) / 2, 20, o.title, "middle", 14);
    if (!o.x_label.empty()) out += text((x0 + x1) / 2, f.height - 10, o.x_label, "middle");
    if (!o.y_label.empty())
        out += text(16, (y0 + y1) / 2, o.y_label, "middle",
                    12, " transform=\"rotate(-90 16 " + num((y0 + y1) / 2) + ")\"");
    return out;
}

Frame fit_frame(const std::vector<Series>& series, const ChartOptions& o) {
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (first) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                first = false;
            }
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (o.x_range) {
        x_lo = o.x_range->first;
        x_hi = o.x_range->second;
    }
    if (o.y_range) {
        y_lo = o.y_range->first;
        y_hi = o.y_range->second;
    }
    if (x_hi == x_lo) x_hi = x_lo + 1;
    if (y_hi == y_lo) y_hi = y_lo + 1;
    return {x_lo, x_hi, y_lo, y_hi, o.width, o.height};
}

// Five-stop dark-to-bright gradient for heatmap cells.
std::string color_of(double t) {
    static const int stops[5][3] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const int i = std::min(int(t), 3);
    const double f = t - i;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  int(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                  int(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                  int(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

} // namespace

std::string line_chart(const std::vector<Series>& series, const ChartOptions& opts) {
    bool any = false;
    for (const auto& s : series) any = any || !s.points.empty();
    if (!any) throw ArgumentError("chart needs at least one point");

    const Frame f = fit_frame(series, opts);
    std::string out = open_svg(opts.width, opts.height);
    out += chrome(f, opts);

    if (opts.diagonal) {
        const double lo = std::max(f.x_lo, f.y_lo), hi = std::min(f.x_hi, f.y_hi);
        if (hi > lo)
            out += line(f.px(lo), f.py(lo), f.px(hi), f.py(hi), "#999999",
                        " stroke-dasharray=\"4 3\"");
    }
    if (opts.vline_x && *opts.vline_x >= f.x_lo && *opts.vline_x <= f.x_hi)
        out += line(f.px(*opts.vline_x), f.py(f.y_lo), f.px(*opts.vline_x), f.py(f.y_hi),
                    "#cc3333", " stroke-dasharray=\"5 4\"");

    int legend_row = 0;
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        std::string pts;
        for (const auto& [x, y] : s.points) pts += num(f.px(x)) + "," + num(f.py(y)) + " ";
        out += "<polyline fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        if (!s.label.empty()) {
            const double lx = opts.width - kMarginRight - 130;
            const double ly = kMarginTop + 12 + 16 * legend_row++;
            out += line(lx, ly - 4, lx + 18, ly - 4, s.color, " stroke-width=\"2\"");
            out += text(lx + 24, ly, s.label, "start", 11);
        }
    }
    return out + "</svg>\n";
}

std::string bar_chart(const std::vector<std::string>& names, const std::vector<double>& values,
                      const ChartOptions& opts) {
    if (names.empty() || names.size() != values.size())
        throw ArgumentError("bar chart needs matching names and values");

    const int left = 170; // room for feature names
    const int w = opts.width, h = opts.height;
    const double v_max = std::max(1e-300, *std::max_element(values.begin(), values.end()));
    const double band = double(h - kMarginTop - kMarginBottom) / double(names.size());
    const double bar_h = std::max(2.0, band * 0.7);

    std::string out = open_svg(w, h);
    if (!opts.title.empty()) out += text((left + w) / 2.0, 20, opts.title, "middle", 14);
    if (!opts.x_label.empty()) out += text((left + w) / 2.0, h - 10, opts.x_label, "middle");
    out += line(left, h - kMarginBottom, left, kMarginTop, "black");
    for (int i = 0; i <= 4; ++i) {
        const double v = v_max * i / 4.0;
        const double px = left + (w - left - kMarginRight) * i / 4.0;
        out += line(px, h - kMarginBottom, px, h - kMarginBottom + 4, "black");
        out += text(px, h - kMarginBottom + 17, tick_label(v), "middle", 11);
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double y = kMarginTop + band * double(i) + (band - bar_h) / 2.0;
        const double bw = (w - left - kMarginRight) * std::max(0.0, values[i]) / v_max;
        out += "<rect x=\"" + std::to_string(left) + "\" y=\"" + num(y) + "\" width=\"" + num(bw) +
               "\" height=\"" + num(bar_h) + "\" fill=\"#3b528b\"/>\n";
        out += text(left - 6, y + bar_h / 2 + 4, names[i], "end", 10);
    }
    return out + "</svg>\n";
}

std::string heatmap(const std::vector<std::vector<double>>& rows, double vmin, double vmax,
                    const ChartOptions& opts) {
    if (rows.empty() || rows[0].empty()) throw ArgumentError("heatmap needs a non-empty matrix");
    if (!(vmax > vmin)) throw ArgumentError("heatmap needs vmax > vmin");
    const std::size_t n_rows = rows.size(), n_cols = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != n_cols) throw ArgumentError("heatmap rows differ in length");

    const int w = opts.width, h = opts.height;
    const double plot_w = w - kMarginLeft - kMarginRight;
    const double plot_h = h - kMarginTop - kMarginBottom;
    const double cw = plot_w / double(n_cols), ch = plot_h / double(n_rows);

    std::string out = open_svg(w, h);
    for (std::size_t r = 0; r < n_rows; ++r) {
        // row 0 at the bottom
        const double y = h - kMarginBottom - ch * double(r + 1);
        for (std::size_t c = 0; c < n_cols; ++c) {
            const double t = (rows[r][c] - vmin) / (vmax - vmin);
            out += "<rect x=\"" + num(kMarginLeft + cw * double(c)) + "\" y=\"" + num(y) +
                   "\" width=\"" + num(cw + 0.5) + "\" height=\"" + num(ch + 0.5) + "\" fill=\"" +
                   color_of(t) + "\"/>\n";
        }
    }
    if (!opts.title.empty()) out += text(w / 2.0, 20, opts.title, "middle", 14);
    if (!opts.x_label.empty()) out += text(w / 2.0, h - 10, opts.x_label, "middle");
    if (!opts.y_label.empty())
        out += text(16, h / 2.0, opts.y_label, "middle", 12,
                    " transform=\"rotate(-90 16 " + num(h / 2.0) + ")\"");
    return out + "</svg>\n";
}

} // namespace comapipe::svg
