#include "aadt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace aadt {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

const char* kClassColors[5] = {"#1a9850", "#91cf60", "#fee08b", "#fc8d59", "#d73027"};

}  // namespace

SvgCanvas::SvgCanvas(double width, double height, std::string title)
    : width_(width), height_(height) {
    body_ += "<rect x=\"0\" y=\"0\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
             "\" fill=\"#ffffff\"/>\n";
    if (!title.empty())
        text(width / 2.0, 24.0, title, 16.0, "middle");
}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double width, double opacity) {
    body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" +
             fmt(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) +
             "\" stroke-opacity=\"" + fmt(opacity) + "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill, double opacity) {
    body_ += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(r) +
             "\" fill=\"" + fill + "\" fill-opacity=\"" + fmt(opacity) + "\"/>\n";
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill,
                     double opacity) {
    body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
             "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\" fill-opacity=\"" + fmt(opacity) +
             "\"/>\n";
}

void SvgCanvas::polyline(std::span<const double> xs, std::span<const double> ys,
                         const std::string& stroke, double width) {
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) +
             "\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
        body_ += fmt(xs[i]) + "," + fmt(ys[i]) + " ";
    body_ += "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& s, double size,
                     const std::string& anchor) {
    body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" + fmt(size) +
             "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + s + "</text>\n";
}

std::string SvgCanvas::finish() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
           "width=\"" +
           fmt(width_) + "\" height=\"" + fmt(height_) + "\" viewBox=\"0 0 " + fmt(width_) + " " +
           fmt(height_) + "\">\n" + body_ + "</svg>\n";
}

double PlotFrame::px(double x) const {
    double span = xmax - xmin;
    if (span <= 0.0) span = 1.0;
    return margin + (x - xmin) / span * (width - 2.0 * margin);
}

double PlotFrame::py(double y) const {
    double span = ymax - ymin;
    if (span <= 0.0) span = 1.0;
    return height - margin - (y - ymin) / span * (height - 2.0 * margin);
}

void PlotFrame::fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) return;
    auto [xa, xb] = std::minmax_element(xs.begin(), xs.end());
    auto [ya, yb] = std::minmax_element(ys.begin(), ys.end());
    xmin = *xa;
    xmax = *xb;
    ymin = *ya;
    ymax = *yb;
    double xpad = 0.05 * (xmax - xmin + 1e-9), ypad = 0.05 * (ymax - ymin + 1e-9);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;
}

void PlotFrame::draw_axes(SvgCanvas& svg, const std::string& xlabel,
                          const std::string& ylabel) const {
    svg.line(margin, height - margin, width - margin, height - margin, "#333333");
    svg.line(margin, margin, margin, height - margin, "#333333");
    for (int t = 0; t <= 4; ++t) {
        double fx = xmin + (xmax - xmin) * t / 4.0;
        double fy = ymin + (ymax - ymin) * t / 4.0;
        svg.line(px(fx), height - margin, px(fx), height - margin + 5, "#333333");
        svg.text(px(fx), height - margin + 18, fmt_tick(fx), 10.0, "middle");
        svg.line(margin - 5, py(fy), margin, py(fy), "#333333");
        svg.text(margin - 8, py(fy) + 4, fmt_tick(fy), 10.0, "end");
    }
    svg.text(width / 2.0, height - 12, xlabel, 12.0, "middle");
    svg.text(14, height / 2.0, ylabel, 12.0, "middle");
}

std::vector<int> quintile_classes(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<int> cls(values.size(), 0);
    const std::size_t n = values.size();
    for (std::size_t rank = 0; rank < n; ++rank)
        cls[order[rank]] = static_cast<int>(std::min<std::size_t>(rank * 5 / n, 4));
    return cls;
}

std::string fig_error_scatter(std::span<const double> y_true, std::span<const double> lower,
                              std::span<const double> median, std::span<const double> upper,
                              const std::string& title) {
    PlotFrame f;
    std::vector<double> all_y(lower.begin(), lower.end());
    all_y.insert(all_y.end(), upper.begin(), upper.end());
    all_y.insert(all_y.end(), y_true.begin(), y_true.end());
    f.fit(y_true, all_y);
    SvgCanvas svg(f.width, f.height, title);
    f.draw_axes(svg, "true value", "prediction interval");
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        svg.line(f.px(y_true[i]), f.py(lower[i]), f.px(y_true[i]), f.py(upper[i]), "#bbbbbb", 1.0,
                 0.6);
        svg.circle(f.px(y_true[i]), f.py(median[i]), 2.2, "#2166ac", 0.8);
    }
    svg.polyline(std::vector<double>{f.px(f.xmin), f.px(f.xmax)},
                 std::vector<double>{f.py(f.xmin), f.py(f.xmax)}, "#d6604d", 1.0);
    return svg.finish();
}

std::string fig_coord_scatter(std::span<const double> xs, std::span<const double> ys,
                              std::span<const double> values, const std::string& title,
                              bool use_quintiles) {
    PlotFrame f;
    f.fit(xs, ys);
    SvgCanvas svg(f.width, f.height, title);
    f.draw_axes(svg, "x", "y");
    if (use_quintiles) {
        auto cls = quintile_classes(values);
        for (std::size_t i = 0; i < xs.size(); ++i)
            svg.circle(f.px(xs[i]), f.py(ys[i]), 3.0, kClassColors[cls[i]], 0.85);
        static const char* labels[5] = {"very narrow", "narrow", "medium", "wide", "very wide"};
        for (int c = 0; c < 5; ++c) {
            svg.rect(f.width - 150, 40.0 + 18.0 * c, 12, 12, kClassColors[c]);
            svg.text(f.width - 133, 50.0 + 18.0 * c, labels[c], 10.0);
        }
    } else {
        auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        double span = *mx - *mn;
        if (span <= 0.0) span = 1.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double t = (values[i] - *mn) / span;
            int red = static_cast<int>(26 + t * (215 - 26));
            int green = static_cast<int>(152 - t * (152 - 48));
            int blue = static_cast<int>(80 - t * (80 - 39));
            char color[8];
            std::snprintf(color, sizeof(color), "#%02x%02x%02x", red, green, blue);
            svg.circle(f.px(xs[i]), f.py(ys[i]), 3.0, color, 0.85);
        }
    }
    return svg.finish();
}

std::string fig_density(std::span<const double> values, const std::string& title,
                        const std::string& xlabel, int bins) {
    if (values.empty()) throw std::invalid_argument("fig_density: empty input");
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    double lo = *mn, hi = *mx;
    if (hi <= lo) hi = lo + 1.0;
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * bins);
        counts[std::min(b, counts.size() - 1)] += 1.0;
    }
    double binw = (hi - lo) / bins;
    for (auto& c : counts) c /= static_cast<double>(values.size()) * binw;  // density

    std::vector<double> cx(counts.size()), cy(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b) {
        cx[b] = lo + (b + 0.5) * binw;
        cy[b] = counts[b];
    }
    PlotFrame f;
    f.fit(cx, cy);
    f.ymin = 0.0;
    SvgCanvas svg(f.width, f.height, title);
    f.draw_axes(svg, xlabel, "density");
    for (std::size_t b = 0; b < counts.size(); ++b) {
        double x0 = f.px(lo + b * binw), x1 = f.px(lo + (b + 1) * binw);
        svg.rect(x0, f.py(cy[b]), x1 - x0, f.py(0.0) - f.py(cy[b]), "#74add1", 0.7);
    }
    std::vector<double> px(cx.size()), py(cy.size());
    for (std::size_t b = 0; b < cx.size(); ++b) {
        px[b] = f.px(cx[b]);
        py[b] = f.py(cy[b]);
    }
    svg.polyline(px, py, "#2166ac", 1.5);
    return svg.finish();
}

std::string fig_regression_scatter(std::span<const double> x, std::span<const double> y,
                                   double slope, double intercept, const std::string& title,
                                   const std::string& xlabel, const std::string& ylabel) {
    PlotFrame f;
    f.fit(x, y);
    SvgCanvas svg(f.width, f.height, title);
    f.draw_axes(svg, xlabel, ylabel);
    for (std::size_t i = 0; i < x.size(); ++i)
        svg.circle(f.px(x[i]), f.py(y[i]), 2.5, "#2166ac", 0.7);
    svg.polyline(std::vector<double>{f.px(f.xmin), f.px(f.xmax)},
                 std::vector<double>{f.py(intercept + slope * f.xmin),
                                     f.py(intercept + slope * f.xmax)},
                 "#d6604d", 1.8);
    return svg.finish();
}

}  // namespace aadt
