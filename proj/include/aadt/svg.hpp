#pragma once

#include <span>
#include <string>
#include <vector>

namespace aadt {

// Minimal self-contained SVG emitter for batch figures (no external assets).
class SvgCanvas {
public:
    SvgCanvas(double width, double height, std::string title = "");

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, double opacity = 1.0);
    void circle(double cx, double cy, double r, const std::string& fill, double opacity = 1.0);
    void rect(double x, double y, double w, double h, const std::string& fill,
              double opacity = 1.0);
    void polyline(std::span<const double> xs, std::span<const double> ys,
                  const std::string& stroke, double width = 1.5);
    void text(double x, double y, const std::string& s, double size = 12.0,
              const std::string& anchor = "start");

    std::string finish() const;

private:
    double width_, height_;
    std::string body_;
};

struct PlotFrame {
    double margin = 55.0;
    double width = 720.0;
    double height = 480.0;
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;

    double px(double x) const;
    double py(double y) const;
    void fit(std::span<const double> xs, std::span<const double> ys);
    void draw_axes(SvgCanvas& svg, const std::string& xlabel, const std::string& ylabel) const;
};

// figure builders used by the CLI

std::string fig_error_scatter(std::span<const double> y_true, std::span<const double> lower,
                              std::span<const double> median, std::span<const double> upper,
                              const std::string& title);

std::string fig_coord_scatter(std::span<const double> xs, std::span<const double> ys,
                              std::span<const double> values, const std::string& title,
                              bool quintile_classes);

std::string fig_density(std::span<const double> values, const std::string& title,
                        const std::string& xlabel, int bins = 40);

std::string fig_regression_scatter(std::span<const double> x, std::span<const double> y,
                                   double slope, double intercept, const std::string& title,
                                   const std::string& xlabel, const std::string& ylabel);

// n/5 +- 1 class assignment by sorted rank; returns class index 0..4 per value
std::vector<int> quintile_classes(std::span<const double> values);

}  // namespace aadt
