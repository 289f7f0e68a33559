#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bhpc::svg {

/// One polyline; y_err, when present, adds symmetric error bars.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y_err;  ///< empty or same length as y
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    int width = 720;
    int height = 480;
    bool markers = false;  ///< draw small circles at data points
};

/// Dense row-major grid; row 0 is drawn at the bottom (y0 edge).
struct Heatmap {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::vector<double>> values;
    double x0 = 0.0, x1 = 1.0;
    double y0 = 0.0, y1 = 1.0;
    int width = 720;
    int height = 480;
};

/// Deterministic renderers: identical inputs yield byte-identical SVG text
/// (fixed palette, fixed tick algorithm, fixed number formatting).
std::string render(const LineChart& chart);
std::string render(const Heatmap& map);

void write_svg(const std::string& path, const std::string& content);

}  // namespace bhpc::svg
