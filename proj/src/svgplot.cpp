#include "bhpc/svgplot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bhpc/csv.hpp"

namespace bhpc::svg {

namespace {

// Pixel coordinates with two fixed decimals: deterministic and compact.
std::string px(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    if (ec != std::errc()) throw std::runtime_error("svg: coordinate format failure");
    return std::string(buf, p);
}

std::string esc(const std::string& s) {
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

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

struct Range {
    double lo = 0.0, hi = 1.0;
};

Range finite_range(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
    if (lo == hi) return {lo - 0.5, hi + 0.5};
    return {lo, hi};
}

// Classic nice-ticks: step of the form {1,2,5} * 10^k covering the range.
std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    double span = hi - lo;
    double raw = span / std::max(1, target - 1);
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double norm = raw / mag;
    double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
    double first = std::ceil(lo / step) * step;
    std::vector<double> ticks;
    for (double t = first; t <= hi + 0.5 * step; t += step) {
        double v = (std::abs(t) < 1e-12 * step) ? 0.0 : t;
        ticks.push_back(v);
        if (ticks.size() > 20) break;
    }
    return ticks;
}

std::string tick_label(double v) { return format_double(v); }

struct Frame {
    int width, height;
    double ml = 64, mr = 16, mt = 34, mb = 46;  // margins
    Range xr, yr;
    double sx(double x) const { return ml + (x - xr.lo) / (xr.hi - xr.lo) * (width - ml - mr); }
    double sy(double y) const {
        return height - mb - (y - yr.lo) / (yr.hi - yr.lo) * (height - mt - mb);
    }
};

void open_svg(std::ostringstream& o, int w, int h) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
      << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
}

void draw_axes(std::ostringstream& o, const Frame& f, const std::string& title,
               const std::string& x_label, const std::string& y_label) {
    const double x0 = f.ml, x1 = f.width - f.mr;
    const double y0 = f.height - f.mb, y1 = f.mt;
    o << "<g stroke=\"#333333\" stroke-width=\"1\" fill=\"none\">"
      << "<path d=\"M" << px(x0) << " " << px(y1) << " L" << px(x0) << " " << px(y0) << " L"
      << px(x1) << " " << px(y0) << "\"/></g>\n";
    o << "<g font-family=\"monospace\" font-size=\"11\" fill=\"#333333\">\n";
    for (double t : nice_ticks(f.xr.lo, f.xr.hi)) {
        double x = f.sx(t);
        o << "<line x1=\"" << px(x) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x) << "\" y2=\""
          << px(y0 + 4) << "\" stroke=\"#333333\"/>";
        o << "<text x=\"" << px(x) << "\" y=\"" << px(y0 + 16)
          << "\" text-anchor=\"middle\">" << esc(tick_label(t)) << "</text>\n";
    }
    for (double t : nice_ticks(f.yr.lo, f.yr.hi)) {
        double y = f.sy(t);
        o << "<line x1=\"" << px(x0 - 4) << "\" y1=\"" << px(y) << "\" x2=\"" << px(x0)
          << "\" y2=\"" << px(y) << "\" stroke=\"#333333\"/>";
        o << "<text x=\"" << px(x0 - 7) << "\" y=\"" << px(y + 4)
          << "\" text-anchor=\"end\">" << esc(tick_label(t)) << "</text>\n";
    }
    o << "</g>\n";
    o << "<text x=\"" << px((x0 + x1) / 2) << "\" y=\"20\" text-anchor=\"middle\""
      << " font-family=\"monospace\" font-size=\"13\" fill=\"#111111\">" << esc(title)
      << "</text>\n";
    o << "<text x=\"" << px((x0 + x1) / 2) << "\" y=\"" << px(f.height - 10)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\""
      << " fill=\"#333333\">" << esc(x_label) << "</text>\n";
    o << "<text x=\"14\" y=\"" << px((y0 + y1) / 2) << "\" text-anchor=\"middle\""
      << " font-family=\"monospace\" font-size=\"12\" fill=\"#333333\""
      << " transform=\"rotate(-90 14 " << px((y0 + y1) / 2) << ")\">" << esc(y_label)
      << "</text>\n";
}

// Seven-stop blue-to-yellow color scale.
const double kStops[7][3] = {{68, 1, 84},    {71, 44, 122},  {59, 81, 139}, {44, 113, 142},
                             {33, 144, 141}, {94, 201, 98},  {253, 231, 37}};

std::string scale_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    double pos = t * 6.0;
    int i = std::min(5, static_cast<int>(pos));
    double f = pos - i;
    int r = static_cast<int>(std::lround(kStops[i][0] + f * (kStops[i + 1][0] - kStops[i][0])));
    int g = static_cast<int>(std::lround(kStops[i][1] + f * (kStops[i + 1][1] - kStops[i][1])));
    int b = static_cast<int>(std::lround(kStops[i][2] + f * (kStops[i + 1][2] - kStops[i][2])));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

std::string render(const LineChart& chart) {
    if (chart.series.empty()) throw std::invalid_argument("svg line chart: no series");
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const auto& s : chart.series) {
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("svg line chart: x/y length mismatch in " + s.label);
        if (!s.y_err.empty() && s.y_err.size() != s.y.size())
            throw std::invalid_argument("svg line chart: y_err length mismatch in " + s.label);
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            double e = s.y_err.empty() ? 0.0 : s.y_err[i];
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i] - e);
            yhi = std::max(yhi, s.y[i] + e);
        }
    }
    Frame f;
    f.width = chart.width;
    f.height = chart.height;
    f.xr = finite_range(xlo, xhi);
    Range yr = finite_range(ylo, yhi);
    double pad = 0.05 * (yr.hi - yr.lo);
    f.yr = {yr.lo - pad, yr.hi + pad};

    std::ostringstream o;
    open_svg(o, f.width, f.height);
    draw_axes(o, f, chart.title, chart.x_label, chart.y_label);
    for (size_t si = 0; si < chart.series.size(); ++si) {
        const auto& s = chart.series[si];
        const std::string color = kPalette[si % kPaletteSize];
        std::ostringstream path;
        bool pen_down = false;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                pen_down = false;
                continue;
            }
            path << (pen_down ? " L" : " M") << px(f.sx(s.x[i])) << " " << px(f.sy(s.y[i]));
            pen_down = true;
        }
        o << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"/>\n";
        if (!s.y_err.empty()) {
            o << "<g stroke=\"" << color << "\" stroke-width=\"1\">";
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.y_err[i]) || s.y_err[i] <= 0.0) continue;
                double x = f.sx(s.x[i]);
                o << "<line x1=\"" << px(x) << "\" y1=\"" << px(f.sy(s.y[i] - s.y_err[i]))
                  << "\" x2=\"" << px(x) << "\" y2=\"" << px(f.sy(s.y[i] + s.y_err[i]))
                  << "\"/>";
            }
            o << "</g>\n";
        }
        if (chart.markers) {
            o << "<g fill=\"" << color << "\">";
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                o << "<circle cx=\"" << px(f.sx(s.x[i])) << "\" cy=\"" << px(f.sy(s.y[i]))
                  << "\" r=\"2.5\"/>";
            }
            o << "</g>\n";
        }
        if (!s.label.empty()) {
            double lx = f.width - f.mr - 8;
            double ly = f.mt + 16 + 16 * static_cast<double>(si);
            o << "<text x=\"" << px(lx) << "\" y=\"" << px(ly) << "\" text-anchor=\"end\""
              << " font-family=\"monospace\" font-size=\"11\" fill=\"" << color << "\">"
              << esc(s.label) << "</text>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

std::string render(const Heatmap& map) {
    const size_t rows = map.values.size();
    if (rows == 0) throw std::invalid_argument("svg heatmap: empty grid");
    const size_t cols = map.values[0].size();
    for (const auto& r : map.values)
        if (r.size() != cols) throw std::invalid_argument("svg heatmap: ragged grid");
    if (cols == 0) throw std::invalid_argument("svg heatmap: empty grid");
    double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
    for (const auto& r : map.values)
        for (double v : r)
            if (std::isfinite(v)) {
                vlo = std::min(vlo, v);
                vhi = std::max(vhi, v);
            }
    Range vr = finite_range(vlo, vhi);

    Frame f;
    f.width = map.width;
    f.height = map.height;
    f.mr = 70;  // room for the color bar
    f.xr = finite_range(map.x0, map.x1);
    f.yr = finite_range(map.y0, map.y1);

    std::ostringstream o;
    open_svg(o, f.width, f.height);
    draw_axes(o, f, map.title, map.x_label, map.y_label);
    const double cw = (f.width - f.ml - f.mr) / static_cast<double>(cols);
    const double ch = (f.height - f.mt - f.mb) / static_cast<double>(rows);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) {
            double v = map.values[r][c];
            double t = std::isfinite(v) ? (v - vr.lo) / (vr.hi - vr.lo) : 0.0;
            double x = f.ml + cw * static_cast<double>(c);
            double y = f.height - f.mb - ch * static_cast<double>(r + 1);
            o << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\"" << px(cw + 0.5)
              << "\" height=\"" << px(ch + 0.5) << "\" fill=\"" << scale_color(t) << "\"/>\n";
        }
    // Color bar with min/max annotations.
    const double bx = f.width - f.mr + 14, bw = 14;
    const double by0 = f.height - f.mb, by1 = f.mt;
    const int bands = 32;
    for (int i = 0; i < bands; ++i) {
        double t0 = static_cast<double>(i) / bands;
        double y = by0 + (by1 - by0) * static_cast<double>(i + 1) / bands;
        o << "<rect x=\"" << px(bx) << "\" y=\"" << px(y) << "\" width=\"" << px(bw)
          << "\" height=\"" << px((by0 - by1) / bands + 0.5) << "\" fill=\"" << scale_color(t0)
          << "\"/>\n";
    }
    o << "<text x=\"" << px(bx + bw + 4) << "\" y=\"" << px(by0) << "\" font-family=\"monospace\""
      << " font-size=\"10\" fill=\"#333333\">" << esc(format_double(vr.lo)) << "</text>\n";
    o << "<text x=\"" << px(bx + bw + 4) << "\" y=\"" << px(by1 + 8)
      << "\" font-family=\"monospace\" font-size=\"10\" fill=\"#333333\">"
      << esc(format_double(vr.hi)) << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

void write_svg(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("svg: cannot open " + path);
    out << content;
    if (!out) throw std::runtime_error("svg: write failed for " + path);
}

}  // namespace bhpc::svg
