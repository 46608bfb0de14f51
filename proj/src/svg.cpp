#include "srf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace srf {

namespace {

constexpr double kWidth = 860.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;  // legend strip
constexpr double kMarginTop = 44.0;
constexpr double kMarginBottom = 52.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0, hi = 1.0;

    void expand(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    double frac(double v) const { return (v - lo) / (hi - lo); }
};

double plot_x(const Axis& ax, double v) {
    return kMarginLeft + ax.frac(v) * (kWidth - kMarginLeft - kMarginRight);
}
double plot_y(const Axis& ax, double v) {
    return kHeight - kMarginBottom - ax.frac(v) * (kHeight - kMarginTop - kMarginBottom);
}

std::vector<double> linear_ticks(const Axis& ax, int want = 6) {
    const double span = ax.hi - ax.lo;
    const double raw = span / want;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    }
    std::vector<double> ticks;
    for (double v = std::ceil(ax.lo / step) * step; v <= ax.hi + 1e-12 * span; v += step) {
        ticks.push_back(v);
    }
    return ticks;
}

void open_svg(std::ostream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape(title) << "</text>\n";
}

void draw_frame(std::ostream& out, const Axis& x_axis, const Axis& y_axis,
                const std::string& x_label, const std::string& y_label, bool log_y) {
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
        << "\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
        << "\" stroke=\"#333\"/>\n";
    for (double tick : linear_ticks(x_axis)) {
        const double px = plot_x(x_axis, tick);
        out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\""
            << y0 + 4 << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << y0 + 17 << "\" text-anchor=\"middle\">"
            << num(tick) << "</text>\n";
    }
    for (double tick : linear_ticks(y_axis)) {
        const double py = plot_y(y_axis, tick);
        out << "<line x1=\"" << x0 - 4 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\""
            << py << "\" stroke=\"#333\"/>\n";
        out << "<line x1=\"" << x0 << "\" y1=\"" << py << "\" x2=\"" << x1 << "\" y2=\"" << py
            << "\" stroke=\"#eee\"/>\n";
        const std::string label = log_y ? ("1e" + num(tick)) : num(tick);
        out << "<text x=\"" << x0 - 7 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">"
            << label << "</text>\n";
    }
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" font-size=\"13\""
        << " transform=\"rotate(-90 18 " << (y0 + y1) / 2 << ")\">" << escape(y_label)
        << "</text>\n";
    out << "</g>\n";
}

void draw_marker(std::ostream& out, double px, double py, char marker,
                 const std::string& color) {
    switch (marker) {
        case 'x':
            out << "<path d=\"M" << px - 4 << ' ' << py - 4 << " L" << px + 4 << ' ' << py + 4
                << " M" << px - 4 << ' ' << py + 4 << " L" << px + 4 << ' ' << py - 4
                << "\" stroke=\"" << color << "\" stroke-width=\"1.6\"/>\n";
            break;
        case 's':
            out << "<rect x=\"" << px - 3.5 << "\" y=\"" << py - 3.5
                << "\" width=\"7\" height=\"7\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.4\"/>\n";
            break;
        case 't':
            out << "<path d=\"M" << px << ' ' << py - 4.5 << " L" << px + 4 << ' ' << py + 3.5
                << " L" << px - 4 << ' ' << py + 3.5 << " Z\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.4\"/>\n";
            break;
        default:
            out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3.4\" fill=\"none\""
                << " stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
}

void draw_legend(std::ostream& out, const std::vector<PlotSeries>& series) {
    const double lx = kWidth - kMarginRight + 14;
    double ly = kMarginTop + 8;
    out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (const auto& s : series) {
        draw_marker(out, lx, ly - 4, s.marker, s.color);
        out << "<text x=\"" << lx + 12 << "\" y=\"" << ly << "\">" << escape(s.label)
            << "</text>\n";
        ly += 20;
    }
    out << "</g>\n";
}

std::ofstream open_file(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

void write_scatter_svg(const std::filesystem::path& path, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series, bool log_y) {
    Axis x_axis{std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
    Axis y_axis = x_axis;
    std::vector<PlotSeries> drawn = series;
    for (auto& s : drawn) {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            double y = s.y[i];
            if (log_y) {
                if (!(y > 0.0)) continue;
                y = std::log10(y);
            }
            xs.push_back(s.x[i]);
            ys.push_back(y);
            x_axis.expand(s.x[i]);
            y_axis.expand(y);
        }
        s.x = std::move(xs);
        s.y = std::move(ys);
    }
    if (!(x_axis.lo <= x_axis.hi)) {
        x_axis = {0.0, 1.0};
        y_axis = {0.0, 1.0};
    }
    x_axis.finish();
    y_axis.finish();

    auto out = open_file(path);
    open_svg(out, title);
    draw_frame(out, x_axis, y_axis, x_label, log_y ? y_label + " (log scale)" : y_label, log_y);
    for (const auto& s : drawn) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            draw_marker(out, plot_x(x_axis, s.x[i]), plot_y(y_axis, s.y[i]), s.marker, s.color);
        }
    }
    draw_legend(out, series);
    out << "</svg>\n";
}

void write_bars_svg(const std::filesystem::path& path, const std::string& title,
                    const std::vector<std::string>& categories,
                    const std::vector<BarGroup>& groups) {
    static const char* kPalette[] = {"#3b6fb6", "#e08a2e", "#4a9a58", "#b65050",
                                     "#7d5ba6", "#5a5a5a"};
    Axis y_axis{0.0, 0.0};
    for (const auto& group : groups) {
        for (double v : group.values) y_axis.expand(v);
    }
    y_axis.finish();
    y_axis.lo = 0.0;

    Axis x_axis{0.0, static_cast<double>(groups.size())};

    auto out = open_file(path);
    open_svg(out, title);
    draw_frame(out, x_axis, y_axis, "", "count", false);
    const double group_width = (kWidth - kMarginLeft - kMarginRight) /
                               std::max<std::size_t>(1, groups.size());
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& group = groups[gi];
        const double base_x = kMarginLeft + static_cast<double>(gi) * group_width;
        const double bar_w = group_width * 0.8 / std::max<std::size_t>(1, categories.size());
        for (std::size_t ci = 0; ci < group.values.size(); ++ci) {
            const double x = base_x + group_width * 0.1 + static_cast<double>(ci) * bar_w;
            const double y = plot_y(y_axis, group.values[ci]);
            const double y0 = plot_y(y_axis, 0.0);
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w * 0.9
                << "\" height=\"" << y0 - y << "\" fill=\""
                << kPalette[ci % (sizeof(kPalette) / sizeof(kPalette[0]))] << "\"/>\n";
            out << "<text x=\"" << x + bar_w * 0.45 << "\" y=\"" << y - 4
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                << num(group.values[ci]) << "</text>\n";
        }
        out << "<text x=\"" << base_x + group_width / 2 << "\" y=\""
            << kHeight - kMarginBottom + 17
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << escape(group.label) << "</text>\n";
    }
    // category legend
    double ly = kMarginTop + 8;
    for (std::size_t ci = 0; ci < categories.size(); ++ci) {
        const double lx = kWidth - kMarginRight + 14;
        out << "<rect x=\"" << lx - 5 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\""
            << " fill=\"" << kPalette[ci % (sizeof(kPalette) / sizeof(kPalette[0]))] << "\"/>\n";
        out << "<text x=\"" << lx + 12 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(categories[ci])
            << "</text>\n";
        ly += 20;
    }
    out << "</svg>\n";
}

void write_line_svg(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<double>& xs, const std::vector<double>& ys) {
    Axis x_axis{std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
    Axis y_axis = x_axis;
    for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
        x_axis.expand(xs[i]);
        y_axis.expand(ys[i]);
    }
    if (!(x_axis.lo <= x_axis.hi)) {
        x_axis = {0.0, 1.0};
        y_axis = {0.0, 1.0};
    }
    x_axis.finish();
    y_axis.finish();

    auto out = open_file(path);
    open_svg(out, title);
    draw_frame(out, x_axis, y_axis, x_label, y_label, false);
    out << "<polyline fill=\"none\" stroke=\"#3b6fb6\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
        out << plot_x(x_axis, xs[i]) << ',' << plot_y(y_axis, ys[i]) << ' ';
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
        draw_marker(out, plot_x(x_axis, xs[i]), plot_y(y_axis, ys[i]), 'o', "#3b6fb6");
    }
    out << "</svg>\n";
}

}  // namespace srf
