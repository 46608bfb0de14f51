#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace srf {

/// One marker series of a scatter plot.
struct PlotSeries {
    std::string label;
    std::string color;   // SVG color
    char marker = 'o';   // 'o' circle, 'x' cross, 's' square, 't' triangle
    std::vector<double> x;
    std::vector<double> y;
};

/// Static scatter chart; y may be log10-scaled (non-positive values are
/// skipped in log mode).
void write_scatter_svg(const std::filesystem::path& path, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series, bool log_y);

/// Grouped vertical bars: one group per `groups` entry, one bar per
/// category within it.
struct BarGroup {
    std::string label;
    std::vector<double> values;  // parallel to categories
};

void write_bars_svg(const std::filesystem::path& path, const std::string& title,
                    const std::vector<std::string>& categories,
                    const std::vector<BarGroup>& groups);

/// Single polyline with point markers.
void write_line_svg(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace srf
