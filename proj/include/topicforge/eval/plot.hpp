#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace topicforge::eval {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotLabels {
    std::string title;
    std::string x_axis;
    std::string y_axis;
    // Tick labels for the first and last x value; numbers are printed when empty.
    std::string x_first;
    std::string x_last;
};

/// Self-contained SVG line chart with one polyline per series and a legend.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotLabels& labels);

void emit_plot(const std::vector<PlotSeries>& series, const PlotLabels& labels, const std::filesystem::path& path);

std::string xml_escape(std::string_view s);

}  // namespace topicforge::eval
