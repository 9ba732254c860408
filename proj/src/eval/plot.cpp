#include "topicforge/eval/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"

namespace topicforge::eval {

namespace {

constexpr double width = 800, height = 420;
constexpr double left = 70, right = 170, top = 40, bottom = 50;
constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string render_svg(const std::vector<PlotSeries>& series, const PlotLabels& labels) {
    if (series.empty()) throw InputError("plot: no series");
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw InputError("plot: series '" + s.name + "' has mismatched x/y lengths");
        if (s.x.empty()) throw InputError("plot: series '" + s.name + "' is empty");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                throw InputError("plot: series '" + s.name + "' has a non-finite point");
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
           "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
           xml_escape(labels.title) + "</text>\n";
    svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = y0 + (y1 - y0) * i / 4.0;
        svg += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(v) + 4) + "\" text-anchor=\"end\">" + tick(v) +
               "</text>\n";
    }
    const std::string xf = labels.x_first.empty() ? tick(x0) : labels.x_first;
    const std::string xl = labels.x_last.empty() ? tick(x1) : labels.x_last;
    svg += "<text x=\"" + num(left) + "\" y=\"" + num(top + ph + 16) + "\" text-anchor=\"start\">" + xml_escape(xf) +
           "</text>\n";
    svg += "<text x=\"" + num(left + pw) + "\" y=\"" + num(top + ph + 16) + "\" text-anchor=\"end\">" +
           xml_escape(xl) + "</text>\n";
    svg += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 12) + "\" text-anchor=\"middle\">" +
           xml_escape(labels.x_axis) + "</text>\n";
    svg += "<text x=\"16\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           num(top + ph / 2) + ")\">" + xml_escape(labels.y_axis) + "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % std::size(palette)];
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) svg += (i ? " " : "") + num(px(s.x[i])) + "," + num(py(s.y[i]));
        svg += "\"/>\n";
        const double ly = top + 10 + 18.0 * static_cast<double>(k);
        svg += "<line x1=\"" + num(width - right + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(width - right + 32) +
               "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(width - right + 38) + "\" y=\"" + num(ly + 4) + "\">" + xml_escape(s.name) +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void emit_plot(const std::vector<PlotSeries>& series, const PlotLabels& labels, const std::filesystem::path& path) {
    csv::write_file(path, render_svg(series, labels));
}

}  // namespace topicforge::eval
