#pragma once
// Minimal SVG line plots of logged trajectory columns. Pure polylines, no
// interactivity; enough to eyeball a residual decaying.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "flowlab/io/csv.hpp"

namespace flowlab {

struct SvgSeries {
    std::string label;
    std::vector<double> t;
    std::vector<double> v; ///< plotted as log10(max(|v|, floor))
};

inline std::string render_log_plot(const std::vector<SvgSeries>& series, double floor = 1e-16) {
    const double width = 720, height = 420, ml = 60, mr = 20, mt = 20, mb = 40;
    double tmin = 1e300, tmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (size_t i = 0; i < s.t.size(); ++i) {
            tmin = std::min(tmin, s.t[i]);
            tmax = std::max(tmax, s.t[i]);
            const double y = std::log10(std::max(std::abs(s.v[i]), floor));
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!(tmax > tmin)) tmax = tmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    auto px = [&](double t) { return ml + (t - tmin) / (tmax - tmin) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_num(width) +
           "\" height=\"" + format_num(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<line x1=\"" + format_num(ml) + "\" y1=\"" + format_num(height - mb) + "\" x2=\"" +
           format_num(width - mr) + "\" y2=\"" + format_num(height - mb) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + format_num(ml) + "\" y1=\"" + format_num(mt) + "\" x2=\"" +
           format_num(ml) + "\" y2=\"" + format_num(height - mb) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + format_num(width / 2) + "\" y=\"" + format_num(height - 8) +
           "\" font-size=\"13\">t</text>\n";
    out += "<text x=\"12\" y=\"" + format_num(height / 2) +
           "\" font-size=\"13\" transform=\"rotate(-90 12 " + format_num(height / 2) +
           ")\">log10 value</text>\n";
    int ci = 0;
    for (const auto& s : series) {
        std::string pts;
        for (size_t i = 0; i < s.t.size(); ++i) {
            const double y = std::log10(std::max(std::abs(s.v[i]), floor));
            pts += format_num(px(s.t[i])) + "," + format_num(py(y)) + " ";
        }
        const char* color = colors[ci % 8];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        out += "<text x=\"" + format_num(width - mr - 180) + "\" y=\"" +
               format_num(mt + 16 + 16 * ci) + "\" font-size=\"12\" fill=\"" + color + "\">" +
               s.label + "</text>\n";
        ++ci;
    }
    out += "</svg>\n";
    return out;
}

} // namespace flowlab
