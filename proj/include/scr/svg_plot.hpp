#pragma once

#include <string>
#include <vector>

namespace scr {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    // Optional confidence band; empty or parallel to y.
    std::vector<double> y_lo;
    std::vector<double> y_hi;
    std::string color = "#1f6fb2";
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

// Standalone SVG line chart.  Plotted values are mirrored verbatim in a
// data comment so downstream checks can compare them against the CSVs.
void write_line_chart(const std::string& path, const PlotSpec& spec);

} // namespace scr
