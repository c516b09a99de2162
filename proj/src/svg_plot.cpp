#include "scr/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "scr/errors.hpp"

namespace scr {

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 24.0, kTop = 40.0, kBottom = 52.0;

std::string num(double v, const char* f = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

// A handful of round tick positions covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double cand : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * cand >= raw) {
            step = mag * cand;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
        ticks.push_back(t);
    return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
    std::vector<double> ticks;
    for (int e = static_cast<int>(std::floor(std::log10(lo)));
         e <= static_cast<int>(std::ceil(std::log10(hi))); ++e)
        ticks.push_back(std::pow(10.0, e));
    return ticks;
}

} // namespace

void write_line_chart(const std::string& path, const PlotSpec& spec) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const PlotSeries& s : spec.series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        auto eat = [&](const std::vector<double>& ys) {
            for (double v : ys) {
                if (spec.log_y && v <= 0.0)
                    throw InvalidInput("write_line_chart: log axis needs positive values");
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
        };
        eat(s.y);
        eat(s.y_lo);
        eat(s.y_hi);
    }
    if (xmin > xmax) throw InvalidInput("write_line_chart: no points");
    if (xmin == xmax) {
        xmin -= 1.0;
        xmax += 1.0;
    }
    if (ymin == ymax) {
        ymin = spec.log_y ? ymin * 0.5 : ymin - 1.0;
        ymax = spec.log_y ? ymax * 2.0 : ymax + 1.0;
    } else {
        const double pad = spec.log_y ? 0.0 : 0.06 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
        if (spec.log_y) {
            ymin *= 0.8;
            ymax *= 1.25;
        }
    }

    auto px = [&](double x) {
        return kLeft + (x - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
    };
    auto py = [&](double y) {
        const double t = spec.log_y ? (std::log10(y) - std::log10(ymin)) /
                                          (std::log10(ymax) - std::log10(ymin))
                                    : (y - ymin) / (ymax - ymin);
        return kHeight - kBottom - t * (kHeight - kTop - kBottom);
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<!-- data\n";
    for (const PlotSeries& s : spec.series) {
        out << "series " << s.label << "\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out << num(s.x[i], "%.17g") << ',' << num(s.y[i], "%.17g");
            if (i < s.y_lo.size() && i < s.y_hi.size())
                out << ',' << num(s.y_lo[i], "%.17g") << ',' << num(s.y_hi[i], "%.17g");
            out << "\n";
        }
    }
    out << "-->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << spec.title << "</text>\n";

    // Axes.
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    for (double t : linear_ticks(xmin, xmax)) {
        const double x = px(t);
        out << "<line x1=\"" << x << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << x
            << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << kHeight - kBottom + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << num(t, "%.6g") << "</text>\n";
    }
    const std::vector<double> yticks =
        spec.log_y ? log_ticks(ymin, ymax) : linear_ticks(ymin, ymax);
    for (double t : yticks) {
        if (t < ymin || t > ymax) continue;
        const double y = py(t);
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\""
            << y << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << num(t, "%.3g") << "</text>\n";
        out << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kWidth - kRight
            << "\" y2=\"" << y << "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n";
    }
    out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-size=\"12\">" << spec.x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << (kTop + kHeight - kBottom) / 2 << ")\">" << spec.y_label
        << (spec.log_y ? " (log scale)" : "") << "</text>\n";

    std::size_t legend_i = 0;
    for (const PlotSeries& s : spec.series) {
        // Confidence band as error bars.
        for (std::size_t i = 0; i < s.x.size() && i < s.y_lo.size() && i < s.y_hi.size(); ++i) {
            const double x = px(s.x[i]);
            out << "<line x1=\"" << x << "\" y1=\"" << py(s.y_lo[i]) << "\" x2=\"" << x
                << "\" y2=\"" << py(s.y_hi[i]) << "\" stroke=\"" << s.color
                << "\" stroke-width=\"1\" opacity=\"0.6\"/>\n";
        }
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        out << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
                << "\" r=\"2.6\" fill=\"" << s.color << "\"/>\n";
        out << "<text x=\"" << kWidth - kRight - 8 << "\" y=\"" << kTop + 14 * (legend_i + 1)
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << s.color << "\">" << s.label
            << "</text>\n";
        ++legend_i;
    }
    out << "</svg>\n";
}

} // namespace scr
