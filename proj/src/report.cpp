#include "catprice/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace catprice {

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::scientific, 9);
    return std::string(buf.data(), res.ptr);
}

void write_surface_csv(std::ostream& out, const SurfacePlot& plot) {
    out << "c,t,value\n";
    for (std::size_t s = 0; s < plot.times.size(); ++s)
        for (std::size_t i = 0; i < plot.c.size(); ++i)
            out << format_number(plot.c[i]) << ',' << format_number(plot.times[s]) << ','
                << format_number(plot.values[s][i]) << '\n';
}

namespace {

std::string fixed(double v, int digits) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
    return std::string(buf.data(), res.ptr);
}

double nice_step(double span) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double f : {1.0, 2.0, 5.0, 10.0})
        if (f * mag >= raw) return f * mag;
    return 10.0 * mag;
}

} // namespace

void write_surface_svg(std::ostream& out, const SurfacePlot& plot) {
    constexpr double width = 800, height = 500;
    constexpr double left = 80, right = 20, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    const double x_min = plot.c.empty() ? 0.0 : plot.c.front() / 1e6;
    const double x_max = plot.c.empty() ? 1.0 : plot.c.back() / 1e6;
    double y_min = 0.0, y_max = 0.0;
    bool first = true;
    for (const auto& row : plot.values)
        for (double v : row) {
            const double y = v / plot.y_scale;
            if (!std::isfinite(y)) continue;
            y_min = first ? y : std::min(y_min, y);
            y_max = first ? y : std::max(y_max, y);
            first = false;
        }
    if (y_max - y_min < 1e-12) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return top + (y_max - y) / (y_max - y_min) * plot_h; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << plot.title
        << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";

    const double xs = nice_step(x_max - x_min);
    for (double x = std::ceil(x_min / xs) * xs; x <= x_max + 1e-9; x += xs) {
        out << "<line x1=\"" << fixed(px(x), 2) << "\" y1=\"" << top + plot_h << "\" x2=\"" << fixed(px(x), 2)
            << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fixed(px(x), 2) << "\" y=\"" << top + plot_h + 20
            << "\" text-anchor=\"middle\">" << fixed(x, xs < 1 ? 1 : 0) << "</text>\n";
    }
    const double ys = nice_step(y_max - y_min);
    const int y_digits = ys < 1 ? static_cast<int>(std::ceil(-std::log10(ys))) : 0;
    for (double y = std::ceil(y_min / ys) * ys; y <= y_max + 1e-12; y += ys) {
        out << "<line x1=\"" << left - 5 << "\" y1=\"" << fixed(py(y), 2) << "\" x2=\"" << left << "\" y2=\""
            << fixed(py(y), 2) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << fixed(py(y) + 4, 2) << "\" text-anchor=\"end\">"
            << fixed(y, y_digits) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\">index level c (millions)</text>\n";
    out << "<text transform=\"translate(18," << top + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << plot.y_label << "</text>\n";

    // times descending: the first slice (t = T) is darkest
    const std::size_t n = plot.times.size();
    for (std::size_t s = 0; s < n; ++s) {
        const double shade = n > 1 ? 200.0 * static_cast<double>(s) / static_cast<double>(n - 1) : 0.0;
        const int g = static_cast<int>(shade);
        out << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"rgb(" << g << ',' << g << ',' << g
            << ")\" points=\"";
        for (std::size_t i = 0; i < plot.c.size(); ++i) {
            const double y = plot.values[s][i] / plot.y_scale;
            if (i) out << ' ';
            out << fixed(px(plot.c[i] / 1e6), 2) << ',' << fixed(py(y), 2);
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

} // namespace catprice
