#pragma once

/**
 * @file report.hpp
 * @brief CSV and SVG writers.
 *
 * Numbers are written locale-independently in scientific notation with 10
 * significant digits; lines end with '\n'.
 */

#include <ostream>
#include <string>
#include <vector>

namespace catprice {

/// Scientific notation, 10 significant digits, '.' decimal separator.
std::string format_number(double value);

/// One curve per time slice.
struct SurfacePlot {
    std::string title;
    std::string y_label;
    double y_scale = 1.0; ///< values are divided by this before plotting
    std::vector<double> c;        ///< shared abscissa (currency)
    std::vector<double> times;    ///< slice times, descending
    std::vector<std::vector<double>> values;
};

/// Writes `c,t,value` rows for every slice and node.
void write_surface_csv(std::ostream& out, const SurfacePlot& plot);

/**
 * Minimal SVG: axes with tick labels (c in millions), one polyline per
 * slice. Earlier times are drawn in lighter gray.
 */
void write_surface_svg(std::ostream& out, const SurfacePlot& plot);

} // namespace catprice
