#pragma once

/**
 * @file commands.hpp
 * @brief Subcommands behind the command-line tool.
 *
 * Exit codes: 0 success, 1 verification failure, 2 configuration or
 * output error.
 */

#include <ostream>
#include <string>

#include "catprice/config.hpp"
#include "catprice/report.hpp"

namespace catprice {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfigError = 2;

enum class SurfaceQuantity { Price, Loading, Gap };

SurfaceQuantity parse_surface_quantity(const std::string& name);

/// Prints p_b, p_s, pi_s, N*pi_s(1/N), pi0, theta_star and kappa at (c, t, k).
int cmd_price(const RunConfig& config, double c, double t, double k, std::ostream& out);

/// Surface of p^b(., ., k), theta*(., ., k) or p^b(., ., 1) - pi^0 on every
/// lattice node and stored slice.
SurfacePlot build_surface(const RunConfig& config, SurfaceQuantity quantity, double k);

/// Writes the surface CSV (and SVG when svg_path is non-empty).
int cmd_surface(const RunConfig& config, SurfaceQuantity quantity, double k, const std::string& csv_path,
                const std::string& svg_path, std::ostream& err);

/// Verification table: value function and risk-neutral checks for every
/// configured query. Exit 0 iff every |z_score| <= 3.
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace catprice
