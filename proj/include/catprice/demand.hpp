#pragma once

/**
 * @file demand.hpp
 * @brief Demand curves q(theta) and the premium-flow maximizer
 *
 *   mu(z)    = max_{alpha in [0, m]} q(alpha) * (a * (1 + alpha) + z)
 *   gamma(z) = smallest maximizer of the same expression.
 *
 * q is the number of clients insured at risk loading theta: M for
 * theta <= 0, zero for theta >= m, strictly decreasing in between.
 */

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "catprice/model.hpp"

namespace catprice {

/// q(theta) = M * (1 - theta / m) on [0, m].
struct LinearDemand {
    double m;
    double market_size;
};

/// q(theta) = M * (1 - (theta / m)^nu) on [0, m].
struct PowerDemand {
    double m;
    double market_size;
    double nu;
};

/**
 * q(theta) = M - int_0^theta exp(-2 xi / (1 + m)) H(xi) d xi with
 *
 *   H(xi) = scale * P(xi) * (exp_factor ? exp(2 xi / (1 + m)) : 1)
 *
 * and P a polynomial (coefficients in increasing degree). When scale is
 * not given it is chosen so that q(m) = 0.
 */
struct HFamilyDemand {
    double m;
    double market_size;
    std::vector<double> poly;
    bool exp_factor = true;
    std::optional<double> scale;
};

/// Piecewise-cubic monotone interpolation through (theta, q) samples.
/// The first sample must be (0, M) and the last (m, 0).
struct TabulatedDemand {
    std::vector<double> theta;
    std::vector<double> q;
};

using DemandSpec = std::variant<LinearDemand, PowerDemand, HFamilyDemand, TabulatedDemand>;

/// Value and smallest maximizer of the premium-flow objective.
struct MuResult {
    double value;
    double argmax;
};

/// Monotone cubic Hermite interpolant (Fritsch-Carlson slopes).
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;

private:
    std::vector<double> x_, y_, d_;
};

/**
 * Immutable demand curve bound to a fair premium a.
 *
 * For the HFamily variant the cumulative integral is precomputed by
 * adaptive Simpson on a 4096-interval grid and interpolated monotonically.
 */
class DemandCurve {
public:
    DemandCurve(DemandSpec spec, double fair_premium);

    double m() const { return m_; }
    double market_size() const { return market_size_; }
    double fair_premium() const { return a_; }
    const DemandSpec& spec() const { return spec_; }
    bool is_linear() const { return std::holds_alternative<LinearDemand>(spec_); }

    double q(double theta) const;

    /// H(xi) for HFamily curves (scale resolved); throws otherwise.
    double h(double xi) const;
    /// Resolved HFamily scale; throws for other variants.
    double h_scale() const;

    /// Premium-flow objective q(alpha) * (a * (1 + alpha) + z).
    double objective(double alpha, double z) const { return q(alpha) * (a_ * (1.0 + alpha) + z); }

private:
    DemandSpec spec_;
    double a_;
    double m_ = 0.0;
    double market_size_ = 0.0;
    double h_scale_ = 1.0;
    MonotoneCubic cached_;
};

double q_eval(const DemandCurve& curve, double theta);

/**
 * mu(z) and gamma(z). Linear curves use the closed piecewise formulas; all
 * other variants use a 1024-point scan followed by golden-section
 * refinement, returning the smallest maximizer on ties.
 */
MuResult mu_gamma(const DemandCurve& curve, double z);

/// Dense-grid oracle for mu_gamma. grid_n >= 1000.
MuResult brute_force_mu(const DemandCurve& curve, double z, int grid_n);

struct HFamilyCheck {
    bool ok;
    std::vector<std::string> violations;
};

/// Checks H > 0, H' > 0 on a dense grid of (0, m) and the normalization
/// int_0^m exp(-2 xi / (1 + m)) H(xi) d xi = M within 1e-8 relative.
HFamilyCheck hfamily_validate(const DemandCurve& curve);

/// Adaptive Simpson quadrature to the given relative tolerance.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol);

} // namespace catprice

#include "catprice/detail/simpson.hpp"
