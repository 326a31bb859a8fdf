#pragma once

/**
 * @file pricing.hpp
 * @brief Prices and policies read off solved surfaces.
 *
 * Buyer indifference price   p(c, t, k) = W(c, t, k) - kappa * (T - t)
 * Seller indifference price  p^s(k) = -p(-k)
 * Certainty equivalence      pi^s(c, t, k) = log(g(c, t, k)) / beta
 * Risk-neutral price         k * pi^0(c, t)
 */

#include <map>
#include <optional>
#include <vector>

#include "catprice/demand.hpp"
#include "catprice/model.hpp"
#include "catprice/solver.hpp"

namespace catprice {

struct PriceQuery {
    double c;
    double t;
    double k;
};

/// Argument of mu for the no-derivative problem:
/// z0 = -(lambda / eta) E(exp(eta Y) - 1).
double no_derivative_argument(const ClaimModel& model);

/// kappa = mu(z0), so that W(c, t, 0) = kappa * (T - t).
double kappa(const ClaimModel& model, const DemandCurve& curve);

/// Optimal loading theta*(c, t) on every stored slice of a wealth surface.
struct PolicySurface {
    Lattice lattice;
    double horizon;
    std::vector<double> times; ///< descending, as in the source surface
    std::vector<std::vector<double>> theta;

    /// theta* at (c, t): c snapped to the lattice (nodes above the cutoff
    /// use the cutoff node), linear in t between slices.
    double at(double c, double t) const;
};

PolicySurface policy_surface(const ValueSurface& wealth, const ClaimModel& model,
                             const DemandCurve& curve, const Payoff& payoff);

/**
 * Solved surfaces keyed by quantity k.
 *
 * Wealth surfaces hold W(., ., k); seller surfaces hold g(., ., k). Lookups
 * match k within 1e-12 relative and throw Error when absent.
 */
struct SurfaceSet {
    double kappa = 0.0;
    std::map<double, ValueSurface> wealth;
    std::map<double, ValueSurface> seller;
    std::optional<ValueSurface> risk_neutral;

    const ValueSurface& wealth_at(double k) const;
    const ValueSurface& seller_at(double k) const;
    const ValueSurface& pi0() const;
};

struct SolveRequest {
    std::vector<double> wealth_k;
    std::vector<double> seller_k;
    bool risk_neutral = false;
};

/// Solves every requested surface; independent solves run concurrently.
SurfaceSet solve_surfaces(const ClaimModel& model, const DemandCurve& curve, const Payoff& payoff,
                          const Lattice& lattice, const SolverConfig& config,
                          const SolveRequest& request);

/// Buyer price p^b(c, t, k) from the W surface for k.
double indifference_price(const PriceQuery& query, const SurfaceSet& surfaces);

/// Seller price p^s(c, t, k) = -p^b(c, t, -k) from the W surface for -k.
double seller_indifference_price(const PriceQuery& query, const SurfaceSet& surfaces);

/// theta* = gamma(Wbar(c, t)) for the surface's quantity; in [0, m].
double optimal_loading(const PriceQuery& query, const ValueSurface& wealth, const ClaimModel& model,
                       const DemandCurve& curve, const Payoff& payoff);

/// pi^s(c, t, k) = log(g(c, t, k)) / beta. Throws Error for g <= 0.
double certainty_equivalence_seller(const PriceQuery& query, const ValueSurface& seller,
                                    const ClaimModel& model);

/// N * pi^s(c, t, 1 / N) for each N, read from the seller surfaces.
std::vector<double> denomination_limit(const PriceQuery& query, const std::vector<int>& n_list,
                                       const SurfaceSet& surfaces, const ClaimModel& model);

/// k * pi^0(c, t).
double risk_neutral_price(const PriceQuery& query, const ValueSurface& pi0);

/// p^b(c, t, 1) - pi^0(c, t).
double tradability_gap(const PriceQuery& query, const SurfaceSet& surfaces);

} // namespace catprice
