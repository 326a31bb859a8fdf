#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <vector>

#include "catprice/config.hpp"
#include "catprice/demand.hpp"
#include "catprice/model.hpp"
#include "catprice/solver.hpp"

namespace fixtures {

inline catprice::ClaimModel example_model() { return catprice::worked_example_config().claim_model(); }

inline catprice::Payoff example_payoff() { return catprice::Payoff::spread(1e7, 3e7); }

inline catprice::DemandCurve linear_curve(const catprice::ClaimModel& model, double m = 2.0) {
    return catprice::DemandCurve(catprice::LinearDemand{m, model.market_size()}, catprice::fair_premium(model));
}

inline catprice::DemandCurve power_curve(double a, double nu, double m = 2.0, double big_m = 1e4) {
    return catprice::DemandCurve(catprice::PowerDemand{m, big_m, nu}, a);
}

inline catprice::Lattice example_lattice(const catprice::ClaimModel& model) {
    return catprice::Lattice(1e5, 3e7, model);
}

/// Relative difference with a floor on the denominator.
inline double rel_diff(double a, double b, double floor = 1.0) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/**
 * pi0(c, t) = E psi(C_T) by summing over the Poisson number of jumps:
 * sum_n P(N = n) E psi(c + S_n), with the law of S_n built by repeated
 * lattice convolution of the claim law.
 */
inline double poisson_convolution_pi0(const catprice::ClaimModel& model, const catprice::Payoff& payoff,
                                      double step, double c, double t, int n_max = 80) {
    const double mean = model.jump_rate() * (model.horizon() - t);
    std::vector<double> law(1, 1.0); // law of S_n in lattice steps
    std::vector<std::pair<std::size_t, double>> atoms;
    for (const auto& a : model.atoms())
        atoms.emplace_back(static_cast<std::size_t>(std::llround(a.size / step)), a.prob);

    double total = 0.0;
    double log_pois = -mean; // log P(N = 0)
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) {
            log_pois += std::log(mean) - std::log(static_cast<double>(n));
            std::vector<double> next(law.size() + atoms.back().first, 0.0);
            for (std::size_t i = 0; i < law.size(); ++i)
                for (const auto& [s, p] : atoms) next[i + s] += law[i] * p;
            law.swap(next);
        }
        double e = 0.0;
        for (std::size_t i = 0; i < law.size(); ++i)
            if (law[i] != 0.0) e += law[i] * payoff(c + step * static_cast<double>(i));
        total += std::exp(log_pois) * e;
    }
    return total;
}

} // namespace fixtures
