#pragma once

/**
 * @file model.hpp
 * @brief Claims model and payoff definitions for derivatives on an
 * industry loss index.
 *
 * The index C_t is a compound Poisson process with intensity lambda*M and
 * i.i.d. claim sizes Y drawn from a finite discrete law. Every claim size
 * is an integer multiple of a common step delta, so C_t moves on the
 * lattice {0, delta, 2*delta, ...}.
 */

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace catprice {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One point of the claim-size law.
struct ClaimAtom {
    double size; ///< currency
    double prob;
};

struct ClaimModelParams {
    double lambda = 0.0; ///< per-client claim intensity (1/year)
    double market_size = 0.0; ///< M, number of potential clients
    double horizon = 0.0; ///< T (years)
    double eta = 0.0; ///< buyer risk aversion (1/currency)
    std::optional<double> beta; ///< seller risk aversion; defaults to eta
    std::vector<ClaimAtom> atoms;
};

/**
 * Immutable, validated claims model.
 *
 * Construction checks positivity of all parameters and that the
 * probabilities sum to one within 1e-12; the stored probabilities are then
 * renormalized so that they sum to one in floating point.
 */
class ClaimModel {
public:
    explicit ClaimModel(ClaimModelParams params);

    double lambda() const { return lambda_; }
    double market_size() const { return market_size_; }
    double horizon() const { return horizon_; }
    double eta() const { return eta_; }
    double beta() const { return beta_; }
    const std::vector<ClaimAtom>& atoms() const { return atoms_; }

    /// Index jump intensity lambda*M.
    double jump_rate() const { return lambda_ * market_size_; }

    /// Largest step dividing every atom size (within 1e-9 relative).
    double natural_step() const;

    /// Copy with a different buyer risk aversion; beta is kept.
    ClaimModel with_eta(double eta) const;
    /// Copy with a different seller risk aversion.
    ClaimModel with_beta(double beta) const;
    /// Copy with a scaled claim intensity.
    ClaimModel with_lambda(double lambda) const;

    ClaimModelParams params() const;

private:
    double lambda_;
    double market_size_;
    double horizon_;
    double eta_;
    double beta_;
    std::vector<ClaimAtom> atoms_;
};

/// E(Y).
double mean_claim(const ClaimModel& model);

/// a = lambda * E(Y), the expected annual claim per client.
double fair_premium(const ClaimModel& model);

/// E(exp(rho * Y)). Throws Error if the result is not finite.
double exp_jump_moment(const ClaimModel& model, double rho);

/// E(expm1(rho * Y)) = E(exp(rho * Y)) - 1, accurate for small rho.
double exp_jump_moment_m1(const ClaimModel& model, double rho);

/**
 * Bounded payoff psi(c) that is constant (= tail_value) for c >= cutoff.
 *
 * Two variants: the CAT spread option max(0, min(c - K, L - K)) and a
 * tabulated payoff given by its values on the lattice {0, step, ..., L}.
 */
class Payoff {
public:
    static Payoff spread(double strike, double cutoff);
    static Payoff tabulated(double step, std::vector<double> values, double tail_value);

    /// psi(c); exactly tail_value() for c >= cutoff().
    double operator()(double c) const;

    double cutoff() const { return cutoff_; }
    double tail_value() const { return tail_; }
    bool is_spread() const { return !table_step_.has_value(); }
    double strike() const { return strike_; }
    std::optional<double> table_step() const { return table_step_; }
    const std::vector<double>& table() const { return table_; }

private:
    Payoff() = default;

    double strike_ = 0.0;
    double cutoff_ = 0.0;
    double tail_ = 0.0;
    std::optional<double> table_step_;
    std::vector<double> table_;
};

inline double payoff_eval(const Payoff& payoff, double c) { return payoff(c); }

} // namespace catprice
