#pragma once

/**
 * @file solver.hpp
 * @brief Backward integration of the lattice ODE systems.
 *
 * With claim sizes on a lattice of step delta and a payoff constant above
 * the cutoff L, the pricing PIDEs reduce to ODE systems on the nodes
 * c_i = i * delta, i = 0..n-1, (n-1) * delta = L. Values at c >= L are
 * closed analytically (tail rule), so only [0, L] is integrated.
 *
 * Three kinds of surfaces are solved:
 *  - Wealth:  W_t + M * What + mu(Wbar) = 0,  W(c, T) = k * psi(c)
 *             What = -(lambda / eta) E(exp(-eta (W(c+Y) - W(c))) - 1)
 *             Wbar = -(lambda / eta) E((exp(eta Y) - 1) exp(-eta (W(c+Y) - W(c))))
 *             tail: W = k * A + kappa * (T - t)
 *  - SellerTransform: g_t + M lambda E(g(c+Y) - g(c)) = 0, g(c, T) = exp(beta k psi(c))
 *             tail: g = exp(beta k A)
 *  - RiskNeutral: same linear generator, terminal psi, tail A.
 */

#include <cstddef>
#include <span>
#include <vector>

#include "catprice/demand.hpp"
#include "catprice/model.hpp"

namespace catprice {

enum class SurfaceKind { Wealth, SellerTransform, RiskNeutral };

const char* to_string(SurfaceKind kind);

/// Lattice {0, step, ..., cutoff} with claim atoms expressed in steps.
class Lattice {
public:
    /// Throws Error unless the cutoff and every atom size are integer
    /// multiples of step.
    Lattice(double step, double cutoff, const ClaimModel& model);

    double step() const { return step_; }
    double cutoff() const { return step_ * static_cast<double>(n_nodes_ - 1); }
    std::size_t n_nodes() const { return n_nodes_; }
    double node(std::size_t i) const { return step_ * static_cast<double>(i); }

    /// Atom sizes in lattice steps, and their probabilities.
    const std::vector<std::size_t>& jump_steps() const { return jump_steps_; }
    const std::vector<double>& jump_probs() const { return jump_probs_; }

    /// Node at or below c (with 1e-9 step slack); n_nodes()-1 for c >= cutoff.
    std::size_t snap(double c) const;

private:
    double step_;
    std::size_t n_nodes_;
    std::vector<std::size_t> jump_steps_;
    std::vector<double> jump_probs_;
};

/// Lattice for a model/payoff pair; step <= 0 selects the natural step.
Lattice make_lattice(const ClaimModel& model, const Payoff& payoff, double step = 0.0);

struct SolverConfig {
    int n_steps = 2000;
    int store_every = 20;
    /// Allowed max-norm residual of the stored t = T slice.
    double tol_check = 0.0;

    void validate() const;
};

/**
 * Lattice values at stored time slices (descending from T).
 *
 * For c >= L the tail rule tail_constant + tail_rate * (T - t) applies.
 */
struct ValueSurface {
    Lattice lattice;
    SurfaceKind kind;
    double k;
    double horizon;
    double tail_constant;
    double tail_rate;
    std::vector<double> times;
    std::vector<std::vector<double>> values;

    double tail(double t) const { return tail_constant + tail_rate * (horizon - t); }

    /// Node values at time t, linearly interpolated between stored slices.
    std::vector<double> slice_at(double t) const;
};

/// E_Y[weight(Y) * f(c + Y)] per node, f read from the slice below the
/// cutoff and equal to tail_value at or above it.
std::vector<double> jump_expectation(std::span<const double> slice, const Lattice& lattice,
                                     std::span<const double> weights, double tail_value);

struct WealthRhs {
    std::vector<double> dwdt;
    std::vector<double> w_bar;
};

/// dW/dt per node for the wealth equation; tail uses W = k*A + kappa*(T-t).
WealthRhs rhs_w(std::span<const double> slice, double t, double k, const ClaimModel& model,
                const DemandCurve& curve, const Payoff& payoff, const Lattice& lattice);

/// Wbar per node for a given W slice at time t.
std::vector<double> w_bar(std::span<const double> slice, double t, double k, const ClaimModel& model,
                          const DemandCurve& curve, const Payoff& payoff, const Lattice& lattice);

/// -M lambda (E f(c+Y) - f(c)) per node, the linear backward generator.
std::vector<double> rhs_linear(std::span<const double> slice, const Lattice& lattice,
                               const ClaimModel& model, double tail_value);

/// Tail value of the linear kinds at quantity k.
double linear_tail_value(SurfaceKind kind, double k, const ClaimModel& model, const Payoff& payoff);

/**
 * Classic RK4 with fixed step T / n_steps from t = T to 0.
 *
 * Stores the terminal slice, every store_every-th slice, and t = 0.
 * Throws Error on NaN/overflow with the offending time and node. The
 * curve is ignored for the linear kinds.
 */
ValueSurface integrate_backward(SurfaceKind kind, double k, const ClaimModel& model,
                                const DemandCurve& curve, const Payoff& payoff,
                                const Lattice& lattice, const SolverConfig& config);

/// Surface value at (c, t): c snapped down to the lattice, tail above the
/// cutoff, linear in t between slices. Throws Error for t outside [0, T].
double eval_surface(const ValueSurface& surface, double c, double t);

} // namespace catprice
