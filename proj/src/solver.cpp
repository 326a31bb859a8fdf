#include "catprice/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "catprice/pricing.hpp"

namespace catprice {

namespace {

std::size_t steps_of(double value, double step, const char* what) {
    const double r = value / step;
    const double nearest = std::round(r);
    if (!(nearest >= 1.0) || std::abs(r - nearest) > 1e-9 * std::max(1.0, r)) {
        std::ostringstream os;
        os << "lattice: " << what << " " << value << " is not a positive multiple of step " << step;
        throw Error(os.str());
    }
    return static_cast<std::size_t>(nearest);
}

[[noreturn]] void report_breakdown(double t, std::size_t node, const char* what) {
    std::ostringstream os;
    os.precision(10);
    os << "integration breakdown (" << what << ") at t = " << t << ", node " << node;
    throw Error(os.str());
}

/// Shared workspace for the wealth right-hand side.
struct WealthOperator {
    const ClaimModel& model;
    const DemandCurve& curve;
    const Lattice& lattice;
    double k;
    double tail_amount; // k * A
    double kappa;
    std::vector<double> jump_weight; // expm1(eta * Y_j)

    WealthOperator(const ClaimModel& m, const DemandCurve& c, const Payoff& p, const Lattice& l,
                   double k_)
        : model(m), curve(c), lattice(l), k(k_), tail_amount(k_ * p.tail_value()),
          kappa(catprice::kappa(m, c)) {
        if (!(m.eta() > 0.0)) throw Error("wealth equation requires eta > 0");
        const auto& steps = l.jump_steps();
        jump_weight.resize(steps.size());
        for (std::size_t j = 0; j < steps.size(); ++j)
            jump_weight[j] = std::expm1(m.eta() * m.atoms()[j].size);
    }

    double tail(double t) const { return tail_amount + kappa * (model.horizon() - t); }

    /// Writes dW/dt and optionally Wbar for every node.
    void apply(std::span<const double> w, double t, std::span<double> dwdt,
               std::span<double> wbar_out) const {
        const std::size_t n = lattice.n_nodes();
        const auto& steps = lattice.jump_steps();
        const auto& probs = lattice.jump_probs();
        const double eta = model.eta();
        const double rate = model.lambda() / eta;
        const double big_m = model.market_size();
        const double tail_w = tail(t);
        for (std::size_t i = 0; i < n; ++i) {
            double e_hat = 0.0;
            double e_bar = 0.0;
            for (std::size_t j = 0; j < steps.size(); ++j) {
                const std::size_t target = i + steps[j];
                const double next = target >= n - 1 ? tail_w : w[target];
                const double x = -eta * (next - w[i]);
                e_hat += probs[j] * std::expm1(x);
                e_bar += probs[j] * jump_weight[j] * std::exp(x);
            }
            const double w_hat = -rate * e_hat;
            const double w_bar = -rate * e_bar;
            if (!std::isfinite(w_hat) || !std::isfinite(w_bar)) report_breakdown(t, i, "exp overflow");
            if (w_bar > 0.0) report_breakdown(t, i, "Wbar > 0");
            dwdt[i] = -big_m * w_hat - mu_gamma(curve, w_bar).value;
            if (!wbar_out.empty()) wbar_out[i] = w_bar;
        }
    }
};

/// Linear generator workspace: -M lambda (E f(c+Y) - f(c)).
struct LinearOperator {
    const Lattice& lattice;
    double jump_rate;
    double tail_value;

    void apply(std::span<const double> f, std::span<double> out) const {
        const std::size_t n = lattice.n_nodes();
        const auto& steps = lattice.jump_steps();
        const auto& probs = lattice.jump_probs();
        for (std::size_t i = 0; i < n; ++i) {
            double e = 0.0;
            for (std::size_t j = 0; j < steps.size(); ++j) {
                const std::size_t target = i + steps[j];
                e += probs[j] * (target >= n - 1 ? tail_value : f[target]);
            }
            out[i] = -jump_rate * (e - f[i]);
        }
    }
};

} // namespace

const char* to_string(SurfaceKind kind) {
    switch (kind) {
    case SurfaceKind::Wealth: return "wealth";
    case SurfaceKind::SellerTransform: return "seller_transform";
    case SurfaceKind::RiskNeutral: return "risk_neutral";
    }
    return "?";
}

Lattice::Lattice(double step, double cutoff, const ClaimModel& model) : step_(step) {
    if (!(std::isfinite(step) && step > 0.0)) throw Error("lattice: step must be > 0");
    n_nodes_ = steps_of(cutoff, step, "cutoff") + 1;
    for (const auto& atom : model.atoms()) {
        jump_steps_.push_back(steps_of(atom.size, step, "claim size"));
        jump_probs_.push_back(atom.prob);
    }
}

std::size_t Lattice::snap(double c) const {
    if (c <= 0.0) return 0;
    const double x = std::floor(c / step_ + 1e-9);
    if (x >= static_cast<double>(n_nodes_ - 1)) return n_nodes_ - 1;
    return static_cast<std::size_t>(x);
}

Lattice make_lattice(const ClaimModel& model, const Payoff& payoff, double step) {
    return Lattice(step > 0.0 ? step : model.natural_step(), payoff.cutoff(), model);
}

void SolverConfig::validate() const {
    if (n_steps < 100) throw Error("solver: n_steps must be >= 100");
    if (store_every < 1) throw Error("solver: store_every must be >= 1");
    if (!(tol_check >= 0.0)) throw Error("solver: tol_check must be >= 0");
}

std::vector<double> ValueSurface::slice_at(double t) const {
    if (!(t >= 0.0 && t <= horizon)) throw Error("surface: t outside [0, T]");
    // times are descending
    const auto it = std::lower_bound(times.begin(), times.end(), t, std::greater<>());
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    if (hi < times.size() && times[hi] == t) return values[hi];
    if (hi == 0) return values.front();
    if (hi >= times.size()) return values.back();
    const std::size_t lo = hi - 1; // times[lo] > t > times[hi]
    const double w = (times[lo] - t) / (times[lo] - times[hi]);
    std::vector<double> out(lattice.n_nodes());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (1.0 - w) * values[lo][i] + w * values[hi][i];
    return out;
}

std::vector<double> jump_expectation(std::span<const double> slice, const Lattice& lattice,
                                     std::span<const double> weights, double tail_value) {
    const std::size_t n = lattice.n_nodes();
    const auto& steps = lattice.jump_steps();
    const auto& probs = lattice.jump_probs();
    if (slice.size() != n) throw Error("jump_expectation: slice length differs from the lattice");
    if (weights.size() != steps.size()) throw Error("jump_expectation: one weight per claim atom");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double e = 0.0;
        for (std::size_t j = 0; j < steps.size(); ++j) {
            const std::size_t target = i + steps[j];
            e += probs[j] * weights[j] * (target >= n - 1 ? tail_value : slice[target]);
        }
        out[i] = e;
    }
    return out;
}

WealthRhs rhs_w(std::span<const double> slice, double t, double k, const ClaimModel& model,
                const DemandCurve& curve, const Payoff& payoff, const Lattice& lattice) {
    if (slice.size() != lattice.n_nodes()) throw Error("rhs_w: slice length differs from the lattice");
    WealthOperator op(model, curve, payoff, lattice, k);
    WealthRhs out{std::vector<double>(slice.size()), std::vector<double>(slice.size())};
    op.apply(slice, t, out.dwdt, out.w_bar);
    return out;
}

std::vector<double> w_bar(std::span<const double> slice, double t, double k, const ClaimModel& model,
                          const DemandCurve& curve, const Payoff& payoff, const Lattice& lattice) {
    return rhs_w(slice, t, k, model, curve, payoff, lattice).w_bar;
}

std::vector<double> rhs_linear(std::span<const double> slice, const Lattice& lattice,
                               const ClaimModel& model, double tail_value) {
    if (slice.size() != lattice.n_nodes())
        throw Error("rhs_linear: slice length differs from the lattice");
    std::vector<double> out(slice.size());
    LinearOperator{lattice, model.jump_rate(), tail_value}.apply(slice, out);
    return out;
}

double linear_tail_value(SurfaceKind kind, double k, const ClaimModel& model, const Payoff& payoff) {
    switch (kind) {
    case SurfaceKind::SellerTransform: return std::exp(model.beta() * k * payoff.tail_value());
    case SurfaceKind::RiskNeutral: return payoff.tail_value();
    case SurfaceKind::Wealth: break;
    }
    throw Error("linear_tail_value: wealth surfaces have a time-dependent tail");
}

ValueSurface integrate_backward(SurfaceKind kind, double k, const ClaimModel& model,
                                const DemandCurve& curve, const Payoff& payoff,
                                const Lattice& lattice, const SolverConfig& config) {
    config.validate();
    if (std::abs(lattice.cutoff() - payoff.cutoff()) > 1e-9 * payoff.cutoff())
        throw Error("integrate_backward: lattice does not end at the payoff cutoff");

    const std::size_t n = lattice.n_nodes();
    const double horizon = model.horizon();

    ValueSurface surface{lattice, kind, k, horizon, 0.0, 0.0, {}, {}};

    auto terminal = [&](double psi) {
        switch (kind) {
        case SurfaceKind::Wealth: return k * psi;
        case SurfaceKind::SellerTransform: return std::exp(model.beta() * k * psi);
        case SurfaceKind::RiskNeutral: break;
        }
        return psi;
    };

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = terminal(payoff(lattice.node(i)));

    std::optional<WealthOperator> wealth;
    std::optional<LinearOperator> linear;
    if (kind == SurfaceKind::Wealth) {
        wealth.emplace(model, curve, payoff, lattice, k);
        surface.tail_constant = wealth->tail_amount;
        surface.tail_rate = wealth->kappa;
    } else {
        const double tail = linear_tail_value(kind, k, model, payoff);
        linear.emplace(LinearOperator{lattice, model.jump_rate(), tail});
        surface.tail_constant = tail;
    }
    y[n - 1] = surface.tail(horizon);

    double terminal_residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        terminal_residual = std::max(terminal_residual, std::abs(y[i] - terminal(payoff(lattice.node(i)))));
    if (!(terminal_residual <= config.tol_check))
        throw Error("integrate_backward: terminal slice does not match the terminal condition");

    auto rhs = [&](std::span<const double> state, double t, std::span<double> out) {
        if (wealth)
            wealth->apply(state, t, out, {});
        else
            linear->apply(state, out);
    };

    const int steps = config.n_steps;
    const double dt = horizon / steps;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    surface.times.push_back(horizon);
    surface.values.push_back(y);

    for (int s = 0; s < steps; ++s) {
        const double t = horizon * static_cast<double>(steps - s) / steps;
        const double t_mid = t - 0.5 * dt;
        const double t_next = horizon * static_cast<double>(steps - s - 1) / steps;

        rhs(y, t, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] - 0.5 * dt * k1[i];
        rhs(tmp, t_mid, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] - 0.5 * dt * k2[i];
        rhs(tmp, t_mid, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] - dt * k3[i];
        rhs(tmp, t_next, k4);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] -= dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(y[i])) report_breakdown(t_next, i, "non-finite value");
        }
        y[n - 1] = surface.tail(t_next);

        if ((s + 1) % config.store_every == 0 || s + 1 == steps) {
            surface.times.push_back(t_next);
            surface.values.push_back(y);
        }
    }
    return surface;
}

double eval_surface(const ValueSurface& surface, double c, double t) {
    if (!(t >= 0.0 && t <= surface.horizon)) {
        std::ostringstream os;
        os << "eval_surface: t = " << t << " outside [0, " << surface.horizon << "]";
        throw Error(os.str());
    }
    const auto& lattice = surface.lattice;
    if (c >= lattice.cutoff() * (1.0 - 1e-12)) return surface.tail(t);
    const std::size_t i = lattice.snap(c);
    const auto& times = surface.times;
    const auto it = std::lower_bound(times.begin(), times.end(), t, std::greater<>());
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    if (hi < times.size() && times[hi] == t) return surface.values[hi][i];
    if (hi == 0) return surface.values.front()[i];
    if (hi >= times.size()) return surface.values.back()[i];
    const std::size_t lo = hi - 1;
    const double w = (times[lo] - t) / (times[lo] - times[hi]);
    return (1.0 - w) * surface.values[lo][i] + w * surface.values[hi][i];
}

} // namespace catprice
