#include "catprice/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace catprice {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw Error("invalid claim model: " + what);
}

bool is_multiple(double value, double step) {
    const double r = value / step;
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

} // namespace

ClaimModel::ClaimModel(ClaimModelParams params)
    : lambda_(params.lambda),
      market_size_(params.market_size),
      horizon_(params.horizon),
      eta_(params.eta),
      beta_(params.beta.value_or(params.eta)),
      atoms_(std::move(params.atoms)) {
    require(std::isfinite(lambda_) && lambda_ > 0.0, "lambda must be > 0");
    require(std::isfinite(market_size_) && market_size_ >= 1.0, "M must be >= 1");
    require(std::isfinite(horizon_) && horizon_ > 0.0, "T must be > 0");
    require(std::isfinite(eta_) && eta_ >= 0.0, "eta must be >= 0");
    require(std::isfinite(beta_) && beta_ > 0.0, "beta must be > 0");
    require(!atoms_.empty(), "at least one claim atom is required");

    double total = 0.0;
    for (const auto& atom : atoms_) {
        require(std::isfinite(atom.size) && atom.size > 0.0, "claim sizes must be > 0");
        require(std::isfinite(atom.prob) && atom.prob > 0.0, "claim probabilities must be > 0");
        total += atom.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "claim probabilities sum to " << total << ", expected 1";
        throw Error("invalid claim model: " + os.str());
    }
    for (auto& atom : atoms_) atom.prob /= total;
    std::sort(atoms_.begin(), atoms_.end(),
              [](const ClaimAtom& x, const ClaimAtom& y) { return x.size < y.size; });
}

double ClaimModel::natural_step() const {
    const double smallest = atoms_.front().size;
    for (int d = 1; d <= 100000; ++d) {
        const double step = smallest / d;
        if (std::all_of(atoms_.begin(), atoms_.end(),
                        [&](const ClaimAtom& a) { return is_multiple(a.size, step); }))
            return step;
    }
    throw Error("claim sizes have no common lattice step");
}

ClaimModel ClaimModel::with_eta(double eta) const {
    auto p = params();
    p.eta = eta;
    return ClaimModel(std::move(p));
}

ClaimModel ClaimModel::with_beta(double beta) const {
    auto p = params();
    p.beta = beta;
    return ClaimModel(std::move(p));
}

ClaimModel ClaimModel::with_lambda(double lambda) const {
    auto p = params();
    p.lambda = lambda;
    return ClaimModel(std::move(p));
}

ClaimModelParams ClaimModel::params() const {
    return {lambda_, market_size_, horizon_, eta_, beta_, atoms_};
}

double mean_claim(const ClaimModel& model) {
    double s = 0.0;
    for (const auto& a : model.atoms()) s += a.size * a.prob;
    return s;
}

double fair_premium(const ClaimModel& model) { return model.lambda() * mean_claim(model); }

double exp_jump_moment(const ClaimModel& model, double rho) {
    if (!std::isfinite(rho)) throw Error("exp_jump_moment: rho must be finite");
    double s = 0.0;
    for (const auto& a : model.atoms()) s += a.prob * std::exp(rho * a.size);
    if (!std::isfinite(s))
        throw Error("exp_jump_moment: E(exp(rho*Y)) overflows; risk aversion too large for the claim sizes");
    return s;
}

double exp_jump_moment_m1(const ClaimModel& model, double rho) {
    if (!std::isfinite(rho)) throw Error("exp_jump_moment: rho must be finite");
    double s = 0.0;
    for (const auto& a : model.atoms()) s += a.prob * std::expm1(rho * a.size);
    if (!std::isfinite(s))
        throw Error("exp_jump_moment: E(exp(rho*Y)) overflows; risk aversion too large for the claim sizes");
    return s;
}

Payoff Payoff::spread(double strike, double cutoff) {
    if (!(std::isfinite(strike) && std::isfinite(cutoff) && strike >= 0.0 && strike < cutoff))
        throw Error("spread payoff requires 0 <= K < L");
    Payoff p;
    p.strike_ = strike;
    p.cutoff_ = cutoff;
    p.tail_ = cutoff - strike;
    return p;
}

Payoff Payoff::tabulated(double step, std::vector<double> values, double tail_value) {
    if (!(step > 0.0) || values.size() < 2)
        throw Error("tabulated payoff requires a positive step and at least two values");
    for (double v : values)
        if (!std::isfinite(v)) throw Error("tabulated payoff values must be finite");
    if (values.back() != tail_value)
        throw Error("tabulated payoff must equal its tail value at the cutoff");
    Payoff p;
    p.cutoff_ = step * static_cast<double>(values.size() - 1);
    p.tail_ = tail_value;
    p.table_step_ = step;
    p.table_ = std::move(values);
    return p;
}

double Payoff::operator()(double c) const {
    if (c >= cutoff_) return tail_;
    if (!table_step_) return std::max(0.0, std::min(c - strike_, cutoff_ - strike_));
    if (c <= 0.0) return table_.front();
    const double x = c / *table_step_;
    const auto i = static_cast<std::size_t>(x);
    const double w = x - static_cast<double>(i);
    if (w == 0.0 || i + 1 >= table_.size()) return table_[std::min(i, table_.size() - 1)];
    return (1.0 - w) * table_[i] + w * table_[i + 1];
}

} // namespace catprice
