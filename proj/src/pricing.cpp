#include "catprice/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace catprice {

namespace {

const ValueSurface& lookup(const std::map<double, ValueSurface>& table, double k, const char* what) {
    for (const auto& [key, surface] : table)
        if (std::abs(key - k) <= 1e-12 * std::max(1.0, std::abs(k))) return surface;
    std::ostringstream os;
    os << "no " << what << " surface solved for k = " << k;
    throw Error(os.str());
}

double interpolate_in_time(const std::vector<double>& times, const std::vector<std::vector<double>>& v,
                           std::size_t node, double t) {
    const auto it = std::lower_bound(times.begin(), times.end(), t, std::greater<>());
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    if (hi < times.size() && times[hi] == t) return v[hi][node];
    if (hi == 0) return v.front()[node];
    if (hi >= times.size()) return v.back()[node];
    const std::size_t lo = hi - 1;
    const double w = (times[lo] - t) / (times[lo] - times[hi]);
    return (1.0 - w) * v[lo][node] + w * v[hi][node];
}

void check_time(double t, double horizon) {
    if (!(t >= 0.0 && t <= horizon)) {
        std::ostringstream os;
        os << "query time t = " << t << " outside [0, " << horizon << "]";
        throw Error(os.str());
    }
}

} // namespace

double no_derivative_argument(const ClaimModel& model) {
    if (!(model.eta() > 0.0)) throw Error("kappa requires eta > 0");
    return -(model.lambda() / model.eta()) * exp_jump_moment_m1(model, model.eta());
}

double kappa(const ClaimModel& model, const DemandCurve& curve) {
    return mu_gamma(curve, no_derivative_argument(model)).value;
}

double PolicySurface::at(double c, double t) const {
    check_time(t, horizon);
    return interpolate_in_time(times, theta, lattice.snap(c), t);
}

PolicySurface policy_surface(const ValueSurface& wealth, const ClaimModel& model,
                             const DemandCurve& curve, const Payoff& payoff) {
    if (wealth.kind != SurfaceKind::Wealth) throw Error("policy_surface: needs a wealth surface");
    PolicySurface out{wealth.lattice, wealth.horizon, wealth.times, {}};
    out.theta.reserve(wealth.values.size());
    for (std::size_t s = 0; s < wealth.values.size(); ++s) {
        const auto bar = w_bar(wealth.values[s], wealth.times[s], wealth.k, model, curve, payoff,
                               wealth.lattice);
        std::vector<double> row(bar.size());
        for (std::size_t i = 0; i < bar.size(); ++i) row[i] = mu_gamma(curve, bar[i]).argmax;
        out.theta.push_back(std::move(row));
    }
    return out;
}

const ValueSurface& SurfaceSet::wealth_at(double k) const { return lookup(wealth, k, "wealth"); }

const ValueSurface& SurfaceSet::seller_at(double k) const { return lookup(seller, k, "seller"); }

const ValueSurface& SurfaceSet::pi0() const {
    if (!risk_neutral) throw Error("no risk-neutral surface solved");
    return *risk_neutral;
}

SurfaceSet solve_surfaces(const ClaimModel& model, const DemandCurve& curve, const Payoff& payoff,
                          const Lattice& lattice, const SolverConfig& config,
                          const SolveRequest& request) {
    SurfaceSet out;
    out.kappa = kappa(model, curve);

    auto launch = [&](SurfaceKind kind, double k) {
        return std::async(std::launch::async, [&, kind, k] {
            return integrate_backward(kind, k, model, curve, payoff, lattice, config);
        });
    };
    std::vector<std::pair<double, std::future<ValueSurface>>> wealth, seller;
    for (double k : request.wealth_k) wealth.emplace_back(k, launch(SurfaceKind::Wealth, k));
    for (double k : request.seller_k) seller.emplace_back(k, launch(SurfaceKind::SellerTransform, k));
    std::optional<std::future<ValueSurface>> pi0;
    if (request.risk_neutral) pi0 = launch(SurfaceKind::RiskNeutral, 1.0);

    for (auto& [k, f] : wealth) out.wealth.insert_or_assign(k, f.get());
    for (auto& [k, f] : seller) out.seller.insert_or_assign(k, f.get());
    if (pi0) out.risk_neutral = pi0->get();
    return out;
}

double indifference_price(const PriceQuery& query, const SurfaceSet& surfaces) {
    const auto& w = surfaces.wealth_at(query.k);
    check_time(query.t, w.horizon);
    if (query.c >= w.lattice.cutoff()) return w.tail_constant;
    return eval_surface(w, query.c, query.t) - w.tail_rate * (w.horizon - query.t);
}

double seller_indifference_price(const PriceQuery& query, const SurfaceSet& surfaces) {
    return -indifference_price({query.c, query.t, -query.k}, surfaces);
}

double optimal_loading(const PriceQuery& query, const ValueSurface& wealth, const ClaimModel& model,
                       const DemandCurve& curve, const Payoff& payoff) {
    if (wealth.kind != SurfaceKind::Wealth) throw Error("optimal_loading: needs a wealth surface");
    check_time(query.t, wealth.horizon);
    const auto slice = wealth.slice_at(query.t);
    const auto bar = w_bar(slice, query.t, wealth.k, model, curve, payoff, wealth.lattice);
    return mu_gamma(curve, bar[wealth.lattice.snap(query.c)]).argmax;
}

double certainty_equivalence_seller(const PriceQuery& query, const ValueSurface& seller,
                                    const ClaimModel& model) {
    if (seller.kind != SurfaceKind::SellerTransform)
        throw Error("certainty_equivalence_seller: needs a seller-transform surface");
    const double g = eval_surface(seller, query.c, query.t);
    if (!(g > 0.0)) {
        std::ostringstream os;
        os << "certainty_equivalence_seller: g = " << g << " <= 0 at c = " << query.c
           << ", t = " << query.t;
        throw Error(os.str());
    }
    return std::log(g) / model.beta();
}

std::vector<double> denomination_limit(const PriceQuery& query, const std::vector<int>& n_list,
                                       const SurfaceSet& surfaces, const ClaimModel& model) {
    std::vector<double> out;
    out.reserve(n_list.size());
    for (int n : n_list) {
        if (n < 1) throw Error("denomination_limit: N must be >= 1");
        const double k = 1.0 / n;
        const auto& g = surfaces.seller_at(k);
        out.push_back(n * certainty_equivalence_seller({query.c, query.t, k}, g, model));
    }
    return out;
}

double risk_neutral_price(const PriceQuery& query, const ValueSurface& pi0) {
    if (pi0.kind != SurfaceKind::RiskNeutral) throw Error("risk_neutral_price: needs a risk-neutral surface");
    return query.k * eval_surface(pi0, query.c, query.t);
}

double tradability_gap(const PriceQuery& query, const SurfaceSet& surfaces) {
    const PriceQuery unit{query.c, query.t, 1.0};
    return indifference_price(unit, surfaces) - risk_neutral_price(unit, surfaces.pi0());
}

} // namespace catprice
