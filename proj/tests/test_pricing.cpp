#include <doctest.h>

#include "catprice/pricing.hpp"
#include "fixtures.hpp"

using namespace catprice;

namespace {

struct Solved {
    ClaimModel model = fixtures::example_model();
    Payoff payoff = fixtures::example_payoff();
    DemandCurve curve = fixtures::linear_curve(model);
    Lattice lattice = fixtures::example_lattice(model);
    SurfaceSet set;

    Solved() {
        SolveRequest req;
        req.wealth_k = {0.0, 1.0, -1.0, 0.5};
        req.seller_k = {0.0, 1.0, 0.1, 0.01, 0.001};
        req.risk_neutral = true;
        set = solve_surfaces(model, curve, payoff, lattice, SolverConfig{}, req);
    }
};

const Solved& solved() {
    static const Solved s;
    return s;
}

double gamma_closed_form(const ClaimModel& model, double m) {
    const double a = fair_premium(model);
    return (a * (m - 1.0) - no_derivative_argument(model)) / (2.0 * a);
}

} // namespace

TEST_CASE("kappa") {
    const auto model = fixtures::example_model();
    const auto curve = fixtures::linear_curve(model);
    const double z0 = no_derivative_argument(model);
    CHECK(z0 == doctest::Approx(-3262.0535).epsilon(1e-7));
    const double kap = kappa(model, curve);
    CHECK(kap == doctest::Approx(1.1309e7).epsilon(1e-4));
    CHECK(fixtures::rel_diff(kap, brute_force_mu(curve, z0, 200000).value) < 1e-6);

    const auto tiny = model.with_eta(1e-12);
    const auto tiny_curve = fixtures::linear_curve(tiny);
    CHECK(no_derivative_argument(tiny) == doctest::Approx(-fair_premium(tiny)).epsilon(1e-5));
    CHECK(fixtures::rel_diff(kappa(tiny, tiny_curve), mu_gamma(tiny_curve, -fair_premium(tiny)).value) < 1e-4);

    // a + z0 < 0, so the degenerate curve leaves nothing to earn
    const auto flat = fixtures::linear_curve(model, 1e-6);
    const double expected = model.market_size() * std::max(fair_premium(model) + z0, 0.0);
    CHECK(std::abs(kappa(model, flat) - expected) <= 1e-6 * model.market_size() * fair_premium(model));
}

TEST_CASE("no-derivative price is zero and tail is pinned") {
    const auto& s = solved();
    const auto& w0 = s.set.wealth_at(0.0);
    for (double t : w0.times)
        for (std::size_t i = 0; i < s.lattice.n_nodes(); ++i)
            CHECK(std::abs(indifference_price({s.lattice.node(i), t, 0.0}, s.set)) <= 1e-8 * 2e7);
    for (double k : {1.0, -1.0, 0.5}) {
        for (double t : s.set.wealth_at(k).times)
            for (double c : {3e7, 3.5e7, 1e8})
                CHECK(fixtures::rel_diff(indifference_price({c, t, k}, s.set), k * 2e7) <= 1e-8);
    }
    CHECK(indifference_price({5e7, 0.0, 1.0}, s.set) == 2e7);
}

TEST_CASE("terminal price equals the payoff") {
    const auto& s = solved();
    for (std::size_t i = 0; i < s.lattice.n_nodes(); ++i) {
        const double c = s.lattice.node(i);
        CHECK(indifference_price({c, 0.25, 1.0}, s.set) == doctest::Approx(s.payoff(c)).epsilon(1e-12));
        CHECK(indifference_price({c, 0.25, 0.5}, s.set) == doctest::Approx(0.5 * s.payoff(c)).epsilon(1e-12));
    }
    CHECK(indifference_price({2e7, 0.25, 1.0}, s.set) == 1e7);
}

TEST_CASE("buyer price bounds and buyer/seller relation") {
    const auto& s = solved();
    for (double k : {1.0, 0.5}) {
        const auto& w = s.set.wealth_at(k);
        for (double t : w.times)
            for (std::size_t i = 0; i < s.lattice.n_nodes(); ++i) {
                const double p = indifference_price({s.lattice.node(i), t, k}, s.set);
                CHECK(p >= -1e-8 * 2e7);
                CHECK(p <= k * 2e7 * (1.0 + 1e-12));
            }
    }
    for (double c : {0.0, 1e7, 1.5e7, 2.5e7}) {
        const PriceQuery q{c, 0.0, 1.0};
        const double ps = seller_indifference_price(q, s.set);
        CHECK(ps == -indifference_price({c, 0.0, -1.0}, s.set));
        // observed in every example: the seller asks more than the buyer bids
        CHECK(indifference_price(q, s.set) < ps);
    }
    CHECK_THROWS_AS(indifference_price({1e7, 0.0, 2.0}, s.set), Error);
    CHECK_THROWS_AS(indifference_price({1e7, 0.3, 1.0}, s.set), Error);
}

TEST_CASE("optimal loading") {
    const auto& s = solved();
    const double base = gamma_closed_form(s.model, 2.0);
    CHECK(base == doctest::Approx(1.0931).epsilon(0.0005 / 1.0931));

    const auto& w0 = s.set.wealth_at(0.0);
    for (double c : {0.0, 1.5e7, 2.9e7, 4e7})
        for (double t : {0.0, 0.1, 0.25})
            CHECK(optimal_loading({c, t, 0.0}, w0, s.model, s.curve, s.payoff) ==
                  doctest::Approx(base).epsilon(1e-9));

    const auto& w1 = s.set.wealth_at(1.0);
    const double dip = optimal_loading({1.5e7, 0.0, 1.0}, w1, s.model, s.curve, s.payoff);
    MESSAGE("theta*(1.5e7, 0) = " << dip);
    CHECK(std::abs(dip - 0.93) <= 0.03);
    for (double t : {0.0, 0.1})
        CHECK(optimal_loading({3e7, t, 1.0}, w1, s.model, s.curve, s.payoff) == doctest::Approx(base).epsilon(1e-9));

    const auto policy = policy_surface(w1, s.model, s.curve, s.payoff);
    for (const auto& row : policy.theta)
        for (double th : row) {
            CHECK(th >= 0.0);
            CHECK(th <= 2.0);
        }
    CHECK(policy.at(1.5e7, 0.0) == doctest::Approx(dip).epsilon(1e-12));

    const auto flat_policy = policy_surface(w0, s.model, s.curve, s.payoff);
    for (const auto& row : flat_policy.theta)
        for (double th : row) CHECK(th == doctest::Approx(base).epsilon(1e-9));

    CHECK_THROWS_AS(optimal_loading({1e7, 0.0, 1.0}, s.set.pi0(), s.model, s.curve, s.payoff), Error);
}

TEST_CASE("certainty-equivalence seller price") {
    const auto& s = solved();
    for (double c : {0.0, 1e7, 2e7}) CHECK(certainty_equivalence_seller({c, 0.0, 0.0}, s.set.seller_at(0.0), s.model) == 0.0);
    for (double k : {1.0, 0.1})
        for (double c : {3e7, 4e7})
            CHECK(certainty_equivalence_seller({c, 0.1, k}, s.set.seller_at(k), s.model) ==
                  doctest::Approx(k * 2e7).epsilon(1e-12));

    const auto small = s.model.with_beta(1e-12);
    SolveRequest req;
    req.seller_k = {1.0};
    req.risk_neutral = true;
    const auto set = solve_surfaces(small, s.curve, s.payoff, s.lattice, SolverConfig{}, req);
    for (double c : {0.0, 5e6, 1.5e7, 2.5e7}) {
        const double pis = certainty_equivalence_seller({c, 0.0, 1.0}, set.seller_at(1.0), small);
        const double pi0 = risk_neutral_price({c, 0.0, 1.0}, set.pi0());
        CHECK(fixtures::rel_diff(pis, pi0) < 1e-4);
    }
    CHECK_THROWS_AS(certainty_equivalence_seller({1e7, 0.0, 1.0}, s.set.wealth_at(1.0), s.model), Error);
}

TEST_CASE("denomination limit") {
    const auto& s = solved();
    const PriceQuery q{1.5e7, 0.0, 1.0};
    const auto seq = denomination_limit(q, {1, 10, 100, 1000}, s.set, s.model);
    CHECK(seq[0] == certainty_equivalence_seller(q, s.set.seller_at(1.0), s.model));
    const double pi0 = risk_neutral_price(q, s.set.pi0());
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        CHECK(seq[i] > seq[i + 1]);
        CHECK(seq[i + 1] > pi0);
    }
    const double ratio = (seq[1] - pi0) / (seq[2] - pi0);
    MESSAGE("N = 10 to N = 100 error ratio: " << ratio);
    CHECK(ratio >= 5.0);

    // all-tail query: deterministic payoff
    for (double v : denomination_limit({4e7, 0.0, 1.0}, {1, 10, 100}, s.set, s.model))
        CHECK(v == doctest::Approx(2e7).epsilon(1e-12));
    CHECK_THROWS_AS(denomination_limit(q, {0}, s.set, s.model), Error);
    CHECK_THROWS_AS(denomination_limit(q, {7}, s.set, s.model), Error);
}

TEST_CASE("risk-neutral price") {
    const auto& s = solved();
    const auto& pi0 = s.set.pi0();
    for (std::size_t i = 0; i < s.lattice.n_nodes(); i += 7)
        CHECK(risk_neutral_price({s.lattice.node(i), 0.25, 2.0}, pi0) == 2.0 * s.payoff(s.lattice.node(i)));
    CHECK(risk_neutral_price({3e7, 0.0, 3.0}, pi0) == 6e7);
    CHECK(risk_neutral_price({1.5e7, 0.0, 1.0}, pi0) == doctest::Approx(1.1875e7).epsilon(1e-3));
    CHECK_THROWS_AS(risk_neutral_price({1.5e7, 0.0, 1.0}, s.set.wealth_at(1.0)), Error);
}

TEST_CASE("tradability gap") {
    const auto& s = solved();
    for (double t : {0.0, 0.1, 0.25}) CHECK(tradability_gap({3e7, t, 1.0}, s.set) == 0.0);
    for (std::size_t i = 0; i < s.lattice.n_nodes(); ++i)
        CHECK(std::abs(tradability_gap({s.lattice.node(i), 0.25, 1.0}, s.set)) <= 1e-12 * 2e7);
    for (double t : s.set.pi0().times)
        for (std::size_t i = 0; i < s.lattice.n_nodes(); ++i)
            CHECK(tradability_gap({s.lattice.node(i), t, 1.0}, s.set) >= -1e-6 * 2e7);
}

TEST_CASE("indifference price tends to the risk-neutral price as eta -> 0") {
    const auto& s = solved();
    std::vector<double> etas{1e-6, 1e-7, 1e-8, 1e-9};
    std::vector<std::vector<double>> gaps;
    const std::vector<PriceQuery> points{{5e6, 0.0, 1.0}, {1e7, 0.0, 1.0}, {1.5e7, 0.0, 1.0},
                                         {2.5e7, 0.0, 1.0}, {1.5e7, 0.1, 1.0}};
    for (double eta : etas) {
        const auto model = s.model.with_eta(eta);
        const auto curve = fixtures::linear_curve(model);
        SolveRequest req;
        req.wealth_k = {1.0};
        req.risk_neutral = true;
        const auto set = solve_surfaces(model, curve, s.payoff, s.lattice, SolverConfig{}, req);
        std::vector<double> g;
        for (const auto& q : points) g.push_back(std::abs(tradability_gap(q, set)));
        gaps.push_back(g);
    }
    for (std::size_t j = 0; j < points.size(); ++j)
        for (std::size_t e = 0; e + 1 < etas.size(); ++e) CHECK(gaps[e + 1][j] < gaps[e][j]);
}

TEST_CASE("surface lookups") {
    const auto& s = solved();
    CHECK(s.set.wealth_at(1.0 + 1e-14).k == 1.0);
    CHECK_THROWS_AS(s.set.wealth_at(1.001), Error);
    CHECK_THROWS_AS(s.set.seller_at(-1.0), Error);
    CHECK_THROWS_AS(SurfaceSet{}.pi0(), Error);
    CHECK(s.set.kappa == kappa(s.model, s.curve));
}
