// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "catprice/simulate.hpp"
#include "fixtures.hpp"

using namespace catprice;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  %2d  %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
}

struct Example {
    ClaimModel model = fixtures::example_model();
    Payoff payoff = fixtures::example_payoff();
    DemandCurve curve = fixtures::linear_curve(model);
    Lattice lattice = fixtures::example_lattice(model);

    ValueSurface solve(SurfaceKind kind, double k, SolverConfig cfg = SolverConfig{}) const {
        return integrate_backward(kind, k, model, curve, payoff, lattice, cfg);
    }
};

SimConfig million_paths() {
    SimConfig c;
    c.n_paths = 1000000;
    c.seed = 20240601;
    return c;
}

template <class... Args>
std::string format(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

} // namespace

int main() {
    const Example p;
    const double big_a = p.payoff.tail_value();

    criterion(1, "no-derivative risk loading", [&] {
        const auto start = Clock::now();
        const double z0 = no_derivative_argument(p.model);
        const double theta = mu_gamma(p.curve, z0).argmax;
        const double elapsed = seconds_since(start);
        const double a = fair_premium(p.model);
        const double closed = (a * (p.curve.m() - 1.0) - z0) / (2.0 * a);
        const bool ok = std::abs(theta - closed) <= 1e-12 && std::abs(theta - 1.0931) <= 0.0005 && elapsed < 1e-3;
        return Outcome{ok, format("theta* = %.7f, closed form %.7f, target 1.0931 +/- 0.0005, %.3g ms", theta,
                                  closed, elapsed * 1e3)};
    });

    criterion(2, "derivative-induced loading drop", [&] {
        const auto start = Clock::now();
        const auto w = p.solve(SurfaceKind::Wealth, 1.0);
        const double elapsed = seconds_since(start);
        const double theta = optimal_loading({1.5e7, 0.0, 1.0}, w, p.model, p.curve, p.payoff);
        const bool ok = theta >= 0.90 && theta <= 0.96 && elapsed < 5.0;
        return Outcome{ok, format("theta*(1.5e7, 0) = %.5f in [0.90, 0.96], solve %.2f s (< 5 s, %zu nodes)", theta,
                                  elapsed, p.lattice.n_nodes())};
    });

    criterion(3, "tail pinning", [&] {
        SolveRequest req;
        req.wealth_k = {1.0};
        const auto set = solve_surfaces(p.model, p.curve, p.payoff, p.lattice, SolverConfig{}, req);
        double worst = 0.0;
        const auto& w = set.wealth_at(1.0);
        for (double t : w.times) {
            for (std::size_t i = p.lattice.n_nodes() - 1; i < p.lattice.n_nodes(); ++i)
                worst = std::max(worst, std::abs(indifference_price({p.lattice.node(i), t, 1.0}, set) - big_a));
            for (double c : {3e7, 3.05e7, 4e7, 1e9})
                worst = std::max(worst, std::abs(indifference_price({c, t, 1.0}, set) - big_a));
            // the stored slice itself, without the tail shortcut
            worst = std::max(worst, std::abs(eval_surface(w, 3e7, t) - w.tail_rate * (w.horizon - t) - big_a));
        }
        return Outcome{worst <= 1e-8 * big_a, format("max |p_b - 2e7| = %.3g over %zu slices (tol %.3g)", worst,
                                                     w.times.size(), 1e-8 * big_a)};
    });

    criterion(4, "no-derivative closed form", [&] {
        const auto w = p.solve(SurfaceKind::Wealth, 0.0);
        const double kap = kappa(p.model, p.curve);
        double worst = 0.0;
        for (std::size_t j = 0; j < w.times.size(); ++j) {
            const double expected = kap * (p.model.horizon() - w.times[j]);
            for (double v : w.values[j]) {
                const double err = expected == 0.0 ? (v == 0.0 ? 0.0 : INFINITY) : std::abs(v - expected) / expected;
                worst = std::max(worst, err);
            }
        }
        const double oracle = brute_force_mu(p.curve, no_derivative_argument(p.model), 1 << 20).value;
        const double kappa_err = fixtures::rel_diff(kap, oracle);
        return Outcome{worst <= 1e-8 && kappa_err <= 1e-6,
                       format("max rel |W - kappa (T - t)| = %.3g (tol 1e-8), kappa = %.6e vs oracle rel %.3g (tol 1e-6)",
                              worst, kap, kappa_err)};
    });

    criterion(5, "mu convexity, monotonicity and closed form", [&] {
        std::mt19937_64 gen(20240601);
        const double a = p.curve.fair_premium();
        const double m = p.curve.m();
        const double scale = p.curve.market_size() * a * (1.0 + m);
        std::uniform_real_distribution<double> zdist(-10.0 * a * (1.0 + m), 10.0 * a);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst_convex = -INFINITY, worst_mono = -INFINITY, worst_rel = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double z1 = zdist(gen), z2 = zdist(gen);
            const double s = unit(gen);
            const double mix = mu_gamma(p.curve, s * z1 + (1 - s) * z2).value;
            const double chord = s * mu_gamma(p.curve, z1).value + (1 - s) * mu_gamma(p.curve, z2).value;
            worst_convex = std::max(worst_convex, mix - chord);
            if (z1 > z2) std::swap(z1, z2);
            worst_mono = std::max(worst_mono, mu_gamma(p.curve, z1).value - mu_gamma(p.curve, z2).value);
        }
        for (int i = 0; i < 1000; ++i) {
            const double z = zdist(gen);
            worst_rel = std::max(worst_rel, fixtures::rel_diff(mu_gamma(p.curve, z).value,
                                                               brute_force_mu(p.curve, z, 4096).value));
        }
        const double tol = 1e-8 * scale;
        const bool ok = worst_convex <= tol && worst_mono <= tol && worst_rel <= 1e-6;
        return Outcome{ok, format("convexity excess %.3g, monotonicity excess %.3g (tol %.3g), "
                                  "closed form vs brute force rel %.3g (tol 1e-6)",
                                  worst_convex, worst_mono, tol, worst_rel)};
    });

    criterion(6, "value-function verification", [&] {
        const auto start = Clock::now();
        SolverConfig cfg;
        cfg.store_every = 1;
        std::ostringstream detail;
        bool ok = true;
        for (const auto& [k, c] : {std::pair{0.0, 0.0}, std::pair{1.0, 1.5e7}}) {
            const auto w = p.solve(SurfaceKind::Wealth, k, cfg);
            for (const auto& row : verify_value_function(p.model, p.curve, p.payoff, w, c, 0.0, million_paths())) {
                ok = ok && std::abs(row.z_score) <= 3.0;
                detail << row.quantity << "[k=" << k << "] z=" << format("%.2f", row.z_score) << "; ";
            }
        }
        const double elapsed = seconds_since(start);
        ok = ok && elapsed < 60.0;
        detail << format("10^6 paths, %.1f s (< 60 s)", elapsed);
        return Outcome{ok, detail.str()};
    });

    criterion(7, "risk-neutral cross-check", [&] {
        const auto pi0 = p.solve(SurfaceKind::RiskNeutral, 1.0);
        const double solved = eval_surface(pi0, 1.5e7, 0.0);
        const auto mc = mc_risk_neutral(p.model, p.payoff, 1.5e7, 0.0, million_paths());
        const double z = (mc.mean - solved) / mc.std_error;
        double worst = 0.0;
        for (std::size_t i = 0; i < p.lattice.n_nodes(); i += 10) {
            const double c = p.lattice.node(i);
            const double oracle = fixtures::poisson_convolution_pi0(p.model, p.payoff, p.lattice.step(), c, 0.0);
            worst = std::max(worst, fixtures::rel_diff(eval_surface(pi0, c, 0.0), oracle));
        }
        const double oracle_mid = fixtures::poisson_convolution_pi0(p.model, p.payoff, p.lattice.step(), 1.5e7, 0.0);
        worst = std::max(worst, fixtures::rel_diff(solved, oracle_mid));
        return Outcome{std::abs(z) <= 3.0 && worst <= 1e-6,
                       format("pi0(1.5e7, 0) = %.6e, MC %.6e +/- %.3g (z = %.2f); Poisson-sum oracle max rel %.3g "
                              "(tol 1e-6)",
                              solved, mc.mean, mc.std_error, z, worst)};
    });

    criterion(8, "tradability gap", [&] {
        SolveRequest req;
        req.wealth_k = {1.0};
        req.risk_neutral = true;
        const auto set = solve_surfaces(p.model, p.curve, p.payoff, p.lattice, SolverConfig{}, req);
        double lowest = INFINITY;
        for (std::size_t i = 0; i < p.lattice.n_nodes(); ++i)
            lowest = std::min(lowest, tradability_gap({p.lattice.node(i), 0.0, 1.0}, set));
        return Outcome{lowest >= -1e-6 * big_a,
                       format("min over nodes of p_b - pi0 at t = 0: %.6g (>= %.3g)", lowest, -1e-6 * big_a)};
    });

    criterion(9, "denomination limit", [&] {
        SolveRequest req;
        req.seller_k = {0.1, 0.01};
        req.risk_neutral = true;
        const auto set = solve_surfaces(p.model, p.curve, p.payoff, p.lattice, SolverConfig{}, req);
        const PriceQuery q{1.5e7, 0.0, 1.0};
        const auto seq = denomination_limit(q, {10, 100}, set, p.model);
        const double pi0 = risk_neutral_price(q, set.pi0());
        const double e10 = std::abs(seq[0] - pi0), e100 = std::abs(seq[1] - pi0);
        return Outcome{e10 >= 5.0 * e100,
                       format("|N pi_s - pi0|: N=10 %.6g, N=100 %.6g, factor %.3f (>= 5)", e10, e100, e10 / e100)};
    });

    criterion(10, "risk-neutral limit in eta", [&] {
        std::vector<double> gaps;
        for (double eta : {1e-6, 1e-7, 1e-8}) {
            const auto model = p.model.with_eta(eta);
            const auto curve = fixtures::linear_curve(model);
            SolveRequest req;
            req.wealth_k = {1.0};
            req.risk_neutral = true;
            const auto set = solve_surfaces(model, curve, p.payoff, p.lattice, SolverConfig{}, req);
            gaps.push_back(std::abs(tradability_gap({1.5e7, 0.0, 1.0}, set)));
        }
        return Outcome{gaps[1] < gaps[0] && gaps[2] < gaps[1],
                       format("|p_b - pi0| at eta = 1e-6, 1e-7, 1e-8: %.6g, %.6g, %.6g", gaps[0], gaps[1], gaps[2])};
    });

    criterion(11, "RK4 order", [&] {
        std::vector<std::vector<double>> w0;
        for (int n : {100, 200, 400, 800})
            w0.push_back(p.solve(SurfaceKind::Wealth, 1.0, SolverConfig{n, n, 0.0}).values.back());
        auto diff = [](const std::vector<double>& a, const std::vector<double>& b) {
            double d = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
            return d;
        };
        const double r1 = diff(w0[0], w0[1]) / diff(w0[1], w0[2]);
        const double r2 = diff(w0[1], w0[2]) / diff(w0[2], w0[3]);
        const bool ok = r1 >= 12.0 && r1 <= 20.0 && r2 >= 12.0 && r2 <= 20.0;
        return Outcome{ok, format("step-halving ratios %.3f (100/200/400), %.3f (200/400/800) in [12, 20]", r1, r2)};
    });

    criterion(12, "pathwise clamp dominance", [&] {
        const double m = p.curve.m();
        const FeedbackPolicy raw = [m](double c, double t) {
            return -0.5 + (m + 1.0) * std::fmod(c / 7e6 + 4.0 * t, 1.0);
        };
        const FeedbackPolicy clamped = [&](double c, double t) { return std::clamp(raw(c, t), 0.0, m); };
        const PolicySchedule a(raw, p.curve, p.lattice, p.model.horizon(), 2000);
        const PolicySchedule b(clamped, p.curve, p.lattice, p.model.horizon(), 2000);
        SimConfig cfg;
        cfg.n_paths = 10000;
        const auto pa = simulate_wealth_paths(p.model, a, 0.0, 0.0, 0.0, cfg);
        const auto pb = simulate_wealth_paths(p.model, b, 0.0, 0.0, 0.0, cfg);
        std::size_t bad_paths = 0, strict = 0;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            bool bad = pa[i].jump_times != pb[i].jump_times || pa[i].owned != pb[i].owned;
            for (std::size_t j = 0; !bad && j < pa[i].premium_segments.size(); ++j) {
                const double gap = pb[i].premium_segments[j] - pa[i].premium_segments[j];
                bad = gap < 0.0;
                strict += gap > 0.0;
            }
            bad_paths += bad;
        }
        return Outcome{bad_paths == 0 && strict > 0,
                       format("%zu of %zu coupled paths violate dominance; %zu segments strictly better", bad_paths,
                              pa.size(), strict)};
    });

    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
