#include "catprice/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace catprice {

namespace {

constexpr int kHFamilyGrid = 4096;
constexpr int kScanPoints = 1024;
constexpr double kGoldenWidth = 1e-10;

double poly_eval(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

double poly_deriv(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) r = r * x + static_cast<double>(k) * c[k];
    return r;
}

void check_bounds(double m, double market_size) {
    if (!(std::isfinite(m) && m > 0.0)) throw Error("demand: m must be > 0");
    if (!(std::isfinite(market_size) && market_size >= 1.0)) throw Error("demand: M must be >= 1");
}

/// Unscaled H(xi) of an HFamily spec.
double h_unscaled(const HFamilyDemand& s, double xi) {
    const double e = s.exp_factor ? std::exp(2.0 * xi / (1.0 + s.m)) : 1.0;
    return poly_eval(s.poly, xi) * e;
}

double h_unscaled_deriv(const HFamilyDemand& s, double xi) {
    if (!s.exp_factor) return poly_deriv(s.poly, xi);
    const double r = 2.0 / (1.0 + s.m);
    return std::exp(r * xi) * (poly_deriv(s.poly, xi) + r * poly_eval(s.poly, xi));
}

/// int_lo^hi exp(-2 xi / (1 + m)) H_unscaled(xi) d xi
double h_mass(const HFamilyDemand& s, double lo, double hi) {
    const double r = 2.0 / (1.0 + s.m);
    return adaptive_simpson([&](double xi) { return std::exp(-r * xi) * h_unscaled(s, xi); }, lo,
                            hi, 1e-12);
}

template <class F>
double golden_max(F&& f, double lo, double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > kGoldenWidth) {
        // >= keeps the left bracket on ties
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 >= f2 ? x1 : x2;
}

MuResult scan_and_refine(const DemandCurve& curve, double z, int n) {
    const double m = curve.m();
    auto f = [&](double alpha) { return curve.objective(alpha, z); };
    int best = 0;
    double best_val = f(0.0);
    for (int i = 1; i <= n; ++i) {
        const double alpha = m * static_cast<double>(i) / n;
        const double v = f(alpha);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double lo = m * static_cast<double>(std::max(best - 1, 0)) / n;
    const double hi = m * static_cast<double>(std::min(best + 1, n)) / n;
    const double scan_alpha = m * static_cast<double>(best) / n;
    const double refined = golden_max(f, lo, hi);
    const double refined_val = f(refined);
    if (refined_val > best_val) return {refined_val, refined};
    return {best_val, scan_alpha};
}

} // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw Error("monotone interpolation needs >= 2 matching samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw Error("monotone interpolation abscissae must increase");

    std::vector<double> slope(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) slope[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    d_.assign(n, 0.0);
    d_[0] = slope[0];
    d_[n - 1] = slope[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
        d_[i] = slope[i - 1] * slope[i] <= 0.0 ? 0.0 : 0.5 * (slope[i - 1] + slope[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (slope[i] == 0.0) {
            d_[i] = d_[i + 1] = 0.0;
            continue;
        }
        const double alpha = d_[i] / slope[i];
        const double beta = d_[i + 1] / slope[i];
        const double r = alpha * alpha + beta * beta;
        if (r > 9.0) {
            const double tau = 3.0 / std::sqrt(r);
            d_[i] = tau * alpha * slope[i];
            d_[i + 1] = tau * beta * slope[i];
        }
    }
}

double MonotoneCubic::operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] +
           (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * d_[i + 1];
}

DemandCurve::DemandCurve(DemandSpec spec, double fair_premium) : spec_(std::move(spec)), a_(fair_premium) {
    if (!(std::isfinite(a_) && a_ > 0.0)) throw Error("demand: fair premium must be > 0");
    std::visit(
        [this](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearDemand>) {
                check_bounds(s.m, s.market_size);
                m_ = s.m;
                market_size_ = s.market_size;
            } else if constexpr (std::is_same_v<T, PowerDemand>) {
                check_bounds(s.m, s.market_size);
                if (!(std::isfinite(s.nu) && s.nu > 0.0)) throw Error("demand: nu must be > 0");
                m_ = s.m;
                market_size_ = s.market_size;
            } else if constexpr (std::is_same_v<T, HFamilyDemand>) {
                check_bounds(s.m, s.market_size);
                if (s.poly.empty()) throw Error("demand: H polynomial needs coefficients");
                m_ = s.m;
                market_size_ = s.market_size;
                h_scale_ = s.scale ? *s.scale : s.market_size / h_mass(s, 0.0, s.m);
                if (!std::isfinite(h_scale_)) throw Error("demand: H normalization is degenerate");
                std::vector<double> grid(kHFamilyGrid + 1), q(kHFamilyGrid + 1);
                double cum = 0.0;
                grid[0] = 0.0;
                q[0] = s.market_size;
                for (int i = 1; i <= kHFamilyGrid; ++i) {
                    grid[i] = s.m * static_cast<double>(i) / kHFamilyGrid;
                    cum += h_mass(s, grid[i - 1], grid[i]);
                    q[i] = s.market_size - h_scale_ * cum;
                }
                cached_ = MonotoneCubic(std::move(grid), std::move(q));
            } else {
                if (s.theta.size() < 2 || s.theta.size() != s.q.size())
                    throw Error("demand: tabulated curve needs >= 2 (theta, q) samples");
                m_ = s.theta.back();
                market_size_ = s.q.front();
                check_bounds(m_, market_size_);
                if (s.theta.front() != 0.0 || s.q.back() != 0.0)
                    throw Error("demand: tabulated curve must start at (0, M) and end at (m, 0)");
                for (std::size_t i = 1; i < s.q.size(); ++i)
                    if (!(s.q[i] < s.q[i - 1]))
                        throw Error("demand: tabulated q must be strictly decreasing");
                cached_ = MonotoneCubic(s.theta, s.q);
            }
        },
        spec_);
}

double DemandCurve::q(double theta) const {
    if (theta <= 0.0) return market_size_;
    if (theta >= m_) return 0.0;
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearDemand>) {
                return s.market_size * (1.0 - theta / s.m);
            } else if constexpr (std::is_same_v<T, PowerDemand>) {
                return s.market_size * (1.0 - std::pow(theta / s.m, s.nu));
            } else {
                return std::clamp(cached_(theta), 0.0, market_size_);
            }
        },
        spec_);
}

double DemandCurve::h(double xi) const {
    const auto* s = std::get_if<HFamilyDemand>(&spec_);
    if (!s) throw Error("demand: H is only defined for HFamily curves");
    return h_scale_ * h_unscaled(*s, xi);
}

double DemandCurve::h_scale() const {
    if (!std::holds_alternative<HFamilyDemand>(spec_))
        throw Error("demand: H is only defined for HFamily curves");
    return h_scale_;
}

double q_eval(const DemandCurve& curve, double theta) { return curve.q(theta); }

MuResult mu_gamma(const DemandCurve& curve, double z) {
    if (const auto* lin = std::get_if<LinearDemand>(&curve.spec())) {
        const double a = curve.fair_premium();
        const double m = lin->m;
        const double big_m = lin->market_size;
        if (z <= -a * (m + 1.0)) return {0.0, m};
        if (z >= a * (m - 1.0)) return {big_m * (a + z), 0.0};
        const double s = a * (1.0 + m) + z;
        return {big_m * s * s / (4.0 * a * m), (a * (m - 1.0) - z) / (2.0 * a)};
    }
    return scan_and_refine(curve, z, kScanPoints);
}

MuResult brute_force_mu(const DemandCurve& curve, double z, int grid_n) {
    if (grid_n < 1000) throw Error("brute_force_mu: grid_n must be >= 1000");
    return scan_and_refine(curve, z, grid_n);
}

HFamilyCheck hfamily_validate(const DemandCurve& curve) {
    const auto* s = std::get_if<HFamilyDemand>(&curve.spec());
    if (!s) throw Error("hfamily_validate: curve is not an HFamily curve");
    HFamilyCheck out{true, {}};
    const double scale = curve.h_scale();
    constexpr int n = 10000;
    bool positive = true;
    bool increasing = true;
    for (int i = 1; i < n; ++i) {
        const double xi = s->m * static_cast<double>(i) / n;
        if (!(scale * h_unscaled(*s, xi) > 0.0)) positive = false;
        if (!(scale * h_unscaled_deriv(*s, xi) > 0.0)) increasing = false;
    }
    if (!increasing) out.violations.emplace_back("(ii) H' > 0 on (0, m)");
    if (!positive) out.violations.emplace_back("(iii) H > 0 on (0, m)");
    const double mass = scale * h_mass(*s, 0.0, s->m);
    if (!(std::abs(mass - s->market_size) <= 1e-8 * s->market_size))
        out.violations.emplace_back("(iv) int_0^m exp(-2xi/(1+m)) H(xi) dxi = M");
    out.ok = out.violations.empty();
    return out;
}

} // namespace catprice
