#include "catprice/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace catprice {

namespace {

/// Per-chunk generator producing doubles in (0, 1].
class ChunkRng {
public:
    ChunkRng(std::uint64_t seed, std::uint64_t chunk) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                          0x9e3779b9u};
        engine_.seed(seq);
    }

    double uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// Inverse-CDF sampler over the claim atoms.
class AtomSampler {
public:
    explicit AtomSampler(const ClaimModel& model) {
        double acc = 0.0;
        for (const auto& a : model.atoms()) {
            acc += a.prob;
            cdf_.push_back(acc);
            sizes_.push_back(a.size);
        }
        cdf_.back() = 1.0;
    }

    double operator()(double u) const {
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return sizes_[std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), sizes_.size() - 1)];
    }

private:
    std::vector<double> cdf_;
    std::vector<double> sizes_;
};

/// Runs body(chunk_index, first_path, end_path, rng) over all chunks.
template <class Body>
void for_each_chunk(const SimConfig& config, Body&& body) {
    config.validate();
    const std::int64_t n_chunks = (config.n_paths + config.chunk_size - 1) / config.chunk_size;
    unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::int64_t>(workers, n_chunks));

    std::atomic<std::int64_t> next{0};
    auto run = [&] {
        for (std::int64_t c = next++; c < n_chunks; c = next++) {
            ChunkRng rng(config.seed, static_cast<std::uint64_t>(c));
            const std::int64_t first = c * config.chunk_size;
            const std::int64_t last = std::min(config.n_paths, first + config.chunk_size);
            body(first, last, rng);
        }
    };
    if (workers <= 1) {
        run();
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
}

void check_start(const ClaimModel& model, double from_c, double from_t) {
    if (!(from_t >= 0.0 && from_t <= model.horizon())) throw Error("simulation start time outside [0, T]");
    if (!(from_c >= 0.0)) throw Error("simulation start index must be >= 0");
}

/**
 * Simulates one path of the controlled process. The recorder receives
 * (segment_premium) for each inter-jump segment and
 * (time, size, owned, c_after, x_after) for each jump.
 */
template <class Recorder>
void wealth_path(const ClaimModel& model, const PolicySchedule& schedule, const AtomSampler& atoms,
                 double x0, double from_c, double from_t, ChunkRng& rng, Recorder&& rec,
                 double& x_out, double& c_out) {
    const double horizon = model.horizon();
    const double rate = model.jump_rate();
    const auto& lattice = schedule.lattice();
    double t = from_t;
    double c = from_c;
    double x = x0;
    std::size_t node = lattice.snap(c);
    for (;;) {
        const double tau = t - std::log(rng.uniform()) / rate;
        const double size = atoms(rng.uniform());
        const double u = rng.uniform();
        const double seg_end = std::min(tau, horizon);
        const double premium = schedule.premium(node, t, seg_end);
        x += premium;
        rec.segment(premium);
        if (tau > horizon) break;
        const bool owned = u <= schedule.ownership_prob(node, tau);
        if (owned) x -= size;
        c += size;
        node = lattice.snap(c);
        t = tau;
        rec.jump(tau, size, owned, c, x);
    }
    x_out = x;
    c_out = c;
}

struct NullRecorder {
    void segment(double) {}
    void jump(double, double, bool, double, double) {}
};

struct FullRecorder {
    WealthPath& path;
    void segment(double p) { path.premium_segments.push_back(p); }
    void jump(double t, double y, bool owned, double c, double x) {
        path.jump_times.push_back(t);
        path.claim_sizes.push_back(y);
        path.owned.push_back(owned ? 1 : 0);
        path.index_after_jump.push_back(c);
        path.wealth_after_jump.push_back(x);
    }
};

double clamp_loading(double theta, double m) { return std::clamp(theta, 0.0, m); }

} // namespace

void SimConfig::validate() const {
    if (n_paths < 1) throw Error("simulation: n_paths must be >= 1");
    if (chunk_size < 1) throw Error("simulation: chunk_size must be >= 1");
}

IndexSample sample_index_paths(const ClaimModel& model, double from_c, double from_t,
                               const SimConfig& config) {
    check_start(model, from_c, from_t);
    IndexSample out;
    out.jump_counts.resize(static_cast<std::size_t>(config.n_paths));
    out.terminal_index.resize(static_cast<std::size_t>(config.n_paths));
    const AtomSampler atoms(model);
    const double rate = model.jump_rate();
    const double horizon = model.horizon();
    for_each_chunk(config, [&](std::int64_t first, std::int64_t last, ChunkRng& rng) {
        for (std::int64_t p = first; p < last; ++p) {
            double t = from_t;
            double c = from_c;
            int jumps = 0;
            for (;;) {
                t -= std::log(rng.uniform()) / rate;
                const double size = atoms(rng.uniform());
                rng.uniform(); // ownership draw, kept for coupling with wealth paths
                if (t > horizon) break;
                c += size;
                ++jumps;
            }
            out.jump_counts[static_cast<std::size_t>(p)] = jumps;
            out.terminal_index[static_cast<std::size_t>(p)] = c;
        }
    });
    return out;
}

PolicySchedule::PolicySchedule(const FeedbackPolicy& policy, const DemandCurve& curve,
                               const Lattice& lattice, double horizon, int n_steps)
    : lattice_(lattice), horizon_(horizon), n_steps_(n_steps), dt_(horizon / n_steps) {
    if (n_steps < 1) throw Error("policy schedule: n_steps must be >= 1");
    const std::size_t n = lattice.n_nodes();
    const auto steps = static_cast<std::size_t>(n_steps);
    rate_.resize(n * steps);
    share_.resize(n * steps);
    const double a = curve.fair_premium();
    const double big_m = curve.market_size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < steps; ++j) {
            const double t = horizon * static_cast<double>(j) / n_steps;
            const double theta = policy(lattice.node(i), t);
            const double q = curve.q(theta);
            rate_[i * steps + j] = a * (1.0 + theta) * q;
            share_[i * steps + j] = q / big_m;
        }
    }
}

std::size_t PolicySchedule::step_index(double t) const {
    const double x = std::floor(t / dt_);
    if (x <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(x), static_cast<std::size_t>(n_steps_ - 1));
}

double PolicySchedule::premium(std::size_t node, double t1, double t2) const {
    if (t2 <= t1) return 0.0;
    // summed piece by piece (no cumulative differences) so that a policy
    // with pointwise larger rates earns at least as much, bit for bit
    const auto steps = static_cast<std::size_t>(n_steps_);
    const double* rate = &rate_[node * steps];
    std::size_t j = step_index(t1);
    const std::size_t last = step_index(t2);
    double total = 0.0;
    double start = t1;
    for (; j < last; ++j) {
        const double end = horizon_ * static_cast<double>(j + 1) / n_steps_;
        total += rate[j] * (end - start);
        start = end;
    }
    return total + rate[last] * (t2 - start);
}

double PolicySchedule::ownership_prob(std::size_t node, double t) const {
    return share_[node * static_cast<std::size_t>(n_steps_) + step_index(t)];
}

PolicySchedule optimal_schedule(const PolicySurface& policy, const DemandCurve& curve) {
    const int n_steps = static_cast<int>(policy.times.size()) - 1;
    return PolicySchedule([&](double c, double t) { return policy.at(c, t); }, curve, policy.lattice,
                          policy.horizon, std::max(n_steps, 1));
}

WealthSample simulate_wealth(const ClaimModel& model, const PolicySchedule& schedule, double x0,
                             double from_c, double from_t, const SimConfig& config) {
    check_start(model, from_c, from_t);
    WealthSample out;
    out.terminal_wealth.resize(static_cast<std::size_t>(config.n_paths));
    out.terminal_index.resize(static_cast<std::size_t>(config.n_paths));
    const AtomSampler atoms(model);
    for_each_chunk(config, [&](std::int64_t first, std::int64_t last, ChunkRng& rng) {
        NullRecorder rec;
        for (std::int64_t p = first; p < last; ++p) {
            const auto i = static_cast<std::size_t>(p);
            wealth_path(model, schedule, atoms, x0, from_c, from_t, rng, rec, out.terminal_wealth[i],
                        out.terminal_index[i]);
        }
    });
    return out;
}

std::vector<WealthPath> simulate_wealth_paths(const ClaimModel& model, const PolicySchedule& schedule,
                                              double x0, double from_c, double from_t,
                                              const SimConfig& config) {
    check_start(model, from_c, from_t);
    std::vector<WealthPath> out(static_cast<std::size_t>(config.n_paths));
    const AtomSampler atoms(model);
    for_each_chunk(config, [&](std::int64_t first, std::int64_t last, ChunkRng& rng) {
        for (std::int64_t p = first; p < last; ++p) {
            auto& path = out[static_cast<std::size_t>(p)];
            FullRecorder rec{path};
            wealth_path(model, schedule, atoms, x0, from_c, from_t, rng, rec, path.terminal_wealth,
                        path.terminal_index);
        }
    });
    return out;
}

Estimate summarize(const std::vector<double>& values) {
    if (values.empty()) throw Error("summarize: no samples");
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    if (values.size() == 1) return {mean, std::numeric_limits<double>::infinity()};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

Estimate mc_risk_neutral(const ClaimModel& model, const Payoff& payoff, double from_c, double from_t,
                         const SimConfig& config) {
    const auto sample = sample_index_paths(model, from_c, from_t, config);
    std::vector<double> values(sample.terminal_index.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = payoff(sample.terminal_index[i]);
    return summarize(values);
}

std::vector<VerifyRow> verify_value_function(const ClaimModel& model, const DemandCurve& curve,
                                             const Payoff& payoff, const ValueSurface& wealth,
                                             double c, double x0, const SimConfig& config) {
    if (wealth.kind != SurfaceKind::Wealth) throw Error("verify_value_function: needs a wealth surface");
    const double eta = model.eta();
    const double k = wealth.k;
    const double m = curve.m();
    const double w0 = eval_surface(wealth, c, 0.0);
    const auto policy = policy_surface(wealth, model, curve, payoff);
    const int n_steps = static_cast<int>(policy.times.size()) - 1;

    auto utilities = [&](const FeedbackPolicy& f, double start_wealth) {
        const PolicySchedule schedule(f, curve, policy.lattice, policy.horizon, n_steps);
        const auto sample = simulate_wealth(model, schedule, start_wealth, c, 0.0, config);
        std::vector<double> u(sample.terminal_wealth.size());
        for (std::size_t i = 0; i < u.size(); ++i)
            u[i] = -std::exp(-eta * (sample.terminal_wealth[i] + k * payoff(sample.terminal_index[i])));
        return u;
    };
    auto z_of = [](double diff, double se) {
        if (se == 0.0) return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        return diff / se;
    };
    const FeedbackPolicy optimal = [&](double cc, double t) { return policy.at(cc, t); };

    std::vector<VerifyRow> rows;
    const auto u_opt = utilities(optimal, x0);
    const auto est = summarize(u_opt);
    const double target = -std::exp(-eta * x0 - eta * w0);
    rows.push_back({"expected_utility", est.mean, est.std_error, target, z_of(est.mean - target, est.std_error)});

    // x0-invariance: implied W = -log(-E u) / eta - x0 from a shifted start
    constexpr double shift = 1e6;
    const auto u_shift = utilities(optimal, x0 + shift);
    const auto est_shift = summarize(u_shift);
    const double implied = -std::log(-est_shift.mean) / eta - (x0 + shift);
    const double implied_se = est_shift.std_error / (eta * std::abs(est_shift.mean));
    rows.push_back({"implied_W_shifted_x0", implied, implied_se, w0, z_of(implied - w0, implied_se)});

    for (double delta : {0.1, -0.1}) {
        const FeedbackPolicy perturbed = [&, delta](double cc, double t) {
            return clamp_loading(policy.at(cc, t) + delta, m);
        };
        const auto u = utilities(perturbed, x0);
        std::vector<double> diff(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) diff[i] = u[i] - u_opt[i];
        const auto d = summarize(diff);
        const auto e = summarize(u);
        rows.push_back({delta > 0 ? "perturbed_plus_0.1" : "perturbed_minus_0.1", e.mean, d.std_error,
                        est.mean, std::max(0.0, z_of(d.mean, d.std_error))});
    }
    return rows;
}

} // namespace catprice
