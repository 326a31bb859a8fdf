#pragma once

/**
 * @file simulate.hpp
 * @brief Monte-Carlo engine for the index, the thinned claims and the
 * controlled wealth process
 *
 *   X_t = x0 + int_0^t a (1 + theta_s) q(theta_s) ds - sum_k Y_k 1{U_k <= q(theta_tau_k) / M}
 *
 * Paths are grouped in chunks of chunk_size; chunk i draws from its own
 * generator seeded from (seed, i), so results depend only on
 * (seed, chunk_size, n_paths) and never on the number of worker threads.
 * Every jump consumes the same draws (arrival, size, ownership uniform)
 * whatever the policy, so runs with equal seeds are pathwise coupled.
 */

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "catprice/demand.hpp"
#include "catprice/model.hpp"
#include "catprice/pricing.hpp"
#include "catprice/solver.hpp"

namespace catprice {

struct SimConfig {
    std::int64_t n_paths = 100000;
    std::uint64_t seed = 20240601;
    std::int64_t chunk_size = 4096;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned workers = 0;

    void validate() const;
};

/// Index sample: jump count and C_T per path.
struct IndexSample {
    std::vector<int> jump_counts;
    std::vector<double> terminal_index;
};

/// Compound Poisson index paths on (from_t, T] at rate lambda * M.
IndexSample sample_index_paths(const ClaimModel& model, double from_c, double from_t,
                               const SimConfig& config);

/// theta(c, t) in feedback form.
using FeedbackPolicy = std::function<double(double c, double t)>;

/**
 * Feedback policy frozen on a uniform time grid: theta is constant on
 * [t_j, t_{j+1}) and equal to policy(c, t_j), with c snapped to the
 * lattice (above the cutoff the cutoff node is used). Premium flow is
 * integrated exactly from the constant rates.
 */
class PolicySchedule {
public:
    PolicySchedule(const FeedbackPolicy& policy, const DemandCurve& curve, const Lattice& lattice,
                   double horizon, int n_steps);

    /// int_{t1}^{t2} a (1 + theta) q(theta) ds at node i, t1 <= t2.
    double premium(std::size_t node, double t1, double t2) const;
    /// q(theta(node, t)) / M.
    double ownership_prob(std::size_t node, double t) const;

    const Lattice& lattice() const { return lattice_; }
    double horizon() const { return horizon_; }

private:
    std::size_t step_index(double t) const;

    Lattice lattice_;
    double horizon_;
    int n_steps_;
    double dt_;
    std::vector<double> rate_;  // node-major, n_steps per node
    std::vector<double> share_; // node-major, n_steps per node
};

/// Schedule for theta* of a solved wealth surface on its own time grid.
PolicySchedule optimal_schedule(const PolicySurface& policy, const DemandCurve& curve);

/// One fully recorded path of the controlled process.
struct WealthPath {
    std::vector<double> jump_times;
    std::vector<double> claim_sizes;
    std::vector<char> owned;
    std::vector<double> index_after_jump;
    std::vector<double> wealth_after_jump;
    /// Premium earned on each inter-jump segment, the last one ending at T.
    std::vector<double> premium_segments;
    double terminal_wealth = 0.0;
    double terminal_index = 0.0;
};

struct WealthSample {
    std::vector<double> terminal_wealth;
    std::vector<double> terminal_index;
};

WealthSample simulate_wealth(const ClaimModel& model, const PolicySchedule& schedule, double x0,
                             double from_c, double from_t, const SimConfig& config);

/// Same paths as simulate_wealth, fully recorded (meant for small n_paths).
std::vector<WealthPath> simulate_wealth_paths(const ClaimModel& model, const PolicySchedule& schedule,
                                              double x0, double from_c, double from_t,
                                              const SimConfig& config);

struct Estimate {
    double mean;
    double std_error;
};

/// Sample mean and standard error; std_error is +inf for one sample.
Estimate summarize(const std::vector<double>& values);

/// Plain MC estimate of pi^0(c, t) = E(psi(C_T) | C_t = c).
Estimate mc_risk_neutral(const ClaimModel& model, const Payoff& payoff, double from_c, double from_t,
                         const SimConfig& config);

struct VerifyRow {
    std::string quantity;
    double estimate;
    double std_error;
    double analytic;
    double z_score;
};

/**
 * Checks the solved value function by simulation from (c, t = 0, x0).
 *
 * Rows: expected utility under theta* against -exp(-eta x0 - eta W(c, 0, k)),
 * the implied W at x0 + 1e6 against W(c, 0, k), and theta* +/- 0.1
 * (clamped to [0, m]) against the theta* estimate on coupled paths. The
 * perturbed rows are one-sided: z = max(0, (perturbed - optimal) / se).
 */
std::vector<VerifyRow> verify_value_function(const ClaimModel& model, const DemandCurve& curve,
                                             const Payoff& payoff, const ValueSurface& wealth,
                                             double c, double x0, const SimConfig& config);

} // namespace catprice
