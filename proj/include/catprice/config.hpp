#pragma once

/**
 * @file config.hpp
 * @brief JSON run configuration.
 *
 * Schema (units: currency for sizes/levels, years for times):
 *
 *   model:  { lambda, M, T, eta, beta?, x0?, claims: [{size, prob}, ...] }
 *   payoff: { type: "spread", K, L }
 *         | { type: "tabulated", step, values: [...], A }
 *   demand: { type: "linear", m }
 *         | { type: "power", m, nu }
 *         | { type: "hfamily", m, poly: [...], exp_factor?, scale? }
 *         | { type: "tabulated", theta: [...], q: [...] }
 *   solver: { n_steps?, store_every?, delta?, tol_check? }
 *   sim:    { n_paths?, seed?, chunk_size? }
 *   output: { csv?, svg?, queries?: [{c, t, k}], denominations?: [N, ...] }
 *
 * Unknown keys are rejected; errors carry the offending field path.
 */

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "catprice/demand.hpp"
#include "catprice/model.hpp"
#include "catprice/pricing.hpp"
#include "catprice/simulate.hpp"
#include "catprice/solver.hpp"

namespace catprice {

class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& message)
        : Error(path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct PayoffConfig {
    std::string type = "spread";
    double strike = 0.0;
    double cutoff = 0.0;
    double step = 0.0;
    std::vector<double> values;
    double tail = 0.0;
};

struct DemandConfig {
    std::string type = "linear";
    double m = 0.0;
    double nu = 1.0;
    std::vector<double> poly;
    bool exp_factor = true;
    std::optional<double> scale;
    std::vector<double> theta;
    std::vector<double> q;
};

struct OutputConfig {
    std::string csv;
    std::string svg;
    std::vector<PriceQuery> queries;
    std::vector<int> denominations;
};

struct RunConfig {
    ClaimModelParams model;
    double x0 = 0.0;
    PayoffConfig payoff;
    DemandConfig demand;
    SolverConfig solver;
    double delta = 0.0; ///< lattice step; 0 selects the natural step
    SimConfig sim;
    OutputConfig output;

    ClaimModel claim_model() const;
    Payoff make_payoff() const;
    DemandCurve demand_curve(const ClaimModel& model) const;
    Lattice lattice(const ClaimModel& model, const Payoff& payoff) const;
};

/// Parameters of the worked example (T = 1/4, lambda = 0.01, M = 1e4, m = 2,
/// eta = 1e-6, five claim atoms on a 1e5 grid, spread 1e7 / 3e7).
RunConfig worked_example_config();

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

} // namespace catprice
