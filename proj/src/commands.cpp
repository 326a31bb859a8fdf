#include "catprice/commands.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace catprice {

namespace {

std::string short_number(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

struct Problem {
    ClaimModel model;
    Payoff payoff;
    DemandCurve curve;
    Lattice lattice;

    explicit Problem(const RunConfig& cfg)
        : model(cfg.claim_model()),
          payoff(cfg.make_payoff()),
          curve(cfg.demand_curve(model)),
          lattice(cfg.lattice(model, payoff)) {}
};

void print_field(std::ostream& out, const std::string& name, double value) {
    out << name << " = " << format_number(value) << '\n';
}

} // namespace

SurfaceQuantity parse_surface_quantity(const std::string& name) {
    if (name == "price") return SurfaceQuantity::Price;
    if (name == "loading") return SurfaceQuantity::Loading;
    if (name == "gap") return SurfaceQuantity::Gap;
    throw ConfigError("--kind", "expected price, loading or gap");
}

int cmd_price(const RunConfig& config, double c, double t, double k, std::ostream& out) {
    const Problem p(config);
    if (!(t >= 0.0 && t <= p.model.horizon())) throw ConfigError("--t", "must lie in [0, T]");
    if (!(c >= 0.0)) throw ConfigError("--c", "must be >= 0");

    SolveRequest request;
    request.wealth_k = {k};
    if (k != 0.0) request.wealth_k.push_back(-k);
    request.seller_k = {k};
    for (int n : config.output.denominations) request.seller_k.push_back(1.0 / n);
    request.risk_neutral = true;
    const auto surfaces = solve_surfaces(p.model, p.curve, p.payoff, p.lattice, config.solver, request);

    const PriceQuery q{c, t, k};
    print_field(out, "c", c);
    print_field(out, "t", t);
    print_field(out, "k", k);
    print_field(out, "kappa", surfaces.kappa);
    print_field(out, "p_b", indifference_price(q, surfaces));
    print_field(out, "p_s", seller_indifference_price(q, surfaces));
    print_field(out, "pi_s", certainty_equivalence_seller(q, surfaces.seller_at(k), p.model));
    const auto limits = denomination_limit(q, config.output.denominations, surfaces, p.model);
    for (std::size_t i = 0; i < limits.size(); ++i)
        print_field(out, "N_pi_s[N=" + std::to_string(config.output.denominations[i]) + "]", limits[i]);
    print_field(out, "pi0", risk_neutral_price({c, t, 1.0}, surfaces.pi0()));
    print_field(out, "risk_neutral_price", risk_neutral_price(q, surfaces.pi0()));
    print_field(out, "theta_star", optimal_loading(q, surfaces.wealth_at(k), p.model, p.curve, p.payoff));
    return kExitOk;
}

SurfacePlot build_surface(const RunConfig& config, SurfaceQuantity quantity, double k) {
    const Problem p(config);
    SolveRequest request;
    request.wealth_k = {quantity == SurfaceQuantity::Gap ? 1.0 : k};
    request.risk_neutral = quantity == SurfaceQuantity::Gap;
    const auto surfaces = solve_surfaces(p.model, p.curve, p.payoff, p.lattice, config.solver, request);
    const auto& w = surfaces.wealth_at(request.wealth_k.front());

    SurfacePlot plot;
    plot.times = w.times;
    for (std::size_t i = 0; i < p.lattice.n_nodes(); ++i) plot.c.push_back(p.lattice.node(i));

    switch (quantity) {
    case SurfaceQuantity::Price:
        plot.title = "buyer indifference price, k = " + short_number(k);
        plot.y_label = "price (millions)";
        plot.y_scale = 1e6;
        for (double t : w.times) {
            std::vector<double> row;
            for (double c : plot.c) row.push_back(indifference_price({c, t, k}, surfaces));
            plot.values.push_back(std::move(row));
        }
        break;
    case SurfaceQuantity::Loading: {
        plot.title = "optimal risk loading, k = " + short_number(k);
        plot.y_label = "risk loading";
        plot.values = policy_surface(w, p.model, p.curve, p.payoff).theta;
        break;
    }
    case SurfaceQuantity::Gap:
        plot.title = "buyer price minus risk-neutral price";
        plot.y_label = "difference (millions)";
        plot.y_scale = 1e6;
        for (double t : w.times) {
            std::vector<double> row;
            for (double c : plot.c) row.push_back(tradability_gap({c, t, 1.0}, surfaces));
            plot.values.push_back(std::move(row));
        }
        break;
    }
    return plot;
}

int cmd_surface(const RunConfig& config, SurfaceQuantity quantity, double k, const std::string& csv_path,
                const std::string& svg_path, std::ostream& err) {
    if (csv_path.empty()) {
        err << "surface: no output path (set output.csv or --out)\n";
        return kExitConfigError;
    }
    const auto plot = build_surface(config, quantity, k);
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) {
        err << "surface: cannot write " << csv_path << '\n';
        return kExitConfigError;
    }
    write_surface_csv(csv, plot);
    if (!svg_path.empty()) {
        std::ofstream svg(svg_path, std::ios::binary);
        if (!svg) {
            err << "surface: cannot write " << svg_path << '\n';
            return kExitConfigError;
        }
        write_surface_svg(svg, plot);
    }
    return kExitOk;
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const Problem p(config);
    SolverConfig solver = config.solver;
    solver.store_every = 1; // policy on the full time grid

    std::set<double> ks;
    for (const auto& q : config.output.queries) ks.insert(q.k);
    SolveRequest request;
    request.wealth_k.assign(ks.begin(), ks.end());
    request.risk_neutral = true;
    const auto surfaces = solve_surfaces(p.model, p.curve, p.payoff, p.lattice, solver, request);

    std::vector<VerifyRow> rows;
    for (const auto& q : config.output.queries) {
        const std::string tag = "[k=" + short_number(q.k) + ";c=" + short_number(q.c) + "]";
        for (auto row : verify_value_function(p.model, p.curve, p.payoff, surfaces.wealth_at(q.k), q.c,
                                              config.x0, config.sim)) {
            row.quantity += tag;
            rows.push_back(std::move(row));
        }
        const auto mc = mc_risk_neutral(p.model, p.payoff, q.c, q.t, config.sim);
        const double exact = eval_surface(surfaces.pi0(), q.c, q.t);
        const double z = mc.std_error > 0.0 ? (mc.mean - exact) / mc.std_error
                                            : (mc.mean == exact ? 0.0 : INFINITY);
        rows.push_back({"pi0[c=" + short_number(q.c) + ";t=" + short_number(q.t) + "]", mc.mean, mc.std_error,
                        exact, z});
    }

    out << "quantity,estimate,std_error,analytic,z_score\n";
    bool ok = true;
    for (const auto& r : rows) {
        out << r.quantity << ',' << format_number(r.estimate) << ',' << format_number(r.std_error) << ','
            << format_number(r.analytic) << ',' << format_number(r.z_score) << '\n';
        if (!(std::abs(r.z_score) <= 3.0)) {
            ok = false;
            err << "verification failed: " << r.quantity << " z = " << format_number(r.z_score) << '\n';
        }
    }
    return ok ? kExitOk : kExitVerifyFailed;
}

} // namespace catprice
