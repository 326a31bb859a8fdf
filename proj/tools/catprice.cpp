// Command-line front end: price, surface, loading, verify.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "catprice/commands.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<double> c, t, k;
    std::optional<std::string> out, svg;
    std::optional<std::int64_t> paths;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run configuration")->required();
    cmd->add_option("--c", o.c, "index level (currency)");
    cmd->add_option("--t", o.t, "valuation time (years)");
    cmd->add_option("--k", o.k, "derivative quantity");
    cmd->add_option("--out", o.out, "CSV output path");
    cmd->add_option("--svg", o.svg, "SVG output path");
    cmd->add_option("--paths", o.paths, "Monte-Carlo path count");
    cmd->add_option("--seed", o.seed, "Monte-Carlo seed");
}

catprice::RunConfig load(const Overrides& o) {
    auto cfg = catprice::load_config(o.config);
    if (o.out) cfg.output.csv = *o.out;
    if (o.svg) cfg.output.svg = *o.svg;
    if (o.paths) cfg.sim.n_paths = *o.paths;
    if (o.seed) cfg.sim.seed = *o.seed;
    if (o.c || o.t || o.k) {
        const auto base = cfg.output.queries.empty() ? catprice::PriceQuery{0.0, 0.0, 1.0}
                                                     : cfg.output.queries.back();
        cfg.output.queries = {{o.c.value_or(base.c), o.t.value_or(base.t), o.k.value_or(base.k)}};
    }
    cfg.sim.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Indifference pricing of catastrophe derivatives hedged through premium loading"};
    app.require_subcommand(1);

    Overrides price_o, surface_o, loading_o, verify_o;
    std::string kind = "price";

    auto* price = app.add_subcommand("price", "price one (c, t, k) query");
    add_common(price, price_o);
    auto* surface = app.add_subcommand("surface", "write a surface as CSV (and SVG)");
    add_common(surface, surface_o);
    surface->add_option("--kind", kind, "price, loading or gap")->check(CLI::IsMember({"price", "loading", "gap"}));
    auto* loading = app.add_subcommand("loading", "alias of surface --kind loading");
    add_common(loading, loading_o);
    auto* verify = app.add_subcommand("verify", "Monte-Carlo verification table");
    add_common(verify, verify_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : catprice::kExitConfigError;
    }

    try {
        if (*price) {
            const auto cfg = load(price_o);
            const auto q = cfg.output.queries.empty() ? catprice::PriceQuery{0.0, 0.0, 1.0} : cfg.output.queries.back();
            return catprice::cmd_price(cfg, q.c, q.t, q.k, std::cout);
        }
        if (*surface || *loading) {
            const auto& o = *surface ? surface_o : loading_o;
            const auto cfg = load(o);
            const auto quantity = *loading ? catprice::SurfaceQuantity::Loading : catprice::parse_surface_quantity(kind);
            return catprice::cmd_surface(cfg, quantity, o.k.value_or(1.0), cfg.output.csv, cfg.output.svg, std::cerr);
        }
        const auto cfg = load(verify_o);
        return catprice::cmd_verify(cfg, std::cout, std::cerr);
    } catch (const catprice::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return catprice::kExitConfigError;
    } catch (const catprice::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return catprice::kExitConfigError;
    }
}
