#include "catprice/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace catprice {

namespace {

using json = nlohmann::json;

/// Object reader that tracks consumed keys and reports unknown ones.
class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(child(key), "missing required field");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_number()) throw ConfigError(child(key), "expected a number");
        return v.get<double>();
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : mark(key, fallback); }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        if (!has(key)) return mark(key, fallback);
        const auto& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(child(key), "expected an integer");
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return mark(key, fallback);
        const auto& v = raw(key);
        if (!v.is_number_unsigned()) throw ConfigError(child(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return mark(key, fallback);
        const auto& v = raw(key);
        if (!v.is_string()) throw ConfigError(child(key), "expected a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return mark(key, fallback);
        const auto& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(child(key), "expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_array()) throw ConfigError(child(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                throw ConfigError(child(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    /// Consumes an optional sub-object; an absent key yields an empty object.
    Block object(const std::string& key) {
        seen_.insert(key);
        return Block(j_.contains(key) ? j_.at(key) : empty(), child(key));
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key())) throw ConfigError(child(item.key()), "unknown key");
    }

    const std::string& path() const { return path_; }

private:
    template <class T>
    T mark(const std::string& key, T value) {
        seen_.insert(key);
        return value;
    }

    static const json& empty() {
        static const json e = json::object();
        return e;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class F>
void validate_block(const std::string& path, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

void parse_model(Block b, RunConfig& cfg) {
    cfg.model.lambda = b.number("lambda");
    cfg.model.market_size = b.number("M");
    cfg.model.horizon = b.number("T");
    cfg.model.eta = b.number("eta");
    if (b.has("beta")) cfg.model.beta = b.number("beta");
    cfg.x0 = b.number("x0", 0.0);
    const auto& claims = b.raw("claims");
    if (!claims.is_array() || claims.empty())
        throw ConfigError(b.child("claims"), "expected a non-empty array of {size, prob}");
    cfg.model.atoms.clear();
    for (std::size_t i = 0; i < claims.size(); ++i) {
        Block atom(claims[i], b.child("claims") + "[" + std::to_string(i) + "]");
        cfg.model.atoms.push_back({atom.number("size"), atom.number("prob")});
        atom.finish();
    }
    b.finish();
}

void parse_payoff(Block b, RunConfig& cfg) {
    auto& p = cfg.payoff;
    p.type = b.string("type", "spread");
    if (p.type == "spread") {
        p.strike = b.number("K");
        p.cutoff = b.number("L");
    } else if (p.type == "tabulated") {
        p.step = b.number("step");
        p.values = b.numbers("values");
        p.tail = b.number("A");
    } else {
        throw ConfigError(b.child("type"), "expected \"spread\" or \"tabulated\"");
    }
    b.finish();
}

void parse_demand(Block b, RunConfig& cfg) {
    auto& d = cfg.demand;
    d.type = b.string("type", "linear");
    if (d.type == "linear") {
        d.m = b.number("m");
    } else if (d.type == "power") {
        d.m = b.number("m");
        d.nu = b.number("nu");
    } else if (d.type == "hfamily") {
        d.m = b.number("m");
        d.poly = b.numbers("poly");
        d.exp_factor = b.boolean("exp_factor", true);
        if (b.has("scale")) d.scale = b.number("scale");
    } else if (d.type == "tabulated") {
        d.theta = b.numbers("theta");
        d.q = b.numbers("q");
    } else {
        throw ConfigError(b.child("type"), "expected linear, power, hfamily or tabulated");
    }
    b.finish();
}

void parse_solver(Block b, RunConfig& cfg) {
    cfg.solver.n_steps = static_cast<int>(b.integer("n_steps", 2000));
    cfg.solver.store_every =
        static_cast<int>(b.integer("store_every", std::max(1, cfg.solver.n_steps / 100)));
    cfg.solver.tol_check = b.number("tol_check", 0.0);
    cfg.delta = b.number("delta", 0.0);
    b.finish();
}

void parse_sim(Block b, RunConfig& cfg) {
    cfg.sim.n_paths = b.integer("n_paths", 100000);
    cfg.sim.seed = b.unsigned_integer("seed", 20240601);
    cfg.sim.chunk_size = b.integer("chunk_size", 4096);
    b.finish();
}

void parse_output(Block b, RunConfig& cfg) {
    auto& o = cfg.output;
    o.csv = b.string("csv", "");
    o.svg = b.string("svg", "");
    o.queries.clear();
    if (b.has("queries")) {
        const auto& qs = b.raw("queries");
        if (!qs.is_array()) throw ConfigError(b.child("queries"), "expected an array of {c, t, k}");
        for (std::size_t i = 0; i < qs.size(); ++i) {
            Block q(qs[i], b.child("queries") + "[" + std::to_string(i) + "]");
            o.queries.push_back({q.number("c"), q.number("t"), q.number("k")});
            q.finish();
        }
    } else {
        o.queries = worked_example_config().output.queries;
    }
    if (b.has("denominations")) {
        o.denominations.clear();
        const auto& ns = b.raw("denominations");
        if (!ns.is_array()) throw ConfigError(b.child("denominations"), "expected an array of integers");
        for (std::size_t i = 0; i < ns.size(); ++i) {
            if (!ns[i].is_number_integer() || ns[i].get<std::int64_t>() < 1)
                throw ConfigError(b.child("denominations") + "[" + std::to_string(i) + "]",
                                  "expected an integer >= 1");
            o.denominations.push_back(ns[i].get<int>());
        }
    } else {
        o.denominations = {1, 10, 100, 1000};
    }
    b.finish();
}

} // namespace

ClaimModel RunConfig::claim_model() const { return ClaimModel(model); }

Payoff RunConfig::make_payoff() const {
    if (payoff.type == "tabulated") return Payoff::tabulated(payoff.step, payoff.values, payoff.tail);
    return Payoff::spread(payoff.strike, payoff.cutoff);
}

DemandCurve RunConfig::demand_curve(const ClaimModel& m) const {
    const double big_m = m.market_size();
    DemandSpec spec;
    if (demand.type == "linear")
        spec = LinearDemand{demand.m, big_m};
    else if (demand.type == "power")
        spec = PowerDemand{demand.m, big_m, demand.nu};
    else if (demand.type == "hfamily")
        spec = HFamilyDemand{demand.m, big_m, demand.poly, demand.exp_factor, demand.scale};
    else
        spec = TabulatedDemand{demand.theta, demand.q};
    return DemandCurve(std::move(spec), fair_premium(m));
}

Lattice RunConfig::lattice(const ClaimModel& m, const Payoff& p) const { return make_lattice(m, p, delta); }

RunConfig worked_example_config() {
    RunConfig cfg;
    cfg.model.lambda = 0.01;
    cfg.model.market_size = 1e4;
    cfg.model.horizon = 0.25;
    cfg.model.eta = 1e-6;
    cfg.model.atoms = {{1e5, 0.125}, {2e5, 0.375}, {3e5, 0.25}, {4e5, 0.125}, {5e5, 0.125}};
    cfg.payoff.type = "spread";
    cfg.payoff.strike = 1e7;
    cfg.payoff.cutoff = 3e7;
    cfg.demand.type = "linear";
    cfg.demand.m = 2.0;
    cfg.solver = SolverConfig{2000, 20, 0.0};
    cfg.delta = 1e5;
    cfg.output.queries = {{0.0, 0.0, 0.0}, {1.5e7, 0.0, 1.0}};
    cfg.output.denominations = {1, 10, 100, 1000};
    return cfg;
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    RunConfig cfg;
    Block root(j, "");
    parse_model(root.object("model"), cfg);
    parse_payoff(root.object("payoff"), cfg);
    parse_demand(root.object("demand"), cfg);
    parse_solver(root.object("solver"), cfg);
    parse_sim(root.object("sim"), cfg);
    parse_output(root.object("output"), cfg);
    root.finish();

    validate_block("model", [&] { cfg.claim_model(); });
    validate_block("payoff", [&] { cfg.make_payoff(); });
    validate_block("demand", [&] { cfg.demand_curve(cfg.claim_model()); });
    validate_block("solver", [&] {
        cfg.solver.validate();
        cfg.lattice(cfg.claim_model(), cfg.make_payoff());
    });
    validate_block("sim", [&] { cfg.sim.validate(); });
    for (std::size_t i = 0; i < cfg.output.queries.size(); ++i) {
        const auto& q = cfg.output.queries[i];
        if (!(q.t >= 0.0 && q.t <= cfg.model.horizon) || !(q.c >= 0.0))
            throw ConfigError("output.queries[" + std::to_string(i) + "]", "requires c >= 0 and 0 <= t <= T");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

std::string serialize_config(const RunConfig& cfg) {
    json j;
    auto& model = j["model"];
    model["lambda"] = cfg.model.lambda;
    model["M"] = cfg.model.market_size;
    model["T"] = cfg.model.horizon;
    model["eta"] = cfg.model.eta;
    if (cfg.model.beta) model["beta"] = *cfg.model.beta;
    model["x0"] = cfg.x0;
    model["claims"] = json::array();
    for (const auto& a : cfg.model.atoms) model["claims"].push_back({{"size", a.size}, {"prob", a.prob}});

    auto& payoff = j["payoff"];
    payoff["type"] = cfg.payoff.type;
    if (cfg.payoff.type == "tabulated") {
        payoff["step"] = cfg.payoff.step;
        payoff["values"] = cfg.payoff.values;
        payoff["A"] = cfg.payoff.tail;
    } else {
        payoff["K"] = cfg.payoff.strike;
        payoff["L"] = cfg.payoff.cutoff;
    }

    auto& demand = j["demand"];
    demand["type"] = cfg.demand.type;
    if (cfg.demand.type == "tabulated") {
        demand["theta"] = cfg.demand.theta;
        demand["q"] = cfg.demand.q;
    } else {
        demand["m"] = cfg.demand.m;
        if (cfg.demand.type == "power") demand["nu"] = cfg.demand.nu;
        if (cfg.demand.type == "hfamily") {
            demand["poly"] = cfg.demand.poly;
            demand["exp_factor"] = cfg.demand.exp_factor;
            if (cfg.demand.scale) demand["scale"] = *cfg.demand.scale;
        }
    }

    j["solver"] = {{"n_steps", cfg.solver.n_steps},
                   {"store_every", cfg.solver.store_every},
                   {"tol_check", cfg.solver.tol_check},
                   {"delta", cfg.delta}};
    j["sim"] = {{"n_paths", cfg.sim.n_paths}, {"seed", cfg.sim.seed}, {"chunk_size", cfg.sim.chunk_size}};

    auto& out = j["output"];
    out["csv"] = cfg.output.csv;
    out["svg"] = cfg.output.svg;
    out["queries"] = json::array();
    for (const auto& q : cfg.output.queries) out["queries"].push_back({{"c", q.c}, {"t", q.t}, {"k", q.k}});
    out["denominations"] = cfg.output.denominations;
    return j.dump(2) + "\n";
}

} // namespace catprice
