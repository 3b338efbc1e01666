#include "xlnum/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace xlnum {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& path, const std::string& why) {
    throw error("config: " + path + ": " + why);
}

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
    if (!j.is_object()) bad_key(path, "expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) bad_key(path + "." + key, "unknown key");
}

double num(const json& j, const std::string& path) {
    if (!j.is_number()) bad_key(path, "expected a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) bad_key(path, "expected an integer");
    return j.get<int>();
}

bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) bad_key(path, "expected a boolean");
    return j.get<bool>();
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) bad_key(path, "expected a string");
    return j.get<std::string>();
}

CoefficientFn coefficient(const json& j, const std::string& path) {
    if (j.is_number()) return CoefficientFn::constant(j.get<double>());
    if (!j.is_object()) bad_key(path, "expected a number or an object");
    const std::string kind = j.contains("kind") ? text(j.at("kind"), path + ".kind")
                                                : std::string("constant");
    if (kind == "constant") {
        check_keys(j, path, {"kind", "value"});
        if (!j.contains("value")) bad_key(path + ".value", "required");
        return CoefficientFn::constant(num(j.at("value"), path + ".value"));
    }
    if (kind == "piecewise") {
        check_keys(j, path, {"kind", "breakpoints", "values"});
        if (!j.contains("breakpoints") || !j.contains("values"))
            bad_key(path, "piecewise needs breakpoints and values");
        std::vector<double> bp, vals;
        for (const auto& v : j.at("breakpoints"))
            bp.push_back(num(v, path + ".breakpoints[]"));
        for (const auto& v : j.at("values"))
            vals.push_back(num(v, path + ".values[]"));
        try {
            return CoefficientFn::piecewise(std::move(bp), std::move(vals));
        } catch (const error& e) {
            bad_key(path, e.what());
        }
    }
    if (kind == "damped-sin") {
        check_keys(j, path, {"kind", "base", "amplitude", "decay", "frequency"});
        if (!j.contains("base")) bad_key(path + ".base", "required");
        double amp = 0.15, decay = 2.0, freq = 31.41592653589793;
        if (j.contains("amplitude")) amp = num(j.at("amplitude"), path + ".amplitude");
        if (j.contains("decay")) decay = num(j.at("decay"), path + ".decay");
        if (j.contains("frequency"))
            freq = num(j.at("frequency"), path + ".frequency");
        return CoefficientFn::damped_sin(num(j.at("base"), path + ".base"), amp,
                                         decay, freq);
    }
    if (kind == "sinusoid") {
        check_keys(j, path, {"kind", "amplitude", "offset", "frequency"});
        if (!j.contains("amplitude") || !j.contains("offset"))
            bad_key(path, "sinusoid needs amplitude and offset");
        double freq = 31.41592653589793;
        if (j.contains("frequency"))
            freq = num(j.at("frequency"), path + ".frequency");
        return CoefficientFn::sinusoid(num(j.at("amplitude"), path + ".amplitude"),
                                       num(j.at("offset"), path + ".offset"), freq);
    }
    bad_key(path + ".kind", "unknown coefficient kind '" + kind + "'");
}

Utility utility_from(const json& j, const std::string& path) {
    Utility u;
    std::string kind;
    if (j.is_string()) {
        kind = j.get<std::string>();
    } else if (j.is_object()) {
        check_keys(j, path, {"kind", "alpha", "steepness", "midpoint"});
        kind = j.contains("kind") ? text(j.at("kind"), path + ".kind") : "log";
        if (j.contains("alpha")) u.alpha = num(j.at("alpha"), path + ".alpha");
        if (j.contains("steepness"))
            u.steepness = num(j.at("steepness"), path + ".steepness");
        if (j.contains("midpoint"))
            u.midpoint = num(j.at("midpoint"), path + ".midpoint");
    } else {
        bad_key(path, "expected a string or an object");
    }
    if (kind == "log")
        u.kind = Utility::Kind::log_rate;
    else if (kind == "alpha-fair")
        u.kind = Utility::Kind::alpha_fair;
    else if (kind == "sigmoid")
        u.kind = Utility::Kind::sigmoid;
    else if (kind == "log-over-t")
        u.kind = Utility::Kind::log_rate_over_t;
    else
        bad_key(path, "unknown utility kind '" + kind + "'");
    return u;
}

}  // namespace

RunConfig parse_config(const std::string& content, const std::string& origin) {
    json j;
    try {
        j = json::parse(content);
    } catch (const json::exception& e) {
        throw error("config: " + origin + ": " + e.what());
    }
    RunConfig cfg;
    check_keys(j, origin,
               {"topology", "channel", "time", "mc", "problem", "solver",
                "outputs"});

    if (j.contains("topology")) {
        const auto& t = j.at("topology");
        check_keys(t, "topology",
                   {"rows", "cols", "nodes", "links", "interference",
                    "traffic_seed", "flows"});
        if (t.contains("rows")) cfg.rows = integer(t.at("rows"), "topology.rows");
        if (t.contains("cols")) cfg.cols = integer(t.at("cols"), "topology.cols");
        if (cfg.rows < 1 || cfg.cols < 1)
            bad_key("topology.rows", "grid dimensions must be >= 1");
        if (t.contains("nodes") != t.contains("links"))
            bad_key("topology.nodes",
                    "explicit topologies need both nodes and links");
        if (t.contains("nodes")) {
            cfg.explicit_nodes = integer(t.at("nodes"), "topology.nodes");
            std::vector<std::pair<int, int>> links;
            for (const auto& l : t.at("links")) {
                if (!l.is_array() || l.size() != 2)
                    bad_key("topology.links", "each link is a [from, to] pair");
                links.emplace_back(integer(l[0], "topology.links[][0]"),
                                   integer(l[1], "topology.links[][1]"));
            }
            cfg.explicit_links = std::move(links);
        }
        if (t.contains("interference")) {
            const auto s = text(t.at("interference"), "topology.interference");
            if (s == "two-hop")
                cfg.interference = InterferenceModel::two_hop;
            else if (s == "node-exclusive")
                cfg.interference = InterferenceModel::node_exclusive;
            else
                bad_key("topology.interference",
                        "expected 'two-hop' or 'node-exclusive'");
        }
        if (t.contains("traffic_seed"))
            cfg.traffic_seed = static_cast<std::uint64_t>(
                integer(t.at("traffic_seed"), "topology.traffic_seed"));
        if (t.contains("flows")) {
            std::vector<std::pair<int, int>> flows;
            for (const auto& f : t.at("flows")) {
                if (!f.is_array() || f.size() != 2)
                    bad_key("topology.flows", "each flow is a [source, dest] pair");
                flows.emplace_back(integer(f[0], "topology.flows[][0]"),
                                   integer(f[1], "topology.flows[][1]"));
            }
            cfg.explicit_flows = std::move(flows);
        }
    }

    if (j.contains("channel")) {
        const auto& c = j.at("channel");
        check_keys(c, "channel", {"model", "beta", "gamma", "delta", "x0"});
        if (c.contains("model")) {
            const auto s = text(c.at("model"), "channel.model");
            if (s != "ltf")
                bad_key("channel.model",
                        "only 'ltf' runs through the solver; STF sampling is "
                        "library-level");
        }
        if (c.contains("beta")) cfg.beta = coefficient(c.at("beta"), "channel.beta");
        if (c.contains("gamma"))
            cfg.gamma = coefficient(c.at("gamma"), "channel.gamma");
        if (c.contains("delta"))
            cfg.delta = coefficient(c.at("delta"), "channel.delta");
        if (c.contains("x0")) cfg.x0 = num(c.at("x0"), "channel.x0");
    }

    if (j.contains("time")) {
        const auto& t = j.at("time");
        check_keys(t, "time", {"s", "T", "n"});
        double s = cfg.grid.s, T = cfg.grid.T;
        int n = cfg.grid.n;
        if (t.contains("s")) s = num(t.at("s"), "time.s");
        if (t.contains("T")) T = num(t.at("T"), "time.T");
        if (t.contains("n")) n = integer(t.at("n"), "time.n");
        if (!(T > s)) bad_key("time.T", "T must exceed s");
        if (s < 0.0) bad_key("time.s", "s must be nonnegative");
        if (n < 1) bad_key("time.n", "n must be >= 1");
        cfg.grid = TimeGrid(s, T, n);
    }

    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        check_keys(m, "mc", {"paths", "seed", "parallel"});
        if (m.contains("paths")) cfg.mc.paths = integer(m.at("paths"), "mc.paths");
        if (cfg.mc.paths < 1) bad_key("mc.paths", "must be >= 1");
        if (m.contains("seed"))
            cfg.mc.seed =
                static_cast<std::uint64_t>(integer(m.at("seed"), "mc.seed"));
        if (m.contains("parallel"))
            cfg.mc.parallel = boolean(m.at("parallel"), "mc.parallel");
    }

    if (j.contains("problem")) {
        const auto& p = j.at("problem");
        check_keys(p, "problem",
                   {"mode", "power_control", "scheduling", "utility", "V", "N0",
                    "B", "P_fixed", "P_min", "P_max", "P_i_max", "lambda_max",
                    "R_max", "heuristic_restarts", "family_cap"});
        if (p.contains("mode")) {
            const auto s = text(p.at("mode"), "problem.mode");
            if (s == "P1")
                cfg.mode = AccessMode::non_orthogonal;
            else if (s == "P2")
                cfg.mode = AccessMode::orthogonal;
            else
                bad_key("problem.mode", "expected 'P1' or 'P2'");
        }
        if (p.contains("power_control"))
            cfg.power_control = boolean(p.at("power_control"),
                                        "problem.power_control");
        if (p.contains("scheduling"))
            cfg.scheduling = boolean(p.at("scheduling"), "problem.scheduling");
        if (p.contains("utility"))
            cfg.utility = utility_from(p.at("utility"), "problem.utility");
        if (p.contains("V")) cfg.cost_v = num(p.at("V"), "problem.V");
        if (p.contains("N0")) cfg.noise_w = num(p.at("N0"), "problem.N0");
        if (cfg.noise_w <= 0.0) bad_key("problem.N0", "must be positive");
        if (p.contains("B")) cfg.bandwidth_hz = num(p.at("B"), "problem.B");
        if (p.contains("P_fixed")) cfg.p_fixed = num(p.at("P_fixed"), "problem.P_fixed");
        if (p.contains("P_min")) cfg.p_min = num(p.at("P_min"), "problem.P_min");
        if (p.contains("P_max")) cfg.p_max = num(p.at("P_max"), "problem.P_max");
        if (p.contains("P_i_max"))
            cfg.p_node_budget = num(p.at("P_i_max"), "problem.P_i_max");
        if (p.contains("lambda_max"))
            cfg.lambda_max = num(p.at("lambda_max"), "problem.lambda_max");
        if (p.contains("R_max")) cfg.rate_max = num(p.at("R_max"), "problem.R_max");
        if (p.contains("heuristic_restarts"))
            cfg.heuristic_restarts =
                integer(p.at("heuristic_restarts"), "problem.heuristic_restarts");
        if (p.contains("family_cap"))
            cfg.family_cap = static_cast<std::size_t>(
                integer(p.at("family_cap"), "problem.family_cap"));
        if (cfg.p_min < 0.0 || cfg.p_min > cfg.p_max)
            bad_key("problem.P_min", "must lie in [0, P_max]");
    }

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        check_keys(s, "solver",
                   {"A_prime", "tol", "window", "max_iters", "multiplier_init"});
        if (s.contains("A_prime"))
            cfg.solver.a_prime = num(s.at("A_prime"), "solver.A_prime");
        if (s.contains("tol")) cfg.solver.tol = num(s.at("tol"), "solver.tol");
        if (s.contains("window"))
            cfg.solver.window = integer(s.at("window"), "solver.window");
        if (s.contains("max_iters"))
            cfg.solver.max_iters = integer(s.at("max_iters"), "solver.max_iters");
        if (s.contains("multiplier_init"))
            cfg.solver.multiplier_init =
                num(s.at("multiplier_init"), "solver.multiplier_init");
        if (cfg.solver.a_prime <= 0.0) bad_key("solver.A_prime", "must be positive");
        if (cfg.solver.window < 1) bad_key("solver.window", "must be >= 1");
        if (cfg.solver.max_iters < 1) bad_key("solver.max_iters", "must be >= 1");
    }

    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        check_keys(o, "outputs", {"directory", "emit_paths", "emit_svg"});
        if (o.contains("directory"))
            cfg.out_dir = text(o.at("directory"), "outputs.directory");
        if (o.contains("emit_paths"))
            cfg.emit_paths = boolean(o.at("emit_paths"), "outputs.emit_paths");
        if (o.contains("emit_svg"))
            cfg.emit_svg = boolean(o.at("emit_svg"), "outputs.emit_svg");
    }

    if (cfg.utility.time_varying() && cfg.grid.s <= 0.0)
        bad_key("time.s", "time-divided utilities require s > 0");

    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), "config: cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

ProblemSpec build_problem(const RunConfig& cfg) {
    ProblemSpec spec;
    spec.net = build_grid(cfg.rows, cfg.cols);
    for (auto& link : spec.net.links) link.bandwidth_hz = cfg.bandwidth_hz;
    spec.net.noise_w = cfg.noise_w;
    spec.net.node_power_budget.assign(spec.net.num_nodes, cfg.p_node_budget);
    spec.net.power_max_w = cfg.p_max;
    spec.net.power_min_w = cfg.power_control ? cfg.p_min : 0.0;
    spec.net.rate_max = cfg.rate_max;
    spec.net.lambda_max = cfg.lambda_max;
    spec.net.conflicts = conflict_sets(spec.net, cfg.interference);

    if (cfg.explicit_flows) {
        std::vector<std::pair<NodeId, NodeId>> flows(cfg.explicit_flows->begin(),
                                                     cfg.explicit_flows->end());
        spec.flows = make_flows(spec.net, std::move(flows));
    } else {
        spec.flows = assign_random_flows(spec.net, cfg.traffic_seed);
    }
    require(spec.flows.num_flows() > 0, "config: no flows to optimize");

    spec.mode = cfg.mode;
    spec.power_control = cfg.power_control;
    spec.scheduling = cfg.scheduling;
    spec.fixed_power_w = cfg.p_fixed;
    spec.cost.kind =
        cfg.power_control ? PowerCost::Kind::quadratic : PowerCost::Kind::zero;
    spec.cost.v = cfg.cost_v;
    spec.utility = cfg.utility;

    if (cfg.mode == AccessMode::orthogonal) {
        spec.family =
            enumerate_maximal_independent_sets(spec.net.conflicts, cfg.family_cap);
        if (!cfg.scheduling)
            spec.time_share = equal_time_shares(spec.family, spec.net.num_links());
    }

    spec.channel.beta = cfg.beta;
    spec.channel.gamma = cfg.gamma;
    spec.channel.delta = cfg.delta;
    spec.channel.x0 = cfg.x0;
    spec.grid = cfg.grid;
    spec.mc = cfg.mc;
    spec.solver = cfg.solver;
    spec.heuristic_restarts = cfg.heuristic_restarts;
    return spec;
}

}  // namespace xlnum
