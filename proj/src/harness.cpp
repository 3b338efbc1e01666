#include "xlnum/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "json.hpp"
#include "xlnum/io.hpp"
#include "xlnum/mc.hpp"

namespace xlnum {

namespace {

const char* k_colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string delta_dir_name(double delta) {
    std::string s = "delta_" + format_number(delta);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

void write_trace_csv(const std::filesystem::path& path, const ProblemSpec& spec,
                     const DualTrace& trace) {
    std::vector<std::string> header = {"eta",       "kappa",
                                       "dual_estimate", "dual_se",
                                       "grad_norm", "multiplier_change"};
    const int N = spec.num_nodes();
    for (int dp = 0; dp < spec.flows.num_destinations(); ++dp) {
        const NodeId d = spec.flows.destinations[dp];
        for (NodeId i = 0; i < N; ++i) {
            if (i == d) continue;
            header.push_back("mu[" + std::to_string(i) + "->" + std::to_string(d) +
                             "]");
        }
    }
    for (const auto& l : spec.net.links)
        header.push_back("l[" + std::to_string(l.from) + "->" +
                         std::to_string(l.to) + "]");
    for (NodeId i = 0; i < N; ++i) header.push_back("nu[" + std::to_string(i) + "]");

    CsvWriter csv(path, header);
    const int D = spec.flows.num_destinations();
    for (const auto& it : trace.iterations) {
        std::vector<double> row = {static_cast<double>(it.eta), it.kappa,
                                   it.dual_estimate, it.dual_se,
                                   it.grad_norm, it.multiplier_change};
        // mu slots excluding the structural zeros at i == d
        for (int dp = 0; dp < D; ++dp) {
            const NodeId d = spec.flows.destinations[dp];
            for (NodeId i = 0; i < N; ++i) {
                if (i == d) continue;
                row.push_back(it.multipliers[static_cast<std::size_t>(dp) * N + i]);
            }
        }
        const std::size_t ell0 = static_cast<std::size_t>(D) * N;
        for (int e = 0; e < spec.num_links(); ++e)
            row.push_back(it.multipliers[ell0 + e]);
        const std::size_t nu0 = ell0 + spec.num_links();
        for (NodeId i = 0; i < N; ++i) row.push_back(it.multipliers[nu0 + i]);
        csv.row(row);
    }
}

void write_multiplier_svgs(const std::filesystem::path& dir,
                           const ProblemSpec& spec, const DualTrace& trace,
                           std::vector<std::string>& files) {
    const int N = spec.num_nodes();
    const int D = spec.flows.num_destinations();
    const std::size_t iters = trace.iterations.size();
    const std::size_t stride = std::max<std::size_t>(1, iters / 400);
    auto series_for = [&](std::size_t offset, std::size_t count) {
        std::vector<SvgSeries> out;
        for (std::size_t k = 0; k < count; ++k) {
            SvgSeries s;
            s.color = k_colors[k % 8];
            for (std::size_t it = 0; it < iters; it += stride) {
                s.x.push_back(static_cast<double>(trace.iterations[it].eta));
                s.y.push_back(trace.iterations[it].multipliers[offset + k]);
            }
            out.push_back(std::move(s));
        }
        return out;
    };
    write_svg_chart(dir / "multipliers_mu.svg",
                    "flow-conservation multipliers vs iteration",
                    series_for(0, static_cast<std::size_t>(D) * N));
    files.push_back("multipliers_mu.svg");
    write_svg_chart(dir / "multipliers_l.svg",
                    "capacity multipliers vs iteration",
                    series_for(static_cast<std::size_t>(D) * N,
                               static_cast<std::size_t>(spec.num_links())));
    files.push_back("multipliers_l.svg");

    SvgSeries dual;
    for (std::size_t it = 0; it < iters; it += stride) {
        dual.x.push_back(static_cast<double>(trace.iterations[it].eta));
        dual.y.push_back(trace.iterations[it].dual_estimate);
    }
    write_svg_chart(dir / "trace_dual.svg", "dual estimate vs iteration", {dual});
    files.push_back("trace_dual.svg");
}

}  // namespace

std::filesystem::path resolve_out_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv("XLNUM_OUT_DIR"); env && *env)
        return std::filesystem::path(env);
    return cfg.out_dir;
}

RunArtifacts run_experiment(const RunConfig& cfg) {
    const auto spec = build_problem(cfg);
    const auto result = solve_dual(spec);

    RunArtifacts art;
    art.summary = result.summary;
    art.out_dir = resolve_out_dir(cfg);
    ensure_directory(art.out_dir);

    {
        CsvWriter csv(art.out_dir / "flows.csv", {"flow", "source", "destination"});
        for (int f = 0; f < spec.flows.num_flows(); ++f)
            csv.row({static_cast<double>(f),
                     static_cast<double>(spec.flows.flows[f].first),
                     static_cast<double>(spec.flows.flows[f].second)});
        art.files.push_back("flows.csv");
    }
    if (spec.mode == AccessMode::orthogonal) {
        CsvWriter csv(art.out_dir / "independent_sets.csv", {"set", "link"});
        for (std::size_t s = 0; s < spec.family.sets.size(); ++s)
            for (LinkId e : spec.family.sets[s])
                csv.row({static_cast<double>(s), static_cast<double>(e)});
        art.files.push_back("independent_sets.csv");
    }

    write_trace_csv(art.out_dir / "trace.csv", spec, result.trace);
    art.files.push_back("trace.csv");

    {
        CsvWriter csv(art.out_dir / "rates.csv",
                      {"flow", "source", "destination", "rate_bps"});
        for (int f = 0; f < spec.flows.num_flows(); ++f)
            csv.row({static_cast<double>(f),
                     static_cast<double>(spec.flows.flows[f].first),
                     static_cast<double>(spec.flows.flows[f].second),
                     result.summary.flow_rate[f]});
        art.files.push_back("rates.csv");
    }
    {
        CsvWriter csv(art.out_dir / "routing.csv",
                      {"link", "from", "to", "destination", "r_bar_bps"});
        const int D = spec.flows.num_destinations();
        for (int e = 0; e < spec.num_links(); ++e)
            for (int dp = 0; dp < D; ++dp)
                csv.row({static_cast<double>(e),
                         static_cast<double>(spec.net.links[e].from),
                         static_cast<double>(spec.net.links[e].to),
                         static_cast<double>(spec.flows.destinations[dp]),
                         result.recovery.r_bar[static_cast<std::size_t>(e) * D +
                                               dp]});
        art.files.push_back("routing.csv");
    }
    {
        CsvWriter csv(art.out_dir / "link_power.csv",
                      {"link", "from", "to", "power_sched_w", "power_tx_w"});
        for (int e = 0; e < spec.num_links(); ++e)
            csv.row({static_cast<double>(e),
                     static_cast<double>(spec.net.links[e].from),
                     static_cast<double>(spec.net.links[e].to),
                     result.summary.link_power_avg[e],
                     result.summary.link_power_tx_avg[e]});
        art.files.push_back("link_power.csv");
    }
    if (spec.utility.time_varying()) {
        CsvWriter csv(art.out_dir / "rates_curve.csv",
                      {"flow", "b", "tau", "lambda_bps"});
        for (int f = 0; f < spec.flows.num_flows(); ++f)
            for (int b = 0; b <= spec.grid.n; ++b)
                csv.row({static_cast<double>(f), static_cast<double>(b),
                         spec.grid.tau(b),
                         result.recovery.lambda_curve
                             [static_cast<std::size_t>(f) * (spec.grid.n + 1) + b]});
        art.files.push_back("rates_curve.csv");
    }
    if (cfg.emit_paths) {
        const auto coeffs =
            ltf_step_coefficients(spec.channel, spec.grid, spec.quad_substeps);
        CsvWriter csv(art.out_dir / "paths.csv", {"path", "b", "tau", "x_db"});
        for (int p = 0; p < spec.mc.paths; ++p) {
            const auto x = sample_ltf_path(spec.channel, coeffs, spec.mc.seed,
                                           static_cast<std::uint32_t>(p), 0);
            for (int b = 0; b <= spec.grid.n; ++b)
                csv.row({static_cast<double>(p), static_cast<double>(b),
                         spec.grid.tau(b), x[b]});
        }
        art.files.push_back("paths.csv");
    }
    if (cfg.emit_svg) write_multiplier_svgs(art.out_dir, spec, result.trace,
                                            art.files);

    nlohmann::ordered_json report;
    report["converged"] = result.summary.converged;
    report["iterations"] = result.summary.iterations;
    report["heuristic_dual"] = result.summary.heuristic_dual;
    report["dual_value"] = result.summary.dual_value;
    report["dual_se"] = result.summary.dual_se;
    report["sum_utility"] = result.summary.sum_utility;
    report["weak_duality_violations"] = result.summary.weak_duality_violations;
    report["mean_link_power_tx_w"] = result.summary.mean_link_power_tx;
    auto flows = nlohmann::ordered_json::array();
    for (int f = 0; f < spec.flows.num_flows(); ++f)
        flows.push_back({{"source", spec.flows.flows[f].first},
                         {"destination", spec.flows.flows[f].second},
                         {"rate_bps", result.summary.flow_rate[f]}});
    report["flows"] = std::move(flows);
    auto links = nlohmann::ordered_json::array();
    for (int e = 0; e < spec.num_links(); ++e)
        links.push_back({{"from", spec.net.links[e].from},
                         {"to", spec.net.links[e].to},
                         {"power_sched_w", result.summary.link_power_avg[e]},
                         {"power_tx_w", result.summary.link_power_tx_avg[e]}});
    report["links"] = std::move(links);
    art.files.push_back("report.json");
    report["files"] = art.files;
    std::ofstream out(art.out_dir / "report.json");
    out << report.dump(2) << '\n';

    return art;
}

DeltaSweepResult sweep_delta(const RunConfig& base, std::vector<double> deltas,
                             bool common_random_numbers) {
    require(deltas.size() >= 2, "sweep_delta: need at least two delta values");
    DeltaSweepResult res;
    res.deltas = deltas;
    const auto root = resolve_out_dir(base);
    ensure_directory(root);

    for (std::size_t k = 0; k < deltas.size(); ++k) {
        RunConfig cfg = base;
        cfg.delta = CoefficientFn::constant(deltas[k]);
        cfg.out_dir = root / delta_dir_name(deltas[k]);
        if (!common_random_numbers) cfg.mc.seed = base.mc.seed + k;
        // guard against the env override collapsing per-delta directories
        if (std::getenv("XLNUM_OUT_DIR"))
            cfg.out_dir = resolve_out_dir(base) / delta_dir_name(deltas[k]);
        const auto spec = build_problem(cfg);
        const auto result = solve_dual(spec);
        res.runs.push_back(result.summary);
    }

    res.utilities_nondecreasing = true;
    res.rates_nondecreasing = true;
    res.power_decreasing = base.power_control;
    res.min_utility_margin = 1e300;
    for (std::size_t k = 0; k + 1 < res.runs.size(); ++k) {
        const double margin =
            res.runs[k + 1].sum_utility - res.runs[k].sum_utility;
        res.min_utility_margin = std::min(res.min_utility_margin, margin);
        if (margin < -1e-9) res.utilities_nondecreasing = false;
        for (std::size_t f = 0; f < res.runs[k].flow_rate.size(); ++f)
            if (res.runs[k + 1].flow_rate[f] < res.runs[k].flow_rate[f] - 1e-9)
                res.rates_nondecreasing = false;
        if (base.power_control &&
            !(res.runs[k + 1].mean_link_power_tx < res.runs[k].mean_link_power_tx))
            res.power_decreasing = false;
    }

    CsvWriter csv(root / "sweep_delta.csv",
                  [&] {
                      std::vector<std::string> h = {"delta", "converged",
                                                    "iterations", "dual_value",
                                                    "sum_utility",
                                                    "mean_link_power_tx_w"};
                      for (std::size_t f = 0; f < res.runs[0].flow_rate.size(); ++f)
                          h.push_back("rate_flow" + std::to_string(f));
                      return h;
                  }());
    for (std::size_t k = 0; k < res.runs.size(); ++k) {
        std::vector<double> row = {deltas[k],
                                   res.runs[k].converged ? 1.0 : 0.0,
                                   static_cast<double>(res.runs[k].iterations),
                                   res.runs[k].dual_value,
                                   res.runs[k].sum_utility,
                                   res.runs[k].mean_link_power_tx};
        for (double r : res.runs[k].flow_rate) row.push_back(r);
        csv.row(row);
    }
    return res;
}

ConvexOrderReport verify_convex_order(const RunConfig& base,
                                      std::vector<double> deltas, int paths) {
    require(deltas.size() >= 2, "verify_convex_order: need >= 2 deltas");
    require(paths >= 1000, "verify_convex_order: need at least 1000 paths");
    std::sort(deltas.begin(), deltas.end());

    ConvexOrderReport rep;
    rep.deltas = deltas;
    const auto& grid = base.grid;
    const double dt = grid.dt();

    // per delta, per path: [X(T), int C dt]
    std::vector<std::vector<double>> samples;  // [delta][path*2 + k]
    for (double delta : deltas) {
        LtfChannelModel model{base.beta, base.gamma,
                              CoefficientFn::constant(delta), base.x0};
        const auto coeffs = ltf_step_coefficients(model, grid, 64);
        auto fn = [&](std::size_t p, std::span<double> out) {
            const auto x = sample_ltf_path(model, coeffs, base.mc.seed,
                                           static_cast<std::uint32_t>(p), 0);
            double cap_int = 0.0;
            for (int b = 0; b < grid.n; ++b)
                cap_int += capacity_orthogonal(base.bandwidth_hz,
                                               attenuation_ltf(x[b]), base.p_fixed,
                                               base.noise_w) *
                           dt;
            out[0] = x[grid.n];
            out[1] = cap_int;
        };
        std::vector<double> buf(static_cast<std::size_t>(paths) * 2);
        mc::fill_paths_parallel(paths, 2, buf, fn);
        const auto mom = mc::reduce_ordered(buf, paths, 2);
        rep.mean_x_end.push_back(mom.mean[0]);
        rep.se_x_end.push_back(mom.se[0]);
        rep.mean_cap_int.push_back(mom.mean[1]);
        rep.se_cap_int.push_back(mom.se[1]);
        samples.push_back(std::move(buf));
    }

    // paired differences against the first delta (common random numbers)
    rep.mean_invariant = true;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        std::vector<double> diff(static_cast<std::size_t>(paths) * 2);
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = samples[k][i] - samples[0][i];
        const auto mom = mc::reduce_ordered(diff, paths, 2);
        rep.x_diff.push_back(mom.mean[0]);
        rep.x_diff_se.push_back(mom.se[0]);
        rep.cap_diff.push_back(mom.mean[1]);
        rep.cap_diff_se.push_back(mom.se[1]);
        if (k > 0 && std::abs(mom.mean[0]) > 3.0 * std::max(mom.se[0], 1e-300))
            rep.mean_invariant = false;
    }
    rep.capacity_increasing = true;
    for (std::size_t k = 0; k + 1 < deltas.size(); ++k)
        if (!(rep.mean_cap_int[k + 1] > rep.mean_cap_int[k]))
            rep.capacity_increasing = false;
    const double last_se = std::max(rep.cap_diff_se.back(), 1e-300);
    rep.largest_gap_sigma = rep.cap_diff.back() / last_se;

    const auto root = resolve_out_dir(base);
    ensure_directory(root);
    CsvWriter csv(root / "convex_order.csv",
                  {"delta", "mean_x_end_db", "se_x_end", "x_diff_vs_first",
                   "x_diff_se", "mean_cap_int_bits", "se_cap_int",
                   "cap_diff_vs_first", "cap_diff_se"});
    for (std::size_t k = 0; k < deltas.size(); ++k)
        csv.row({deltas[k], rep.mean_x_end[k], rep.se_x_end[k], rep.x_diff[k],
                 rep.x_diff_se[k], rep.mean_cap_int[k], rep.se_cap_int[k],
                 rep.cap_diff[k], rep.cap_diff_se[k]});
    return rep;
}

OracleReport oracle_small_instance(const RunConfig& cfg) {
    OracleReport rep;
    auto refuse = [&](const std::string& why) {
        rep.refused = true;
        rep.message = why;
        return rep;
    };
    if (cfg.mode != AccessMode::orthogonal)
        return refuse("oracle handles orthogonal instances only");
    if (cfg.power_control)
        return refuse("oracle handles fixed-power instances only");
    if (!(cfg.delta.kind() == CoefficientFn::Kind::constant &&
          cfg.delta.constant_value() == 0.0))
        return refuse("oracle requires a deterministic channel (delta == 0)");
    if (!(cfg.beta.is_constant_on(cfg.grid.s, cfg.grid.T) &&
          cfg.gamma.is_constant_on(cfg.grid.s, cfg.grid.T)))
        return refuse("oracle requires constant channel coefficients");
    if (!cfg.explicit_flows || cfg.explicit_flows->size() != 1)
        return refuse("oracle requires exactly one explicit flow");
    if (cfg.utility.kind != Utility::Kind::log_rate)
        return refuse("oracle covers log utilities");

    const auto spec = build_problem(cfg);
    if (spec.num_links() > 2) return refuse("oracle budget: at most two links");

    // deterministic time-averaged capacity per link
    const auto [mean_x, var_x] = ltf_mean_variance(spec.channel, spec.grid);
    (void)var_x;
    std::vector<double> cap_avg(spec.num_links());
    for (int e = 0; e < spec.num_links(); ++e) {
        double acc = 0.0;
        for (int b = 0; b < spec.grid.n; ++b)
            acc += capacity_orthogonal(spec.net.links[e].bandwidth_hz,
                                       attenuation_ltf(mean_x[b]),
                                       spec.fixed_power_w, spec.net.noise_w);
        cap_avg[e] = acc / spec.grid.n;
    }

    const double span = spec.grid.duration();
    const double lam_hi = spec.net.lambda_max;
    const double r_hi = spec.net.rate_max;
    const int steps = 1000;
    double best = -1e300;

    if (spec.num_links() == 1) {
        // grid over (lambda, r); feasible iff lambda <= r and r <= cap
        for (int a = 1; a <= steps; ++a) {
            const double lam = lam_hi * a / steps;
            for (int b = 0; b <= steps; ++b) {
                const double r = r_hi * b / steps;
                const double share =
                    spec.scheduling ? 1.0 : spec.time_share[0];
                if (lam <= r && r <= share * cap_avg[0]) {
                    const double obj = std::log(lam) * span;
                    if (obj > best) best = obj;
                }
            }
        }
    } else {
        // two conflicting links in series; theta is the time share of the
        // first link's set. r0 in [lam, min(R, theta c0)] and r1 in
        // [r0, min(R, (1-theta) c1)] exist iff lam clears both caps.
        const auto [src, dst] = spec.flows.flows[0];
        LinkId first = -1, second = -1;
        for (int e = 0; e < spec.num_links(); ++e) {
            if (spec.net.links[e].from == src) first = e;
            if (spec.net.links[e].to == dst) second = e;
        }
        if (first < 0 || second < 0 || first == second)
            return refuse("oracle: two-link instances must chain source to "
                          "destination");
        require(!spec.net.conflicts[first].empty(),
                "oracle: the two links must conflict (shared relay)");
        for (int st = 0; st <= steps; ++st) {
            const double theta = spec.scheduling
                                     ? static_cast<double>(st) / steps
                                     : spec.time_share[first];
            const double cap0 = theta * cap_avg[first];
            const double cap1 = (spec.scheduling ? (1.0 - theta)
                                                 : spec.time_share[second]) *
                                cap_avg[second];
            const double lam_cap =
                std::min({lam_hi, r_hi, cap0, cap1});
            if (lam_cap <= 0.0) continue;
            // objective is increasing in lambda; scan the lambda grid up to
            // the cap to stay an independent brute-force route
            for (int a = 1; a <= steps; ++a) {
                const double lam = lam_hi * a / steps;
                if (lam > lam_cap) break;
                const double obj = std::log(lam) * span;
                if (obj > best) best = obj;
            }
            if (!spec.scheduling) break;
        }
    }
    rep.primal_value = best;

    const auto result = solve_dual(spec);
    rep.dual_value = result.summary.dual_value;
    rep.gap_rel = std::abs(rep.dual_value - rep.primal_value) /
                  std::max(std::abs(rep.primal_value), 1e-12);

    const auto root = resolve_out_dir(cfg);
    ensure_directory(root);
    nlohmann::ordered_json j;
    j["dual_value"] = rep.dual_value;
    j["primal_value"] = rep.primal_value;
    j["gap_rel"] = rep.gap_rel;
    std::ofstream out(root / "oracle.json");
    out << j.dump(2) << '\n';
    return rep;
}

TSweepResult sweep_T(const RunConfig& base, std::vector<double> horizons,
                     bool scale_n) {
    require(horizons.size() >= 1, "sweep_T: need at least one T");
    TSweepResult res;
    res.horizons = horizons;
    const double base_span = base.grid.duration();
    for (double T : horizons) {
        RunConfig cfg = base;
        require(T > cfg.grid.s, "sweep_T: T must exceed s");
        int n = cfg.grid.n;
        if (scale_n)
            n = std::max(1, static_cast<int>(std::lround(
                                base.grid.n * (T - cfg.grid.s) / base_span)));
        cfg.grid = TimeGrid(cfg.grid.s, T, n);
        const auto spec = build_problem(cfg);
        const auto result = solve_dual(spec);
        res.grid_n.push_back(n);
        res.iterations.push_back(result.summary.iterations);
        res.rates.push_back(result.summary.flow_rate);
    }
    res.iterations_nondecreasing = true;
    res.rates_nonincreasing = true;
    for (std::size_t k = 0; k + 1 < horizons.size(); ++k) {
        if (res.iterations[k + 1] < res.iterations[k])
            res.iterations_nondecreasing = false;
        for (std::size_t f = 0; f < res.rates[k].size(); ++f)
            if (res.rates[k + 1][f] > res.rates[k][f] + 1e-9)
                res.rates_nonincreasing = false;
    }

    const auto root = resolve_out_dir(base);
    ensure_directory(root);
    CsvWriter csv(root / "sweep_T.csv", [&] {
        std::vector<std::string> h = {"T", "n", "iterations"};
        for (std::size_t f = 0; f < res.rates[0].size(); ++f)
            h.push_back("rate_flow" + std::to_string(f));
        return h;
    }());
    for (std::size_t k = 0; k < horizons.size(); ++k) {
        std::vector<double> row = {horizons[k], static_cast<double>(res.grid_n[k]),
                                   static_cast<double>(res.iterations[k])};
        for (double r : res.rates[k]) row.push_back(r);
        csv.row(row);
    }
    return res;
}

NSweepResult sweep_n(const RunConfig& base, std::vector<int> ns) {
    require(ns.size() >= 1, "sweep_n: need at least one n");
    NSweepResult res;
    res.ns = ns;
    for (int n : ns) {
        RunConfig cfg = base;
        cfg.grid = TimeGrid(cfg.grid.s, cfg.grid.T, n);
        const auto spec = build_problem(cfg);
        const auto result = solve_dual(spec);
        res.iterations.push_back(result.summary.iterations);
    }
    const auto [mn, mx] =
        std::minmax_element(res.iterations.begin(), res.iterations.end());
    res.max_rel_spread = *mn > 0 ? static_cast<double>(*mx - *mn) / *mn : 0.0;

    const auto root = resolve_out_dir(base);
    ensure_directory(root);
    CsvWriter csv(root / "sweep_n.csv", {"n", "iterations"});
    for (std::size_t k = 0; k < ns.size(); ++k)
        csv.row({static_cast<double>(ns[k]),
                 static_cast<double>(res.iterations[k])});
    return res;
}

TvUtilityResult run_time_varying_utilities(const RunConfig& cfg) {
    require(cfg.utility.time_varying(),
            "tv-utilities: the configured utility is not time-divided");
    TvUtilityResult res;
    res.artifacts = run_experiment(cfg);

    // replay the curves from the written rates_curve data shape
    const auto spec = build_problem(cfg);
    const auto result = solve_dual(spec);
    for (int b = 0; b <= spec.grid.n; ++b) res.taus.push_back(spec.grid.tau(b));
    res.decreasing = true;
    res.clip_release_t.assign(spec.flows.num_flows(), spec.grid.T);
    res.lambda_curves.resize(spec.flows.num_flows());
    for (int f = 0; f < spec.flows.num_flows(); ++f) {
        auto& curve = res.lambda_curves[f];
        curve.resize(spec.grid.n + 1);
        bool released = false;
        for (int b = 0; b <= spec.grid.n; ++b) {
            curve[b] = result.recovery.lambda_curve
                           [static_cast<std::size_t>(f) * (spec.grid.n + 1) + b];
            if (b > 0 && curve[b] > curve[b - 1] + 1e-12) res.decreasing = false;
            if (!released && curve[b] < spec.net.lambda_max - 1e-12) {
                res.clip_release_t[f] = spec.grid.tau(b);
                released = true;
            }
        }
    }
    return res;
}

TvBetaResult run_time_varying_beta(const RunConfig& base,
                                   std::vector<std::vector<double>> schedules) {
    require(!schedules.empty(), "tv-beta: need at least one schedule");
    TvBetaResult res;
    res.schedules = schedules;
    const double s = base.grid.s, T = base.grid.T;
    for (const auto& sched : schedules) {
        require(!sched.empty(), "tv-beta: empty schedule");
        RunConfig cfg = base;
        if (sched.size() == 1) {
            cfg.beta = CoefficientFn::constant(sched[0]);
        } else {
            std::vector<double> breaks;
            for (std::size_t k = 1; k < sched.size(); ++k)
                breaks.push_back(s + (T - s) * k / sched.size());
            cfg.beta = CoefficientFn::piecewise(breaks, sched);
        }
        const auto spec = build_problem(cfg);
        const auto result = solve_dual(spec);
        res.sum_utility.push_back(result.summary.sum_utility);
        res.rates.push_back(result.summary.flow_rate);
    }
    if (res.sum_utility.size() >= 2)
        res.high_early_wins = res.sum_utility[0] >= res.sum_utility[1] - 1e-9;

    const auto root = resolve_out_dir(base);
    ensure_directory(root);
    CsvWriter csv(root / "tv_beta.csv", [&] {
        std::vector<std::string> h = {"schedule", "sum_utility"};
        for (std::size_t f = 0; f < res.rates[0].size(); ++f)
            h.push_back("rate_flow" + std::to_string(f));
        return h;
    }());
    for (std::size_t k = 0; k < schedules.size(); ++k) {
        std::vector<double> row = {static_cast<double>(k), res.sum_utility[k]};
        for (double r : res.rates[k]) row.push_back(r);
        csv.row(row);
    }
    return res;
}

}  // namespace xlnum
