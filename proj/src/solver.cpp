#include "xlnum/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "xlnum/mc.hpp"
#include "xlnum/rng.hpp"

namespace xlnum {

namespace {
constexpr double k_ln2 = 0.6931471805599453;
constexpr double k_slack = 1e-12;
}  // namespace

void validate(const ProblemSpec& spec) {
    require(spec.net.num_nodes > 0 && spec.net.num_links() > 0,
            "problem: network must have nodes and links");
    require(spec.net.noise_w > 0.0, "problem: N0 must be positive");
    require(spec.net.power_max_w > 0.0, "problem: P_max must be positive");
    require(spec.net.power_min_w >= 0.0 &&
                spec.net.power_min_w <= spec.net.power_max_w,
            "problem: P_min must lie in [0, P_max]");
    require(spec.net.rate_max > 0.0, "problem: R_max must be positive");
    require(spec.net.lambda_max >= 0.0, "problem: lambda_max must be nonnegative");
    require(static_cast<int>(spec.net.conflicts.size()) == spec.net.num_links(),
            "problem: conflict sets missing");
    if (spec.mode == AccessMode::orthogonal) {
        require(!spec.family.sets.empty(),
                "problem: orthogonal mode requires an independent-set family");
        if (!spec.scheduling) {
            require(static_cast<int>(spec.time_share.size()) == spec.net.num_links(),
                    "problem: fixed time shares missing");
            for (double z : spec.time_share)
                require(z >= 0.0 && z <= 1.0,
                        "problem: fixed time shares must lie in [0, 1]");
        }
    }
    if (spec.utility.time_varying())
        require(spec.grid.s > 0.0,
                "problem: time-divided utilities require s > 0");
    require(spec.mc.paths >= 1, "problem: mc.paths must be >= 1");
    require(spec.solver.window >= 1, "problem: solver.window must be >= 1");
    require(spec.solver.max_iters >= 1, "problem: solver.max_iters must be >= 1");
    validate_ltf(spec.channel, spec.grid);
}

std::vector<double> equal_time_shares(const IndependentSetFamily& family,
                                      int num_links) {
    require(!family.sets.empty(), "equal_time_shares: empty family");
    std::vector<double> z(num_links, 0.0);
    for (const auto& s : family.sets)
        for (LinkId e : s) z[e] += 1.0;
    for (auto& v : z) v /= static_cast<double>(family.sets.size());
    return z;
}

Multipliers Multipliers::init(const ProblemSpec& spec) {
    const int N = spec.num_nodes();
    const int D = spec.flows.num_destinations();
    Multipliers m;
    m.mu.assign(static_cast<std::size_t>(D) * N, spec.solver.multiplier_init);
    for (int dp = 0; dp < D; ++dp)
        m.mu[static_cast<std::size_t>(dp) * N + spec.flows.destinations[dp]] = 0.0;
    m.ell.assign(spec.num_links(), spec.solver.multiplier_init);
    // the power-budget constraint only exists under power control
    m.nu.assign(N, spec.power_control ? spec.solver.multiplier_init : 0.0);
    return m;
}

double Multipliers::l1_distance(const Multipliers& other) const {
    double d = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) d += std::abs(mu[k] - other.mu[k]);
    for (std::size_t k = 0; k < ell.size(); ++k)
        d += std::abs(ell[k] - other.ell[k]);
    for (std::size_t k = 0; k < nu.size(); ++k) d += std::abs(nu[k] - other.nu[k]);
    return d;
}

std::vector<double> Multipliers::flatten() const {
    std::vector<double> out;
    out.reserve(mu.size() + ell.size() + nu.size());
    out.insert(out.end(), mu.begin(), mu.end());
    out.insert(out.end(), ell.begin(), ell.end());
    out.insert(out.end(), nu.begin(), nu.end());
    return out;
}

Controls compute_controls(const ProblemSpec& spec, const Multipliers& m) {
    const int N = spec.num_nodes();
    const int D = spec.flows.num_destinations();
    const int E = spec.num_links();
    const int F = spec.flows.num_flows();
    const double span = spec.grid.duration();
    const double dt = spec.grid.dt();

    Controls c;
    c.lambda_int.assign(F, 0.0);
    c.util_int.assign(F, 0.0);
    c.lambda_avg.assign(F, 0.0);
    for (int f = 0; f < F; ++f) {
        const auto [src, dst] = spec.flows.flows[f];
        if (spec.net.lambda_max <= 0.0) continue;  // degenerate flow: rate 0
        const double mu_f =
            m.mu[static_cast<std::size_t>(spec.flows.dest_pos(dst)) * N + src];
        if (!spec.utility.time_varying()) {
            const double lam = congestion_optimal_rate(spec.utility, mu_f,
                                                       spec.grid.s,
                                                       spec.net.lambda_max);
            c.lambda_int[f] = lam * span;
            c.util_int[f] = spec.utility.value(lam, spec.grid.s) * span;
            c.lambda_avg[f] = lam;
        } else {
            for (int b = 0; b < spec.grid.n; ++b) {
                const double t = spec.grid.tau(b);
                const double lam = congestion_optimal_rate(spec.utility, mu_f, t,
                                                           spec.net.lambda_max);
                c.lambda_int[f] += lam * dt;
                c.util_int[f] += spec.utility.value(lam, t) * dt;
            }
            c.lambda_avg[f] = c.lambda_int[f] / span;
        }
    }

    c.r.assign(static_cast<std::size_t>(E) * D, 0.0);
    c.r_int.assign(static_cast<std::size_t>(E) * D, 0.0);
    for (int e = 0; e < E; ++e) {
        const NodeId i = spec.net.links[e].from;
        const NodeId j = spec.net.links[e].to;
        for (int dp = 0; dp < D; ++dp) {
            const NodeId d = spec.flows.destinations[dp];
            if (i == d) continue;  // destinations do not re-emit their traffic
            const double mu_i = m.mu[static_cast<std::size_t>(dp) * N + i];
            const double mu_j = m.mu[static_cast<std::size_t>(dp) * N + j];
            const double r =
                routing_optimal(mu_i, mu_j, m.ell[e], spec.net.rate_max);
            c.r[static_cast<std::size_t>(e) * D + dp] = r;
            c.r_int[static_cast<std::size_t>(e) * D + dp] = r * span;
        }
    }
    return c;
}

PathCache sample_gain_cache(const ProblemSpec& spec, int n_pairs_needed) {
    PathCache cache;
    cache.n_pairs = n_pairs_needed;
    cache.n_paths = spec.mc.paths;
    cache.n_steps = spec.grid.n;
    cache.gain.resize(static_cast<std::size_t>(spec.mc.paths) * (spec.grid.n + 1) *
                      n_pairs_needed);
    const auto coeffs =
        ltf_step_coefficients(spec.channel, spec.grid, spec.quad_substeps);

#pragma omp parallel for schedule(dynamic, 1) if (spec.mc.parallel)
    for (int p = 0; p < spec.mc.paths; ++p) {
        for (int pair = 0; pair < n_pairs_needed; ++pair) {
            const auto x = sample_ltf_path(spec.channel, coeffs, spec.mc.seed,
                                           static_cast<std::uint32_t>(p),
                                           static_cast<std::uint32_t>(pair));
            for (int b = 0; b <= spec.grid.n; ++b)
                cache.gain[(static_cast<std::size_t>(p) * (spec.grid.n + 1) + b) *
                               n_pairs_needed +
                           pair] = attenuation_ltf(x[b]);
        }
    }
    return cache;
}

CollapsedFamily collapse_family(const Network& net,
                                const IndependentSetFamily& family) {
    CollapsedFamily cf;
    const int N = net.num_nodes;
    std::map<std::vector<int>, int> group_of;
    std::vector<int> group_size;
    for (const auto& set : family.sets) {
        std::vector<int> key;
        key.reserve(set.size());
        bool ok = true;
        for (LinkId e : set) {
            const NodeId lo = std::min(net.links[e].from, net.links[e].to);
            const NodeId hi = std::max(net.links[e].from, net.links[e].to);
            key.push_back(lo * N + hi);
        }
        std::sort(key.begin(), key.end());
        if (std::adjacent_find(key.begin(), key.end()) != key.end())
            ok = false;  // both orientations in one set: no edge collapse
        if (!ok) {
            cf.exact = false;
            return cf;
        }
        auto it = group_of.find(key);
        if (it == group_of.end()) {
            group_of.emplace(key, static_cast<int>(cf.sets.size()));
            group_size.push_back(1);
            std::vector<CollapsedFamily::Edge> edges;
            for (int ek : key) {
                const NodeId lo = ek / N, hi = ek % N;
                CollapsedFamily::Edge edge;
                edge.fwd = net.link_between(lo, hi);
                edge.rev = net.link_between(hi, lo);
                if (edge.fwd < 0) std::swap(edge.fwd, edge.rev);
                edges.push_back(edge);
            }
            cf.sets.push_back(std::move(edges));
        } else {
            group_size[it->second]++;
        }
    }
    // each group must be a full orientation cube for the collapse to stand
    // in for the directed family
    for (std::size_t g = 0; g < cf.sets.size(); ++g) {
        int expect = 1;
        for (const auto& edge : cf.sets[g])
            if (edge.rev >= 0) expect *= 2;
        if (group_size[g] != expect) {
            cf.exact = false;
            return cf;
        }
    }
    return cf;
}

namespace {

// layout of the per-path output vector fed to the mc reduction
struct OutLayout {
    int E = 0, N = 0;
    int cap0() const { return 0; }
    int nodepow0() const { return E; }
    int linkpow0() const { return E + N; }
    int txpow0() const { return 2 * E + N; }
    int cost() const { return 3 * E + N; }
    int obj() const { return 3 * E + N + 1; }
    int total() const { return 3 * E + N + 2; }
};

struct InnerTerms {
    // per-link, per-iteration constants of the physical-layer subproblem
    std::vector<double> half_nu;   // nu_tx / (2V)
    std::vector<double> ell_term;  // 2 ell B / (V ln2)
    std::vector<double> nu_tx;
    std::vector<double> bandwidth;
};

InnerTerms make_inner_terms(const ProblemSpec& spec, const Multipliers& m) {
    const int E = spec.num_links();
    InnerTerms it;
    it.half_nu.resize(E);
    it.ell_term.resize(E);
    it.nu_tx.resize(E);
    it.bandwidth.resize(E);
    const double v = spec.cost.v;
    for (int e = 0; e < E; ++e) {
        const double nu = m.nu[spec.net.links[e].from];
        it.nu_tx[e] = nu;
        it.bandwidth[e] = spec.net.links[e].bandwidth_hz;
        if (spec.cost.kind == PowerCost::Kind::quadratic && v > 0.0) {
            it.half_nu[e] = nu / (2.0 * v);
            it.ell_term[e] = 2.0 * m.ell[e] * it.bandwidth[e] / (v * k_ln2);
        }
    }
    return it;
}

}  // namespace

ExpectationEstimates estimate_expectations(const ProblemSpec& spec,
                                           const Multipliers& m) {
    const auto pairs = build_pair_index(spec.net);
    const int needed = spec.mode == AccessMode::non_orthogonal
                           ? pairs.num_pairs()
                           : spec.num_links();
    const auto cache = sample_gain_cache(spec, needed);
    std::optional<CollapsedFamily> collapsed;
    if (spec.mode == AccessMode::orthogonal && spec.scheduling)
        collapsed = collapse_family(spec.net, spec.family);
    return estimate_expectations(spec, m, cache, pairs,
                                 collapsed ? &*collapsed : nullptr);
}

ExpectationEstimates estimate_expectations(const ProblemSpec& spec,
                                           const Multipliers& m,
                                           const PathCache& cache,
                                           const PairIndex& pairs,
                                           const CollapsedFamily* collapsed) {
    const int E = spec.num_links();
    const int N = spec.num_nodes();
    const int n = spec.grid.n;
    const double dt = spec.grid.dt();
    const OutLayout lay{E, N};
    const bool quad_cost = spec.cost.kind == PowerCost::Kind::quadratic;
    const double noise = spec.net.noise_w;
    const double p_min = spec.net.power_min_w;
    const double p_max = spec.net.power_max_w;
    const auto terms = make_inner_terms(spec, m);
    const bool use_collapsed = collapsed && collapsed->exact;

    mc::PathFn fn = [&](std::size_t path, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        std::vector<double> power(E), capv(E), weight(E), costj(E);
        const int p = static_cast<int>(path);
        for (int b = 0; b < n; ++b) {
            const double* g =
                cache.gain.data() +
                (static_cast<std::size_t>(p) * (n + 1) + b) * cache.n_pairs;

            if (spec.mode == AccessMode::non_orthogonal) {
                std::span<const double> gains(g, cache.n_pairs);
                if (spec.power_control) {
                    const auto pw = power_nonorthogonal_heuristic(
                        spec.net, pairs, gains, spec.cost, m.ell, m.nu,
                        spec.heuristic_restarts, spec.mc.seed ^ 0x5157u);
                    std::copy(pw.begin(), pw.end(), power.begin());
                } else {
                    std::fill(power.begin(), power.end(), spec.fixed_power_w);
                }
                for (int e = 0; e < E; ++e) {
                    capv[e] =
                        capacity_nonorthogonal(spec.net, pairs, gains, power, e);
                    costj[e] = spec.power_control ? spec.cost.value(power[e]) : 0.0;
                    out[lay.cap0() + e] += capv[e] * dt;
                    out[lay.linkpow0() + e] += power[e] * dt;
                    out[lay.txpow0() + e] += power[e] * dt;
                    out[lay.nodepow0() + spec.net.links[e].from] += power[e] * dt;
                    out[lay.cost()] += costj[e] * dt;
                    out[lay.obj()] += (m.ell[e] * capv[e] - costj[e] -
                                       terms.nu_tx[e] * power[e]) *
                                      dt;
                }
                continue;
            }

            // orthogonal: per-link power and weight, then schedule
            for (int e = 0; e < E; ++e) {
                const double a = g[e];
                double pw;
                if (!spec.power_control) {
                    pw = spec.fixed_power_w;
                } else if (quad_cost) {
                    const double n0g = noise / a;
                    const double d = n0g - terms.half_nu[e];
                    const double p_tilde =
                        0.5 * (-(n0g + terms.half_nu[e]) +
                               std::sqrt(d * d + terms.ell_term[e]));
                    pw = std::clamp(p_tilde, p_min, p_max);
                } else {
                    pw = power_optimal_generic(spec.cost, std::log(a) / k_db_to_nat,
                                               m.ell[e], terms.nu_tx[e],
                                               terms.bandwidth[e], noise, p_max,
                                               p_min);
                }
                const double cap = terms.bandwidth[e] *
                                   std::log2(1.0 + a * pw / noise);
                const double j = spec.power_control ? spec.cost.value(pw) : 0.0;
                power[e] = pw;
                capv[e] = cap;
                costj[e] = j;
                weight[e] = m.ell[e] * cap - j - terms.nu_tx[e] * pw;
            }

            auto activate = [&](int e, double share) {
                out[lay.cap0() + e] += share * capv[e] * dt;
                out[lay.linkpow0() + e] += share * power[e] * dt;
                out[lay.nodepow0() + spec.net.links[e].from] +=
                    share * power[e] * dt;
                out[lay.cost()] += share * costj[e] * dt;
                out[lay.obj()] += share * weight[e] * dt;
            };
            for (int e = 0; e < E; ++e) out[lay.txpow0() + e] += power[e] * dt;

            if (spec.scheduling) {
                if (use_collapsed) {
                    int best = 0;
                    double best_score = -1.0;
                    for (int s = 0; s < static_cast<int>(collapsed->sets.size());
                         ++s) {
                        double score = 0.0;
                        for (const auto& edge : collapsed->sets[s]) {
                            double w = weight[edge.fwd];
                            if (edge.rev >= 0) w = std::max(w, weight[edge.rev]);
                            score += std::max(w, 0.0);
                        }
                        if (score > best_score) {
                            best_score = score;
                            best = s;
                        }
                    }
                    for (const auto& edge : collapsed->sets[best]) {
                        int e = edge.fwd;
                        if (edge.rev >= 0 && weight[edge.rev] > weight[edge.fwd])
                            e = edge.rev;
                        if (spec.power_control ? weight[e] > 0.0 : true)
                            activate(e, 1.0);
                    }
                } else {
                    const int s = schedule_max_weight(weight, spec.family);
                    for (LinkId e : spec.family.sets[s])
                        if (spec.power_control ? weight[e] > 0.0 : true)
                            activate(e, 1.0);
                }
            } else {
                for (int e = 0; e < E; ++e) {
                    if (spec.power_control && weight[e] <= 0.0) continue;
                    activate(e, spec.time_share[e]);
                }
            }
        }
    };

    const auto moments = mc::run(static_cast<std::size_t>(spec.mc.paths),
                                 static_cast<std::size_t>(lay.total()), fn,
                                 spec.mc.parallel);

    ExpectationEstimates est;
    auto slice = [&](int off, int count, std::vector<double>& mean,
                     std::vector<double>& se) {
        mean.assign(moments.mean.begin() + off, moments.mean.begin() + off + count);
        se.assign(moments.se.begin() + off, moments.se.begin() + off + count);
    };
    slice(lay.cap0(), E, est.cap_mean, est.cap_se);
    slice(lay.nodepow0(), N, est.node_power_mean, est.node_power_se);
    slice(lay.linkpow0(), E, est.link_power_mean, est.link_power_se);
    slice(lay.txpow0(), E, est.link_power_tx_mean, est.link_power_tx_se);
    est.cost_mean = moments.mean[lay.cost()];
    est.cost_se = moments.se[lay.cost()];
    est.dual_stoch_mean = moments.mean[lay.obj()];
    est.dual_stoch_se = moments.se[lay.obj()];
    est.controls = compute_controls(spec, m);
    return est;
}

Subgradients subgradients(const ProblemSpec& spec,
                          const ExpectationEstimates& est) {
    const int N = spec.num_nodes();
    const int D = spec.flows.num_destinations();
    const int E = spec.num_links();
    Subgradients g;
    g.mu.assign(static_cast<std::size_t>(D) * N, 0.0);
    g.ell.assign(E, 0.0);
    g.nu.assign(N, 0.0);

    // lambda integral lookup per (node, dest)
    std::vector<double> lam_int(static_cast<std::size_t>(D) * N, 0.0);
    for (int f = 0; f < spec.flows.num_flows(); ++f) {
        const auto [src, dst] = spec.flows.flows[f];
        lam_int[static_cast<std::size_t>(spec.flows.dest_pos(dst)) * N + src] =
            est.controls.lambda_int[f];
    }

    for (int dp = 0; dp < D; ++dp) {
        const NodeId d = spec.flows.destinations[dp];
        for (NodeId i = 0; i < N; ++i) {
            if (i == d) continue;
            double acc = lam_int[static_cast<std::size_t>(dp) * N + i];
            for (LinkId e : spec.net.in_links[i])
                acc += est.controls.r_int[static_cast<std::size_t>(e) * D + dp];
            for (LinkId e : spec.net.out_links[i])
                acc -= est.controls.r_int[static_cast<std::size_t>(e) * D + dp];
            g.mu[static_cast<std::size_t>(dp) * N + i] = acc;
        }
    }
    for (int e = 0; e < E; ++e) {
        double traffic = 0.0;
        for (int dp = 0; dp < D; ++dp)
            traffic += est.controls.r_int[static_cast<std::size_t>(e) * D + dp];
        g.ell[e] = traffic - est.cap_mean[e];
    }
    if (spec.power_control)
        for (NodeId i = 0; i < N; ++i)
            g.nu[i] = est.node_power_mean[i] - spec.net.node_power_budget[i];

    double norm = 0.0;
    for (double v : g.mu) norm += v * v;
    for (double v : g.ell) norm += v * v;
    for (double v : g.nu) norm += v * v;
    g.norm_l2 = std::sqrt(norm);
    return g;
}

Multipliers update_multipliers(const Multipliers& m, const Subgradients& g,
                               double kappa) {
    require(kappa > 0.0, "update_multipliers: kappa must be positive");
    Multipliers out = m;
    for (std::size_t k = 0; k < out.mu.size(); ++k)
        out.mu[k] = std::max(0.0, m.mu[k] + kappa * g.mu[k]);
    for (std::size_t k = 0; k < out.ell.size(); ++k)
        out.ell[k] = std::max(0.0, m.ell[k] + kappa * g.ell[k]);
    for (std::size_t k = 0; k < out.nu.size(); ++k)
        out.nu[k] = std::max(0.0, m.nu[k] + kappa * g.nu[k]);
    return out;
}

double step_size(int eta, double a_prime) {
    require(eta >= 1, "step_size: iteration counter starts at 1");
    return a_prime / eta;
}

bool converged(const DualTrace& trace, int window, double tol) {
    require(window >= 1, "converged: window must be >= 1");
    if (static_cast<int>(trace.iterations.size()) < window) return false;
    double acc = 0.0;
    for (int k = 0; k < window; ++k)
        acc += trace.iterations[trace.iterations.size() - 1 - k].multiplier_change;
    return acc < tol;
}

namespace {

struct DualParts {
    double estimate = 0.0;
    double se = 0.0;
    bool primal_feasible = false;
    double primal_value = 0.0;
    bool weak_duality_violation = false;
};

DualParts assemble_dual(const ProblemSpec& spec, const Multipliers& m,
                        const ExpectationEstimates& est, const Subgradients& g) {
    const int N = spec.num_nodes();
    const int D = spec.flows.num_destinations();
    const int E = spec.num_links();
    DualParts dp;
    double det = 0.0;
    for (double u : est.controls.util_int) det += u;
    for (int k = 0; k < D * N; ++k) det -= m.mu[k] * g.mu[k];
    for (int e = 0; e < E; ++e) {
        double traffic = 0.0;
        for (int d = 0; d < D; ++d)
            traffic += est.controls.r_int[static_cast<std::size_t>(e) * D + d];
        det -= m.ell[e] * traffic;
    }
    for (int i = 0; i < N; ++i) det += m.nu[i] * spec.net.node_power_budget[i];
    dp.estimate = det + est.dual_stoch_mean;
    dp.se = est.dual_stoch_se;

    bool feasible = true;
    for (int k = 0; k < D * N && feasible; ++k)
        if (g.mu[k] > k_slack) feasible = false;
    for (int e = 0; e < E && feasible; ++e)
        if (g.ell[e] > 3.0 * est.cap_se[e] + k_slack) feasible = false;
    if (spec.power_control)
        for (int i = 0; i < N && feasible; ++i)
            if (g.nu[i] > 3.0 * est.node_power_se[i] + k_slack) feasible = false;
    dp.primal_feasible = feasible;
    if (feasible) {
        double util = 0.0;
        for (double u : est.controls.util_int) util += u;
        dp.primal_value = util - est.cost_mean;
        // dual - primal = -sum mu*g_mu + sum l*(cap - traffic)
        //               + sum nu*(budget - power); nonnegative in expectation
        // for a feasible candidate, so the tolerance is the multiplier-
        // weighted sampling noise of the two stochastic sums.
        double margin = 1e-9;
        for (int e = 0; e < E; ++e) margin += 3.0 * m.ell[e] * est.cap_se[e];
        for (int i = 0; i < N; ++i)
            margin += 3.0 * m.nu[i] * est.node_power_se[i];
        dp.weak_duality_violation = dp.primal_value > dp.estimate + margin;
    }
    return dp;
}

}  // namespace

SolveResult solve_dual(const ProblemSpec& spec) {
    validate(spec);
    const auto pairs = build_pair_index(spec.net);
    const int needed = spec.mode == AccessMode::non_orthogonal
                           ? pairs.num_pairs()
                           : spec.num_links();
    const auto cache = sample_gain_cache(spec, needed);
    std::optional<CollapsedFamily> collapsed;
    if (spec.mode == AccessMode::orthogonal && spec.scheduling)
        collapsed = collapse_family(spec.net, spec.family);
    const CollapsedFamily* cf = collapsed ? &*collapsed : nullptr;

    SolveResult result;
    Multipliers m = Multipliers::init(spec);
    DualTrace& trace = result.trace;

    for (int eta = 1; eta <= spec.solver.max_iters; ++eta) {
        const auto est = estimate_expectations(spec, m, cache, pairs, cf);
        const auto g = subgradients(spec, est);
        const auto dual = assemble_dual(spec, m, est, g);
        const double kappa = step_size(eta, spec.solver.a_prime);
        const Multipliers next = update_multipliers(m, g, kappa);

        IterationRecord rec;
        rec.eta = eta;
        rec.kappa = kappa;
        rec.dual_estimate = dual.estimate;
        rec.dual_se = dual.se;
        rec.grad_norm = g.norm_l2;
        rec.multiplier_change = next.l1_distance(m);
        rec.primal_feasible = dual.primal_feasible;
        rec.primal_value = dual.primal_value;
        rec.multipliers = m.flatten();
        trace.iterations.push_back(std::move(rec));
        if (dual.weak_duality_violation) ++trace.weak_duality_violations;

        m = next;
        if (converged(trace, spec.solver.window, spec.solver.tol)) {
            trace.converged = true;
            break;
        }
    }

    result.final = m;
    result.recovery = recover_primal(spec, trace, m);

    // reporting pass at the final multipliers, on the same paths
    const auto est_final = estimate_expectations(spec, m, cache, pairs, cf);
    const auto g_final = subgradients(spec, est_final);
    const auto dual_final = assemble_dual(spec, m, est_final, g_final);

    RunSummary& s = result.summary;
    s.converged = trace.converged;
    s.heuristic_dual =
        spec.mode == AccessMode::non_orthogonal && spec.power_control;
    s.iterations = static_cast<int>(trace.iterations.size());
    // best (lowest) dual estimate is the tightest bound recorded
    s.dual_value = dual_final.estimate;
    s.dual_se = dual_final.se;
    for (const auto& it : trace.iterations)
        if (it.dual_estimate < s.dual_value) {
            s.dual_value = it.dual_estimate;
            s.dual_se = it.dual_se;
        }
    s.sum_utility = 0.0;
    for (double u : est_final.controls.util_int) s.sum_utility += u;
    s.flow_rate = est_final.controls.lambda_avg;
    const double span = spec.grid.duration();
    s.link_power_avg.resize(spec.num_links());
    s.link_power_tx_avg.resize(spec.num_links());
    for (int e = 0; e < spec.num_links(); ++e) {
        s.link_power_avg[e] = est_final.link_power_mean[e] / span;
        s.link_power_tx_avg[e] = est_final.link_power_tx_mean[e] / span;
    }
    s.mean_link_power_tx =
        std::accumulate(s.link_power_tx_avg.begin(), s.link_power_tx_avg.end(),
                        0.0) /
        std::max(1, spec.num_links());
    s.weak_duality_violations = trace.weak_duality_violations;
    return result;
}

PrimalRecovery recover_primal(const ProblemSpec& spec, const DualTrace& trace,
                              const Multipliers& final) {
    require(!trace.iterations.empty(), "recover_primal: no iterations recorded");
    const int N = spec.num_nodes();
    const int D = spec.flows.num_destinations();
    const int E = spec.num_links();
    PrimalRecovery rec;
    rec.r_bar.assign(static_cast<std::size_t>(E) * D, 0.0);

    Multipliers m = final;  // shape template; values overwritten per record
    for (const auto& it : trace.iterations) {
        std::size_t off = 0;
        for (auto& v : m.mu) v = it.multipliers[off++];
        for (auto& v : m.ell) v = it.multipliers[off++];
        for (auto& v : m.nu) v = it.multipliers[off++];
        const auto c = compute_controls(spec, m);
        for (std::size_t k = 0; k < rec.r_bar.size(); ++k) rec.r_bar[k] += c.r[k];
    }
    for (auto& v : rec.r_bar) v /= static_cast<double>(trace.iterations.size());

    const auto c = compute_controls(spec, final);
    rec.lambda_avg = c.lambda_avg;
    rec.lambda_curve.assign(
        static_cast<std::size_t>(spec.flows.num_flows()) * (spec.grid.n + 1), 0.0);
    for (int f = 0; f < spec.flows.num_flows(); ++f) {
        const auto [src, dst] = spec.flows.flows[f];
        const double mu_f =
            final.mu[static_cast<std::size_t>(spec.flows.dest_pos(dst)) * N + src];
        for (int b = 0; b <= spec.grid.n; ++b) {
            const double lam =
                spec.net.lambda_max <= 0.0
                    ? 0.0
                    : congestion_optimal_rate(spec.utility, mu_f,
                                              spec.grid.tau(b),
                                              spec.net.lambda_max);
            rec.lambda_curve[static_cast<std::size_t>(f) * (spec.grid.n + 1) + b] =
                lam;
        }
    }
    return rec;
}

ExpectationEstimates resimulate_policy(const ProblemSpec& spec,
                                       const Multipliers& m,
                                       std::uint64_t fresh_seed) {
    ProblemSpec fresh = spec;
    fresh.mc.seed = fresh_seed;
    return estimate_expectations(fresh, m);
}

}  // namespace xlnum
