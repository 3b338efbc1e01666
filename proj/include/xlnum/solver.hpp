#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xlnum/channel.hpp"
#include "xlnum/grid.hpp"
#include "xlnum/net.hpp"
#include "xlnum/subproblems.hpp"

namespace xlnum {

struct McConfig {
    int paths = 200;
    std::uint64_t seed = 1;
    bool parallel = true;
};

struct SolverConfig {
    double a_prime = 0.1;  // step size kappa(eta) = a_prime / eta
    double tol = 1e-3;
    int window = 8;
    int max_iters = 4000;
    double multiplier_init = 1.0;
};

enum class AccessMode { non_orthogonal, orthogonal };

// Everything one dual solve needs. Immutable during the solve.
struct ProblemSpec {
    AccessMode mode = AccessMode::orthogonal;
    bool power_control = true;
    bool scheduling = true;
    double fixed_power_w = 2.0;  // when power control is off
    PowerCost cost;              // active when power control is on
    Utility utility;             // shared by all flows

    Network net;
    FlowSet flows;
    IndependentSetFamily family;     // orthogonal mode
    std::vector<double> time_share;  // per link, used when !scheduling

    LtfChannelModel channel;
    TimeGrid grid;
    McConfig mc;
    SolverConfig solver;
    int heuristic_restarts = 2;  // non-orthogonal inner problem
    int quad_substeps = 64;

    int num_links() const { return net.num_links(); }
    int num_nodes() const { return net.num_nodes; }
};

void validate(const ProblemSpec& spec);

// Equal-time scheduling shares: per-link membership count over family size.
std::vector<double> equal_time_shares(const IndependentSetFamily& family,
                                      int num_links);

// Lagrange multipliers. mu is indexed [dest_pos * N + node]; the slot with
// node == dest is structurally zero (no conservation constraint there).
struct Multipliers {
    std::vector<double> mu;
    std::vector<double> ell;
    std::vector<double> nu;

    static Multipliers init(const ProblemSpec& spec);
    double l1_distance(const Multipliers& other) const;
    std::vector<double> flatten() const;
};

// Deterministic inner controls at fixed multipliers. Rates use the left
// Riemann rule on the grid, matching the capacity/power integrals.
struct Controls {
    std::vector<double> lambda_int;  // per flow, int lambda* dt
    std::vector<double> util_int;    // per flow, int U(lambda*, t) dt
    std::vector<double> lambda_avg;  // per flow, lambda_int / (T - s)
    std::vector<double> r;           // [link * D + dest_pos], constant in t
    std::vector<double> r_int;       // r * (T - s)
};

Controls compute_controls(const ProblemSpec& spec, const Multipliers& m);

// Sampled linear gains for every (tx, rx) channel the run touches.
// Layout gain[(path * (n+1) + b) * n_pairs + pair]; pure function of the
// seed, so identical across iterations and across serial/parallel fills.
struct PathCache {
    int n_pairs = 0;
    int n_paths = 0;
    int n_steps = 0;  // grid n
    std::vector<double> gain;

    double at(int path, int b, int pair) const {
        return gain[(static_cast<std::size_t>(path) * (n_steps + 1) + b) * n_pairs +
                    pair];
    }
};

PathCache sample_gain_cache(const ProblemSpec& spec, int n_pairs_needed);

// Directed maximal sets grouped by undirected edge support, used as the
// fast scheduling representation. Grouping is valid whenever the conflict
// relation depends only on link endpoints (both built-in models); when a
// group is incomplete the solver falls back to the directed family.
struct CollapsedFamily {
    struct Edge {
        LinkId fwd = -1;
        LinkId rev = -1;
    };
    std::vector<std::vector<Edge>> sets;  // ordered by first directed index
    bool exact = true;                    // every group is a full orientation cube
};

CollapsedFamily collapse_family(const Network& net,
                                const IndependentSetFamily& family);

struct ExpectationEstimates {
    // stochastic, per link: E[int pi C dt], E[int pi P dt], E[int P* dt]
    std::vector<double> cap_mean, cap_se;
    std::vector<double> link_power_mean, link_power_se;
    std::vector<double> link_power_tx_mean, link_power_tx_se;
    // stochastic, per node: E[int sum_j pi P dt]
    std::vector<double> node_power_mean, node_power_se;
    double cost_mean = 0.0, cost_se = 0.0;  // E[sum int pi J dt]
    // E[int sum pi (l C - J - nu P) dt], the stochastic part of the dual
    double dual_stoch_mean = 0.0, dual_stoch_se = 0.0;

    Controls controls;  // deterministic integrals at the same multipliers
};

ExpectationEstimates estimate_expectations(const ProblemSpec& spec,
                                           const Multipliers& m);
ExpectationEstimates estimate_expectations(const ProblemSpec& spec,
                                           const Multipliers& m,
                                           const PathCache& cache,
                                           const PairIndex& pairs,
                                           const CollapsedFamily* collapsed);

struct Subgradients {
    std::vector<double> mu;   // same indexing as Multipliers::mu
    std::vector<double> ell;  // per link
    std::vector<double> nu;   // per node
    double norm_l2 = 0.0;
};

Subgradients subgradients(const ProblemSpec& spec,
                          const ExpectationEstimates& est);

Multipliers update_multipliers(const Multipliers& m, const Subgradients& g,
                               double kappa);

double step_size(int eta, double a_prime);

struct IterationRecord {
    int eta = 0;
    double kappa = 0.0;
    double dual_estimate = 0.0;
    double dual_se = 0.0;
    double grad_norm = 0.0;
    double multiplier_change = 0.0;  // l1 of the update
    bool primal_feasible = false;    // candidate feasible within 3 SE
    double primal_value = 0.0;
    std::vector<double> multipliers;  // values used at this iteration
};

struct DualTrace {
    std::vector<IterationRecord> iterations;
    bool converged = false;
    int weak_duality_violations = 0;
};

bool converged(const DualTrace& trace, int window = 8, double tol = 1e-3);

struct PrimalRecovery {
    std::vector<double> r_bar;        // [link * D + dest_pos]
    std::vector<double> lambda_avg;   // per flow, at the final multipliers
    std::vector<double> lambda_curve; // [flow * (n+1) + b]
};

struct RunSummary {
    bool converged = false;
    bool heuristic_dual = false;  // non-orthogonal inner maximization
    int iterations = 0;
    double dual_value = 0.0, dual_se = 0.0;
    double sum_utility = 0.0;  // sum_f int U(lambda*, t) dt at final multipliers
    std::vector<double> flow_rate;          // per flow, time-averaged lambda*
    std::vector<double> link_power_avg;     // E[int pi P dt]/(T-s)
    std::vector<double> link_power_tx_avg;  // E[int P* dt]/(T-s)
    double mean_link_power_tx = 0.0;
    int weak_duality_violations = 0;
};

struct SolveResult {
    Multipliers final;
    DualTrace trace;
    PrimalRecovery recovery;
    RunSummary summary;
};

SolveResult solve_dual(const ProblemSpec& spec);

// Replays the recorded multiplier snapshots to average the routing
// variables; rates come from the final multipliers.
PrimalRecovery recover_primal(const ProblemSpec& spec, const DualTrace& trace,
                              const Multipliers& final);

// Expectations under the policy induced by fixed multipliers, on fresh
// paths; used for feasibility re-checks of recovered controls.
ExpectationEstimates resimulate_policy(const ProblemSpec& spec,
                                       const Multipliers& m,
                                       std::uint64_t fresh_seed);

}  // namespace xlnum
