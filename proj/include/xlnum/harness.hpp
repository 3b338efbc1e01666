#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "xlnum/config.hpp"
#include "xlnum/solver.hpp"

namespace xlnum {

// XLNUM_OUT_DIR overrides outputs.directory when set.
std::filesystem::path resolve_out_dir(const RunConfig& cfg);

struct RunArtifacts {
    RunSummary summary;
    std::filesystem::path out_dir;
    std::vector<std::string> files;
};

// Full experiment: solve, then write trace/rates/routing/power CSVs, the
// JSON report, and the optional path dump and SVG charts.
RunArtifacts run_experiment(const RunConfig& cfg);

struct DeltaSweepResult {
    std::vector<double> deltas;
    std::vector<RunSummary> runs;
    bool utilities_nondecreasing = false;
    bool rates_nondecreasing = false;  // every flow, pairwise in delta
    bool power_decreasing = false;     // strict, power-control runs
    double min_utility_margin = 0.0;   // min over consecutive pairs
};

DeltaSweepResult sweep_delta(const RunConfig& base, std::vector<double> deltas,
                             bool common_random_numbers);

struct ConvexOrderReport {
    std::vector<double> deltas;
    std::vector<double> mean_x_end, se_x_end;
    std::vector<double> mean_cap_int, se_cap_int;
    // paired (common random numbers) differences against deltas[0]
    std::vector<double> x_diff, x_diff_se;
    std::vector<double> cap_diff, cap_diff_se;
    bool mean_invariant = false;
    bool capacity_increasing = false;
    double largest_gap_sigma = 0.0;  // (cap[last]-cap[0]) / paired se
};

// Channel-level Theorem check: no solver involved.
ConvexOrderReport verify_convex_order(const RunConfig& base,
                                      std::vector<double> deltas, int paths);

struct OracleReport {
    bool refused = false;
    std::string message;
    double dual_value = 0.0;
    double primal_value = 0.0;
    double gap_rel = 0.0;
};

// Brute-force primal for deterministic instances with at most two links and
// one flow; compares against the dual solve.
OracleReport oracle_small_instance(const RunConfig& cfg);

struct TSweepResult {
    std::vector<double> horizons;  // T values
    std::vector<int> grid_n;
    std::vector<int> iterations;
    std::vector<std::vector<double>> rates;  // per T, per flow
    bool iterations_nondecreasing = false;
    bool rates_nonincreasing = false;
};

TSweepResult sweep_T(const RunConfig& base, std::vector<double> horizons,
                     bool scale_n);

struct NSweepResult {
    std::vector<int> ns;
    std::vector<int> iterations;
    double max_rel_spread = 0.0;  // (max - min) / min
};

NSweepResult sweep_n(const RunConfig& base, std::vector<int> ns);

struct TvUtilityResult {
    RunArtifacts artifacts;
    std::vector<double> taus;
    std::vector<std::vector<double>> lambda_curves;  // per flow
    bool decreasing = false;
    std::vector<double> clip_release_t;  // per flow, first t with lambda < max
};

TvUtilityResult run_time_varying_utilities(const RunConfig& cfg);

struct TvBetaResult {
    std::vector<std::vector<double>> schedules;  // beta per third of [s,T]
    std::vector<double> sum_utility;
    std::vector<std::vector<double>> rates;
    bool high_early_wins = false;  // schedules[0] vs schedules[1]
};

// Runs the base config under piecewise-constant beta schedules (one value
// per third of [s,T]); the first schedule is compared against the second.
TvBetaResult run_time_varying_beta(const RunConfig& base,
                                   std::vector<std::vector<double>> schedules);

}  // namespace xlnum
