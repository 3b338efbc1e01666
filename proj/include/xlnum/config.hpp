#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xlnum/solver.hpp"

namespace xlnum {

// Parsed run configuration. Field defaults are the baseline experiment:
// 4x4 grid, two-hop interference, n=500 samples on [0,1], 200 Monte Carlo
// paths, B=1 MHz, N0=0.1 W, beta=100, damped-sin gamma around 70 dB,
// x0=70 dB, step rule 0.1/eta, convergence window 8 at 0.001.
struct RunConfig {
    // topology: a rows x cols grid, or an explicit edge list
    int rows = 4, cols = 4;
    std::optional<int> explicit_nodes;
    std::optional<std::vector<std::pair<int, int>>> explicit_links;
    InterferenceModel interference = InterferenceModel::two_hop;
    std::uint64_t traffic_seed = 7;
    std::optional<std::vector<std::pair<int, int>>> explicit_flows;

    // channel (LTF)
    CoefficientFn beta = CoefficientFn::constant(100.0);
    CoefficientFn gamma = CoefficientFn::damped_sin(70.0);
    CoefficientFn delta = CoefficientFn::constant(20.0);
    double x0 = 70.0;

    TimeGrid grid{0.0, 1.0, 500};
    McConfig mc;

    // problem
    AccessMode mode = AccessMode::orthogonal;
    bool power_control = false;
    bool scheduling = false;
    Utility utility;
    double cost_v = 1.0;
    double noise_w = 0.1;
    double bandwidth_hz = 1e6;
    double p_fixed = 2.0;
    double p_min = 1.0;
    double p_max = 3.0;
    double p_node_budget = 3.0;
    double lambda_max = 5.0;
    double rate_max = 5.0;
    int heuristic_restarts = 2;
    std::size_t family_cap = 1000000;

    SolverConfig solver;

    // outputs
    std::filesystem::path out_dir = "out";
    bool emit_paths = false;
    bool emit_svg = false;
};

// Parse + schema-validate. Unknown or ill-typed keys raise xlnum::error
// naming the offending key. The file is JSON.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

// Assemble the solvable problem: grid topology, conflicts, flows, family,
// fixed time shares.
ProblemSpec build_problem(const RunConfig& cfg);

}  // namespace xlnum
