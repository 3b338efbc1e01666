#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xlnum/common.hpp"
#include "xlnum/net.hpp"

namespace xlnum {

// Source utility U(lambda, t). Increasing in lambda; the sigmoid kind is
// the non-concave representative and is handled by bracketed scalar
// maximization instead of stationarity.
struct Utility {
    enum class Kind { log_rate, alpha_fair, sigmoid, log_rate_over_t };
    Kind kind = Kind::log_rate;
    double alpha = 2.0;      // alpha-fair exponent (alpha != 1)
    double steepness = 5.0;  // sigmoid
    double midpoint = 1.0;   // sigmoid

    bool time_varying() const { return kind == Kind::log_rate_over_t; }
    bool concave() const { return kind != Kind::sigmoid; }
    double value(double lambda, double t) const;
    double derivative(double lambda, double t) const;
};

// Link transmission cost J(P).
struct PowerCost {
    enum class Kind { zero, quadratic };
    Kind kind = Kind::zero;
    double v = 1.0;  // J = v * P^2

    double value(double p) const {
        return kind == Kind::quadratic ? v * p * p : 0.0;
    }
    double derivative(double p) const {
        return kind == Kind::quadratic ? 2.0 * v * p : 0.0;
    }
};

// Lower guard for rate variables: log utilities are undefined at 0 and the
// optimum is interior whenever the multiplier exceeds 1/lambda_max.
inline constexpr double k_rate_floor = 1e-9;

// argmax of U(lambda, t) - mu * lambda over [k_rate_floor, lambda_max].
double congestion_optimal_rate(const Utility& u, double mu, double t,
                               double lambda_max);

// Bang-bang routing: R_max when mu_i - mu_j - ell > 0, else 0 (ties -> 0).
inline double routing_optimal(double mu_i, double mu_j, double ell, double r_max) {
    return (mu_i - mu_j - ell) > 0.0 ? r_max : 0.0;
}

// Closed-form maximizer of -V P^2 + ell * C(P) - nu * P for the orthogonal
// capacity, clipped to [p_min, p_max].
double power_optimal_quadratic(double x_db, double ell, double nu, double v,
                               double bandwidth_hz, double noise_w, double p_max,
                               double p_min = 0.0);

// Upper bound on the quadratic-cost optimal power over all channel states.
double power_cap_bound(double ell, double nu, double v, double bandwidth_hz);

// Same maximization for any convex differentiable cost, by safeguarded
// bisection on the derivative.
double power_optimal_generic(const PowerCost& cost, double x_db, double ell,
                             double nu, double bandwidth_hz, double noise_w,
                             double p_max, double p_min = 0.0);

// argmax over the family of sum of clamped link weights; negative-weight
// members count as inactive. Ties break toward the lowest canonical index.
int schedule_max_weight(std::span<const double> weights,
                        const IndependentSetFamily& family);

// Block-coordinate ascent on the non-orthogonal physical-layer objective
//   sum_e (-J(P_e) + ell_e * C_e(P) - nu_tx(e) * P_e)
// over [0, p_max]^E, multi-started from the flat patterns plus `restarts`
// random points. Returns the best power vector found; a lower bound on the
// true inner maximum, not a certified optimum.
std::vector<double> power_nonorthogonal_heuristic(
    const Network& net, const PairIndex& pairs, std::span<const double> pair_gain,
    const PowerCost& cost, std::span<const double> ell, std::span<const double> nu,
    int restarts, std::uint64_t rng_stream = 0x9e1u);

double nonorthogonal_objective(const Network& net, const PairIndex& pairs,
                               std::span<const double> pair_gain,
                               const PowerCost& cost, std::span<const double> ell,
                               std::span<const double> nu,
                               std::span<const double> power_w);

}  // namespace xlnum
