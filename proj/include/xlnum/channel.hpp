#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "xlnum/coeff.hpp"
#include "xlnum/common.hpp"
#include "xlnum/grid.hpp"
#include "xlnum/rng.hpp"

namespace xlnum {

// Mean-reverting power-loss process in dB:
//   dX = beta(t) * (gamma(t) - X) dt + delta(t) dW,  X(s) = x0.
struct LtfChannelModel {
    CoefficientFn beta;   // 1/s, strictly positive
    CoefficientFn gamma;  // dB
    CoefficientFn delta;  // dB/sqrt(s)
    double x0 = 0.0;      // dB
};

// Inphase/quadrature components, each a scalar linear SDE
//   dXc = Ac(t) Xc dt + Bc(t) dWc,  output c_gain * Xc.
struct StfChannelModel {
    CoefficientFn a_i, a_q;  // 1/s
    CoefficientFn b_i, b_q;  // diffusion
    double c_i = 1.0, c_q = 1.0;
    double xi0 = 0.0, xq0 = 0.0;
};

// Per-step recursion coefficients of the exact discretization
//   X(tau_b) = rho[b-1] * X(tau_{b-1}) + zeta[b-1] + sigma[b-1] * xi.
struct StepCoefficients {
    std::vector<double> rho;    // decay over the step
    std::vector<double> zeta;   // deterministic drift contribution
    std::vector<double> sigma;  // noise scale (>= 0)
};

struct StfSamplePath {
    std::vector<double> inphase;
    std::vector<double> quadrature;
};

// Step integrals for dX = (-p(t) X + q(t)) dt + d(t) dW. Closed forms on
// steps where all three coefficients are constant, composite Simpson with
// `quad_substeps` panels otherwise. No sign restriction on p.
StepCoefficients linear_sde_step_coefficients(const CoefficientFn& p,
                                              const CoefficientFn& q,
                                              const CoefficientFn& d,
                                              const TimeGrid& grid,
                                              int quad_substeps);

// LTF specialisation (p = beta, q = beta*gamma, d = delta). Throws if beta
// is not strictly positive at any evaluation point.
StepCoefficients ltf_step_coefficients(const LtfChannelModel& model,
                                       const TimeGrid& grid,
                                       int quad_substeps = 64);

// Finiteness check of the strong-solution integrability condition
// int_s^T (beta*|gamma| + delta^2) dt. Throws on failure.
void validate_ltf(const LtfChannelModel& model, const TimeGrid& grid);

// One sampled trajectory on the grid; values[0] == x0. `channel` is the
// RNG identity of the link (or tx-rx pair) being sampled.
std::vector<double> sample_ltf_path(const LtfChannelModel& model,
                                    const StepCoefficients& coeffs,
                                    std::uint64_t stream, std::uint32_t path,
                                    std::uint32_t channel);

// Analytic mean and variance of X(tau_b) at every grid node.
std::pair<std::vector<double>, std::vector<double>>
ltf_mean_variance(const LtfChannelModel& model, const TimeGrid& grid,
                  int quad_substeps = 64);

inline double attenuation_ltf(double x_db) { return db_to_gain(x_db); }

StfSamplePath sample_stf_path(const StfChannelModel& model, const TimeGrid& grid,
                              std::uint64_t stream, std::uint32_t path,
                              std::uint32_t channel, int quad_substeps = 64);

inline double attenuation_stf(double i, double q) { return i * i + q * q; }

}  // namespace xlnum
