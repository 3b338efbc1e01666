#include "xlnum/channel.hpp"

#include <cmath>
#include <functional>

namespace xlnum {
namespace {

// (1 - e^{-z}) / z with the z -> 0 limit.
double one_minus_exp_over(double z) {
    if (std::abs(z) < 1e-12) return 1.0 - 0.5 * z;
    return -std::expm1(-z) / z;
}

// Step integrals for dX = (-p(t) X + q(t)) dt + d(t) dW over [a, b]:
//   rho    = exp(-int p)
//   zeta   = int q(x) exp(-int_x^b p) dx
//   sigma2 = int d(x)^2 exp(-2 int_x^b p) dx
// Composite Simpson with `panels` panels; the inner exponent comes from a
// cumulative Simpson pass over the same nodes (half-panels use the
// quadratic 5/8/-1 rule), so the whole step costs O(panels).
struct StepIntegrals {
    double rho, zeta, sigma2;
};

template <typename P, typename Q, typename D>
StepIntegrals integrate_step(P&& p, Q&& q, D&& d, double a, double b, int panels) {
    const int nodes = 2 * panels + 1;
    const double h = (b - a) / (2 * panels);

    std::vector<double> pv(nodes), cum(nodes);
    for (int k = 0; k < nodes; ++k) pv[k] = p(a + k * h);
    cum[0] = 0.0;
    for (int m = 0; m + 2 < nodes; m += 2) {
        cum[m + 1] = cum[m] + h * (5.0 * pv[m] + 8.0 * pv[m + 1] - pv[m + 2]) / 12.0;
        cum[m + 2] = cum[m] + h * (pv[m] + 4.0 * pv[m + 1] + pv[m + 2]) / 3.0;
    }
    const double p_total = cum[nodes - 1];

    double zeta = 0.0, sigma2 = 0.0;
    auto zk = [&](int k) { return q(a + k * h) * std::exp(-(p_total - cum[k])); };
    auto sk = [&](int k) {
        const double dv = d(a + k * h);
        const double w = std::exp(-(p_total - cum[k]));
        return dv * dv * w * w;
    };
    for (int m = 0; m + 2 < nodes; m += 2) {
        zeta += h * (zk(m) + 4.0 * zk(m + 1) + zk(m + 2)) / 3.0;
        sigma2 += h * (sk(m) + 4.0 * sk(m + 1) + sk(m + 2)) / 3.0;
    }
    return {std::exp(-p_total), zeta, sigma2};
}

using ScalarFn = std::function<double(double)>;

// Shared driver: closed forms on flat steps, Simpson otherwise.
StepCoefficients step_coefficients_impl(const ScalarFn& p, const ScalarFn& q,
                                        const ScalarFn& d,
                                        const std::function<bool(double, double)>& flat_on,
                                        const TimeGrid& grid, int quad_substeps) {
    require(quad_substeps >= 1, "step coefficients: quad_substeps must be >= 1");
    StepCoefficients out;
    out.rho.resize(grid.n);
    out.zeta.resize(grid.n);
    out.sigma.resize(grid.n);
    const double h = grid.dt();
    for (int b = 1; b <= grid.n; ++b) {
        const double t0 = grid.tau(b - 1);
        const double t1 = grid.tau(b);
        double rho, zeta, sigma2;
        if (flat_on(t0, t1)) {
            const double tm = 0.5 * (t0 + t1);
            const double pv = p(tm);
            const double qv = q(tm);
            const double dv = d(tm);
            rho = std::exp(-pv * h);
            zeta = qv * h * one_minus_exp_over(pv * h);
            sigma2 = dv * dv * h * one_minus_exp_over(2.0 * pv * h);
        } else {
            const auto si = integrate_step(p, q, d, t0, t1, quad_substeps);
            rho = si.rho;
            zeta = si.zeta;
            sigma2 = si.sigma2;
        }
        out.rho[b - 1] = rho;
        out.zeta[b - 1] = zeta;
        out.sigma[b - 1] = sigma2 > 0.0 ? std::sqrt(sigma2) : 0.0;
    }
    return out;
}

}  // namespace

StepCoefficients linear_sde_step_coefficients(const CoefficientFn& p,
                                              const CoefficientFn& q,
                                              const CoefficientFn& d,
                                              const TimeGrid& grid,
                                              int quad_substeps) {
    auto pf = [&](double t) { return p(t, grid.s, grid.T); };
    auto qf = [&](double t) { return q(t, grid.s, grid.T); };
    auto df = [&](double t) { return d(t, grid.s, grid.T); };
    auto flat = [&](double t0, double t1) {
        return p.is_constant_on(t0, t1) && q.is_constant_on(t0, t1) &&
               d.is_constant_on(t0, t1);
    };
    return step_coefficients_impl(pf, qf, df, flat, grid, quad_substeps);
}

StepCoefficients ltf_step_coefficients(const LtfChannelModel& model,
                                       const TimeGrid& grid, int quad_substeps) {
    auto pf = [&](double t) {
        const double bv = model.beta(t, grid.s, grid.T);
        require(bv > 0.0, "ltf model: beta must be strictly positive");
        return bv;
    };
    auto qf = [&](double t) {
        return model.beta(t, grid.s, grid.T) * model.gamma(t, grid.s, grid.T);
    };
    auto df = [&](double t) { return model.delta(t, grid.s, grid.T); };
    auto flat = [&](double t0, double t1) {
        return model.beta.is_constant_on(t0, t1) &&
               model.gamma.is_constant_on(t0, t1) &&
               model.delta.is_constant_on(t0, t1);
    };
    return step_coefficients_impl(pf, qf, df, flat, grid, quad_substeps);
}

void validate_ltf(const LtfChannelModel& model, const TimeGrid& grid) {
    // The strong-solution condition is finiteness of the integral, so the
    // numerical check boils down to finite coefficient evaluations plus the
    // beta > 0 requirement.
    const int nodes = 2 * 256 + 1;
    const double h = grid.duration() / (nodes - 1);
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double t = grid.s + k * h;
        const double bv = model.beta(t, grid.s, grid.T);
        const double gv = model.gamma(t, grid.s, grid.T);
        const double dv = model.delta(t, grid.s, grid.T);
        require(bv > 0.0, "ltf model: beta must be strictly positive");
        const double w = (k == 0 || k == nodes - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * (bv * std::abs(gv) + dv * dv);
    }
    acc *= h / 3.0;
    require(std::isfinite(acc),
            "ltf model: integrability check failed (non-finite coefficients)");
}

std::vector<double> sample_ltf_path(const LtfChannelModel& model,
                                    const StepCoefficients& coeffs,
                                    std::uint64_t stream, std::uint32_t path,
                                    std::uint32_t channel) {
    const int n = static_cast<int>(coeffs.rho.size());
    std::vector<double> x(n + 1);
    x[0] = model.x0;
    for (int b = 1; b <= n; ++b) {
        double noise = 0.0;
        if (coeffs.sigma[b - 1] > 0.0) {
            noise = coeffs.sigma[b - 1] *
                    rng::standard_normal({stream, path, channel,
                                          static_cast<std::uint64_t>(b), 0});
        }
        x[b] = coeffs.rho[b - 1] * x[b - 1] + coeffs.zeta[b - 1] + noise;
    }
    return x;
}

std::pair<std::vector<double>, std::vector<double>>
ltf_mean_variance(const LtfChannelModel& model, const TimeGrid& grid,
                  int quad_substeps) {
    const auto coeffs = ltf_step_coefficients(model, grid, quad_substeps);
    std::vector<double> mean(grid.n + 1), var(grid.n + 1);
    mean[0] = model.x0;
    var[0] = 0.0;
    for (int b = 1; b <= grid.n; ++b) {
        mean[b] = coeffs.rho[b - 1] * mean[b - 1] + coeffs.zeta[b - 1];
        const double r = coeffs.rho[b - 1];
        var[b] = r * r * var[b - 1] + coeffs.sigma[b - 1] * coeffs.sigma[b - 1];
    }
    return {std::move(mean), std::move(var)};
}

StfSamplePath sample_stf_path(const StfChannelModel& model, const TimeGrid& grid,
                              std::uint64_t stream, std::uint32_t path,
                              std::uint32_t channel, int quad_substeps) {
    // dX = A X dt + B dW is the p = -A case of the general step form.
    auto component_coeffs = [&](const CoefficientFn& a, const CoefficientFn& bdiff) {
        auto pf = [&a, &grid](double t) { return -a(t, grid.s, grid.T); };
        auto qf = [](double) { return 0.0; };
        auto df = [&bdiff, &grid](double t) { return bdiff(t, grid.s, grid.T); };
        auto flat = [&](double t0, double t1) {
            return a.is_constant_on(t0, t1) && bdiff.is_constant_on(t0, t1);
        };
        return step_coefficients_impl(pf, qf, df, flat, grid, quad_substeps);
    };
    const auto ci = component_coeffs(model.a_i, model.b_i);
    const auto cq = component_coeffs(model.a_q, model.b_q);

    StfSamplePath out;
    out.inphase.resize(grid.n + 1);
    out.quadrature.resize(grid.n + 1);
    double xi = model.xi0, xq = model.xq0;
    out.inphase[0] = model.c_i * xi;
    out.quadrature[0] = model.c_q * xq;
    for (int b = 1; b <= grid.n; ++b) {
        const auto step = static_cast<std::uint64_t>(b);
        double ni = 0.0, nq = 0.0;
        if (ci.sigma[b - 1] > 0.0)
            ni = ci.sigma[b - 1] * rng::standard_normal({stream, path, channel, step, 0});
        if (cq.sigma[b - 1] > 0.0)
            nq = cq.sigma[b - 1] * rng::standard_normal({stream, path, channel, step, 1});
        xi = ci.rho[b - 1] * xi + ni;
        xq = cq.rho[b - 1] * xq + nq;
        out.inphase[b] = model.c_i * xi;
        out.quadrature[b] = model.c_q * xq;
    }
    return out;
}

}  // namespace xlnum
