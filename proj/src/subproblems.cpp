#include "xlnum/subproblems.hpp"

#include <algorithm>
#include <cmath>

#include "xlnum/rng.hpp"

namespace xlnum {

namespace {

constexpr double k_ln2 = 0.6931471805599453;

// Golden-section maximization on [lo, hi]; f unimodal on the bracket.
template <typename F>
double golden_max(F&& f, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Grid scan + golden refinement for possibly multimodal scalar objectives.
template <typename F>
double bracketed_max(F&& f, double lo, double hi, int segments, double tol) {
    const double h = (hi - lo) / segments;
    int best = 0;
    double best_val = f(lo);
    for (int k = 1; k <= segments; ++k) {
        const double v = f(lo + k * h);
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    const double a = lo + std::max(0, best - 1) * h;
    const double b = lo + std::min(segments, best + 1) * h;
    const double x = golden_max(f, a, b, tol);
    double arg = x;
    double val = f(x);
    for (double cand : {lo, hi}) {
        const double cv = f(cand);
        if (cv > val) {
            val = cv;
            arg = cand;
        }
    }
    return arg;
}

}  // namespace

double Utility::value(double lambda, double t) const {
    switch (kind) {
        case Kind::log_rate:
            return std::log(lambda);
        case Kind::alpha_fair:
            return std::pow(lambda, 1.0 - alpha) / (1.0 - alpha);
        case Kind::sigmoid:
            return 1.0 / (1.0 + std::exp(-steepness * (lambda - midpoint)));
        case Kind::log_rate_over_t:
            return std::log(lambda) / t;
    }
    return 0.0;
}

double Utility::derivative(double lambda, double t) const {
    switch (kind) {
        case Kind::log_rate:
            return 1.0 / lambda;
        case Kind::alpha_fair:
            return std::pow(lambda, -alpha);
        case Kind::sigmoid: {
            const double e = std::exp(-steepness * (lambda - midpoint));
            return steepness * e / ((1.0 + e) * (1.0 + e));
        }
        case Kind::log_rate_over_t:
            return 1.0 / (lambda * t);
    }
    return 0.0;
}

double congestion_optimal_rate(const Utility& u, double mu, double t,
                               double lambda_max) {
    require(mu >= 0.0, "congestion_optimal_rate: mu must be nonnegative");
    if (lambda_max <= 0.0) return 0.0;
    const double lo = std::min(k_rate_floor, lambda_max);
    if (mu <= 0.0) return lambda_max;  // utility is increasing
    auto clip = [&](double x) { return std::clamp(x, lo, lambda_max); };
    switch (u.kind) {
        case Utility::Kind::log_rate:
            return clip(1.0 / mu);
        case Utility::Kind::log_rate_over_t:
            return clip(1.0 / (t * mu));
        case Utility::Kind::alpha_fair:
            return clip(std::pow(mu, -1.0 / u.alpha));
        case Utility::Kind::sigmoid: {
            auto g = [&](double lam) { return u.value(lam, t) - mu * lam; };
            return bracketed_max(g, lo, lambda_max, 64, 1e-12 * lambda_max);
        }
    }
    return lo;
}

double power_optimal_quadratic(double x_db, double ell, double nu, double v,
                               double bandwidth_hz, double noise_w, double p_max,
                               double p_min) {
    require(v > 0.0, "power_optimal_quadratic: V must be positive");
    require(ell >= 0.0 && nu >= 0.0,
            "power_optimal_quadratic: multipliers must be nonnegative");
    const double inv_gain = db_to_gain(-x_db);  // e^{-K x}
    const double n0g = noise_w * inv_gain;
    const double half_nu = nu / (2.0 * v);
    // The discriminant rearranges to a sum of squares, so it never goes
    // negative: (n0g - half_nu)^2 + 2 ell B / (V ln2).
    const double d = n0g - half_nu;
    const double disc = d * d + 2.0 * ell * bandwidth_hz / (v * k_ln2);
    const double p_tilde = 0.5 * (-(n0g + half_nu) + std::sqrt(disc));
    return std::clamp(p_tilde, p_min, p_max);
}

double power_cap_bound(double ell, double nu, double v, double bandwidth_hz) {
    require(v > 0.0, "power_cap_bound: V must be positive");
    const double half_nu = nu / (2.0 * v);
    return 0.5 *
           (std::sqrt(half_nu * half_nu + 2.0 * ell * bandwidth_hz / (v * k_ln2)) -
            half_nu);
}

double power_optimal_generic(const PowerCost& cost, double x_db, double ell,
                             double nu, double bandwidth_hz, double noise_w,
                             double p_max, double p_min) {
    const double gain = db_to_gain(x_db);
    auto fprime = [&](double p) {
        return -cost.derivative(p) +
               ell * bandwidth_hz * gain / (k_ln2 * (noise_w + gain * p)) - nu;
    };
    auto fval = [&](double p) {
        return -cost.value(p) +
               ell * bandwidth_hz * std::log2(1.0 + gain * p / noise_w) - nu * p;
    };
    double lo = p_min, hi = p_max;
    double result;
    if (fprime(lo) <= 0.0)
        result = lo;
    else if (fprime(hi) >= 0.0)
        result = hi;
    else {
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            (fprime(mid) > 0.0 ? lo : hi) = mid;
        }
        result = 0.5 * (lo + hi);
    }
    // concave objective; the boundary comparison is a safeguard for flat
    // derivative stretches
    for (double cand : {p_min, p_max})
        if (fval(cand) > fval(result)) result = cand;
    return result;
}

int schedule_max_weight(std::span<const double> weights,
                        const IndependentSetFamily& family) {
    require(!family.sets.empty(), "schedule_max_weight: empty family");
    int best = 0;
    double best_score = -1.0;
    for (int s = 0; s < static_cast<int>(family.sets.size()); ++s) {
        double score = 0.0;
        for (LinkId e : family.sets[s]) score += std::max(weights[e], 0.0);
        if (score > best_score) {
            best_score = score;
            best = s;
        }
    }
    return best;
}

double nonorthogonal_objective(const Network& net, const PairIndex& pairs,
                               std::span<const double> pair_gain,
                               const PowerCost& cost, std::span<const double> ell,
                               std::span<const double> nu,
                               std::span<const double> power_w) {
    double total = 0.0;
    for (int e = 0; e < net.num_links(); ++e) {
        total += -cost.value(power_w[e]) +
                 ell[e] * capacity_nonorthogonal(net, pairs, pair_gain, power_w, e) -
                 nu[net.links[e].from] * power_w[e];
    }
    return total;
}

std::vector<double> power_nonorthogonal_heuristic(
    const Network& net, const PairIndex& pairs, std::span<const double> pair_gain,
    const PowerCost& cost, std::span<const double> ell, std::span<const double> nu,
    int restarts, std::uint64_t rng_stream) {
    require(restarts >= 1, "power_nonorthogonal_heuristic: restarts must be >= 1");
    const int E = net.num_links();
    const double p_max = net.power_max_w;

    // reverse interference: links whose SINR depends on P_e
    std::vector<std::vector<LinkId>> affected(E);
    for (int e = 0; e < E; ++e)
        for (LinkId f : net.conflicts[e]) affected[f].push_back(e);

    auto objective = [&](std::span<const double> p) {
        return nonorthogonal_objective(net, pairs, pair_gain, cost, ell, nu, p);
    };

    std::vector<std::vector<double>> starts;
    starts.push_back(std::vector<double>(E, 0.0));
    starts.push_back(std::vector<double>(E, 0.5 * p_max));
    starts.push_back(std::vector<double>(E, p_max));
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> s(E);
        for (int e = 0; e < E; ++e)
            s[e] = p_max * rng::uniform01({rng_stream,
                                           static_cast<std::uint32_t>(r),
                                           static_cast<std::uint32_t>(e), 0, 3});
        starts.push_back(std::move(s));
    }

    std::vector<double> best;
    double best_obj = -1e300;
    for (auto& p : starts) {
        double obj = objective(p);
        for (int sweep = 0; sweep < 60; ++sweep) {
            const double before = obj;
            for (int e = 0; e < E; ++e) {
                auto restricted = [&](double v) {
                    const double saved = p[e];
                    p[e] = v;
                    double val = -cost.value(v) - nu[net.links[e].from] * v +
                                 ell[e] * capacity_nonorthogonal(net, pairs,
                                                                 pair_gain, p, e);
                    for (LinkId f : affected[e])
                        val += ell[f] *
                               capacity_nonorthogonal(net, pairs, pair_gain, p, f);
                    p[e] = saved;
                    return val;
                };
                p[e] = bracketed_max(restricted, 0.0, p_max, 32, 1e-10 * (1 + p_max));
            }
            obj = objective(p);
            if (obj - before <= 1e-12 * (1.0 + std::abs(before))) break;
        }
        if (obj > best_obj) {
            best_obj = obj;
            best = p;
        }
    }
    return best;
}

}  // namespace xlnum
