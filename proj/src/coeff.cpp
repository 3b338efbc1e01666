#include "xlnum/coeff.hpp"

#include <algorithm>
#include <cmath>

namespace xlnum {

CoefficientFn CoefficientFn::constant(double value) {
    CoefficientFn f;
    f.kind_ = Kind::constant;
    f.value_ = value;
    return f;
}

CoefficientFn CoefficientFn::piecewise(std::vector<double> breakpoints,
                                       std::vector<double> values) {
    require(values.size() == breakpoints.size() + 1,
            "piecewise coefficient: need one more value than breakpoints");
    require(std::is_sorted(breakpoints.begin(), breakpoints.end(),
                           std::less_equal<double>{}),
            "piecewise coefficient: breakpoints must be strictly increasing");
    CoefficientFn f;
    f.kind_ = Kind::piecewise;
    f.breakpoints_ = std::move(breakpoints);
    f.values_ = std::move(values);
    return f;
}

CoefficientFn CoefficientFn::damped_sin(double base, double amplitude,
                                        double decay, double frequency) {
    CoefficientFn f;
    f.kind_ = Kind::damped_sin;
    f.base_ = base;
    f.amplitude_ = amplitude;
    f.decay_ = decay;
    f.frequency_ = frequency;
    return f;
}

CoefficientFn CoefficientFn::sinusoid(double amplitude, double offset,
                                      double frequency) {
    CoefficientFn f;
    f.kind_ = Kind::sinusoid;
    f.amplitude_ = amplitude;
    f.offset_ = offset;
    f.frequency_ = frequency;
    return f;
}

double CoefficientFn::operator()(double t, double s, double T) const {
    switch (kind_) {
        case Kind::constant:
            return value_;
        case Kind::piecewise: {
            const auto it =
                std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
            return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
        }
        case Kind::damped_sin: {
            const double u = (t - s) / (T - s);
            return base_ *
                   (1.0 + amplitude_ * std::exp(-decay_ * u) * std::sin(frequency_ * u));
        }
        case Kind::sinusoid: {
            const double u = (t - s) / (T - s);
            return offset_ + amplitude_ * std::sin(frequency_ * u);
        }
    }
    return 0.0;
}

bool CoefficientFn::is_constant_on(double t0, double t1) const {
    switch (kind_) {
        case Kind::constant:
            return true;
        case Kind::piecewise:
            // Constant unless a breakpoint falls strictly inside (t0, t1).
            // Breakpoints aligned with step boundaries leave the step's
            // interior on a single segment.
            return std::none_of(breakpoints_.begin(), breakpoints_.end(),
                                [&](double b) { return b > t0 && b < t1; });
        case Kind::damped_sin:
        case Kind::sinusoid:
            return amplitude_ == 0.0;
    }
    return false;
}

}  // namespace xlnum
