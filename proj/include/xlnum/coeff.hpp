#pragma once

#include <vector>

#include "xlnum/common.hpp"

namespace xlnum {

// Deterministic time-varying SDE coefficient. The modulated kinds
// (damped-sin and sinusoid) are functions of the normalized time
// u = (t - s)/(T - s), so one parameter set describes the same shape on
// any operation interval.
class CoefficientFn {
  public:
    enum class Kind { constant, piecewise, damped_sin, sinusoid };

    static CoefficientFn constant(double value);
    // values has one more entry than breakpoints; values[k] applies on
    // [breakpoints[k-1], breakpoints[k]).
    static CoefficientFn piecewise(std::vector<double> breakpoints,
                                   std::vector<double> values);
    // base * (1 + amplitude * exp(-decay*u) * sin(frequency*u))
    static CoefficientFn damped_sin(double base, double amplitude = 0.15,
                                    double decay = 2.0,
                                    double frequency = 31.41592653589793);
    // offset + amplitude * sin(frequency*u)
    static CoefficientFn sinusoid(double amplitude, double offset,
                                  double frequency = 31.41592653589793);

    double operator()(double t, double s, double T) const;
    bool is_constant_on(double t0, double t1) const;

    Kind kind() const { return kind_; }
    double constant_value() const { return value_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }
    double base() const { return base_; }
    double amplitude() const { return amplitude_; }
    double decay() const { return decay_; }
    double frequency() const { return frequency_; }
    double offset() const { return offset_; }

  private:
    Kind kind_ = Kind::constant;
    double value_ = 0.0;
    std::vector<double> breakpoints_;
    std::vector<double> values_;
    double base_ = 0.0;
    double amplitude_ = 0.0;
    double decay_ = 0.0;
    double frequency_ = 0.0;
    double offset_ = 0.0;
};

}  // namespace xlnum
