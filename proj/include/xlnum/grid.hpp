#pragma once

#include "xlnum/common.hpp"

namespace xlnum {

// Uniform sampling grid tau_b = s + b*dt, b = 0..n, dt = (T-s)/n.
struct TimeGrid {
    double s = 0.0;
    double T = 1.0;
    int n = 500;

    TimeGrid() = default;
    TimeGrid(double s_, double T_, int n_) : s(s_), T(T_), n(n_) {
        require(T > s, "TimeGrid: T must exceed s");
        require(s >= 0.0, "TimeGrid: s must be nonnegative");
        require(n >= 1, "TimeGrid: n must be at least 1");
    }

    double dt() const { return (T - s) / n; }
    double tau(int b) const { return s + b * dt(); }
    double duration() const { return T - s; }
};

}  // namespace xlnum
