#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace xlnum {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw error(msg);
}

// Power loss X is in dB; linear gain a = e^{K X} = 10^{-X/10}.
inline constexpr double k_db_to_nat = -0.23025850929940457;  // -ln(10)/10

inline double db_to_gain(double x_db) { return std::exp(k_db_to_nat * x_db); }

}  // namespace xlnum
