#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace xlnum::rng {

// Philox 2x64-10 counter-based generator (Salmon et al. constants).
// Stateless: every draw is a pure function of (key, counter), so Monte
// Carlo paths can be generated in any order, on any number of threads,
// and still be bit-identical run to run.
inline std::pair<std::uint64_t, std::uint64_t>
philox2x64(std::uint64_t key, std::uint64_t c0, std::uint64_t c1) {
    constexpr std::uint64_t mult = 0xD2B74407B1CE6E93ULL;
    constexpr std::uint64_t weyl = 0x9E3779B97F4A7C15ULL;
    for (int round = 0; round < 10; ++round) {
        const auto prod = static_cast<unsigned __int128>(mult) * c0;
        const auto hi = static_cast<std::uint64_t>(prod >> 64);
        const auto lo = static_cast<std::uint64_t>(prod);
        c0 = hi ^ key ^ c1;
        c1 = lo;
        key += weyl;
    }
    return {c0, c1};
}

// Key schema for channel noise: one normal per
// (stream, path, channel id, step, component). Component 0 is the LTF
// state (or STF inphase), component 1 the STF quadrature. The counter
// layout keeps all tuples collision-free: path and channel id are
// 32-bit, the step index gets 48 bits.
struct NormalKey {
    std::uint64_t stream = 0;
    std::uint32_t path = 0;
    std::uint32_t channel = 0;
    std::uint64_t step = 0;
    std::uint16_t component = 0;
};

inline double to_unit_open(std::uint64_t bits) {
    // (0, 1]: safe as the log argument in Box-Muller.
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

inline double to_unit_closed(std::uint64_t bits) {
    // [0, 1)
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double standard_normal(const NormalKey& k) {
    const std::uint64_t c0 =
        (static_cast<std::uint64_t>(k.path) << 32) | k.channel;
    const std::uint64_t c1 =
        (static_cast<std::uint64_t>(k.component) << 48) | (k.step & 0xFFFFFFFFFFFFULL);
    const auto [r0, r1] = philox2x64(k.stream, c0, c1);
    const double u1 = to_unit_open(r0);
    const double u2 = to_unit_closed(r1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

// Uniform on [0, n) for seeded discrete draws (traffic assignment,
// heuristic restarts). Same key schema, separate component values keep
// these streams disjoint from the channel noise.
inline std::uint64_t uniform_index(const NormalKey& k, std::uint64_t n) {
    const std::uint64_t c0 =
        (static_cast<std::uint64_t>(k.path) << 32) | k.channel;
    const std::uint64_t c1 =
        (static_cast<std::uint64_t>(k.component) << 48) | (k.step & 0xFFFFFFFFFFFFULL);
    const auto [r0, r1] = philox2x64(k.stream, c0, c1);
    (void)r1;
    return r0 % n;
}

inline double uniform01(const NormalKey& k) {
    const std::uint64_t c0 =
        (static_cast<std::uint64_t>(k.path) << 32) | k.channel;
    const std::uint64_t c1 =
        (static_cast<std::uint64_t>(k.component) << 48) | (k.step & 0xFFFFFFFFFFFFULL);
    const auto [r0, r1] = philox2x64(k.stream, c0, c1);
    (void)r0;
    return to_unit_closed(r1);
}

}  // namespace xlnum::rng
