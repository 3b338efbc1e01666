#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace xlnum::mc {

// Per-output mean and standard error over paths.
struct Moments {
    std::vector<double> mean;
    std::vector<double> se;
    std::size_t paths = 0;
};

using PathFn = std::function<void(std::size_t path, std::span<double> out)>;

// Fills buf[path * n_out + k]. The OpenMP variant writes disjoint slices,
// so the buffer contents are identical to the serial reference for any
// thread count; all statistics are then reduced in path order below.
void fill_paths_serial(std::size_t n_paths, std::size_t n_out,
                       std::vector<double>& buf, const PathFn& fn);
void fill_paths_parallel(std::size_t n_paths, std::size_t n_out,
                         std::vector<double>& buf, const PathFn& fn);

// Ordered two-pass mean/SE reduction; bit-reproducible regardless of how
// the buffer was filled.
Moments reduce_ordered(const std::vector<double>& buf, std::size_t n_paths,
                       std::size_t n_out);

inline Moments run(std::size_t n_paths, std::size_t n_out, const PathFn& fn,
                   bool parallel = true) {
    std::vector<double> buf(n_paths * n_out);
    if (parallel)
        fill_paths_parallel(n_paths, n_out, buf, fn);
    else
        fill_paths_serial(n_paths, n_out, buf, fn);
    return reduce_ordered(buf, n_paths, n_out);
}

inline void fill_paths_serial(std::size_t n_paths, std::size_t n_out,
                              std::vector<double>& buf, const PathFn& fn) {
    for (std::size_t p = 0; p < n_paths; ++p)
        fn(p, std::span<double>(buf.data() + p * n_out, n_out));
}

inline void fill_paths_parallel(std::size_t n_paths, std::size_t n_out,
                                std::vector<double>& buf, const PathFn& fn) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t p = 0; p < n_paths; ++p)
        fn(p, std::span<double>(buf.data() + p * n_out, n_out));
#else
    fill_paths_serial(n_paths, n_out, buf, fn);
#endif
}

inline Moments reduce_ordered(const std::vector<double>& buf, std::size_t n_paths,
                              std::size_t n_out) {
    Moments m;
    m.paths = n_paths;
    m.mean.assign(n_out, 0.0);
    m.se.assign(n_out, 0.0);
    for (std::size_t p = 0; p < n_paths; ++p)
        for (std::size_t k = 0; k < n_out; ++k) m.mean[k] += buf[p * n_out + k];
    for (std::size_t k = 0; k < n_out; ++k) m.mean[k] /= static_cast<double>(n_paths);
    if (n_paths < 2) return m;
    for (std::size_t p = 0; p < n_paths; ++p)
        for (std::size_t k = 0; k < n_out; ++k) {
            const double d = buf[p * n_out + k] - m.mean[k];
            m.se[k] += d * d;
        }
    const double denom = static_cast<double>(n_paths) * (n_paths - 1);
    for (std::size_t k = 0; k < n_out; ++k) m.se[k] = std::sqrt(m.se[k] / denom);
    return m;
}

}  // namespace xlnum::mc
