#pragma once

#include <cstddef>
#include <exception>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace treedyn {

/// Serial reference for sample_map; kept for testing and benchmarking.
template <typename T, typename Fn>
std::vector<T> sample_map_serial(std::size_t n, Fn&& fn) {
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
}

/// Deterministic parallel map over sample indices. fn(i) must be a pure
/// function of i (derive per-sample seeds from i), so the result does not
/// depend on the worker count or scheduling order.
template <typename T, typename Fn>
std::vector<T> sample_map(std::size_t n, int workers, Fn&& fn) {
#ifdef _OPENMP
    if (workers > 1) {
        std::vector<T> out(n);
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16) num_threads(workers)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
        return out;
    }
#else
    (void)workers;
#endif
    return sample_map_serial<T>(n, std::forward<Fn>(fn));
}

inline int max_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace treedyn
