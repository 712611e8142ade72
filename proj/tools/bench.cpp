// Throughput comparison of the serial reference sampler against the OpenMP
// sample map, for the two Monte Carlo kernels.

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "treedyn/coalescing.hpp"
#include "treedyn/parallel.hpp"
#include "treedyn/voter.hpp"

namespace {

template <typename Fn>
double time_seconds(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace

int main() {
    const std::uint64_t seed = 20250824;
    const long samples = 20000;
    // Always exercise the OpenMP path, even on a single-core host.
    const int workers = std::max(2, treedyn::max_workers());

    std::printf("kernel,workers,samples,seconds,samples_per_sec\n");

    for (int w : {1, workers}) {
        const double secs = time_seconds([&] {
            treedyn::coalescing::estimate_rho(6, 2.0, samples, seed, w);
        });
        std::printf("coalescing_rho,%d,%ld,%.3f,%.0f\n", w, samples, secs,
                    samples / secs);
    }
    for (int w : {1, workers}) {
        const double secs = time_seconds([&] {
            treedyn::voter::estimate_autocorr(4, 2.0, samples, seed, w);
        });
        std::printf("voter_autocorr,%d,%ld,%.3f,%.0f\n", w, samples, secs,
                    samples / secs);
    }
    return 0;
}
