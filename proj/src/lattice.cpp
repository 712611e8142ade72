#include "treedyn/lattice.hpp"

#include <random>

#include "treedyn/errors.hpp"

namespace treedyn::coalescing {

LatticeDemoResult lattice_density_decay(int side, int dim, double horizon,
                                        std::uint64_t seed, std::uint64_t max_sites) {
    if (side < 2 || dim < 1) throw config_error("lattice demo: side >= 2, dim >= 1");
    std::uint64_t n = 1;
    for (int k = 0; k < dim; ++k) {
        n *= static_cast<std::uint64_t>(side);
        if (n > max_sites) throw cost_guard_error("lattice demo: site count above cap");
    }
    const std::size_t sites = static_cast<std::size_t>(n);
    std::vector<std::uint8_t> occupied(sites, 1);
    std::size_t particles = sites;

    // Precomputed strides for torus neighbours along each axis.
    std::vector<std::size_t> stride(static_cast<std::size_t>(dim), 1);
    for (int k = 1; k < dim; ++k)
        stride[static_cast<std::size_t>(k)] =
            stride[static_cast<std::size_t>(k - 1)] * static_cast<std::size_t>(side);

    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> next_gap(static_cast<double>(sites));
    std::uniform_int_distribution<std::size_t> pick(0, sites - 1);

    LatticeDemoResult out;
    double t = 0.0;
    double next_sample = 0.0;
    auto record = [&](double at) {
        out.times.push_back(at);
        out.density.push_back(static_cast<double>(particles) /
                              static_cast<double>(sites));
    };
    while (true) {
        const double gap = next_gap(rng);
        while (next_sample <= horizon && next_sample < t + gap) {
            record(next_sample);
            next_sample += 1.0;
        }
        t += gap;
        if (t > horizon) break;
        const std::size_t x = pick(rng);
        bool pulled = false;
        for (int k = 0; k < dim; ++k) {
            const std::size_t st = stride[static_cast<std::size_t>(k)];
            const std::size_t block = st * static_cast<std::size_t>(side);
            const std::size_t base = x - x % block;
            const std::size_t up = base + (x - base + st) % block;
            const std::size_t down = base + (x - base + block - st) % block;
            for (std::size_t nb : {up, down}) {
                if (occupied[nb]) {
                    occupied[nb] = 0;
                    --particles;
                    pulled = true;
                }
            }
        }
        if (pulled && !occupied[x]) {
            occupied[x] = 1;
            ++particles;
        }
    }
    return out;
}

} // namespace treedyn::coalescing
