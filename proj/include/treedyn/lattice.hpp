#pragma once

#include <cstdint>
#include <vector>

namespace treedyn::coalescing {

struct LatticeDemoResult {
    std::vector<double> times;   // 0, 1, ..., horizon
    std::vector<double> density; // fraction of occupied sites at each time
};

/// Coalescing dynamics on the periodic torus (Z/LZ)^dim started from the
/// all-ones state: at every ring at x, all particles at neighbours of x move
/// to x and merge. The density can only decrease.
LatticeDemoResult lattice_density_decay(int side, int dim, double horizon,
                                        std::uint64_t seed,
                                        std::uint64_t max_sites = 1u << 22);

} // namespace treedyn::coalescing
