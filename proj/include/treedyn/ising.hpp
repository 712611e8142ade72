#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "treedyn/tree.hpp"

namespace treedyn::ising {

/// Layer-dependent Ising couplings J_k for k <= 0 (zero for k >= 1).
/// Construction validates monotonicity J_{-k-1} >= J_{-k} and the growth
/// condition J_{-k-1} - J_{-k} >= k up to a configurable horizon.
class CouplingSchedule {
public:
    CouplingSchedule(std::string id, std::function<double(int)> rule,
                     int check_horizon = 64);

    /// The concrete schedule J_k = k^2 for k <= 0.
    static CouplingSchedule quadratic();

    double J(int k) const;
    /// Coupling gap J_{k-1} - J_k for k <= 0.
    double gap(int k) const;
    const std::string& id() const { return id_; }

private:
    std::string id_;
    std::function<double(int)> rule_;
};

/// Heat-bath probability that the spin at a layer-k vertex updates to +1,
/// given the parent spin (none contributes zero field) and the three child
/// spins. Local field: beta * (J_k * parent + J_{k-1} * sum(children)).
double glauber_plus_prob(int layer, std::optional<int> parent_spin,
                         const std::array<int, 3>& child_spins, double beta,
                         const CouplingSchedule& schedule);

/// Upper bound on the probability that a heat-bath update at a layer-k vertex
/// disagrees with the majority of agreeing children:
/// e^{-2 beta gap} / (1 + e^{-2 beta gap}) <= min(1/2, e^{-2 beta gap}).
double disagreement_bound(int layer, double beta, const CouplingSchedule& schedule);

struct CoupledResult {
    std::vector<double> times;
    std::vector<long> disagreements; // |D_t| sampled at `times`
    struct LayerStats {
        long opportunities = 0; // updates where children agreed across chains
        long creations = 0;     // of those, updates that created a disagreement
    };
    std::map<int, LayerStats> layers;
    long events = 0;
};

/// Coupled majority-voter / Glauber chain on the window, both started from the
/// same exact voter sample at time 0 and driven by shared clocks. Updates at
/// the window's bottom layer are frozen (below-window vertices never disagree).
CoupledResult coupled_simulate(const TreeWindow& window, double beta,
                               const CouplingSchedule& schedule, double horizon,
                               std::uint64_t seed, long max_events = 50'000'000);

struct InfectionResult {
    std::vector<double> times;
    std::vector<long> infected; // counts sampled at `times`
    long originations = 0;
    long closure_violations = 0; // parent-of-infected-not-infected events
    double time_avg_infected = 0.0;
};

/// Event-driven simulation of the dominating infection process on the
/// descendants of x_0, truncated at depth K. Originations at layer k arrive
/// at rate e^{-2 beta gap(k)} per vertex and infect the whole path to x_0;
/// infected vertices with no infected children are cured at rate 1/2.
InfectionResult infection_simulate(int depth, double beta,
                                   const CouplingSchedule& schedule, double horizon,
                                   std::uint64_t seed);

struct RateSum {
    double value = 0.0;
    int terms = 0;
    bool bounded = false; // value < 1/2: infection stays bounded
};

/// Partial sums of sum_{k<=0} (-k+1) 3^{-k} e^{-2 beta gap(k)} until the
/// geometric tail bound drops below `tolerance`. Detects divergence.
RateSum infection_rate_sum(double beta, const CouplingSchedule& schedule,
                           double tolerance);

} // namespace treedyn::ising
