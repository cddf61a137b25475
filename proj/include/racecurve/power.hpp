#pragma once
#include <cstddef>
#include <cstdint>
#include <vector>

#include <racecurve/design.hpp>
#include <racecurve/estimation.hpp>
#include <racecurve/rng.hpp>
#include <racecurve/types.hpp>

namespace racecurve {

struct PowerScenario {
    CurveParams params;
    std::size_t k = 6;
    std::vector<std::size_t> n_values;
    std::size_t replicates = 200;
    double ci_level = 0.95;
    std::uint64_t seed = 0;
    FitOptions fit_options;

    void validate() const;
};

/// delta1: share of successful replicates whose gamma interval contains 1.
/// delta2: share whose (beta - alpha) interval contains 0.
struct PowerEstimate {
    std::size_t n = 0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    std::size_t successes = 0;
    std::size_t failures = 0;
};

struct ReplicateOutcome {
    bool ok = false;
    bool gamma_contains_one = false;
    bool effect_contains_zero = false;
};

/// Independent Bernoulli outcomes over the grid's replicated levels, in
/// grid order.
Dataset simulate_dataset(const CurveParams& params, const DesignGrid& grid, RandomStream& rng);

/// Simulate, fit and test one replicate. Its random stream is keyed by
/// (seed, n, index) only.
ReplicateOutcome run_replicate(const PowerScenario& scenario, const DesignGrid& grid,
                               std::size_t index);

/// Fit used by the simulation studies: the standard fit, falling back to the
/// better of the two forced branches when the extreme levels tie.
FitResult fit_for_simulation(const LevelTable& levels, const FitOptions& options);

std::vector<PowerEstimate> estimate_power(const PowerScenario& scenario);
std::vector<PowerEstimate> estimate_power_serial(const PowerScenario& scenario);

}  // namespace racecurve
