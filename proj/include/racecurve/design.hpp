#pragma once
#include <cstddef>
#include <span>
#include <vector>

#include <racecurve/types.hpp>

namespace racecurve {

/// k equally spaced race levels 0.01 + 0.98 (j - 1)/(k - 1) with N units
/// spread as evenly as possible; the remainder goes to the lowest levels.
struct DesignGrid {
    std::size_t k = 0;
    std::size_t n_total = 0;
    std::vector<double> levels;
    std::vector<std::size_t> allocation;
};

struct DesignCriterionResult {
    std::size_t k = 0;
    double criterion = 0.0;
    CurveParams params;
    // criterion divided by the best criterion on the same scenario's curve
    double normalized = 0.0;
};

DesignGrid level_grid(std::size_t k, std::size_t n_total);

/// det of the summed expected information over the grid's replicated levels.
/// Returns 0 for rank-deficient designs.
double d_criterion(const CurveParams& params, const DesignGrid& grid);

std::vector<DesignCriterionResult> sweep_k(const CurveParams& params, std::span<const std::size_t> ks,
                                           std::size_t n_total);

// One sweep per scenario, in scenario order. The parallel version spreads
// scenarios over OpenMP threads; output is identical to the serial one.
std::vector<std::vector<DesignCriterionResult>> sweep_scenarios(
    std::span<const CurveParams> scenarios, std::span<const std::size_t> ks, std::size_t n_total);
std::vector<std::vector<DesignCriterionResult>> sweep_scenarios_serial(
    std::span<const CurveParams> scenarios, std::span<const std::size_t> ks, std::size_t n_total);

/// k maximising the worst normalized criterion over all scenarios.
std::size_t recommend_k(std::span<const CurveParams> scenarios, std::span<const std::size_t> ks,
                        std::size_t n_total);
std::size_t recommend_k(const std::vector<std::vector<DesignCriterionResult>>& sweeps);

/// Level counts 3, 4, 5, 6, 8, 10, 12, 15, 20 (all divide 1200).
std::vector<std::size_t> standard_k_values();

/// (alpha, beta) in {(0.2,0.3), (0.2,0.5), (0.4,0.9), (0.2,0.8)} crossed
/// with gamma = 0.25, 0.5, ..., 2.
std::vector<CurveParams> standard_scenarios();

}  // namespace racecurve
