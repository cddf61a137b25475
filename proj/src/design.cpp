#include <racecurve/design.hpp>

#include <algorithm>
#include <limits>
#include <string>

#include <Eigen/LU>

#include <racecurve/curve_model.hpp>
#include <racecurve/errors.hpp>

namespace racecurve {

DesignGrid level_grid(std::size_t k, std::size_t n_total)
{
    if (k < 3) throw DomainError("a design needs at least 3 levels to identify (a, b, gamma)");
    if (n_total < k) throw DomainError("a design needs at least one unit per level");
    DesignGrid grid;
    grid.k = k;
    grid.n_total = n_total;
    grid.levels.resize(k);
    grid.allocation.assign(k, n_total / k);
    for (std::size_t j = 0; j < k; ++j) {
        grid.levels[j] = 0.01 + 0.98 * static_cast<double>(j) / static_cast<double>(k - 1);
        if (j < n_total % k) ++grid.allocation[j];
    }
    return grid;
}

double d_criterion(const CurveParams& params, const DesignGrid& grid)
{
    const WorkingParams wp = to_working(params);
    if (wp.direction == Direction::Flat) {
        throw DomainError("the D-criterion is undefined for a flat response curve");
    }
    Mat3 info = Mat3::Zero();
    for (std::size_t j = 0; j < grid.levels.size(); ++j) {
        info += static_cast<double>(grid.allocation[j]) * unit_fisher(wp, RaceLevel{grid.levels[j]});
    }
    const double det = info.determinant();
    // Hadamard: det <= product of the diagonal for a PSD matrix.
    const double scale = info(0, 0) * info(1, 1) * info(2, 2);
    if (!(det > 1e-12 * scale)) return 0.0;
    return det;
}

std::vector<DesignCriterionResult> sweep_k(const CurveParams& params, std::span<const std::size_t> ks,
                                           std::size_t n_total)
{
    std::vector<DesignCriterionResult> out;
    out.reserve(ks.size());
    double best = 0.0;
    for (const auto k : ks) {
        const double c = d_criterion(params, level_grid(k, n_total));
        out.push_back({k, c, params, 0.0});
        best = std::max(best, c);
    }
    for (auto& r : out) r.normalized = best > 0.0 ? r.criterion / best : 0.0;
    return out;
}

std::vector<std::vector<DesignCriterionResult>> sweep_scenarios_serial(
    std::span<const CurveParams> scenarios, std::span<const std::size_t> ks, std::size_t n_total)
{
    std::vector<std::vector<DesignCriterionResult>> out;
    out.reserve(scenarios.size());
    for (const auto& s : scenarios) out.push_back(sweep_k(s, ks, n_total));
    return out;
}

std::vector<std::vector<DesignCriterionResult>> sweep_scenarios(
    std::span<const CurveParams> scenarios, std::span<const std::size_t> ks, std::size_t n_total)
{
    for (const auto k : ks) level_grid(k, n_total);  // validate before entering the parallel region
    for (const auto& s : scenarios) {
        s.validate();
        if (s.direction() == Direction::Flat) {
            throw DomainError("the D-criterion is undefined for a flat response curve");
        }
    }
    std::vector<std::vector<DesignCriterionResult>> out(scenarios.size());
    const auto count = static_cast<std::ptrdiff_t>(scenarios.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = sweep_k(scenarios[static_cast<std::size_t>(i)], ks, n_total);
    }
    return out;
}

std::size_t recommend_k(const std::vector<std::vector<DesignCriterionResult>>& sweeps)
{
    if (sweeps.empty() || sweeps.front().empty()) throw DomainError("no design sweeps to aggregate");
    const std::size_t m = sweeps.front().size();
    std::size_t best_k = sweeps.front().front().k;
    double best_worst = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& curve : sweeps) worst = std::min(worst, curve.at(i).normalized);
        if (worst > best_worst) {
            best_worst = worst;
            best_k = sweeps.front()[i].k;
        }
    }
    return best_k;
}

std::size_t recommend_k(std::span<const CurveParams> scenarios, std::span<const std::size_t> ks,
                        std::size_t n_total)
{
    return recommend_k(sweep_scenarios(scenarios, ks, n_total));
}

std::vector<std::size_t> standard_k_values()
{
    return {3, 4, 5, 6, 8, 10, 12, 15, 20};
}

std::vector<CurveParams> standard_scenarios()
{
    const double pairs[4][2] = {{0.2, 0.3}, {0.2, 0.5}, {0.4, 0.9}, {0.2, 0.8}};
    std::vector<CurveParams> out;
    for (const auto& p : pairs) {
        for (int step = 1; step <= 8; ++step) out.push_back({p[0], p[1], 0.25 * step});
    }
    return out;
}

}  // namespace racecurve
