#include <racecurve/power.hpp>

#include <racecurve/curve_model.hpp>
#include <racecurve/errors.hpp>

namespace racecurve {

void PowerScenario::validate() const
{
    params.validate();
    if (replicates < 1) throw DomainError("power study needs at least one replicate");
    if (n_values.empty()) throw DomainError("power study needs at least one sample size");
    for (const auto n : n_values) {
        if (n < k) throw DomainError("every sample size must cover all levels");
    }
    if (!(ci_level > 0.0 && ci_level < 1.0)) throw DomainError("ci_level must lie in (0, 1)");
    level_grid(k, k);
}

Dataset simulate_dataset(const CurveParams& params, const DesignGrid& grid, RandomStream& rng)
{
    params.validate();
    const WorkingParams wp = to_working(params);
    Dataset data;
    for (std::size_t j = 0; j < grid.levels.size(); ++j) {
        const double p = response_prob(wp, RaceLevel{grid.levels[j]});
        for (std::size_t r = 0; r < grid.allocation[j]; ++r) {
            data.add(grid.levels[j], rng.bernoulli(p) ? 1 : 0);
        }
    }
    return data;
}

FitResult fit_for_simulation(const LevelTable& levels, const FitOptions& options)
{
    FitResult fr = fit(levels, options);
    if (fr.working.direction == Direction::Flat) fr = fit_best_direction(levels, options);
    return fr;
}

ReplicateOutcome run_replicate(const PowerScenario& scenario, const DesignGrid& grid,
                               std::size_t index)
{
    RandomStream rng(derive_seed(scenario.seed, {grid.n_total, index}));
    const Dataset data = simulate_dataset(scenario.params, grid, rng);
    FitResult fr;
    try {
        fr = fit_for_simulation(data.levels(), scenario.fit_options);
    } catch (const Error&) {
        return {};
    }
    if (!fr.converged || !fr.covariance_working) return {};
    ReplicateOutcome out;
    out.ok = true;
    out.gamma_contains_one = gamma_ci(fr, scenario.ci_level).contains(1.0);
    out.effect_contains_zero = treatment_effect_ci(fr, scenario.ci_level).contains(0.0);
    return out;
}

namespace {

PowerEstimate tally(std::size_t n, const std::vector<ReplicateOutcome>& outcomes)
{
    PowerEstimate est;
    est.n = n;
    std::size_t in_gamma = 0, in_effect = 0;
    for (const auto& o : outcomes) {
        if (!o.ok) {
            ++est.failures;
            continue;
        }
        ++est.successes;
        in_gamma += o.gamma_contains_one ? 1 : 0;
        in_effect += o.effect_contains_zero ? 1 : 0;
    }
    if (est.successes > 0) {
        est.delta1 = static_cast<double>(in_gamma) / static_cast<double>(est.successes);
        est.delta2 = static_cast<double>(in_effect) / static_cast<double>(est.successes);
    }
    return est;
}

}  // namespace

std::vector<PowerEstimate> estimate_power_serial(const PowerScenario& scenario)
{
    scenario.validate();
    std::vector<PowerEstimate> out;
    for (const auto n : scenario.n_values) {
        const DesignGrid grid = level_grid(scenario.k, n);
        std::vector<ReplicateOutcome> outcomes(scenario.replicates);
        for (std::size_t i = 0; i < scenario.replicates; ++i) {
            outcomes[i] = run_replicate(scenario, grid, i);
        }
        out.push_back(tally(n, outcomes));
    }
    return out;
}

std::vector<PowerEstimate> estimate_power(const PowerScenario& scenario)
{
    scenario.validate();
    std::vector<PowerEstimate> out;
    for (const auto n : scenario.n_values) {
        const DesignGrid grid = level_grid(scenario.k, n);
        std::vector<ReplicateOutcome> outcomes(scenario.replicates);
        const auto count = static_cast<std::ptrdiff_t>(scenario.replicates);
#pragma omp parallel for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            outcomes[static_cast<std::size_t>(i)] =
                run_replicate(scenario, grid, static_cast<std::size_t>(i));
        }
        out.push_back(tally(n, outcomes));
    }
    return out;
}

}  // namespace racecurve
