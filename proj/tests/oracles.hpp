#pragma once
// Independent reference computations used only by the tests. Nothing here
// calls the library's fitting or likelihood code.
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <racecurve/types.hpp>

namespace oracle {

// g computed straight from the power form.
inline double weight(double gamma, double xi)
{
    const double p = std::pow(xi, gamma);
    const double q = std::pow(1.0 - xi, gamma);
    return p / (p + q);
}

// pi(xi) = alpha + (beta - alpha) g(gamma, xi) holds for every direction.
inline double curve(const racecurve::CurveParams& p, double xi)
{
    return p.alpha + (p.beta - p.alpha) * weight(p.gamma, xi);
}

// Natural parameters from working ones, written out from the boundary values
// pi(0+) and pi(1-) of each branch.
inline racecurve::CurveParams natural(double a, double b, double gamma, racecurve::Direction d)
{
    if (d == racecurve::Direction::Increasing) return {a / (a + b), (a + 1.0) / (a + b), gamma};
    return {b / (a + b), (b - 1.0) / (a + b), gamma};
}

inline double bernoulli_loglik(const racecurve::CurveParams& p, const racecurve::Dataset& data)
{
    double ll = 0.0;
    for (const auto& o : data.observations()) {
        const double pi = curve(p, o.xi.value());
        ll += o.y == 1 ? std::log(pi) : std::log(1.0 - pi);
    }
    return ll;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h)
{
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Minimum total |target - candidate| over injective assignments, exhaustive.
inline double brute_force_assignment(const std::vector<double>& targets,
                                     const std::vector<double>& candidates)
{
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> used(candidates.size(), false);
    std::function<void(std::size_t, double)> rec = [&](std::size_t i, double acc) {
        if (acc >= best) return;
        if (i == targets.size()) {
            best = acc;
            return;
        }
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            if (used[j]) continue;
            used[j] = true;
            rec(i + 1, acc + std::abs(targets[i] - candidates[j]));
            used[j] = false;
        }
    };
    rec(0, 0.0);
    return best;
}

// Exact optimum restricted to each target's m nearest candidates; an optimal
// assignment never needs anything further away.
inline double nearest_restricted_assignment(const std::vector<double>& targets,
                                            const std::vector<double>& candidates)
{
    const std::size_t m = targets.size();
    std::vector<std::vector<std::size_t>> near(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::size_t> idx(candidates.size());
        for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
        std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m), idx.end(),
                          [&](std::size_t x, std::size_t y) {
                              return std::abs(candidates[x] - targets[i]) <
                                     std::abs(candidates[y] - targets[i]);
                          });
        near[i].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> chosen;
    std::function<void(std::size_t, double)> rec = [&](std::size_t i, double acc) {
        if (acc >= best) return;
        if (i == m) {
            best = acc;
            return;
        }
        for (const auto j : near[i]) {
            if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
            chosen.push_back(j);
            rec(i + 1, acc + std::abs(targets[i] - candidates[j]));
            chosen.pop_back();
        }
    };
    rec(0, 0.0);
    return best;
}

}  // namespace oracle
