#include <racecurve/estimation.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/LU>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <racecurve/curve_model.hpp>
#include <racecurve/errors.hpp>
#include <racecurve/normal.hpp>

namespace racecurve {

namespace {

constexpr int kGammaScanPoints = 41;
constexpr int kGammaBits = 26;  // brent_find_minima caps useful precision at digits/2
constexpr double kDetFloor = 1e-12;

WorkingParams monotone(double a, double b, double gamma, Direction d)
{
    WorkingParams wp;
    wp.a = a;
    wp.b = b;
    wp.gamma = gamma;
    wp.direction = d;
    return wp;
}

double clamp_proportion(std::size_t responses, std::size_t n)
{
    const double p = static_cast<double>(responses) / static_cast<double>(n);
    const double eps = 1.0 / (2.0 * static_cast<double>(n));
    return std::clamp(p, eps, 1.0 - eps);
}

// sum_j w_j (a + b)/(x_j) - N, strictly decreasing in the free coordinate.
template <class F>
CoordinateUpdate solve_monotone(F residual, double start, double lo_bound, double hi_bound)
{
    start = std::clamp(start, lo_bound, hi_bound);
    const double f0 = residual(start);
    if (f0 == 0.0) return {start, false};

    double lo = start, hi = start, flo = f0, fhi = f0;
    if (f0 > 0.0) {
        while (fhi > 0.0) {
            if (hi >= hi_bound) return {hi_bound, true};
            lo = hi;
            flo = fhi;
            hi = std::min(hi_bound, std::max(2.0 * hi, hi + 1.0));
            fhi = residual(hi);
        }
    } else {
        while (flo < 0.0) {
            if (lo <= lo_bound) return {lo_bound, true};
            hi = lo;
            fhi = flo;
            lo = std::max(lo_bound, lo_bound + (lo - lo_bound) / 2.0);
            if (lo - lo_bound < 1e-3 * lo_bound) lo = lo_bound;
            flo = residual(lo);
        }
    }
    if (flo == 0.0) return {lo, false};
    if (fhi == 0.0) return {hi, false};

    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(
        residual, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iters);
    return {(root.first + root.second) / 2.0, false};
}

// Coarse log-spaced scan followed by Brent refinement in the best cell.
double maximize_gamma(double a, double b, Direction d, const LevelTable& levels, double lo,
                      double hi)
{
    const auto ll = [&](double gamma) { return log_likelihood(monotone(a, b, gamma, d), levels); };
    const double ratio = std::log(hi / lo);
    int best = 0;
    double best_ll = -std::numeric_limits<double>::infinity();
    std::vector<double> grid(kGammaScanPoints);
    for (int i = 0; i < kGammaScanPoints; ++i) {
        grid[i] = lo * std::exp(ratio * i / (kGammaScanPoints - 1));
        const double v = ll(grid[i]);
        if (v > best_ll) {
            best_ll = v;
            best = i;
        }
    }
    const double left = grid[std::max(best - 1, 0)];
    const double right = grid[std::min(best + 1, kGammaScanPoints - 1)];
    std::uintmax_t iters = 200;
    const auto found = boost::math::tools::brent_find_minima(
        [&](double gamma) { return -ll(gamma); }, left, right, kGammaBits, iters);
    return -found.second >= best_ll ? found.first : grid[best];
}

bool near_bound(double x, double bound)
{
    return std::abs(x - bound) <= 1e-6 * std::max(1.0, std::abs(bound));
}

// One expected-information ascent step with step halving. Moves `wp` only
// when the log-likelihood does not drop; returns whether it moved.
bool scoring_step(WorkingParams& wp, double& ll, const LevelTable& levels, const FitOptions& options)
{
    const Vec3 s = score(wp, levels);
    const Mat3 info = fisher(wp, levels);
    if (std::abs(info.determinant()) < kDetFloor) return false;
    const Vec3 delta = info.inverse() * s;
    for (double t = 1.0; t > 1e-10; t /= 2.0) {
        WorkingParams next = wp;
        next.a += t * delta[0];
        next.b += t * delta[1];
        next.gamma += t * delta[2];
        if (next.a < options.a_min || next.b < options.b_min || next.a > options.working_max ||
            next.b > options.working_max || next.gamma < options.gamma_lo || next.gamma > options.gamma_hi) {
            continue;
        }
        const double next_ll = log_likelihood(next, levels);
        if (next_ll >= ll) {
            const bool moved = next_ll > ll || t == 1.0;
            wp = next;
            ll = next_ll;
            return moved;
        }
    }
    return false;
}

std::size_t polish(WorkingParams& wp, const LevelTable& levels, const FitOptions& options)
{
    std::size_t steps = 0;
    double ll = log_likelihood(wp, levels);
    for (; steps < options.polish_max_steps; ++steps) {
        if (score(wp, levels).cwiseAbs().maxCoeff() < options.polish_tolerance) break;
        if (!scoring_step(wp, ll, levels, options)) break;
    }
    return steps;
}

void require_levels(const LevelTable& levels)
{
    if (levels.size() < 2) {
        throw DomainError("fitting needs at least two distinct race levels");
    }
}

}  // namespace

WorkingParams initialize(const LevelTable& levels, const FitOptions& options)
{
    require_levels(levels);
    const auto& first = levels.front();
    const auto& last = levels.back();
    double alpha0 = clamp_proportion(first.responses, first.n);
    double beta0 = clamp_proportion(last.responses, last.n);

    Direction d = alpha0 < beta0   ? Direction::Increasing
                  : alpha0 > beta0 ? Direction::Decreasing
                                   : Direction::Flat;
    if (options.direction && *options.direction != Direction::Flat && *options.direction != d) {
        // Forced branch disagrees with the data: start from a small separation
        // around the midpoint in the requested order.
        d = *options.direction;
        const double mid = std::clamp((alpha0 + beta0) / 2.0, 0.02, 0.98);
        const double half = std::max(std::abs(beta0 - alpha0) / 2.0, 0.01);
        const double lo = std::max(mid - half, 0.005);
        const double hi = std::min(mid + half, 0.995);
        alpha0 = d == Direction::Increasing ? lo : hi;
        beta0 = d == Direction::Increasing ? hi : lo;
    }

    if (d == Direction::Flat) {
        WorkingParams wp;
        std::size_t responses = 0;
        for (const auto& c : levels) responses += c.responses;
        wp.flat_level = clamp_proportion(responses, total_units(levels));
        return wp;
    }

    WorkingParams wp = to_working({alpha0, beta0, 1.0});
    wp.a = std::clamp(wp.a, options.a_min, options.working_max);
    wp.b = std::clamp(wp.b, options.b_min, options.working_max);
    wp.gamma = maximize_gamma(wp.a, wp.b, d, levels, options.gamma_lo, options.gamma_hi);
    return wp;
}

WorkingParams initialize(const Dataset& data, const FitOptions& options)
{
    return initialize(data.levels(), options);
}

double a_equation(double a, double b, double gamma, Direction direction, const LevelTable& levels)
{
    double sum = 0.0;
    for (const auto& c : levels) {
        const double u = static_cast<double>(detail::paired_with_a(c, direction));
        sum += u / (a + detail::weight(gamma, c.xi).g);
    }
    return sum - static_cast<double>(total_units(levels)) / (a + b);
}

double b_equation(double a, double b, double gamma, Direction direction, const LevelTable& levels)
{
    double sum = 0.0;
    for (const auto& c : levels) {
        const double v = static_cast<double>(c.n - detail::paired_with_a(c, direction));
        sum += v / (b - detail::weight(gamma, c.xi).g);
    }
    return sum - static_cast<double>(total_units(levels)) / (a + b);
}

CoordinateUpdate update_a(double b, double gamma, Direction direction, const LevelTable& levels,
                          double start, const FitOptions& options)
{
    if (direction == Direction::Flat) throw DomainError("update_a needs a monotone direction");
    std::vector<double> g(levels.size());
    for (std::size_t j = 0; j < levels.size(); ++j) g[j] = detail::weight(gamma, levels[j].xi).g;
    const double n = static_cast<double>(total_units(levels));
    // (a + b) * a_equation: same sign, strictly decreasing in a.
    const auto residual = [&](double a) {
        double sum = 0.0;
        for (std::size_t j = 0; j < levels.size(); ++j) {
            const double u = static_cast<double>(detail::paired_with_a(levels[j], direction));
            sum += u * (a + b) / (a + g[j]);
        }
        return sum - n;
    };
    return solve_monotone(residual, start, options.a_min, options.working_max);
}

CoordinateUpdate update_b(double a, double gamma, Direction direction, const LevelTable& levels,
                          double start, const FitOptions& options)
{
    if (direction == Direction::Flat) throw DomainError("update_b needs a monotone direction");
    std::vector<double> g(levels.size());
    for (std::size_t j = 0; j < levels.size(); ++j) g[j] = detail::weight(gamma, levels[j].xi).g;
    const double n = static_cast<double>(total_units(levels));
    const auto residual = [&](double b) {
        double sum = 0.0;
        for (std::size_t j = 0; j < levels.size(); ++j) {
            const double v =
                static_cast<double>(levels[j].n - detail::paired_with_a(levels[j], direction));
            sum += v * (a + b) / (b - g[j]);
        }
        return sum - n;
    };
    return solve_monotone(residual, start, options.b_min, options.working_max);
}

CoordinateUpdate update_gamma(double a, double b, Direction direction, const LevelTable& levels,
                              double current, const FitOptions& options)
{
    if (direction == Direction::Flat) throw DomainError("update_gamma needs a monotone direction");
    double gamma = maximize_gamma(a, b, direction, levels, options.gamma_lo, options.gamma_hi);
    if (current >= options.gamma_lo && current <= options.gamma_hi) {
        const double ll_new = log_likelihood(monotone(a, b, gamma, direction), levels);
        const double ll_cur = log_likelihood(monotone(a, b, current, direction), levels);
        if (ll_new < ll_cur) gamma = current;
    }
    return {gamma, near_bound(gamma, options.gamma_lo) || near_bound(gamma, options.gamma_hi)};
}

FitResult fit(const LevelTable& levels, const FitOptions& options)
{
    FitResult fr;
    fr.epsilon = options.epsilon;
    fr.levels = levels;
    WorkingParams wp = initialize(levels, options);

    if (wp.direction == Direction::Flat) {
        fr.working = wp;
        fr.natural = to_natural(wp);
        fr.converged = true;
        fr.log_likelihood = log_likelihood(wp, levels);
        fr.trace.push_back(fr.log_likelihood);
        return fr;
    }

    fr.trace.push_back(log_likelihood(wp, levels));
    bool boundary = false;
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        const auto ua = update_a(wp.b, wp.gamma, wp.direction, levels, wp.a, options);
        const auto ub = update_b(ua.value, wp.gamma, wp.direction, levels, wp.b, options);
        const auto ug = update_gamma(ua.value, ub.value, wp.direction, levels, wp.gamma, options);
        WorkingParams next = wp;
        next.a = ua.value;
        next.b = ub.value;
        next.gamma = ug.value;
        boundary = ua.at_boundary || ub.at_boundary || ug.at_boundary;
        double ll = log_likelihood(next, levels);
        if (options.accelerate && !boundary) scoring_step(next, ll, levels, options);
        const double change = std::max({std::abs(next.a - wp.a), std::abs(next.b - wp.b),
                                        std::abs(next.gamma - wp.gamma)});
        wp = next;
        fr.trace.push_back(ll);
        fr.iterations = it;
        fr.final_change = change;
        if (change < options.epsilon) {
            fr.converged = true;
            break;
        }
    }

    if (fr.converged && !boundary && options.polish) fr.polish_steps = polish(wp, levels, options);
    boundary = boundary || near_bound(wp.a, options.a_min) || near_bound(wp.b, options.b_min) ||
               near_bound(wp.gamma, options.gamma_lo) || near_bound(wp.gamma, options.gamma_hi);

    fr.working = wp;
    fr.natural = to_natural(wp);
    fr.boundary_flag = boundary;
    fr.log_likelihood = log_likelihood(wp, levels);

    const Mat3 info = fisher(wp, levels);
    if (info.determinant() < kDetFloor) {
        fr.singular_fisher = true;
        return fr;
    }
    Mat3 cov = info.inverse();
    cov = (cov + cov.transpose()) / 2.0;
    const Mat2 h = alpha_beta_jacobian(wp);
    Mat2 cov_ab = h.transpose() * cov.topLeftCorner<2, 2>() * h;
    cov_ab = (cov_ab + cov_ab.transpose()) / 2.0;
    fr.covariance_working = cov;
    fr.covariance_alpha_beta = cov_ab;
    return fr;
}

FitResult fit(const Dataset& data, const FitOptions& options)
{
    if (data.empty()) throw DomainError("cannot fit an empty dataset");
    return fit(data.levels(), options);
}

FitResult fit_best_direction(const LevelTable& levels, const FitOptions& options)
{
    FitOptions inc = options;
    inc.direction = Direction::Increasing;
    FitOptions dec = options;
    dec.direction = Direction::Decreasing;
    FitResult up = fit(levels, inc);
    FitResult down = fit(levels, dec);
    if (up.converged != down.converged) return up.converged ? up : down;
    return up.log_likelihood >= down.log_likelihood ? up : down;
}

namespace {

void require_inference(const FitResult& fr)
{
    if (!fr.converged) throw NonConvergenceError("fit did not converge");
    if (!fr.covariance_working) {
        throw SingularFisherError(fr.working.direction == Direction::Flat
                                      ? "flat fit has no (a, b, gamma) covariance"
                                      : "Fisher information is singular at the estimate");
    }
}

ConfidenceInterval wald(double estimate, double variance, double level)
{
    const double se = std::sqrt(std::max(variance, 0.0));
    const double z = two_sided_z(level);
    return {estimate, se, estimate - z * se, estimate + z * se, level};
}

}  // namespace

ConfidenceInterval treatment_effect_ci(const FitResult& fr, double level)
{
    require_inference(fr);
    const Mat2& v = *fr.covariance_alpha_beta;
    return wald(fr.natural.beta - fr.natural.alpha, v(0, 0) + v(1, 1) - 2.0 * v(0, 1), level);
}

ConfidenceInterval gamma_ci(const FitResult& fr, double level)
{
    require_inference(fr);
    return wald(fr.working.gamma, (*fr.covariance_working)(2, 2), level);
}

Prediction predict_with_ci(const FitResult& fr, RaceLevel xi_new, double level)
{
    require_inference(fr);
    const double p = response_prob(fr.working, xi_new);
    const Vec3 lambda = prediction_gradient(fr.working, xi_new);
    const double var = std::max(0.0, lambda.dot(*fr.covariance_working * lambda));
    auto ci = wald(p, var, level);
    ci.lower = std::max(ci.lower, 0.0);
    ci.upper = std::min(ci.upper, 1.0);
    return {p, var, ci};
}

std::vector<double> naive_proportions(const LevelTable& levels)
{
    std::vector<double> out;
    out.reserve(levels.size());
    for (const auto& c : levels) {
        out.push_back(static_cast<double>(c.responses) / static_cast<double>(c.n));
    }
    return out;
}

}  // namespace racecurve
