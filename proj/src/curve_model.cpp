#include <racecurve/curve_model.hpp>

#include <cmath>
#include <string>

#include <racecurve/errors.hpp>

namespace racecurve {

namespace detail {

Weight weight(double gamma, double xi) noexcept
{
    // g = logistic(gamma * logit(xi)); evaluated without forming xi^gamma.
    const double logit = std::log(xi) - std::log1p(-xi);
    const double t = gamma * logit;
    const double e = std::exp(-std::abs(t));
    const double big = 1.0 / (1.0 + e);
    const double small = e / (1.0 + e);
    const double g = t >= 0.0 ? big : small;
    return {g, big * small * logit};
}

void require_monotone(const WorkingParams& wp, const char* what)
{
    if (wp.direction == Direction::Flat) {
        throw DomainError(std::string(what) + " is undefined for a flat response curve");
    }
}

}  // namespace detail

namespace {

void check_gamma(double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
}

double safe_log(double x)
{
    if (!(x > 0.0)) throw NumericError("response probability reached 0 or 1");
    return std::log(x);
}

}  // namespace

double g_weight(double gamma, RaceLevel xi)
{
    check_gamma(gamma);
    return detail::weight(gamma, xi.value()).g;
}

double g_weight_dgamma(double gamma, RaceLevel xi)
{
    check_gamma(gamma);
    return detail::weight(gamma, xi.value()).dg;
}

WorkingParams to_working(const CurveParams& params)
{
    params.validate();
    WorkingParams wp;
    wp.gamma = params.gamma;
    wp.direction = params.direction();
    const double alpha = params.alpha;
    const double beta = params.beta;
    switch (wp.direction) {
        case Direction::Increasing:
            wp.a = alpha / (beta - alpha);
            wp.b = (1.0 - alpha) / (beta - alpha);
            break;
        case Direction::Decreasing:
            wp.a = (1.0 - alpha) / (alpha - beta);
            wp.b = alpha / (alpha - beta);
            break;
        case Direction::Flat:
            wp.flat_level = alpha;
            break;
    }
    return wp;
}

CurveParams to_natural(const WorkingParams& wp)
{
    const double s = wp.a + wp.b;
    switch (wp.direction) {
        case Direction::Increasing: return {wp.a / s, (wp.a + 1.0) / s, wp.gamma};
        case Direction::Decreasing: return {wp.b / s, (wp.b - 1.0) / s, wp.gamma};
        case Direction::Flat: break;
    }
    return {wp.flat_level, wp.flat_level, wp.gamma};
}

double response_prob(const WorkingParams& wp, RaceLevel xi)
{
    if (wp.direction == Direction::Flat) return wp.flat_level;
    const double g = detail::weight(wp.gamma, xi.value()).g;
    return wp.direction == Direction::Increasing ? (wp.a + g) / (wp.a + wp.b)
                                                 : (wp.b - g) / (wp.a + wp.b);
}

double log_likelihood(const WorkingParams& wp, const LevelTable& levels)
{
    if (levels.empty()) throw DomainError("log-likelihood needs at least one observation");
    double ll = 0.0;
    if (wp.direction == Direction::Flat) {
        const double lp = safe_log(wp.flat_level);
        const double lq = safe_log(1.0 - wp.flat_level);
        for (const auto& c : levels) {
            ll += static_cast<double>(c.responses) * lp + static_cast<double>(c.n - c.responses) * lq;
        }
        return ll;
    }
    // sum u log(a + g) + (1 - u) log(b - g) - N log(a + b)
    const double log_s = std::log(wp.a + wp.b);
    for (const auto& c : levels) {
        const double g = detail::weight(wp.gamma, c.xi).g;
        const auto u = static_cast<double>(detail::paired_with_a(c, wp.direction));
        const auto v = static_cast<double>(c.n) - u;
        if (u > 0) ll += u * safe_log(wp.a + g);
        if (v > 0) ll += v * safe_log(wp.b - g);
        ll -= static_cast<double>(c.n) * log_s;
    }
    return ll;
}

double log_likelihood(const WorkingParams& wp, const Dataset& data)
{
    return log_likelihood(wp, data.levels());
}

Vec3 score(const WorkingParams& wp, const LevelTable& levels)
{
    detail::require_monotone(wp, "score");
    if (levels.empty()) throw DomainError("score needs at least one observation");
    Vec3 grad = Vec3::Zero();
    const double s = wp.a + wp.b;
    for (const auto& c : levels) {
        const auto w = detail::weight(wp.gamma, c.xi);
        const auto u = static_cast<double>(detail::paired_with_a(c, wp.direction));
        const auto v = static_cast<double>(c.n) - u;
        const double ta = u / (wp.a + w.g);
        const double tb = v / (wp.b - w.g);
        grad[0] += ta;
        grad[1] += tb;
        grad[2] += w.dg * (ta - tb);
    }
    const double n = static_cast<double>(total_units(levels));
    grad[0] -= n / s;
    grad[1] -= n / s;
    return grad;
}

Vec3 score(const WorkingParams& wp, const Dataset& data)
{
    return score(wp, data.levels());
}

Mat3 unit_fisher(const WorkingParams& wp, RaceLevel xi)
{
    detail::require_monotone(wp, "Fisher information");
    const auto w = detail::weight(wp.gamma, xi.value());
    const double s = wp.a + wp.b;
    const double ag = wp.a + w.g;
    const double bg = wp.b - w.g;
    Mat3 m;
    m(0, 0) = bg / (s * s * ag);
    m(1, 1) = ag / (s * s * bg);
    m(2, 2) = w.dg * w.dg / (ag * bg);
    m(0, 1) = m(1, 0) = -1.0 / (s * s);
    m(0, 2) = m(2, 0) = w.dg / (s * ag);
    m(1, 2) = m(2, 1) = -w.dg / (s * bg);
    return m;
}

Mat3 fisher(const WorkingParams& wp, const LevelTable& levels)
{
    Mat3 total = Mat3::Zero();
    for (const auto& c : levels) {
        total += static_cast<double>(c.n) * unit_fisher(wp, RaceLevel{c.xi});
    }
    return total;
}

Mat3 fisher(const WorkingParams& wp, const Dataset& data)
{
    return fisher(wp, data.levels());
}

Mat2 alpha_beta_jacobian(const WorkingParams& wp)
{
    detail::require_monotone(wp, "alpha/beta Jacobian");
    const double s2 = (wp.a + wp.b) * (wp.a + wp.b);
    Mat2 h;
    // Decreasing: alpha = b/(a+b), beta = (b-1)/(a+b).
    h << -wp.b / s2, -(wp.b - 1.0) / s2,
          wp.a / s2,  (wp.a + 1.0) / s2;
    // Increasing: alpha = a/(a+b), beta = (a+1)/(a+b) flips every sign.
    if (wp.direction == Direction::Increasing) h = -h;
    return h;
}

Vec3 prediction_gradient(const WorkingParams& wp, RaceLevel xi_new)
{
    detail::require_monotone(wp, "prediction gradient");
    const auto w = detail::weight(wp.gamma, xi_new.value());
    const double s = wp.a + wp.b;
    Vec3 grad;
    grad << -(wp.b - w.g) / (s * s), (wp.a + w.g) / (s * s), -w.dg / s;
    if (wp.direction == Direction::Increasing) grad = -grad;
    return grad;
}

}  // namespace racecurve
