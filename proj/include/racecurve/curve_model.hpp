#pragma once
#include <racecurve/types.hpp>

namespace racecurve {

/// Probability weighting function g(gamma, xi) = xi^g / (xi^g + (1-xi)^g).
/// Inverted-S for gamma < 1, identity at gamma = 1, S-shaped above 1.
double g_weight(double gamma, RaceLevel xi);

/// Partial derivative of g_weight with respect to gamma.
double g_weight_dgamma(double gamma, RaceLevel xi);

WorkingParams to_working(const CurveParams& params);
CurveParams to_natural(const WorkingParams& wp);

/// Response curve pi(xi). Increasing: (a + g)/(a + b); decreasing:
/// (b - g)/(a + b); flat: the common level.
double response_prob(const WorkingParams& wp, RaceLevel xi);

/// Bernoulli log-likelihood. For the Flat direction this is the
/// one-parameter constant-probability model.
double log_likelihood(const WorkingParams& wp, const Dataset& data);
double log_likelihood(const WorkingParams& wp, const LevelTable& levels);

/// Gradient of the log-likelihood over (a, b, gamma). Rejects Flat.
Vec3 score(const WorkingParams& wp, const Dataset& data);
Vec3 score(const WorkingParams& wp, const LevelTable& levels);

/// Expected information contributed by a single unit observed at xi,
/// ordered (a, b, gamma). Identical for both monotone directions.
Mat3 unit_fisher(const WorkingParams& wp, RaceLevel xi);

/// Sum of unit_fisher over the observed levels. Depends on xi only.
Mat3 fisher(const WorkingParams& wp, const Dataset& data);
Mat3 fisher(const WorkingParams& wp, const LevelTable& levels);

/// Delta-method matrix H with H(i, j) = d(alpha, beta)_j / d(a, b)_i, so that
/// Cov(alpha, beta) = H^T Sigma_ab H.
Mat2 alpha_beta_jacobian(const WorkingParams& wp);

/// Exact gradient of response_prob over (a, b, gamma).
Vec3 prediction_gradient(const WorkingParams& wp, RaceLevel xi_new);

namespace detail {

// Unchecked kernels shared by the fitting code. `xi` must be in (0, 1).
struct Weight {
    double g;
    double dg;
};

Weight weight(double gamma, double xi) noexcept;

// Number of units at a level whose outcome pairs with the (a + g) factor of
// the likelihood: non-responses when decreasing, responses when increasing.
inline std::size_t paired_with_a(const LevelCount& c, Direction d) noexcept
{
    return d == Direction::Increasing ? c.responses : c.n - c.responses;
}

void require_monotone(const WorkingParams& wp, const char* what);

}  // namespace detail

}  // namespace racecurve
