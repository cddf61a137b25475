#pragma once

namespace racecurve {

/// Inverse of the standard normal CDF (Wichura's AS 241 rational
/// approximation, about 1e-16 relative accuracy). Requires 0 < p < 1.
double normal_quantile(double p);

/// Two-sided critical value z with P(|Z| <= z) = level.
double two_sided_z(double level);

double normal_cdf(double z);

}  // namespace racecurve
