#pragma once
#include <cstddef>
#include <optional>
#include <vector>

#include <racecurve/types.hpp>

namespace racecurve {

struct FitOptions {
    double epsilon = 1e-3;
    std::size_t max_iter = 500;
    // Forces the monotone branch instead of taking it from the extreme-level
    // proportions. Only Increasing or Decreasing are meaningful.
    std::optional<Direction> direction;
    double gamma_lo = 0.05;
    double gamma_hi = 20.0;
    double a_min = 1e-8;
    double b_min = 1.0 + 1e-8;
    double working_max = 1e6;
    // After each coordinate cycle, also try one expected-information step
    // and keep it if it does not lower the likelihood. Speeds up fits where
    // a and b are large and strongly correlated.
    bool accelerate = false;
    // Newton-type refinement (expected-information steps with halving) after
    // the coordinate cycle meets the stopping rule.
    bool polish = true;
    double polish_tolerance = 1e-8;
    std::size_t polish_max_steps = 100;
};

/// Result of one coordinate step.
struct CoordinateUpdate {
    double value;
    bool at_boundary;
};

struct FitResult {
    WorkingParams working;
    CurveParams natural;
    std::optional<Mat3> covariance_working;
    std::optional<Mat2> covariance_alpha_beta;
    std::size_t iterations = 0;
    bool converged = false;
    double epsilon = 1e-3;
    bool boundary_flag = false;
    bool singular_fisher = false;
    double log_likelihood = 0.0;
    double final_change = 0.0;
    std::size_t polish_steps = 0;
    // Log-likelihood at the initial point and after every coordinate cycle.
    std::vector<double> trace;
    LevelTable levels;
};

struct ConfidenceInterval {
    double estimate = 0.0;
    double standard_error = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;

    bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

struct Prediction {
    double probability;
    double variance;
    ConfidenceInterval interval;
};

WorkingParams initialize(const LevelTable& levels, const FitOptions& options = {});
WorkingParams initialize(const Dataset& data, const FitOptions& options = {});

/// Maximises the log-likelihood over a with b and gamma held fixed by solving
/// the monotone stationarity equation. `start` seeds the bracket search.
CoordinateUpdate update_a(double b, double gamma, Direction direction, const LevelTable& levels,
                          double start, const FitOptions& options = {});
CoordinateUpdate update_b(double a, double gamma, Direction direction, const LevelTable& levels,
                          double start, const FitOptions& options = {});

/// Maximises the log-likelihood over gamma in [gamma_lo, gamma_hi]. Never
/// returns a point worse than `current`.
CoordinateUpdate update_gamma(double a, double b, Direction direction, const LevelTable& levels,
                              double current, const FitOptions& options = {});

// Left-hand sides of the a and b stationarity equations:
// sum u/(a+g) - N/(a+b) and sum (1-u)/(b-g) - N/(a+b).
double a_equation(double a, double b, double gamma, Direction direction, const LevelTable& levels);
double b_equation(double a, double b, double gamma, Direction direction, const LevelTable& levels);

FitResult fit(const LevelTable& levels, const FitOptions& options = {});
FitResult fit(const Dataset& data, const FitOptions& options = {});

/// Fits both monotone branches and keeps the better converged one. Used when
/// the extreme-level proportions tie.
FitResult fit_best_direction(const LevelTable& levels, const FitOptions& options = {});

ConfidenceInterval treatment_effect_ci(const FitResult& fr, double level = 0.95);
ConfidenceInterval gamma_ci(const FitResult& fr, double level = 0.95);
Prediction predict_with_ci(const FitResult& fr, RaceLevel xi_new, double level = 0.95);

/// Observed response proportion per distinct level.
std::vector<double> naive_proportions(const LevelTable& levels);

}  // namespace racecurve
