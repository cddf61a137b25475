#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <racecurve/curve_model.hpp>
#include <racecurve/errors.hpp>

#include "oracles.hpp"

using namespace racecurve;

namespace {

WorkingParams dec_third() { return {1.0 / 3.0, 4.0 / 3.0, 1.0, Direction::Decreasing, 0.5}; }

Dataset random_dataset(std::mt19937_64& gen, std::size_t n)
{
    std::uniform_real_distribution<double> u(0.01, 0.99);
    Dataset d;
    for (std::size_t i = 0; i < n; ++i) d.add(u(gen), u(gen) < 0.5 ? 1 : 0);
    return d;
}

CurveParams random_params(std::mt19937_64& gen)
{
    std::uniform_real_distribution<double> p(0.05, 0.95);
    std::uniform_real_distribution<double> lg(std::log(0.2), std::log(4.0));
    CurveParams c{p(gen), p(gen), std::exp(lg(gen))};
    if (std::abs(c.alpha - c.beta) < 0.05) c.beta = c.alpha < 0.5 ? c.alpha + 0.3 : c.alpha - 0.3;
    return c;
}

}  // namespace

TEST_CASE("g_weight reference values")
{
    CHECK(g_weight(1.0, RaceLevel{0.37}) == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(g_weight(5.0, RaceLevel{0.5}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g_weight(0.5, RaceLevel{0.9}) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("g_weight rejects invalid arguments")
{
    CHECK_THROWS_AS(g_weight(0.0, RaceLevel{0.3}), DomainError);
    CHECK_THROWS_AS(g_weight(-1.0, RaceLevel{0.3}), DomainError);
    CHECK_THROWS_AS(RaceLevel{0.0}, DomainError);
    CHECK_THROWS_AS(RaceLevel{1.0}, DomainError);
    CHECK_THROWS_AS(RaceLevel{std::nan("")}, DomainError);
}

TEST_CASE("g_weight is stable for large gamma and extreme levels")
{
    CHECK(g_weight(500.0, RaceLevel{0.999}) == doctest::Approx(1.0));
    CHECK(g_weight(500.0, RaceLevel{0.001}) >= 0.0);
    CHECK(std::isfinite(g_weight_dgamma(500.0, RaceLevel{0.4})));
    CHECK(g_weight(1e-3, RaceLevel{1e-12}) == doctest::Approx(oracle::weight(1e-3, 1e-12)).epsilon(1e-10));
}

TEST_CASE("g_weight symmetry and monotonicity")
{
    for (double gamma : {0.1, 0.25, 0.7, 1.0, 1.5, 3.0, 10.0}) {
        double prev = 0.0;
        for (int i = 1; i < 200; ++i) {
            const double xi = i / 200.0;
            const double g = g_weight(gamma, RaceLevel{xi});
            CHECK(g + g_weight(gamma, RaceLevel{1.0 - xi}) == doctest::Approx(1.0).epsilon(1e-14));
            CHECK((g > prev || g == 1.0));
            CHECK(g == doctest::Approx(oracle::weight(gamma, xi)).epsilon(1e-12));
            prev = g;
        }
    }
}

TEST_CASE("g_weight shape: inverted-S below 1, S-shaped above 1")
{
    const auto second_diff = [](double gamma, double xi) {
        const double h = 1e-3;
        return g_weight(gamma, RaceLevel{xi + h}) - 2.0 * g_weight(gamma, RaceLevel{xi}) +
               g_weight(gamma, RaceLevel{xi - h});
    };
    for (double gamma : {0.25, 0.5, 0.75}) {
        for (double xi = 0.05; xi < 0.45; xi += 0.05) CHECK(second_diff(gamma, xi) < 0.0);
        for (double xi = 0.55; xi < 0.95; xi += 0.05) CHECK(second_diff(gamma, xi) > 0.0);
    }
    for (double gamma : {1.25, 2.0, 4.0}) {
        for (double xi = 0.05; xi < 0.45; xi += 0.05) CHECK(second_diff(gamma, xi) > 0.0);
        for (double xi = 0.55; xi < 0.95; xi += 0.05) CHECK(second_diff(gamma, xi) < 0.0);
    }
}

TEST_CASE("g_weight_dgamma reference values and finite differences")
{
    CHECK(g_weight_dgamma(1.0, RaceLevel{0.5}) == doctest::Approx(0.0));
    CHECK(g_weight_dgamma(1.0, RaceLevel{0.9}) == doctest::Approx(0.09 * std::log(9.0)).epsilon(1e-14));
    CHECK(g_weight_dgamma(1.0, RaceLevel{0.9}) == doctest::Approx(0.19775).epsilon(1e-5));

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> xi_d(0.01, 0.99);
    std::uniform_real_distribution<double> lg(std::log(0.1), std::log(5.0));
    for (int i = 0; i < 200; ++i) {
        const double xi = xi_d(gen);
        if (std::abs(xi - 0.5) < 0.02) continue;
        const double gamma = std::exp(lg(gen));
        const double fd = oracle::central_difference(
            [&](double g) { return oracle::weight(g, xi); }, gamma, 1e-5 * std::max(1.0, gamma));
        CHECK(g_weight_dgamma(gamma, RaceLevel{xi}) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("to_working reference values")
{
    const auto inc = to_working({0.2, 0.8, 1.0});
    CHECK(inc.direction == Direction::Increasing);
    CHECK(inc.a == doctest::Approx(1.0 / 3.0));
    CHECK(inc.b == doctest::Approx(4.0 / 3.0));

    const auto dec = to_working({0.8, 0.2, 1.0});
    CHECK(dec.direction == Direction::Decreasing);
    CHECK(dec.a == doctest::Approx(1.0 / 3.0));
    CHECK(dec.b == doctest::Approx(4.0 / 3.0));

    const auto flat = to_working({0.5, 0.5, 1.0});
    CHECK(flat.direction == Direction::Flat);
    CHECK(flat.flat_level == 0.5);
}

TEST_CASE("to_natural reference values and round trip")
{
    auto wp = dec_third();
    auto p = to_natural(wp);
    CHECK(p.alpha == doctest::Approx(0.8));
    CHECK(p.beta == doctest::Approx(0.2));
    wp.direction = Direction::Increasing;
    p = to_natural(wp);
    CHECK(p.alpha == doctest::Approx(0.2));
    CHECK(p.beta == doctest::Approx(0.8));

    std::mt19937_64 gen(5);
    for (int i = 0; i < 1000; ++i) {
        const auto c = random_params(gen);
        const auto back = to_natural(to_working(c));
        CHECK(std::abs(back.alpha - c.alpha) < 1e-12);
        CHECK(std::abs(back.beta - c.beta) < 1e-12);
        CHECK(back.gamma == c.gamma);
        const auto w = to_working(c);
        CHECK(w.a > 0.0);
        CHECK(w.b > 1.0);
        const auto o = oracle::natural(w.a, w.b, w.gamma, w.direction);
        CHECK(std::abs(o.alpha - c.alpha) < 1e-12);
        CHECK(std::abs(o.beta - c.beta) < 1e-12);
    }
}

TEST_CASE("increasing branch uses b = (1 - alpha)/(beta - alpha) so the limits hold")
{
    for (const CurveParams c : {CurveParams{0.2, 0.8, 1.7}, CurveParams{0.05, 0.3, 0.4},
                                CurveParams{0.6, 0.95, 2.5}, CurveParams{0.9, 0.1, 0.6}}) {
        const auto wp = to_working(c);
        // xi^gamma must be negligible, which needs xi far below 1e-9 when gamma < 1.
        const double lo = 1e-300;
        const double hi = std::nextafter(1.0, 0.0);
        CHECK(std::abs(response_prob(wp, RaceLevel{lo}) - c.alpha) < 1e-6);
        CHECK(std::abs(response_prob(wp, RaceLevel{hi}) - c.beta) < 1e-6);
    }
}

TEST_CASE("response_prob reference values")
{
    CHECK(response_prob(to_working({0.2, 0.8, 1.0}), RaceLevel{0.5}) == doctest::Approx(0.5));
    for (double gamma : {1.0, 1.5, 3.0}) {
        CHECK(std::abs(response_prob(to_working({0.2, 0.8, gamma}), RaceLevel{1e-9}) - 0.2) < 1e-6);
    }
    // Below gamma ~ 0.65 the curve has not reached alpha by 1e-9; the limit
    // is still alpha.
    CHECK(std::abs(response_prob(to_working({0.2, 0.8, 0.3}), RaceLevel{1e-9}) - 0.2) > 1e-4);
    CHECK(std::abs(response_prob(to_working({0.2, 0.8, 0.3}), RaceLevel{1e-300}) - 0.2) < 1e-6);
    CHECK(response_prob(to_working({0.8, 0.2, 2.0}), RaceLevel{0.25}) == doctest::Approx(0.74).epsilon(1e-12));
    CHECK(response_prob(to_working({0.3, 0.3, 2.0}), RaceLevel{0.9}) == 0.3);
}

TEST_CASE("response_prob is monotone in the tagged direction and bounded by alpha, beta")
{
    std::mt19937_64 gen(21);
    for (int t = 0; t < 100; ++t) {
        const auto c = random_params(gen);
        const auto wp = to_working(c);
        double prev = response_prob(wp, RaceLevel{0.001});
        for (int i = 2; i < 1000; ++i) {
            const double p = response_prob(wp, RaceLevel{i / 1000.0});
            CHECK(p >= std::min(c.alpha, c.beta));
            CHECK(p <= std::max(c.alpha, c.beta));
            if (wp.direction == Direction::Increasing) CHECK(p >= prev);
            if (wp.direction == Direction::Decreasing) CHECK(p <= prev);
            CHECK(p == doctest::Approx(oracle::curve(c, i / 1000.0)).epsilon(1e-12));
            prev = p;
        }
    }
}

TEST_CASE("log_likelihood")
{
    Dataset one;
    one.add(0.5, 1);
    const auto inc = to_working({0.2, 0.8, 1.0});
    CHECK(log_likelihood(inc, one) == doctest::Approx(std::log(0.5)).epsilon(1e-14));

    std::mt19937_64 gen(3);
    for (int t = 0; t < 50; ++t) {
        const auto c = random_params(gen);
        const auto data = random_dataset(gen, 50);
        const double ll = log_likelihood(to_working(c), data);
        CHECK(std::abs(ll - oracle::bernoulli_loglik(c, data)) < 1e-10);

        Dataset twice = data;
        for (const auto& o : data.observations()) twice.add(o.xi.value(), o.y);
        CHECK(log_likelihood(to_working(c), twice) == doctest::Approx(2.0 * ll).epsilon(1e-13));
    }
}

TEST_CASE("log_likelihood of a flat curve is the constant-probability Bernoulli model")
{
    Dataset d;
    d.add(0.1, 1);
    d.add(0.4, 0);
    d.add(0.9, 0);
    const auto wp = to_working({0.3, 0.3, 1.0});
    CHECK(log_likelihood(wp, d) == doctest::Approx(std::log(0.3) + 2.0 * std::log(0.7)));
    CHECK_THROWS_AS(score(wp, d), DomainError);
    CHECK_THROWS_AS(unit_fisher(wp, RaceLevel{0.3}), DomainError);
    CHECK_THROWS_AS(alpha_beta_jacobian(wp), DomainError);
    CHECK_THROWS_AS(prediction_gradient(wp, RaceLevel{0.3}), DomainError);
}

TEST_CASE("log_likelihood signals degenerate parameters")
{
    Dataset d;
    d.add(1e-300, 0);
    WorkingParams wp{0.0, 2.0, 20.0, Direction::Decreasing, 0.5};
    CHECK_THROWS_AS(log_likelihood(wp, d), NumericError);
    CHECK_THROWS_AS(log_likelihood(to_working({0.2, 0.8, 1.0}), Dataset{}), DomainError);
}

TEST_CASE("score matches central differences of the log-likelihood")
{
    std::mt19937_64 gen(17);
    for (int t = 0; t < 200; ++t) {
        const auto c = random_params(gen);
        const auto data = random_dataset(gen, 40);
        const auto wp = to_working(c);
        const Vec3 s = score(wp, data);
        const double x[3] = {wp.a, wp.b, wp.gamma};
        for (int k = 0; k < 3; ++k) {
            const double h = 1e-5 * std::max(1.0, std::abs(x[k]));
            const auto f = [&](double v) {
                auto w = wp;
                (k == 0 ? w.a : k == 1 ? w.b : w.gamma) = v;
                return oracle::bernoulli_loglik(oracle::natural(w.a, w.b, w.gamma, w.direction), data);
            };
            const double fd = oracle::central_difference(f, x[k], h);
            CHECK(std::abs(s[k] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("score on identical outcomes at one level matches the hand-summed formula")
{
    const auto wp = dec_third();
    Dataset d;
    for (int i = 0; i < 10; ++i) d.add(0.25, 1);
    const double g = 0.25;
    const double dg = 0.25 * 0.75 * std::log(0.25 / 0.75);
    const double s = wp.a + wp.b;
    const Vec3 sc = score(wp, d);
    CHECK(sc[0] == doctest::Approx(0.0 - 10.0 / s));
    CHECK(sc[1] == doctest::Approx(10.0 / (wp.b - g) - 10.0 / s));
    CHECK(sc[2] == doctest::Approx(10.0 * dg * (0.0 - 1.0 / (wp.b - g))));
    CHECK(sc[0] == doctest::Approx(-6.0));
    CHECK(sc[1] == doctest::Approx(42.0 / 13.0));
}

TEST_CASE("unit_fisher entries")
{
    for (const auto& wp : {dec_third(), to_working({0.3, 0.7, 0.6}), to_working({0.9, 0.4, 2.2})}) {
        const Mat3 m = unit_fisher(wp, RaceLevel{0.5});
        CHECK(m(2, 2) == doctest::Approx(0.0));
        CHECK(m(0, 2) == doctest::Approx(0.0));
        CHECK(m(1, 2) == doctest::Approx(0.0));
        for (double xi : {0.05, 0.3, 0.5, 0.77}) {
            const Mat3 f = unit_fisher(wp, RaceLevel{xi});
            const double s = wp.a + wp.b;
            CHECK(f(0, 1) == doctest::Approx(-1.0 / (s * s)));
            CHECK((f - f.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("unit_fisher equals the score covariance (Monte Carlo)")
{
    // Per-observation score takes two values, so E[s s^T] is a two-point
    // average; the Monte-Carlo version draws y and averages outer products.
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& c : {CurveParams{0.8, 0.2, 0.6}, CurveParams{0.25, 0.7, 1.6}}) {
        const auto wp = to_working(c);
        const double xi = 0.2;
        const double pi = oracle::curve(c, xi);
        Dataset one, zero;
        one.add(xi, 1);
        zero.add(xi, 0);
        const Vec3 s1 = score(wp, one);
        const Vec3 s0 = score(wp, zero);
        Mat3 acc = Mat3::Zero();
        const int draws = 200000;
        for (int i = 0; i < draws; ++i) {
            const Vec3& s = u(gen) < pi ? s1 : s0;
            acc += s * s.transpose();
        }
        acc /= draws;
        const Mat3 f = unit_fisher(wp, RaceLevel{xi});
        CHECK((acc - f).norm() / f.norm() < 0.02);
    }
}

TEST_CASE("Fisher information depends on levels only and is PSD")
{
    std::mt19937_64 gen(8);
    for (int t = 0; t < 100; ++t) {
        const auto c = random_params(gen);
        const auto wp = to_working(c);
        const auto d1 = random_dataset(gen, 30);
        Dataset d2;
        for (const auto& o : d1.observations()) d2.add(o.xi.value(), 1 - o.y);
        const Mat3 f1 = fisher(wp, d1);
        CHECK((f1 - fisher(wp, d2)).cwiseAbs().maxCoeff() <= 1e-12 * f1.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Mat3> es(f1);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("three levels symmetric about one half give a singular information matrix")
{
    // The gradient rows satisfy row(x) + row(1 - x) = 2 row(1/2).
    const auto wp = to_working({0.2, 0.8, 0.7});
    Dataset sym, skew;
    for (double xi : {0.01, 0.5, 0.99}) sym.add(xi, 0);
    for (double xi : {0.01, 0.5, 0.8}) skew.add(xi, 0);
    const Mat3 fs = fisher(wp, sym);
    const Mat3 fk = fisher(wp, skew);
    CHECK(std::abs(fs.determinant()) < 1e-12 * fs(0, 0) * fs(1, 1) * fs(2, 2));
    CHECK(fk.determinant() > 1e-6 * fk(0, 0) * fk(1, 1) * fk(2, 2));
}

TEST_CASE("alpha_beta_jacobian")
{
    const Mat2 h = alpha_beta_jacobian(dec_third());
    CHECK(h(0, 0) == doctest::Approx(-0.48));
    CHECK(h(0, 1) == doctest::Approx(-0.12));
    CHECK(h(1, 0) == doctest::Approx(0.12));
    CHECK(h(1, 1) == doctest::Approx(0.48));

    std::mt19937_64 gen(4);
    for (int t = 0; t < 100; ++t) {
        const auto wp = to_working(random_params(gen));
        const Mat2 j = alpha_beta_jacobian(wp);
        for (int row = 0; row < 2; ++row) {
            const double x = row == 0 ? wp.a : wp.b;
            const double h_step = 1e-6 * std::max(1.0, x);
            for (int col = 0; col < 2; ++col) {
                const auto f = [&](double v) {
                    const auto n = oracle::natural(row == 0 ? v : wp.a, row == 1 ? v : wp.b, wp.gamma,
                                                   wp.direction);
                    return col == 0 ? n.alpha : n.beta;
                };
                const double fd = oracle::central_difference(f, x, h_step);
                CHECK(j(row, col) == doctest::Approx(fd).epsilon(1e-6));
            }
        }
        // dbeta - dalpha along a and b: the treatment effect 1/(a+b) changes as -1/(a+b)^2.
        const double s = wp.a + wp.b;
        const double sign = wp.direction == Direction::Increasing ? 1.0 : -1.0;
        CHECK(sign * (j(0, 1) - j(0, 0)) == doctest::Approx(-1.0 / (s * s)));
        CHECK(sign * (j(1, 1) - j(1, 0)) == doctest::Approx(-1.0 / (s * s)));
    }
}

TEST_CASE("prediction_gradient")
{
    auto wp = dec_third();
    CHECK(prediction_gradient(wp, RaceLevel{0.5})[2] == doctest::Approx(0.0));
    CHECK(prediction_gradient(wp, RaceLevel{0.25})[0] == doctest::Approx(-0.39));

    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> xi_d(0.01, 0.99);
    for (int t = 0; t < 200; ++t) {
        wp = to_working(random_params(gen));
        const double xi = xi_d(gen);
        const Vec3 g = prediction_gradient(wp, RaceLevel{xi});
        const double x[3] = {wp.a, wp.b, wp.gamma};
        for (int k = 0; k < 3; ++k) {
            const auto f = [&](double v) {
                auto w = wp;
                (k == 0 ? w.a : k == 1 ? w.b : w.gamma) = v;
                return oracle::curve(oracle::natural(w.a, w.b, w.gamma, w.direction), xi);
            };
            const double fd = oracle::central_difference(f, x[k], 1e-6 * std::max(1.0, x[k]));
            CHECK(std::abs(g[k] - fd) <= 1e-6 * std::max(1e-3, std::abs(fd)));
        }
    }
}

TEST_CASE("unit_fisher equals minus the expected finite-difference Hessian")
{
    const double xi = 0.3;
    for (const auto& c : {CurveParams{0.8, 0.2, 0.6}, CurveParams{0.25, 0.7, 1.6}}) {
        const auto wp = to_working(c);
        const double pi = oracle::curve(c, xi);
        const auto ll = [&](const WorkingParams& w, int y) {
            Dataset d;
            d.add(xi, y);
            return oracle::bernoulli_loglik(oracle::natural(w.a, w.b, w.gamma, w.direction), d);
        };
        const auto shifted = [&](int i, double di, int j, double dj) {
            auto w = wp;
            double* p[3] = {&w.a, &w.b, &w.gamma};
            *p[i] += di;
            *p[j] += dj;
            return w;
        };
        Mat3 h = Mat3::Zero();
        const double step = 1e-4;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int y : {0, 1}) {
                    const double w = y == 1 ? pi : 1.0 - pi;
                    const double d2 = (ll(shifted(i, step, j, step), y) - ll(shifted(i, step, j, -step), y) -
                                       ll(shifted(i, -step, j, step), y) + ll(shifted(i, -step, j, -step), y)) /
                                      (4.0 * step * step);
                    h(i, j) += w * d2;
                }
        const Mat3 f = unit_fisher(wp, RaceLevel{xi});
        CHECK((f + h).norm() / f.norm() < 0.02);
    }
}
