#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include "kesten/errors.hpp"
#include "kesten/moments.hpp"
#include "kesten/theory.hpp"

using namespace kesten;

namespace {

// Integral over (0, inf) of f(x) dx, computed as the integral over w = log x of f(e^w) e^w.
template <class F>
double integrate_positive_axis(F&& f) {
    boost::math::quadrature::sinh_sinh<double> integrator;
    return integrator.integrate([&](double w) {
        const double x = std::exp(w);
        return x > 0.0 && std::isfinite(x) ? f(x) * x : 0.0;
    }, 1e-13);
}

double grid_argmax(auto&& f, double lo, double hi, double step_ratio) {
    double best_x = lo;
    double best = -1.0;
    for (double x = lo; x < hi; x *= step_ratio) {
        const double v = f(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    return best_x;
}

}  // namespace

TEST_CASE("tail exponent") {
    CHECK(mu_exponent(-0.005, 0.01) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mu_exponent(-0.01, 0.01) == doctest::Approx(2.0).epsilon(1e-15));
    const auto m = log_lambda_moments(ReturnProcessSpec::binary(), 0.1);
    // Exact value 0.9983266...; 0.99834 is a five-digit approximation.
    CHECK(std::abs(mu_exponent(m.mean_log_lambda, m.diffusion) - 0.998326627) < 1e-9);
    CHECK(std::abs(mu_exponent(m.mean_log_lambda, m.diffusion) - 0.99834) < 5e-5);
    CHECK_THROWS_AS(mu_exponent(0.0, 0.01), DomainError);
    CHECK_THROWS_AS(mu_exponent(0.001, 0.01), DomainError);
    CHECK_THROWS_AS(mu_exponent(-0.001, 0.0), DomainError);
}

TEST_CASE("stationary density integrates to one over the parameter grid") {
    for (double a : {0.1, 1.0, 10.0}) {
        for (double d : {0.001, 0.01, 1.0}) {
            for (double mu : {0.5, 1.0, 2.0}) {
                CAPTURE(a);
                CAPTURE(d);
                CAPTURE(mu);
                const double total = integrate_positive_axis([&](double x) { return stationary_density(x, a, d, mu); });
                CHECK(std::abs(total - 1.0) < 1e-8);
            }
        }
    }
}

TEST_CASE("grid argmax of the density agrees with the predicted mode") {
    constexpr double ratio = 1.0 + 1e-4;
    for (double a : {0.1, 1.0, 10.0}) {
        for (double d : {0.001, 0.01, 1.0}) {
            for (double mu : {0.5, 1.0, 2.0}) {
                const double mode = predicted_mode(a, d, mu);
                const double found = grid_argmax([&](double x) { return stationary_density(x, a, d, mu); },
                                                 mode / 10, mode * 10, ratio);
                CHECK(std::abs(found / mode - 1.0) < 2 * (ratio - 1.0));
            }
        }
    }
    const double binary_mode = grid_argmax(
        [](double x) { return stationary_density(x, 0.5, 0.0100675, 0.99834); }, 1.0, 1000.0, ratio);
    CHECK(std::abs(binary_mode / predicted_mode(0.5, 0.0100675, 0.99834) - 1.0) < 2 * (ratio - 1.0));
}

TEST_CASE("mode expressions") {
    // 1 / (0.0100675 * 1.99834) = 49.706; exact binary moments give 49.708.
    CHECK(std::abs(predicted_mode(0.5, 0.0100675, 0.99834) - 49.706019) < 1e-6);
    CHECK(std::abs(predicted_mode(0.5, 0.0100675, 0.99834) - 49.72) < 0.02);
    CHECK(predicted_mode(1, 2, 1) == 0.5);
    CHECK(printed_mode_variant(1.0, 0.01, -0.005) == doctest::Approx(1.0 / 0.015).epsilon(1e-15));
    // The alternative expression sits a third below the density's argmax at mu = 1.
    CHECK(printed_mode_variant(1.0, 0.01, -0.005) / predicted_mode(1.0, 0.01, 1.0) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(approx_mode(0.5, 0.1, 1.0) == doctest::Approx(50.0).epsilon(1e-15));
    CHECK(approx_mode(1.0, 0.1, 0.01) == doctest::Approx(1e4).epsilon(1e-15));
    CHECK(approx_mode(1.0, 1.0, 1.0 / 3) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(approx_mode(1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("scaling prefactors") {
    CHECK(scaling_prefactor(ReturnProcessSpec::binary()) == 1.0);
    CHECK(scaling_prefactor(ReturnProcessSpec::uniform()) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(scaling_prefactor(ReturnProcessSpec::normal(0.1)) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(scaling_prefactor(ReturnProcessSpec::arch1(0.1, 0.1)) == doctest::Approx(9.0).epsilon(1e-14));
}

TEST_CASE("log-log slope of the density approaches -(1 + mu) as 2a/(D x)") {
    for (double mu : {0.5, 1.0, 2.0}) {
        const double a = 1.0, d = 0.01;
        const double beta = 2 * a / d;
        const auto log_p = [&](double x) { return std::log(stationary_density(x, a, d, mu)); };
        for (double k : {2e3, 1e4, 1e6}) {
            const double x = k * beta;
            const double h = 1e-3;
            const double slope = (log_p(x * std::exp(h)) - log_p(x * std::exp(-h))) / (2 * h);
            CHECK(std::abs(slope + (1 + mu)) < 1e-3);
            CHECK(std::abs(slope + (1 + mu) - beta / x) < 1e-7);
        }
    }
}

TEST_CASE("stationary CDF is the integral of the density") {
    using boost::math::quadrature::gauss_kronrod;
    const double a = 1.0, d = 0.01;
    for (double mu : {0.5, 1.0, 2.0}) {
        for (double x : {20.0, 100.0, 1000.0}) {
            const double q = gauss_kronrod<double, 61>::integrate(
                [&](double u) { return stationary_density(u, a, d, mu); }, 0.0, x, 40, 1e-14);
            CHECK(std::abs(stationary_cdf(x, a, d, mu) - q) < 1e-10);
        }
        CHECK(stationary_cdf(1e-3, a, d, mu) < 1e-12);
        CHECK(stationary_cdf(1e12, a, d, mu) > 0.999);
    }
    CHECK(stationary_density(0.0, a, d, 1.0) == 0.0);
    CHECK_THROWS_AS(stationary_density(1.0, a, d, 0.0), DomainError);
}

TEST_CASE("lognormal limit density") {
    const double m = -0.005, d = 0.01;
    for (long t : {1L, 100L, 1000L}) {
        const double tt = static_cast<double>(t);
        const double total = integrate_positive_axis([&](double x) { return lognormal_density(x, t, m, d); });
        CHECK(std::abs(total - 1.0) < 1e-8);

        const double peak = std::exp(m * tt - d * tt / 2);
        const double found = grid_argmax([&](double x) { return lognormal_density(x, t, m, d); },
                                         peak / 5, peak * 5, 1.0 + 1e-5);
        CHECK(std::abs(found / peak - 1.0) < 2e-5);

        for (double s : {0.1, 0.5, 2.0}) {
            const double up = std::exp(m * tt + s), down = std::exp(m * tt - s);
            CHECK(lognormal_density(up, t, m, d) * up ==
                  doctest::Approx(lognormal_density(down, t, m, d) * down).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(lognormal_density(1.0, 0, m, d), DomainError);
}

TEST_CASE("approximate mode converges to the exact mode at small q0") {
    constexpr double q = 1e-2;
    for (const auto& spec : {ReturnProcessSpec::binary(), ReturnProcessSpec::uniform(),
                             ReturnProcessSpec::normal(0.1), ReturnProcessSpec::normal(0.5)}) {
        CAPTURE(describe(spec));
        const auto p = predict(spec, q, 1.0);
        CHECK(std::abs(p.x_mp_approx / p.x_mp_exact - 1.0) < 0.01);
    }
    // Truncation lowers the ARCH(1) <r^2> by 3%, so the comparison uses the sampled value.
    const auto arch = ReturnProcessSpec::arch1(0.1, 0.1);
    const auto p = predict(arch, q, 1.0);
    const Estimate r2 = monte_carlo_second_moment(arch, 10'000'000, 1);
    CHECK(std::abs(approx_mode(1.0, q, r2.value) / p.x_mp_exact - 1.0) < 0.01);
}

TEST_CASE("full prediction") {
    const auto p = predict(ReturnProcessSpec::binary(), 0.1, 0.5);
    CHECK(std::abs(p.mu - 0.998) < 0.001);
    CHECK(std::abs(p.x_mp_exact - 49.7) < 0.05);
    CHECK(p.c == 1.0);
    CHECK(p.x_mp_approx == doctest::Approx(50.0));
    CHECK(p.x_mp_paper < p.x_mp_exact);
    CHECK(p.mu == doctest::Approx(-2 * p.mean_log_lambda / p.diffusion).epsilon(1e-15));
    CHECK(p.x_mp_exact == doctest::Approx(2 * 0.5 / (p.diffusion * (1 + p.mu))).epsilon(1e-15));

    CHECK(predict(ReturnProcessSpec::arch1(0.1, 0.1), 0.1, 0.5).c == doctest::Approx(9.0));
    CHECK_THROWS_AS(predict(ReturnProcessSpec::binary(), 0.0, 0.5), DomainError);
    CHECK_THROWS_AS(predict(ReturnProcessSpec::binary(), 0.1, 0.0), DomainError);
}
