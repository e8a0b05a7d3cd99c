#include <doctest.h>

#include <cmath>
#include <limits>

#include "kesten/budget.hpp"
#include "kesten/errors.hpp"

using namespace kesten;

TEST_CASE("single steps") {
    CHECK(step(10.0, 1.0, 0.1, 0.5) == doctest::Approx(11.5).epsilon(1e-15));
    CHECK(step(10.0, -1.0, 1.0, 0.5) == 0.5);
    for (double r : {-0.99, -0.3, 0.0, 0.4, 1.0}) {
        CHECK(step(0.0, r, 0.1, 0.5) == 0.5);
    }
}

TEST_CASE("step rejects out-of-domain arguments") {
    CHECK_THROWS_AS(step(-1.0, 0.0, 0.1, 0.5), ConfigError);
    CHECK_THROWS_AS(step(1.0, 0.0, 1.5, 0.5), ConfigError);
    CHECK_THROWS_AS(step(1.0, 0.0, 0.1, -0.5), ConfigError);
    CHECK_THROWS_AS(step(std::numeric_limits<double>::infinity(), 0.0, 0.1, 0.5), ConfigError);
    CHECK_THROWS_AS(step(1.0, std::nan(""), 0.1, 0.5), ConfigError);
}

TEST_CASE("InvestorParams validation") {
    CHECK_NOTHROW((InvestorParams{10, 0.1, 0.5}.validate()));
    CHECK_NOTHROW((InvestorParams{10, 0.0, 0.5}.validate()));
    CHECK_THROWS_AS((InvestorParams{0, 0.1, 0.5}.validate()), ConfigError);
    CHECK_THROWS_AS((InvestorParams{10, 1.1, 0.5}.validate()), ConfigError);
    CHECK_THROWS_AS((InvestorParams{10, 0.1, 0.0}.validate()), ConfigError);
    CHECK_NOTHROW((InvestorParams{10, 0.1, 0.0}.validate(true)));
}

TEST_CASE("zero risk propensity gives linear growth exactly") {
    const auto traj = simulate_agent({10.0, 0.0, 0.5}, ReturnProcessSpec::normal(0.3), 1000, {1, 0, 0});
    REQUIRE(traj.values.size() == 1001);
    for (std::size_t t = 0; t < traj.values.size(); ++t) {
        REQUIRE(traj.values[t] == 10.0 + 0.5 * static_cast<double>(t));
    }
}

TEST_CASE("without income the log budget telescopes into the sum of log multipliers") {
    const StreamKey key{3, 4, 5};
    const auto spec = ReturnProcessSpec::binary();
    const auto traj = simulate_agent({10.0, 0.1, 0.0}, spec, 2000, key);
    ProcessState st(key);
    double log_sum = 0.0;
    for (std::size_t t = 1; t < traj.values.size(); ++t) {
        log_sum += std::log1p(0.1 * sample_return(spec, st));
        REQUIRE(std::abs(std::log(traj.values[t]) - std::log(10.0) - log_sum) < 1e-9);
    }
}

TEST_CASE("every post-step budget is at least the income") {
    for (const auto& spec : {ReturnProcessSpec::binary(), ReturnProcessSpec::uniform(),
                             ReturnProcessSpec::normal(0.5), ReturnProcessSpec::arch1(0.1, 0.5)}) {
        for (double q0 : {0.1, 0.9, 1.0}) {
            const auto traj = simulate_agent({10.0, q0, 0.5}, spec, 5000, {8, 1, 0});
            for (std::size_t t = 1; t < traj.values.size(); ++t) {
                REQUIRE(traj.values[t] >= 0.5);
            }
        }
    }
}

TEST_CASE("binary agent at q0 = 0.1, a = 0.5 stays positive and finite") {
    const auto traj = simulate_agent({10.0, 0.1, 0.5}, ReturnProcessSpec::binary(), 10'000, {1, 0, 0});
    CHECK_FALSE(traj.diverged);
    CHECK(traj.values.back() > 0.0);
    CHECK(std::isfinite(traj.values.back()));
}

TEST_CASE("closed form for constant multipliers") {
    CHECK(closed_form_constant_lambda(10, 0.5, 1, 2) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(std::abs(closed_form_constant_lambda(10, 0.5, 1, 200) - 2.0) < 1e-9);
    CHECK(closed_form_constant_lambda(10, 1.0, 1, 7) == 17.0);
    CHECK(closed_form_constant_lambda(10, 0.3, 1, 0) == 10.0);
}

TEST_CASE("closed form equals iteration of the map with constant return") {
    // lambda = -0.9 needs r = -19 with q0 = 0.1, so the unchecked step is used.
    constexpr double q0 = 0.1;
    for (double lambda : {-0.9, 0.5, 0.99, 1.0, 1.01}) {
        CAPTURE(lambda);
        const double r = (lambda - 1.0) / q0;
        double x = 10.0;
        double worst = 0.0;
        for (std::int64_t t = 1; t <= 1000; ++t) {
            x = x * (1.0 + r * q0) + 1.0;
            const double closed = closed_form_constant_lambda(10.0, lambda, 1.0, t);
            worst = std::max(worst, std::abs(x - closed) / std::abs(closed));
        }
        CHECK(worst < 1e-9);
    }
}
