#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "kesten/ensemble.hpp"
#include "kesten/errors.hpp"
#include "kesten/moments.hpp"
#include "kesten/theory.hpp"

using namespace kesten;

namespace {

std::vector<ReturnProcessSpec> all_kinds() {
    return {ReturnProcessSpec::binary(), ReturnProcessSpec::uniform(), ReturnProcessSpec::uniform(0.7),
            ReturnProcessSpec::normal(0.1), ReturnProcessSpec::normal(0.8),
            ReturnProcessSpec::arch1(0.1, 0.1), ReturnProcessSpec::arch1(0.5, 0.9)};
}

double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

}  // namespace

TEST_CASE("ensemble agents reproduce the single-agent simulation bit for bit") {
    // 37 agents cover one full lane block plus a scalar remainder.
    const std::vector<std::int64_t> times = {0, 1, 7, 64, 65, 300};
    for (const auto& spec : all_kinds()) {
        CAPTURE(describe(spec));
        const InvestorParams params{10.0, 0.7, 0.5};
        const RunBudgets run = simulate_run(params, spec, 37, times, 99, 3);
        REQUIRE(run.budgets.size() == times.size());
        for (std::size_t i = 0; i < 37; ++i) {
            const auto traj = simulate_agent(params, spec, times.back(), {99, i, 3});
            for (std::size_t k = 0; k < times.size(); ++k) {
                REQUIRE(run.budgets[k][i] == traj.values[static_cast<std::size_t>(times[k])]);
            }
        }
    }
}

TEST_CASE("snapshots do not depend on the worker count") {
    SimulationConfig cfg;
    cfg.n_agents = 1000;
    cfg.t_max = 500;
    cfg.snapshot_times = {10, 100, 500};
    cfg.n_runs = 2;
    for (const auto& spec : all_kinds()) {
        CAPTURE(describe(spec));
        cfg.process = spec;
        const auto one = simulate_ensemble(cfg, 1);
        const auto eight = simulate_ensemble(cfg, 8);
        REQUIRE(one.snapshots.size() == 6);
        for (std::size_t s = 0; s < one.snapshots.size(); ++s) {
            CHECK(one.snapshots[s].time == eight.snapshots[s].time);
            CHECK(one.snapshots[s].run_index == eight.snapshots[s].run_index);
            CHECK(one.snapshots[s].budgets == eight.snapshots[s].budgets);
        }
    }
}

TEST_CASE("snapshots are ordered by run, then time") {
    SimulationConfig cfg;
    cfg.n_agents = 3;
    cfg.t_max = 20;
    cfg.snapshot_times = {0, 5, 20};
    cfg.n_runs = 2;
    const auto res = simulate_ensemble(cfg);
    REQUIRE(res.snapshots.size() == 6);
    CHECK(res.snapshots[0].run_index == 0);
    CHECK(res.snapshots[2].time == 20);
    CHECK(res.snapshots[3].run_index == 1);
    CHECK(res.snapshots[3].time == 0);
    CHECK(res.snapshots[0].budgets == std::vector<double>(3, 10.0));
    CHECK(res.snapshots[2].budgets != res.snapshots[5].budgets);
}

TEST_CASE("an ensemble of one is the single-agent simulation") {
    SimulationConfig cfg;
    cfg.n_agents = 1;
    cfg.t_max = 1000;
    cfg.snapshot_times = {1000};
    cfg.master_seed = 17;
    cfg.process = ReturnProcessSpec::normal(0.3);
    cfg.record_trajectories = true;
    const auto res = simulate_ensemble(cfg);
    const auto traj = simulate_agent(cfg.params, cfg.process, 1000, {17, 0, 0});
    CHECK(res.snapshots[0].budgets[0] == traj.values.back());
    REQUIRE(res.trajectories.size() == 1);
    CHECK(res.trajectories[0][0] == traj.values);
}

TEST_CASE("binary ensemble at q0 = 0.1, a = 0.5 settles on the stationary law") {
    SimulationConfig cfg;
    cfg.params = {10.0, 0.1, 0.5};
    cfg.snapshot_times = {10'000};
    const auto res = simulate_ensemble(cfg);
    CHECK(res.n_diverged == 0);
    const auto& x = res.snapshots[0].budgets;
    CHECK(std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.5 && std::isfinite(v); }));

    const auto m = log_lambda_moments(ReturnProcessSpec::binary(), 0.1);
    const double mu = mu_exponent(m.mean_log_lambda, m.diffusion);
    const double beta = 2 * 0.5 / m.diffusion;
    // Median of the inverse gamma law: beta / P^-1(mu, 1/2).
    const double oracle_median = beta / boost::math::gamma_p_inv(mu, 0.5);
    CHECK(oracle_median > 100.0);
    const double med = median(x);
    CHECK(std::abs(med - oracle_median) / oracle_median < 0.05);
}

TEST_CASE("pure multiplicative binary ensemble is lognormal in the mean and variance of log x") {
    SimulationConfig cfg;
    cfg.params = {10.0, 0.1, 0.0};
    cfg.lognormal_limit = true;
    cfg.t_max = 1000;
    cfg.snapshot_times = {1000};
    const auto res = simulate_ensemble(cfg);
    const auto& x = res.snapshots[0].budgets;
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += std::log(v / 10.0);
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = std::log(v / 10.0) - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double var = m2 / (n - 1);
    m4 /= n;
    const auto m = log_lambda_moments(ReturnProcessSpec::binary(), 0.1);
    const double t = 1000.0;
    const double mean_se = std::sqrt(var / n);
    const double var_se = std::sqrt((m4 - var * var) / n);
    CHECK(std::abs(mean - m.mean_log_lambda * t) < 3 * mean_se);
    CHECK(std::abs(var - m.diffusion * t) < 3 * var_se);
}

TEST_CASE("simulation config validation") {
    SimulationConfig cfg;
    cfg.n_agents = 10;
    cfg.t_max = 100;
    cfg.snapshot_times = {};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.snapshot_times = {10, 200};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.snapshot_times = {50, 10};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.snapshot_times = {10, 100};
    CHECK_NOTHROW(cfg.validate());

    cfg.n_agents = 101;
    cfg.record_trajectories = true;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.record_trajectories = false;

    cfg.params.a = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.lognormal_limit = true;
    CHECK_NOTHROW(cfg.validate());

    cfg.n_agents = 10'000'000;
    cfg.memory_limit_bytes = 1 << 20;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(simulate_ensemble(cfg), ConfigError);
}
