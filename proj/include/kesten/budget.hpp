#pragma once

#include <cstdint>
#include <vector>

#include "kesten/return_process.hpp"

namespace kesten {

// Budgets above this are treated as a divergence.
inline constexpr double kDivergenceThreshold = 1e300;

struct InvestorParams {
    double x0 = 10.0;  // initial budget
    double q0 = 0.1;   // constant fraction of the budget invested each step
    double a = 0.5;    // constant income per step

    // q0 = 0 is accepted (it switches the multiplicative noise off). a = 0 is
    // accepted only when the caller explicitly asks for the lognormal limit.
    void validate(bool allow_zero_income = false) const;

    friend bool operator==(const InvestorParams&, const InvestorParams&) = default;
};

// Single update x -> x (1 + r q0) + a, without argument checks.
inline double step_unchecked(double x, double r, double q0, double a) noexcept {
    const double lambda = 1.0 + r * q0;
    return x * lambda + a;
}

// Checked update; throws ConfigError on non-finite or out-of-domain input.
double step(double x, double r, double q0, double a);

struct Trajectory {
    std::vector<double> values;  // t_max + 1 entries, values[0] = x0
    bool diverged = false;
};

Trajectory simulate_agent(const InvestorParams& params, const ReturnProcessSpec& process,
                          std::int64_t t_max, const StreamKey& stream);

// lambda^t x0 + a (1 - lambda^t) / (1 - lambda), or x0 + a t when lambda = 1.
// Converges to a / (1 - lambda) for |lambda| < 1 and diverges otherwise.
double closed_form_constant_lambda(double x0, double lambda, double a, std::int64_t t);

}  // namespace kesten
