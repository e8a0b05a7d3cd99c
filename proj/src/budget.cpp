#include "kesten/budget.hpp"

#include <cmath>
#include <string>

#include "kesten/errors.hpp"

namespace kesten {

void InvestorParams::validate(bool allow_zero_income) const {
    if (!(x0 > 0.0) || !std::isfinite(x0)) {
        throw ConfigError("params.x0 must be a finite positive number");
    }
    if (!(q0 >= 0.0 && q0 <= 1.0)) {
        throw ConfigError("params.q0 must lie in [0, 1]");
    }
    if (!std::isfinite(a) || a < 0.0) {
        throw ConfigError("params.a must be a finite non-negative number");
    }
    if (a == 0.0 && !allow_zero_income) {
        throw ConfigError("params.a must be positive (a = 0 requires lognormal_limit)");
    }
}

double step(double x, double r, double q0, double a) {
    if (!std::isfinite(x) || !std::isfinite(r) || !std::isfinite(q0) || !std::isfinite(a)) {
        throw ConfigError("step: non-finite input");
    }
    if (x < 0.0 || r < -1.0 || q0 < 0.0 || q0 > 1.0 || a < 0.0) {
        throw ConfigError("step: requires x >= 0, r >= -1, 0 <= q0 <= 1, a >= 0");
    }
    return step_unchecked(x, r, q0, a);
}

Trajectory simulate_agent(const InvestorParams& params, const ReturnProcessSpec& process,
                          std::int64_t t_max, const StreamKey& stream) {
    params.validate(true);
    if (t_max < 1) {
        throw ConfigError("t_max must be at least 1");
    }
    Trajectory out;
    out.values.resize(static_cast<std::size_t>(t_max) + 1);
    ProcessState state(stream);
    double x = params.x0;
    out.values[0] = x;
    for (std::int64_t t = 0; t < t_max; ++t) {
        x = step_unchecked(x, sample_return(process, state), params.q0, params.a);
        out.values[static_cast<std::size_t>(t) + 1] = x;
        out.diverged |= !(x <= kDivergenceThreshold);
    }
    return out;
}

double closed_form_constant_lambda(double x0, double lambda, double a, std::int64_t t) {
    if (t < 0) {
        throw ConfigError("closed_form_constant_lambda: t must be non-negative");
    }
    const double tt = static_cast<double>(t);
    if (lambda == 1.0) {
        return x0 + a * tt;
    }
    const double power = std::pow(lambda, tt);
    return power * x0 + a * (1.0 - power) / (1.0 - lambda);
}

}  // namespace kesten
