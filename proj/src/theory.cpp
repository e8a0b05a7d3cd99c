#include "kesten/theory.hpp"

#include <cmath>
#include <numbers>

#include "kesten/errors.hpp"
#include "kesten/special.hpp"

namespace kesten {

double mu_exponent(double mean_log_lambda, double diffusion) {
    if (!(mean_log_lambda < 0.0) || !std::isfinite(mean_log_lambda)) {
        throw DomainError("stationarity requires a finite <log lambda> < 0");
    }
    if (!(diffusion > 0.0)) {
        throw DomainError("stationarity requires D > 0");
    }
    return -2.0 * mean_log_lambda / diffusion;
}

namespace {

void require_stationary_args(double a, double diffusion, double mu) {
    if (!(mu > 0.0)) {
        throw DomainError("stationary density diverges for mu <= 0");
    }
    if (!(a > 0.0) || !(diffusion > 0.0)) {
        throw DomainError("stationary density needs a > 0 and D > 0");
    }
}

}  // namespace

double stationary_density(double x, double a, double diffusion, double mu) {
    require_stationary_args(a, diffusion, mu);
    if (!(x > 0.0)) {
        return 0.0;
    }
    const double beta = 2.0 * a / diffusion;
    return std::exp(mu * std::log(beta) - special::log_gamma(mu) - (1.0 + mu) * std::log(x) -
                    beta / x);
}

double stationary_cdf(double x, double a, double diffusion, double mu) {
    require_stationary_args(a, diffusion, mu);
    if (!(x > 0.0)) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    return special::gamma_q(mu, 2.0 * a / (diffusion * x));
}

double predicted_mode(double a, double diffusion, double mu) {
    require_stationary_args(a, diffusion, mu);
    return 2.0 * a / (diffusion * (1.0 + mu));
}

double printed_mode_variant(double a, double diffusion, double mean_log_lambda) {
    return a / (diffusion - mean_log_lambda);
}

double approx_mode(double a, double q0, double second_moment) {
    if (!(a > 0.0) || !(q0 > 0.0) || !(second_moment > 0.0)) {
        throw DomainError("approx_mode needs positive a, q0 and <r^2>");
    }
    return a / (q0 * q0 * second_moment);
}

double scaling_prefactor(const ReturnProcessSpec& process) {
    return 1.0 / analytic_second_moment(process);
}

double lognormal_density(double x, long t, double mean_log_lambda, double diffusion) {
    if (t < 1 || !(diffusion > 0.0)) {
        throw DomainError("lognormal_density needs t >= 1 and D > 0");
    }
    if (!(x > 0.0)) {
        return 0.0;
    }
    const double dt = diffusion * static_cast<double>(t);
    const double dev = std::log(x) - mean_log_lambda * static_cast<double>(t);
    return std::exp(-dev * dev / dt) / (std::sqrt(std::numbers::pi * dt) * x);
}

TheoryPrediction predict(const ReturnProcessSpec& process, double q0, double a,
                         const MonteCarloOptions& mc) {
    if (!(q0 > 0.0 && q0 <= 1.0)) {
        throw DomainError("theory needs q0 in (0, 1]; q0 = 0 has no multiplicative noise (D = 0)");
    }
    if (!(a > 0.0)) {
        throw DomainError("theory needs a > 0");
    }
    TheoryPrediction p;
    p.moments = log_lambda_moments(process, q0, mc);
    p.mean_log_lambda = p.moments.mean_log_lambda;
    p.diffusion = p.moments.diffusion;
    p.mu = mu_exponent(p.mean_log_lambda, p.diffusion);
    p.x_mp_exact = predicted_mode(a, p.diffusion, p.mu);
    p.x_mp_paper = printed_mode_variant(a, p.diffusion, p.mean_log_lambda);
    p.c = scaling_prefactor(process);
    p.x_mp_approx = approx_mode(a, q0, analytic_second_moment(process));
    return p;
}

}  // namespace kesten
