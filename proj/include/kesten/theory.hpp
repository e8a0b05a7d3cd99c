#pragma once

#include "kesten/moments.hpp"
#include "kesten/return_process.hpp"

namespace kesten {

// mu = -2 <log lambda> / D. Throws DomainError unless <log lambda> < 0 and D > 0
// (otherwise the stationary density cannot be normalized).
double mu_exponent(double mean_log_lambda, double diffusion);

// Inverse-gamma stationary density
//   P(x) = (2a/D)^mu / Gamma(mu) * x^-(1+mu) * exp(-2a / (D x)),
// which follows the pure power law x^-(1+mu) once 2a/(D x) is small.
double stationary_density(double x, double a, double diffusion, double mu);

// P(X <= x) for the stationary density: Q(mu, 2a / (D x)).
double stationary_cdf(double x, double a, double diffusion, double mu);

// Exact argmax of stationary_density: 2a / (D (1 + mu)).
double predicted_mode(double a, double diffusion, double mu);

// The alternative mode expression a / (D - <log lambda>), kept for comparison.
// It weights D twice as heavily as the argmax of the density does.
double printed_mode_variant(double a, double diffusion, double mean_log_lambda);

// Small-q0 approximation a / (q0^2 <r^2>).
double approx_mode(double a, double q0, double second_moment);

// c in x_mp = c a / q0^2, i.e. 1 / <r^2>.
double scaling_prefactor(const ReturnProcessSpec& process);

// Pure multiplicative (a = 0) limit in the normalization
//   (1 / sqrt(pi D t)) (1/x) exp(-(log x - <log lambda> t)^2 / (D t)),
// a Gaussian in log x of variance D t / 2. The discrete map itself spreads
// log x with variance D t; callers comparing against simulated ensembles
// should use that directly.
double lognormal_density(double x, long t, double mean_log_lambda, double diffusion);

struct TheoryPrediction {
    double mean_log_lambda = 0.0;
    double diffusion = 0.0;
    double mu = 0.0;
    double x_mp_exact = 0.0;
    double x_mp_paper = 0.0;
    double x_mp_approx = 0.0;
    double c = 0.0;
    LogLambdaMoments moments;  // provenance of the first two fields
};

TheoryPrediction predict(const ReturnProcessSpec& process, double q0, double a,
                         const MonteCarloOptions& mc = {});

}  // namespace kesten
