#pragma once

#include <cstdint>
#include <string_view>

#include "kesten/return_process.hpp"

namespace kesten {

enum class MomentMethod { ExactEnumeration, Quadrature, MonteCarlo };

std::string_view to_string(MomentMethod method);

// <log lambda> and D = <log^2 lambda> - <log lambda>^2 for lambda = 1 + q0 r.
struct LogLambdaMoments {
    double mean_log_lambda = 0.0;
    double diffusion = 0.0;
    // Zero for the deterministic methods.
    double mean_standard_error = 0.0;
    double diffusion_standard_error = 0.0;
    MomentMethod method = MomentMethod::ExactEnumeration;
};

struct MonteCarloOptions {
    std::uint64_t draws = 10'000'000;
    std::uint64_t seed = 0x5eed;
};

// Binary: two-point enumeration. Uniform and Normal: adaptive quadrature over
// the (truncated) density. ARCH(1): a long single-stream Monte Carlo run with
// batch-means standard errors. Throws EstimationError if quadrature fails to
// converge and DomainError if lambda can reach zero with positive probability.
LogLambdaMoments log_lambda_moments(const ReturnProcessSpec& process, double q0,
                                    const MonteCarloOptions& mc = {});

}  // namespace kesten
