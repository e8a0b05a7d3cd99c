#pragma once

#include <functional>

namespace kesten {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
    int evaluations = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_depth = 60;
    int max_evaluations = 2'000'000;
};

// Adaptive Gauss-Kronrod (7/15) quadrature with recursive bisection on a
// finite interval. Endpoints are never evaluated, so integrable endpoint
// singularities such as log(1 + r) at r = -1 are fine.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureOptions& options = {});

}  // namespace kesten
