#pragma once

namespace kesten::special {

double gamma(double x);
double log_gamma(double x);
double erf(double x);

// Upper regularized incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
double gamma_q(double s, double x);

}  // namespace kesten::special
