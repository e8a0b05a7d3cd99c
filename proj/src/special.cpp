#include "kesten/special.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

namespace kesten::special {

double gamma(double x) { return std::tgamma(x); }

double log_gamma(double x) { return std::lgamma(x); }

double erf(double x) { return std::erf(x); }

double gamma_q(double s, double x) { return boost::math::gamma_q(s, x); }

}  // namespace kesten::special
