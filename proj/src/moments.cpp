#include "kesten/moments.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "kesten/errors.hpp"
#include "kesten/quadrature.hpp"

namespace kesten {

std::string_view to_string(MomentMethod method) {
    switch (method) {
        case MomentMethod::ExactEnumeration: return "exact";
        case MomentMethod::Quadrature: return "quadrature";
        case MomentMethod::MonteCarlo: return "monte_carlo";
    }
    return "unknown";
}

namespace {

double integrate_or_throw(const std::function<double(double)>& f, std::vector<double> breaks,
                          const char* what) {
    QuadratureOptions opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-12;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const QuadratureResult r = integrate(f, breaks[i], breaks[i + 1], opt);
        if (!r.converged) {
            std::ostringstream os;
            os << "log_lambda_moments: quadrature for " << what
               << " did not converge (achieved error " << r.error_estimate << ")";
            throw EstimationError(os.str());
        }
        total += r.value;
    }
    return total;
}

LogLambdaMoments by_quadrature(const std::function<double(double)>& density,
                               std::vector<double> breaks, double q0) {
    const auto log_lambda = [q0](double r) { return std::log1p(q0 * r); };
    const double m1 = integrate_or_throw(
        [&](double r) { return log_lambda(r) * density(r); }, breaks, "<log lambda>");
    const double m2 = integrate_or_throw(
        [&](double r) {
            const double l = log_lambda(r) - m1;
            return l * l * density(r);
        },
        breaks, "<log^2 lambda>");
    LogLambdaMoments m;
    m.mean_log_lambda = m1;
    m.diffusion = m2;
    m.method = MomentMethod::Quadrature;
    return m;
}

LogLambdaMoments by_monte_carlo(const ReturnProcessSpec& process, double q0,
                                const MonteCarloOptions& mc) {
    constexpr std::uint64_t kBatches = 100;
    if (mc.draws < kBatches * 10) {
        throw ConfigError("log_lambda_moments: Monte Carlo needs at least 1000 draws");
    }
    ProcessState state(StreamKey{mc.seed, 0, 0});
    const std::uint64_t per_batch = mc.draws / kBatches;
    std::vector<double> batch_mean(kBatches);
    std::vector<double> batch_sq(kBatches);
    for (std::uint64_t b = 0; b < kBatches; ++b) {
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::uint64_t i = 0; i < per_batch; ++i) {
            const double r = sample_return(process, state);
            const double l = std::log1p(q0 * r);
            // r is symmetric, so q0 r has mean zero; subtracting it removes the
            // leading-order noise from the mean (a control variate).
            s1 += l - q0 * r;
            s2 += l * l;
        }
        batch_mean[b] = s1 / static_cast<double>(per_batch);
        batch_sq[b] = s2 / static_cast<double>(per_batch);
    }
    const double nb = static_cast<double>(kBatches);
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::uint64_t b = 0; b < kBatches; ++b) {
        m1 += batch_mean[b];
        m2 += batch_sq[b];
    }
    m1 /= nb;
    m2 /= nb;
    // Batch-level D estimates give the spread of D without a delta-method expansion.
    double var_m1 = 0.0;
    double var_d = 0.0;
    const double d = m2 - m1 * m1;
    for (std::uint64_t b = 0; b < kBatches; ++b) {
        const double db = batch_sq[b] - batch_mean[b] * batch_mean[b];
        var_m1 += (batch_mean[b] - m1) * (batch_mean[b] - m1);
        var_d += (db - d) * (db - d);
    }
    LogLambdaMoments m;
    m.mean_log_lambda = m1;
    m.diffusion = d;
    m.mean_standard_error = std::sqrt(var_m1 / (nb - 1.0) / nb);
    m.diffusion_standard_error = std::sqrt(var_d / (nb - 1.0) / nb);
    m.method = MomentMethod::MonteCarlo;
    return m;
}

}  // namespace

LogLambdaMoments log_lambda_moments(const ReturnProcessSpec& process, double q0,
                                    const MonteCarloOptions& mc) {
    if (!(q0 > 0.0 && q0 <= 1.0)) {
        throw ConfigError("log_lambda_moments: q0 must lie in (0, 1]");
    }
    switch (process.kind()) {
        case ProcessKind::Binary: {
            if (q0 >= 1.0) {
                throw DomainError("binary returns with q0 = 1 reach lambda = 0: <log lambda> = -inf");
            }
            const double up = std::log1p(q0);
            const double down = std::log1p(-q0);
            LogLambdaMoments m;
            m.mean_log_lambda = 0.5 * (up + down);
            const double half_gap = 0.5 * (up - down);
            m.diffusion = half_gap * half_gap;
            m.method = MomentMethod::ExactEnumeration;
            return m;
        }
        case ProcessKind::Uniform: {
            const double c = process.bound();
            if (q0 * c > 1.0) {
                throw DomainError("uniform returns with q0 * bound > 1 make lambda negative");
            }
            return by_quadrature([c](double) { return 0.5 / c; }, {-c, 0.0, c}, q0);
        }
        case ProcessKind::Normal: {
            const double c = process.bound();
            const double s = process.sigma();
            if (q0 * c > 1.0) {
                throw DomainError("normal returns with q0 * bound > 1 make lambda negative");
            }
            const double norm = std::erf(c / (std::numbers::sqrt2 * s));
            const double coef = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi) * norm);
            const auto density = [=](double r) {
                const double z = r / s;
                return coef * std::exp(-0.5 * z * z);
            };
            std::vector<double> breaks{-c};
            for (double k : {-8.0, -4.0, -1.0, 0.0, 1.0, 4.0, 8.0}) {
                if (std::abs(k * s) < c) breaks.push_back(k * s);
            }
            breaks.push_back(c);
            return by_quadrature(density, breaks, q0);
        }
        case ProcessKind::Arch1:
            if (q0 * process.bound() > 1.0) {
                throw DomainError("arch1 returns with q0 * bound > 1 make lambda negative");
            }
            return by_monte_carlo(process, q0, mc);
    }
    return {};
}

}  // namespace kesten
