#include "kesten/return_process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kesten/errors.hpp"

namespace kesten {

namespace detail {
namespace {

constexpr double kTailStart = 3.6541528853610088;
constexpr double kLayerArea = 0.00492867323399;

ZigguratTables build_ziggurat() {
    ZigguratTables t{};
    const auto f = [](double x) { return std::exp(-0.5 * x * x); };
    t.x[0] = kLayerArea / f(kTailStart);
    t.x[1] = kTailStart;
    for (int i = 1; i < 255; ++i) {
        t.x[i + 1] = std::sqrt(-2.0 * std::log(kLayerArea / t.x[i] + f(t.x[i])));
    }
    t.x[256] = 0.0;
    for (int i = 0; i <= 256; ++i) {
        t.f[i] = f(t.x[i]);
    }
    return t;
}

}  // namespace

const ZigguratTables ziggurat = build_ziggurat();

double standard_normal_slow(Xoshiro256pp& rng, std::size_t layer, double candidate) noexcept {
    for (;;) {
        if (layer == 0) {
            double excess;
            double height;
            do {
                excess = -std::log(uniform_open01(rng())) / kTailStart;
                height = -std::log(uniform_open01(rng()));
            } while (height + height < excess * excess);
            return candidate < 0.0 ? -(kTailStart + excess) : kTailStart + excess;
        }
        const double y = ziggurat.f[layer] +
                         uniform01(rng()) * (ziggurat.f[layer + 1] - ziggurat.f[layer]);
        if (y < std::exp(-0.5 * candidate * candidate)) {
            return candidate;
        }
        const std::uint64_t u = rng();
        layer = u & 0xffu;
        candidate = static_cast<double>(static_cast<std::int64_t>(u) >> 11) * 0x1.0p-52 *
                    ziggurat.x[layer];
        if (std::abs(candidate) < ziggurat.x[layer + 1]) {
            return candidate;
        }
    }
}

}  // namespace detail

std::string_view to_string(ProcessKind kind) {
    switch (kind) {
        case ProcessKind::Binary: return "binary";
        case ProcessKind::Uniform: return "uniform";
        case ProcessKind::Normal: return "normal";
        case ProcessKind::Arch1: return "arch1";
    }
    return "unknown";
}

ProcessKind parse_process_kind(std::string_view name) {
    if (name == "binary") return ProcessKind::Binary;
    if (name == "uniform") return ProcessKind::Uniform;
    if (name == "normal") return ProcessKind::Normal;
    if (name == "arch1") return ProcessKind::Arch1;
    throw ConfigError("process.kind: expected one of binary, uniform, normal, arch1; got '" +
                      std::string(name) + "'");
}

namespace {

void require_bound(double bound) {
    if (!(bound > 0.0) || !std::isfinite(bound)) {
        throw ConfigError("process.bound must be a finite positive number");
    }
}

}  // namespace

ReturnProcessSpec ReturnProcessSpec::binary() {
    ReturnProcessSpec s;
    s.kind_ = ProcessKind::Binary;
    return s;
}

ReturnProcessSpec ReturnProcessSpec::uniform(double bound) {
    require_bound(bound);
    ReturnProcessSpec s;
    s.kind_ = ProcessKind::Uniform;
    s.bound_ = bound;
    return s;
}

ReturnProcessSpec ReturnProcessSpec::normal(double sigma, double bound) {
    require_bound(bound);
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ConfigError("process.sigma must be a finite positive number");
    }
    ReturnProcessSpec s;
    s.kind_ = ProcessKind::Normal;
    s.sigma_ = sigma;
    s.bound_ = bound;
    return s;
}

ReturnProcessSpec ReturnProcessSpec::arch1(double alpha0, double alpha1, double bound) {
    require_bound(bound);
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
        throw ConfigError("process.alpha0 must be a finite positive number");
    }
    if (!(alpha1 >= 0.0 && alpha1 < 1.0)) {
        throw ConfigError("process.alpha1 must lie in [0, 1)");
    }
    ReturnProcessSpec s;
    s.kind_ = ProcessKind::Arch1;
    s.alpha0_ = alpha0;
    s.alpha1_ = alpha1;
    s.bound_ = bound;
    return s;
}

std::string describe(const ReturnProcessSpec& spec) {
    std::ostringstream os;
    os << to_string(spec.kind());
    switch (spec.kind()) {
        case ProcessKind::Binary: break;
        case ProcessKind::Uniform: os << "(bound=" << spec.bound() << ")"; break;
        case ProcessKind::Normal:
            os << "(sigma=" << spec.sigma() << ", bound=" << spec.bound() << ")";
            break;
        case ProcessKind::Arch1:
            os << "(alpha0=" << spec.alpha0() << ", alpha1=" << spec.alpha1()
               << ", bound=" << spec.bound() << ")";
            break;
    }
    return os.str();
}

double truncated_normal_second_moment(double sigma, double bound) {
    if (!(sigma > 0.0)) {
        throw ConfigError("sigma must be positive");
    }
    // For bound = 1 this is sigma^2 - sigma sqrt(2/pi) exp(-1/(2 sigma^2)) / erf(1/(sqrt2 sigma)).
    const double z = bound / sigma;
    const double correction = sigma * sigma * std::sqrt(2.0 / std::numbers::pi) * z *
                              std::exp(-0.5 * z * z) / std::erf(z / std::numbers::sqrt2);
    return sigma * sigma - correction;
}

double analytic_second_moment(const ReturnProcessSpec& spec) {
    switch (spec.kind()) {
        case ProcessKind::Binary: return 1.0;
        case ProcessKind::Uniform: return spec.bound() * spec.bound() / 3.0;
        case ProcessKind::Normal: return truncated_normal_second_moment(spec.sigma(), spec.bound());
        case ProcessKind::Arch1: return spec.alpha0() / (1.0 - spec.alpha1());
    }
    return 0.0;
}

Estimate monte_carlo_second_moment(const ReturnProcessSpec& spec, std::uint64_t n_draws,
                                   std::uint64_t seed) {
    constexpr std::uint64_t kBatches = 100;
    if (n_draws < kBatches * 10) {
        throw ConfigError("monte_carlo_second_moment needs at least 1000 draws");
    }
    ProcessState state(StreamKey{seed, 0, 0});
    const std::uint64_t per_batch = n_draws / kBatches;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t b = 0; b < kBatches; ++b) {
        double acc = 0.0;
        for (std::uint64_t i = 0; i < per_batch; ++i) {
            const double r = sample_return(spec, state);
            acc += r * r;
        }
        const double mean = acc / static_cast<double>(per_batch);
        sum += mean;
        sum_sq += mean * mean;
    }
    const double n = static_cast<double>(kBatches);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n)};
}

}  // namespace kesten
