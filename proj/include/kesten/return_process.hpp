#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "kesten/rng.hpp"

namespace kesten {

enum class ProcessKind { Binary, Uniform, Normal, Arch1 };

std::string_view to_string(ProcessKind kind);
ProcessKind parse_process_kind(std::string_view name);

// One of the four return models. Parameters are validated on construction;
// an instance that exists is always valid.
class ReturnProcessSpec {
public:
    static ReturnProcessSpec binary();
    static ReturnProcessSpec uniform(double bound = 1.0);
    static ReturnProcessSpec normal(double sigma, double bound = 1.0);
    static ReturnProcessSpec arch1(double alpha0, double alpha1, double bound = 1.0);

    ProcessKind kind() const noexcept { return kind_; }
    // Standard deviation of the untruncated Gaussian (Normal only).
    double sigma() const noexcept { return sigma_; }
    double alpha0() const noexcept { return alpha0_; }
    double alpha1() const noexcept { return alpha1_; }
    // Half-width C of the support (-C, C). Binary always emits exactly -1 or +1.
    double bound() const noexcept { return bound_; }

    friend bool operator==(const ReturnProcessSpec&, const ReturnProcessSpec&) = default;

private:
    ReturnProcessSpec() = default;

    ProcessKind kind_ = ProcessKind::Binary;
    double sigma_ = 0.0;
    double alpha0_ = 0.0;
    double alpha1_ = 0.0;
    double bound_ = 1.0;
};

std::string describe(const ReturnProcessSpec& spec);

namespace detail {

struct ZigguratTables {
    // x[0] is the width of the base strip; x[1] = r; x[256] = 0.
    double x[257];
    // f[i] = exp(-x[i]^2 / 2)
    double f[257];
};

extern const ZigguratTables ziggurat;

double standard_normal_slow(Xoshiro256pp& rng, std::size_t layer, double candidate) noexcept;

}  // namespace detail

// Marsaglia-Tsang ziggurat with 256 layers; one 64-bit draw on the fast path.
inline double standard_normal(Xoshiro256pp& rng) noexcept {
    const std::uint64_t u = rng();
    const std::size_t layer = u & 0xffu;
    // Bits 11..63 as a signed uniform on [-1, 1); disjoint from the layer bits.
    const double unit = static_cast<double>(static_cast<std::int64_t>(u) >> 11) * 0x1.0p-52;
    const double candidate = unit * detail::ziggurat.x[layer];
    if (std::abs(candidate) < detail::ziggurat.x[layer + 1]) {
        return candidate;
    }
    return detail::standard_normal_slow(rng, layer, candidate);
}

// Random stream of one agent. Binary returns consume the 64-bit draws one bit
// at a time, least significant bit first.
struct RandomStream {
    Xoshiro256pp engine;
    std::uint64_t bit_buffer = 0;
    int bits_left = 0;

    RandomStream() = default;
    explicit RandomStream(const StreamKey& key) : engine(key) {}

    friend bool operator==(const RandomStream&, const RandomStream&) = default;
};

struct ProcessState {
    // r(t-1) for the ARCH recursion; stays 0 for the other kinds.
    double previous_return = 0.0;
    RandomStream stream;

    ProcessState() = default;
    explicit ProcessState(const StreamKey& key) : stream(key) {}

    friend bool operator==(const ProcessState&, const ProcessState&) = default;
};

// Kind-specialized sampler; the ensemble kernels instantiate this directly so
// the kind dispatch stays out of the time loop.
template <ProcessKind Kind>
inline double sample_return_as(const ReturnProcessSpec& spec, ProcessState& state) noexcept {
    auto& rng = state.stream.engine;
    if constexpr (Kind == ProcessKind::Binary) {
        if (state.stream.bits_left == 0) {
            state.stream.bit_buffer = rng();
            state.stream.bits_left = 64;
        }
        const bool up = (state.stream.bit_buffer & 1u) != 0;
        state.stream.bit_buffer >>= 1;
        --state.stream.bits_left;
        return up ? 1.0 : -1.0;
    } else if constexpr (Kind == ProcessKind::Uniform) {
        return spec.bound() * uniform_symmetric(rng());
    } else if constexpr (Kind == ProcessKind::Normal) {
        double r;
        do {
            r = spec.sigma() * standard_normal(rng);
        } while (!(std::abs(r) < spec.bound()));
        return r;
    } else {
        const double prev = state.previous_return;
        const double scale = std::sqrt(spec.alpha0() + spec.alpha1() * prev * prev);
        double r;
        do {
            r = scale * standard_normal(rng);
        } while (!(std::abs(r) < spec.bound()));
        state.previous_return = r;
        return r;
    }
}

// Draws r(t) and advances the state. Out-of-range draws of the Normal and
// ARCH(1) kinds are rejected and redrawn; the ARCH variance
// alpha0 + alpha1 * r(t-1)^2 is computed from the last accepted return and is
// not recomputed during redraws. There is no burn-in: r(0) = 0, so the first
// ARCH variance is alpha0 and the stationary level is approached at rate alpha1.
inline double sample_return(const ReturnProcessSpec& spec, ProcessState& state) noexcept {
    switch (spec.kind()) {
        case ProcessKind::Binary: return sample_return_as<ProcessKind::Binary>(spec, state);
        case ProcessKind::Uniform: return sample_return_as<ProcessKind::Uniform>(spec, state);
        case ProcessKind::Normal: return sample_return_as<ProcessKind::Normal>(spec, state);
        case ProcessKind::Arch1: return sample_return_as<ProcessKind::Arch1>(spec, state);
    }
    return 0.0;
}

// <r^2> of the process. For ARCH(1) this is the untruncated stationary value
// alpha0 / (1 - alpha1); see monte_carlo_second_moment for the truncated one.
double analytic_second_moment(const ReturnProcessSpec& spec);

// <r^2> of N(0, sigma^2) restricted to (-bound, bound).
double truncated_normal_second_moment(double sigma, double bound = 1.0);

struct Estimate {
    double value = 0.0;
    double standard_error = 0.0;
};

// Sample <r^2> with a batch-means standard error (batches absorb the ARCH
// autocorrelation).
Estimate monte_carlo_second_moment(const ReturnProcessSpec& spec, std::uint64_t n_draws,
                                   std::uint64_t seed);

}  // namespace kesten
