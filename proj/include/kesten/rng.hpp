#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace kesten {

// SplitMix64 finalizer. Used only to derive stream seeds, never in hot loops.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Identifies one independent random stream: one agent in one run of one experiment.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t agent = 0;
    std::uint64_t run = 0;
};

// xoshiro256++ (Blackman & Vigna), period 2^256 - 1.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    Xoshiro256pp() : Xoshiro256pp(StreamKey{}) {}
    explicit Xoshiro256pp(const StreamKey& key) noexcept;
    explicit Xoshiro256pp(const std::array<std::uint64_t, 4>& state) noexcept : s_(state) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }

    const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }

    friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

private:
    std::array<std::uint64_t, 4> s_;
};

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t u) noexcept {
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1); safe to take the logarithm of.
inline double uniform_open01(std::uint64_t u) noexcept {
    return (static_cast<double>(u >> 12) + 0.5) * 0x1.0p-52;
}

// Uniform on the open interval (-1, 1), exactly symmetric: (2k + 1) / 2^52 - 1
// for a 52-bit k. Every value is representable, so no rejection is needed.
inline double uniform_symmetric(std::uint64_t u) noexcept {
    const double d = std::bit_cast<double>(0x3ff0000000000000ULL | (u >> 12));  // [1, 2)
    return (2.0 * d - 3.0) + 0x1.0p-52;
}

}  // namespace kesten
