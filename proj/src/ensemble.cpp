#include "kesten/ensemble.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <string>
#include <thread>

#include "kesten/errors.hpp"

namespace kesten {
namespace {

// Agents advanced in lockstep by the vectorized Binary and Uniform kernels.
constexpr std::size_t kLanes = 32;
static_assert(kLanes <= 32, "slow-lane bookkeeping uses a 32-bit mask");

struct BlockOutput {
    std::vector<std::vector<double>>& budgets;  // [snapshot][agent]
    std::span<const std::int64_t> times;
};

// xoshiro256++ over kLanes independent streams in structure-of-arrays layout.
struct LaneEngines {
    alignas(64) std::array<std::uint64_t, kLanes> s0, s1, s2, s3;

    LaneEngines(std::uint64_t master_seed, std::size_t first_agent, std::uint64_t run) {
        for (std::size_t l = 0; l < kLanes; ++l) {
            const Xoshiro256pp e(StreamKey{master_seed, first_agent + l, run});
            s0[l] = e.state()[0];
            s1[l] = e.state()[1];
            s2[l] = e.state()[2];
            s3[l] = e.state()[3];
        }
    }

    void next(std::array<std::uint64_t, kLanes>& out) {
        for (std::size_t l = 0; l < kLanes; ++l) {
            out[l] = std::rotl(s0[l] + s3[l], 23) + s0[l];
            const std::uint64_t t = s1[l] << 17;
            s2[l] ^= s0[l];
            s3[l] ^= s1[l];
            s1[l] ^= s2[l];
            s0[l] ^= s3[l];
            s2[l] ^= t;
            s3[l] = std::rotl(s3[l], 45);
        }
    }
};

void record(BlockOutput& out, std::size_t snapshot, std::size_t first_agent,
            std::span<const double> x) {
    std::copy(x.begin(), x.end(), out.budgets[snapshot].begin() + static_cast<std::ptrdiff_t>(first_agent));
}

std::size_t count_diverged(std::span<const double> x) {
    return static_cast<std::size_t>(
        std::count_if(x.begin(), x.end(), [](double v) { return !(v <= kDivergenceThreshold); }));
}

// Bit-for-bit the same arithmetic as sample_return_as<Binary> followed by step_unchecked.
std::size_t binary_block(const InvestorParams& p, std::uint64_t seed, std::uint64_t run,
                         std::size_t first_agent, BlockOutput& out) {
    LaneEngines engines(seed, first_agent, run);
    alignas(64) std::array<double, kLanes> x;
    alignas(64) std::array<std::uint64_t, kLanes> bits{};
    x.fill(p.x0);
    const double up = 1.0 + 1.0 * p.q0;
    const double down = 1.0 + -1.0 * p.q0;
    const double a = p.a;
    int bits_left = 0;
    std::int64_t t = 0;
    for (std::size_t s = 0; s < out.times.size(); ++s) {
        std::int64_t remaining = out.times[s] - t;
        while (remaining > 0) {
            if (bits_left == 0) {
                engines.next(bits);
                bits_left = 64;
            }
            const int m = static_cast<int>(std::min<std::int64_t>(remaining, bits_left));
            for (int k = 0; k < m; ++k) {
                for (std::size_t l = 0; l < kLanes; ++l) {
                    const double lambda = (bits[l] & 1u) ? up : down;
                    bits[l] >>= 1;
                    x[l] = x[l] * lambda + a;
                }
            }
            bits_left -= m;
            remaining -= m;
        }
        t = out.times[s];
        record(out, s, first_agent, x);
    }
    return count_diverged(x);
}

std::size_t uniform_block(const InvestorParams& p, double bound, std::uint64_t seed,
                          std::uint64_t run, std::size_t first_agent, BlockOutput& out) {
    LaneEngines engines(seed, first_agent, run);
    alignas(64) std::array<double, kLanes> x;
    alignas(64) std::array<std::uint64_t, kLanes> draws{};
    x.fill(p.x0);
    const double q0 = p.q0;
    const double a = p.a;
    std::int64_t t = 0;
    for (std::size_t s = 0; s < out.times.size(); ++s) {
        for (; t < out.times[s]; ++t) {
            engines.next(draws);
            for (std::size_t l = 0; l < kLanes; ++l) {
                const double d = std::bit_cast<double>(0x3ff0000000000000ULL | (draws[l] >> 12));
                const double r = bound * ((2.0 * d - 3.0) + 0x1.0p-52);
                const double lambda = 1.0 + r * q0;
                x[l] = x[l] * lambda + a;
            }
        }
        record(out, s, first_agent, x);
    }
    return count_diverged(x);
}

// Gaussian kinds (Normal and ARCH(1)). The ziggurat fast path and the update run
// across lanes; a lane that needs the ziggurat slow path or a truncation redraw is
// finished with the scalar sampler on its own engine, so each agent consumes its
// stream exactly as sample_return_as does.
template <bool Arch>
std::size_t gaussian_block(const InvestorParams& p, const ReturnProcessSpec& spec,
                           std::uint64_t seed, std::uint64_t run, std::size_t first_agent,
                           BlockOutput& out) {
    LaneEngines engines(seed, first_agent, run);
    alignas(64) std::array<double, kLanes> x;
    alignas(64) std::array<double, kLanes> prev{};
    alignas(64) std::array<double, kLanes> scale;
    alignas(64) std::array<double, kLanes> r;
    alignas(64) std::array<std::uint64_t, kLanes> draws{};
    alignas(64) std::array<std::int64_t, kLanes> layer;
    alignas(64) std::array<double, kLanes> candidate;
    alignas(64) std::array<std::uint32_t, kLanes> slow;
    x.fill(p.x0);
    scale.fill(spec.sigma());
    const double alpha0 = spec.alpha0();
    const double alpha1 = spec.alpha1();
    const double bound = spec.bound();
    const double q0 = p.q0;
    const double a = p.a;
    alignas(64) std::array<double, 257> zx;
    std::copy(std::begin(detail::ziggurat.x), std::end(detail::ziggurat.x), zx.begin());

    std::int64_t t = 0;
    for (std::size_t s = 0; s < out.times.size(); ++s) {
        for (; t < out.times[s]; ++t) {
            engines.next(draws);
            if constexpr (Arch) {
                for (std::size_t l = 0; l < kLanes; ++l) {
                    scale[l] = std::sqrt(alpha0 + alpha1 * prev[l] * prev[l]);
                }
            }
            for (std::size_t l = 0; l < kLanes; ++l) {
                layer[l] = static_cast<std::int64_t>(draws[l] & 0xffu);
                candidate[l] = static_cast<double>(static_cast<std::int64_t>(draws[l]) >> 11) *
                               0x1.0p-52 * zx[layer[l]];
                const double z = candidate[l];
                r[l] = scale[l] * z;
                slow[l] = !(std::abs(z) < zx[layer[l] + 1]) | !(std::abs(r[l]) < bound);
            }
            std::uint32_t slow_mask = 0;
            for (std::size_t l = 0; l < kLanes; ++l) {
                slow_mask |= static_cast<std::uint32_t>(slow[l]) << l;
            }
            while (slow_mask != 0) {
                const int l = std::countr_zero(slow_mask);
                slow_mask &= slow_mask - 1;
                Xoshiro256pp rng({engines.s0[l], engines.s1[l], engines.s2[l], engines.s3[l]});
                double z = candidate[l];
                if (!(std::abs(z) < zx[layer[l] + 1])) {
                    z = detail::standard_normal_slow(rng, static_cast<std::size_t>(layer[l]), z);
                }
                double rr = scale[l] * z;
                while (!(std::abs(rr) < bound)) {
                    rr = scale[l] * standard_normal(rng);
                }
                r[l] = rr;
                const auto& st = rng.state();
                engines.s0[l] = st[0];
                engines.s1[l] = st[1];
                engines.s2[l] = st[2];
                engines.s3[l] = st[3];
            }
            for (std::size_t l = 0; l < kLanes; ++l) {
                const double lambda = 1.0 + r[l] * q0;
                x[l] = x[l] * lambda + a;
            }
            if constexpr (Arch) {
                prev = r;
            }
        }
        record(out, s, first_agent, x);
    }
    return count_diverged(x);
}

// Scalar path for agents that do not fill a lane block.
// Several agents are interleaved so their independent dependency chains overlap.
template <ProcessKind Kind>
std::size_t scalar_agents(const InvestorParams& p, const ReturnProcessSpec& spec,
                          std::uint64_t seed, std::uint64_t run, std::size_t first_agent,
                          std::size_t count, BlockOutput& out) {
    constexpr std::size_t kInterleave = 4;
    std::size_t diverged = 0;
    for (std::size_t base = 0; base < count; base += kInterleave) {
        const std::size_t n = std::min(kInterleave, count - base);
        std::array<ProcessState, kInterleave> states;
        std::array<double, kInterleave> x{};
        for (std::size_t l = 0; l < n; ++l) {
            states[l] = ProcessState(StreamKey{seed, first_agent + base + l, run});
            x[l] = p.x0;
        }
        std::int64_t t = 0;
        for (std::size_t s = 0; s < out.times.size(); ++s) {
            if (n == kInterleave) {
                for (; t < out.times[s]; ++t) {
                    for (std::size_t l = 0; l < kInterleave; ++l) {
                        x[l] = step_unchecked(x[l], sample_return_as<Kind>(spec, states[l]), p.q0, p.a);
                    }
                }
            } else {
                for (; t < out.times[s]; ++t) {
                    for (std::size_t l = 0; l < n; ++l) {
                        x[l] = step_unchecked(x[l], sample_return_as<Kind>(spec, states[l]), p.q0, p.a);
                    }
                }
            }
            record(out, s, first_agent + base, std::span<const double>(x.data(), n));
        }
        diverged += count_diverged(std::span<const double>(x.data(), n));
    }
    return diverged;
}

std::size_t scalar_dispatch(const InvestorParams& p, const ReturnProcessSpec& spec,
                            std::uint64_t seed, std::uint64_t run, std::size_t first_agent,
                            std::size_t count, BlockOutput& out) {
    switch (spec.kind()) {
        case ProcessKind::Binary:
            return scalar_agents<ProcessKind::Binary>(p, spec, seed, run, first_agent, count, out);
        case ProcessKind::Uniform:
            return scalar_agents<ProcessKind::Uniform>(p, spec, seed, run, first_agent, count, out);
        case ProcessKind::Normal:
            return scalar_agents<ProcessKind::Normal>(p, spec, seed, run, first_agent, count, out);
        case ProcessKind::Arch1:
            return scalar_agents<ProcessKind::Arch1>(p, spec, seed, run, first_agent, count, out);
    }
    return 0;
}

// Agents [first, last) of one run.
std::size_t simulate_range(const InvestorParams& p, const ReturnProcessSpec& spec,
                           std::uint64_t seed, std::uint64_t run, std::size_t first,
                           std::size_t last, BlockOutput& out) {
    std::size_t diverged = 0;
    std::size_t agent = first;
    for (; agent + kLanes <= last; agent += kLanes) {
        switch (spec.kind()) {
            case ProcessKind::Binary: diverged += binary_block(p, seed, run, agent, out); break;
            case ProcessKind::Uniform:
                diverged += uniform_block(p, spec.bound(), seed, run, agent, out);
                break;
            case ProcessKind::Normal:
                diverged += gaussian_block<false>(p, spec, seed, run, agent, out);
                break;
            case ProcessKind::Arch1:
                diverged += gaussian_block<true>(p, spec, seed, run, agent, out);
                break;
        }
    }
    if (agent < last) {
        diverged += scalar_dispatch(p, spec, seed, run, agent, last - agent, out);
    }
    return diverged;
}

void validate_times(std::span<const std::int64_t> times) {
    if (times.empty()) {
        throw ConfigError("snapshot_times must not be empty");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0) {
            throw ConfigError("snapshot_times must be non-negative");
        }
        if (i > 0 && times[i] <= times[i - 1]) {
            throw ConfigError("snapshot_times must be strictly increasing");
        }
    }
}

}  // namespace

RunBudgets simulate_run(const InvestorParams& params, const ReturnProcessSpec& process,
                        std::size_t n_agents, std::span<const std::int64_t> times,
                        std::uint64_t master_seed, std::uint64_t run, std::size_t workers) {
    validate_times(times);
    if (n_agents == 0) {
        throw ConfigError("n_agents must be at least 1");
    }
    RunBudgets result;
    result.budgets.assign(times.size(), std::vector<double>(n_agents));
    BlockOutput out{result.budgets, times};

    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, n_agents / kLanes));
    // Chunk boundaries fall on lane blocks so every worker count sees the same
    // split between the vectorized and the scalar kernels.
    const std::size_t blocks = (n_agents + kLanes - 1) / kLanes;
    const std::size_t blocks_per_worker = (blocks + workers - 1) / workers;
    std::vector<std::size_t> diverged(workers, 0);
    {
        std::vector<std::jthread> threads;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t first = std::min(n_agents, w * blocks_per_worker * kLanes);
            const std::size_t last = std::min(n_agents, (w + 1) * blocks_per_worker * kLanes);
            if (first >= last) {
                continue;
            }
            auto task = [&, w, first, last] {
                diverged[w] = simulate_range(params, process, master_seed, run, first, last, out);
            };
            if (w + 1 == workers) {
                task();
            } else {
                threads.emplace_back(task);
            }
        }
    }
    for (std::size_t d : diverged) {
        result.n_diverged += d;
    }
    return result;
}

void SimulationConfig::validate() const {
    params.validate(lognormal_limit);
    if (n_agents < 1) throw ConfigError("n_agents must be at least 1");
    if (t_max < 1) throw ConfigError("t_max must be at least 1");
    if (n_runs < 1) throw ConfigError("n_runs must be at least 1");
    validate_times(snapshot_times);
    if (snapshot_times.back() > t_max) {
        throw ConfigError("snapshot_times must not exceed t_max");
    }
    if (record_trajectories && n_agents > kMaxTrajectoryAgents) {
        throw ConfigError("record_trajectories is limited to n_agents <= " +
                          std::to_string(kMaxTrajectoryAgents));
    }
    if (estimated_bytes() > memory_limit_bytes) {
        throw ConfigError("ensemble needs about " + std::to_string(estimated_bytes() >> 20) +
                          " MiB, above memory_limit_bytes");
    }
}

std::size_t SimulationConfig::estimated_bytes() const {
    std::size_t per_run = snapshot_times.size() * n_agents;
    if (record_trajectories) {
        per_run += n_agents * (static_cast<std::size_t>(t_max) + 1);
    }
    return per_run * n_runs * sizeof(double);
}

EnsembleResult simulate_ensemble(const SimulationConfig& config, std::size_t workers) {
    config.validate();
    EnsembleResult result;
    for (std::size_t run = 0; run < config.n_runs; ++run) {
        RunBudgets rb = simulate_run(config.params, config.process, config.n_agents,
                                     config.snapshot_times, config.master_seed, run, workers);
        result.n_diverged += rb.n_diverged;
        for (std::size_t s = 0; s < config.snapshot_times.size(); ++s) {
            result.snapshots.push_back({config.snapshot_times[s], std::move(rb.budgets[s]), run});
        }
        if (config.record_trajectories) {
            auto& runs = result.trajectories.emplace_back();
            for (std::size_t i = 0; i < config.n_agents; ++i) {
                runs.push_back(simulate_agent(config.params, config.process, config.t_max,
                                              StreamKey{config.master_seed, i, run})
                                   .values);
            }
        }
    }
    return result;
}

}  // namespace kesten
