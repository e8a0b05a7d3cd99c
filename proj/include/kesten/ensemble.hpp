#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kesten/budget.hpp"
#include "kesten/return_process.hpp"

namespace kesten {

struct SimulationConfig {
    InvestorParams params;
    ReturnProcessSpec process = ReturnProcessSpec::binary();
    std::size_t n_agents = 10'000;
    std::int64_t t_max = 10'000;
    std::vector<std::int64_t> snapshot_times = {10, 100, 1'000, 10'000};
    std::uint64_t master_seed = 1;
    std::size_t n_runs = 1;
    // Permits a = 0 (pure multiplicative process).
    bool lognormal_limit = false;
    // Full trajectories are kept only on request and only for n_agents <= 100.
    bool record_trajectories = false;
    std::size_t memory_limit_bytes = std::size_t{2} << 30;

    void validate() const;
    std::size_t estimated_bytes() const;
};

inline constexpr std::size_t kMaxTrajectoryAgents = 100;

struct EnsembleSnapshot {
    std::int64_t time = 0;
    std::vector<double> budgets;  // indexed by agent
    std::size_t run_index = 0;
};

struct EnsembleResult {
    // Ordered by run, then by snapshot time.
    std::vector<EnsembleSnapshot> snapshots;
    // trajectories[run][agent], only when record_trajectories is set.
    std::vector<std::vector<std::vector<double>>> trajectories;
    // Agents whose budget exceeded kDivergenceThreshold or became non-finite.
    std::size_t n_diverged = 0;
};

// Agent i of run k draws from StreamKey{master_seed, i, k}. The result does not
// depend on the worker count.
EnsembleResult simulate_ensemble(const SimulationConfig& config, std::size_t workers = 1);

struct RunBudgets {
    std::vector<std::vector<double>> budgets;  // [snapshot][agent]
    std::size_t n_diverged = 0;
};

// One run of an ensemble: budgets of agents 0..n_agents-1 at each time in
// `times` (strictly increasing, >= 0).
RunBudgets simulate_run(const InvestorParams& params, const ReturnProcessSpec& process,
                        std::size_t n_agents, std::span<const std::int64_t> times,
                        std::uint64_t master_seed, std::uint64_t run, std::size_t workers = 1);

}  // namespace kesten
