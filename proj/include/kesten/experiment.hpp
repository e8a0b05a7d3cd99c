#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kesten/empirical.hpp"
#include "kesten/io.hpp"
#include "kesten/return_process.hpp"
#include "kesten/theory.hpp"

namespace kesten {

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides master_seed from the config
    std::size_t workers = 1;
    std::ostream* log = nullptr;        // progress messages; never part of the outputs
};

// Grid of (a, q0) points, each measured as the run-averaged mode at t_measure.
struct SweepConfig {
    ReturnProcessSpec process = ReturnProcessSpec::binary();
    std::vector<double> a_values = default_grid();
    std::vector<double> q_values = default_grid();
    std::size_t n_agents = 10'000;
    std::int64_t t_measure = 10'000;
    std::size_t n_runs = 10;
    std::uint64_t master_seed = 1;
    double x0 = 10.0;
    int bins_per_decade = 10;

    static std::vector<double> default_grid();  // 0.1, 0.2, ..., 0.9
    static SweepConfig from_json(const Json& j);
    void validate() const;
};

struct SweepRow {
    double a = 0.0;
    double q0 = 0.0;
    double a_over_q2 = 0.0;
    double x_mp = 0.0;
    double spread = 0.0;
    std::size_t n_runs = 0;
};

struct ExcludedPoint {
    double a = 0.0;
    double q0 = 0.0;
    std::string reason;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<ExcludedPoint> excluded;
    ScalingFit fit;
    double theory_c = 0.0;
};

// Grid point g (row-major over a_values x q_values) uses master seed
// mix64(master_seed ^ g); agents and runs inside it follow simulate_run.
SweepResult run_sweep(const SweepConfig& config, std::size_t workers = 1,
                      std::ostream* log = nullptr);

Json to_json(const SweepResult& result, const SweepConfig& config);
std::string sweep_csv(const SweepResult& result);
SweepResult sweep_result_from_json(const Json& j);

struct CompareConfig {
    std::filesystem::path sweep_output;  // relative paths resolve against the config's directory
    ReturnProcessSpec process = ReturnProcessSpec::binary();
    double q0 = 0.1;
    double a = 1.0;
    double x0 = 10.0;
    std::size_t n_agents = 10'000;
    std::int64_t t_max = 10'000;
    std::uint64_t master_seed = 1;
    int bins_per_decade = 10;
    double tail_xmin_factor = 10.0;  // Hill threshold as a multiple of the measured mode

    static CompareConfig from_json(const Json& j, const std::filesystem::path& base_dir);
};

struct CompareReport {
    double fitted_c = 0.0;
    double theory_c = 0.0;
    double relative_deviation = 0.0;
    double tail_mu_hat = 0.0;
    double theory_mu = 0.0;
    double ks_distance = 0.0;
    double measured_mode = 0.0;
    double predicted_mode = 0.0;
    TailFit tail;
};

CompareReport run_compare(const CompareConfig& config, const SweepResult& sweep,
                          std::size_t workers = 1);
Json to_json(const CompareReport& report);

// Subcommands. Each writes its data files into options.out_dir and returns
// normally; failures surface as ConfigError, IoError, DomainError or
// EstimationError.
void cmd_simulate(const std::filesystem::path& config_path, const CommandOptions& options);
void cmd_sweep(const std::filesystem::path& config_path, const CommandOptions& options);
// Returns the prediction as JSON (also written to out_dir/theory.json).
Json cmd_theory(const ReturnProcessSpec& process, double q0, double a,
                const CommandOptions& options);
void cmd_compare(const std::filesystem::path& config_path, const CommandOptions& options);

}  // namespace kesten
