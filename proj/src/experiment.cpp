#include "kesten/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "kesten/ensemble.hpp"
#include "kesten/errors.hpp"

namespace kesten {

namespace {

std::vector<double> number_list(const Json& j, const std::string& key, std::vector<double> fallback,
                                const std::string& where) {
    if (!j.contains(key)) {
        return fallback;
    }
    const Json& v = j.at(key);
    if (!v.is_array()) {
        throw ConfigError(where + "." + key + ": expected an array of numbers");
    }
    std::vector<double> out;
    for (const Json& x : v) {
        if (!x.is_number()) {
            throw ConfigError(where + "." + key + ": expected an array of numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

int bins_per_decade_or(const Json& j, int fallback, const std::string& where) {
    const std::uint64_t b = config::unsigned_or(j, "bins_per_decade", static_cast<std::uint64_t>(fallback), where);
    if (b < 1 || b > 1000) {
        throw ConfigError(where + ".bins_per_decade: expected an integer in [1, 1000]");
    }
    return static_cast<int>(b);
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string());
    }
}

std::uint64_t grid_seed(std::uint64_t master_seed, std::size_t grid_index) {
    return mix64(master_seed ^ static_cast<std::uint64_t>(grid_index));
}

}  // namespace

// ---------------------------------------------------------------------------
// sweep

std::vector<double> SweepConfig::default_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 9; ++i) {
        g.push_back(i / 10.0);
    }
    return g;
}

SweepConfig SweepConfig::from_json(const Json& j) {
    const std::string root = "config";
    if (!j.is_object()) {
        throw ConfigError("config: expected a JSON object");
    }
    SweepConfig c;
    c.process = process_from_json(config::require(j, "process", root));
    c.a_values = number_list(j, "a_values", c.a_values, root);
    c.q_values = number_list(j, "q_values", c.q_values, root);
    c.n_agents = config::unsigned_or(j, "n_agents", c.n_agents, root);
    c.t_measure = static_cast<std::int64_t>(
        config::unsigned_or(j, "t_measure", static_cast<std::uint64_t>(c.t_measure), root));
    c.n_runs = config::unsigned_or(j, "n_runs", c.n_runs, root);
    c.master_seed = config::unsigned_or(j, "master_seed", c.master_seed, root);
    c.x0 = config::number_or(j, "x0", c.x0, root);
    c.bins_per_decade = bins_per_decade_or(j, c.bins_per_decade, root);
    c.validate();
    return c;
}

void SweepConfig::validate() const {
    if (a_values.empty() || q_values.empty()) {
        throw ConfigError("config.a_values and config.q_values must not be empty");
    }
    for (double a : a_values) {
        if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("config.a_values: entries must be positive");
    }
    for (double q : q_values) {
        if (!(q > 0.0 && q <= 1.0)) throw ConfigError("config.q_values: entries must lie in (0, 1]");
    }
    if (n_agents < 1) throw ConfigError("config.n_agents must be at least 1");
    if (t_measure < 1) throw ConfigError("config.t_measure must be at least 1");
    if (n_runs < 1) throw ConfigError("config.n_runs must be at least 1");
    if (!(x0 > 0.0)) throw ConfigError("config.x0 must be positive");
}

SweepResult run_sweep(const SweepConfig& config, std::size_t workers, std::ostream* log) {
    config.validate();
    SweepResult result;
    result.theory_c = scaling_prefactor(config.process);
    const std::vector<std::int64_t> times{config.t_measure};
    const std::size_t n_points = config.a_values.size() * config.q_values.size();
    std::size_t grid_index = 0;
    for (double a : config.a_values) {
        for (double q0 : config.q_values) {
            const std::uint64_t seed = grid_seed(config.master_seed, grid_index);
            ++grid_index;
            const InvestorParams params{config.x0, q0, a};
            std::vector<std::vector<double>> runs;
            std::size_t diverged = 0;
            for (std::size_t run = 0; run < config.n_runs; ++run) {
                RunBudgets rb = simulate_run(params, config.process, config.n_agents, times, seed,
                                             run, workers);
                diverged += rb.n_diverged;
                runs.push_back(std::move(rb.budgets.front()));
            }
            if (diverged > 0) {
                result.excluded.push_back({a, q0, std::to_string(diverged) + " diverged agents"});
                continue;
            }
            try {
                const ModeEstimate m = average_mode(runs, config.bins_per_decade);
                result.rows.push_back({a, q0, a / (q0 * q0), m.x_mp, m.spread, m.n_runs});
                if (log) {
                    *log << "[sweep " << grid_index << "/" << n_points << "] a=" << a << " q0=" << q0
                         << " x_mp=" << m.x_mp << " (+/- " << m.spread << ")\n";
                }
            } catch (const EstimationError& e) {
                result.excluded.push_back({a, q0, e.what()});
            }
        }
    }
    std::vector<ScalingPoint> points;
    for (const SweepRow& r : result.rows) {
        points.push_back({r.a, r.q0, r.x_mp});
    }
    if (points.size() < 3) {
        throw EstimationError("sweep produced fewer than 3 usable grid points");
    }
    result.fit = fit_scaling_prefactor(points);
    return result;
}

Json to_json(const SweepResult& result, const SweepConfig& config) {
    Json j;
    j["process"] = to_json(config.process);
    j["n_agents"] = config.n_agents;
    j["t_measure"] = config.t_measure;
    j["n_runs"] = config.n_runs;
    j["master_seed"] = config.master_seed;
    j["x0"] = config.x0;
    j["bins_per_decade"] = config.bins_per_decade;
    Json rows = Json::array();
    for (const SweepRow& r : result.rows) {
        rows.push_back({{"a", r.a},
                        {"q0", r.q0},
                        {"a_over_q2", r.a_over_q2},
                        {"x_mp", r.x_mp},
                        {"spread", r.spread},
                        {"n_runs", r.n_runs}});
    }
    j["rows"] = rows;
    Json excluded = Json::array();
    for (const ExcludedPoint& e : result.excluded) {
        excluded.push_back({{"a", e.a}, {"q0", e.q0}, {"reason", e.reason}});
    }
    j["excluded"] = excluded;
    j["fit"] = to_json(result.fit);
    j["theory_c"] = result.theory_c;
    return j;
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "a,q0,a_over_q2,x_mp,spread\n";
    for (const SweepRow& r : result.rows) {
        os << format_double(r.a) << ',' << format_double(r.q0) << ',' << format_double(r.a_over_q2)
           << ',' << format_double(r.x_mp) << ',' << format_double(r.spread) << '\n';
    }
    return os.str();
}

SweepResult sweep_result_from_json(const Json& j) {
    const std::string root = "sweep";
    SweepResult r;
    const Json& rows = config::require(j, "rows", root);
    if (!rows.is_array()) {
        throw ConfigError("sweep.rows: expected an array");
    }
    for (const Json& row : rows) {
        SweepRow s;
        s.a = config::number(row, "a", "sweep.rows[]");
        s.q0 = config::number(row, "q0", "sweep.rows[]");
        s.a_over_q2 = config::number_or(row, "a_over_q2", s.a / (s.q0 * s.q0), "sweep.rows[]");
        s.x_mp = config::number(row, "x_mp", "sweep.rows[]");
        s.spread = config::number_or(row, "spread", 0.0, "sweep.rows[]");
        s.n_runs = config::unsigned_or(row, "n_runs", 1, "sweep.rows[]");
        r.rows.push_back(s);
    }
    const Json& fit = config::require(j, "fit", root);
    r.fit.c = config::number(fit, "c", "sweep.fit");
    r.fit.standard_error = config::number_or(fit, "stderr", 0.0, "sweep.fit");
    r.fit.n_points = config::unsigned_or(fit, "n_points", r.rows.size(), "sweep.fit");
    r.theory_c = config::number_or(j, "theory_c", 0.0, root);
    if (j.contains("excluded") && j.at("excluded").is_array()) {
        for (const Json& e : j.at("excluded")) {
            r.excluded.push_back({config::number(e, "a", "sweep.excluded[]"),
                                  config::number(e, "q0", "sweep.excluded[]"),
                                  e.value("reason", std::string{})});
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// compare

CompareConfig CompareConfig::from_json(const Json& j, const std::filesystem::path& base_dir) {
    const std::string root = "config";
    if (!j.is_object()) {
        throw ConfigError("config: expected a JSON object");
    }
    CompareConfig c;
    const Json& out = config::require(j, "sweep_output", root);
    if (!out.is_string()) {
        throw ConfigError("config.sweep_output: expected a path string");
    }
    c.sweep_output = out.get<std::string>();
    if (c.sweep_output.is_relative()) {
        c.sweep_output = base_dir / c.sweep_output;
    }
    if (j.contains("process")) {
        c.process = process_from_json(j.at("process"));
    }
    c.q0 = config::number_or(j, "q0", c.q0, root);
    c.a = config::number_or(j, "a", c.a, root);
    c.x0 = config::number_or(j, "x0", c.x0, root);
    c.n_agents = config::unsigned_or(j, "n_agents", c.n_agents, root);
    c.t_max = static_cast<std::int64_t>(
        config::unsigned_or(j, "t_max", static_cast<std::uint64_t>(c.t_max), root));
    c.master_seed = config::unsigned_or(j, "master_seed", c.master_seed, root);
    c.bins_per_decade = bins_per_decade_or(j, c.bins_per_decade, root);
    c.tail_xmin_factor = config::number_or(j, "tail_xmin_factor", c.tail_xmin_factor, root);
    if (!(c.tail_xmin_factor > 0.0)) {
        throw ConfigError("config.tail_xmin_factor must be positive");
    }
    InvestorParams{c.x0, c.q0, c.a}.validate();
    if (c.n_agents < 1 || c.t_max < 1) {
        throw ConfigError("config.n_agents and config.t_max must be at least 1");
    }
    return c;
}

CompareReport run_compare(const CompareConfig& config, const SweepResult& sweep,
                          std::size_t workers) {
    CompareReport rep;
    rep.fitted_c = sweep.fit.c;
    rep.theory_c = scaling_prefactor(config.process);
    rep.relative_deviation = std::abs(rep.fitted_c - rep.theory_c) / rep.theory_c;

    const TheoryPrediction theory = predict(config.process, config.q0, config.a);
    rep.theory_mu = theory.mu;
    rep.predicted_mode = theory.x_mp_exact;

    const std::vector<std::int64_t> times{config.t_max};
    RunBudgets rb = simulate_run({config.x0, config.q0, config.a}, config.process, config.n_agents,
                                 times, config.master_seed, 0, workers);
    if (rb.n_diverged > 0) {
        throw EstimationError("stationary ensemble diverged");
    }
    const std::vector<double>& budgets = rb.budgets.front();
    rep.ks_distance = ks_distance(budgets, [&](double x) {
        return stationary_cdf(x, config.a, theory.diffusion, theory.mu);
    });
    rep.measured_mode = most_probable_value(log_binned_histogram(budgets, config.bins_per_decade));
    rep.tail = fit_tail_exponent(budgets, config.tail_xmin_factor * rep.measured_mode);
    rep.tail_mu_hat = rep.tail.mu_hat;
    return rep;
}

Json to_json(const CompareReport& r) {
    Json j;
    j["fitted_c"] = r.fitted_c;
    j["theory_c"] = r.theory_c;
    j["relative_deviation"] = r.relative_deviation;
    j["tail_mu_hat"] = r.tail_mu_hat;
    j["theory_mu"] = r.theory_mu;
    j["ks_distance"] = r.ks_distance;
    j["measured_mode"] = r.measured_mode;
    j["predicted_mode"] = r.predicted_mode;
    j["tail_fit"] = to_json(r.tail);
    return j;
}

// ---------------------------------------------------------------------------
// commands

void cmd_simulate(const std::filesystem::path& config_path, const CommandOptions& options) {
    const Json j = read_json_file(config_path);
    SimulationConfig config = simulation_config_from_json(j);
    const int bins = bins_per_decade_or(j, 10, "config");
    if (options.seed) {
        config.master_seed = *options.seed;
    }
    config.validate();
    ensure_directory(options.out_dir);

    const EnsembleResult ens = simulate_ensemble(config, options.workers);
    if (options.log) {
        *options.log << "[simulate] " << config.n_runs << " run(s) x " << config.n_agents
                     << " agents, " << ens.n_diverged << " diverged\n";
    }

    std::ostringstream snap;
    snap << "run,time,agent,budget\n";
    for (const EnsembleSnapshot& s : ens.snapshots) {
        for (std::size_t i = 0; i < s.budgets.size(); ++i) {
            snap << s.run_index << ',' << s.time << ',' << i << ',' << format_double(s.budgets[i]) << '\n';
        }
    }
    write_text_file(options.out_dir / "snapshots.csv", snap.str());

    Json summary;
    summary["process"] = to_json(config.process);
    summary["n_diverged"] = ens.n_diverged;
    Json per_time = Json::array();
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t s = 0; s < config.snapshot_times.size(); ++s) {
        const std::int64_t t = config.snapshot_times[s];
        std::vector<double> pooled;
        std::vector<std::vector<double>> runs;
        for (const EnsembleSnapshot& snapshot : ens.snapshots) {
            if (snapshot.time == t) {
                pooled.insert(pooled.end(), snapshot.budgets.begin(), snapshot.budgets.end());
                runs.push_back(snapshot.budgets);
            }
        }
        const LogHistogram hist = log_binned_histogram(pooled, bins);
        write_text_file(options.out_dir / ("histogram_t" + std::to_string(t) + ".csv"), histogram_csv(hist));
        lo = hist.edges().front();
        hi = hist.edges().back();
        Json entry;
        entry["time"] = t;
        entry["samples"] = hist.total();
        entry["excluded"] = hist.excluded();
        try {
            const ModeEstimate m = average_mode(runs, bins);
            entry["x_mp"] = m.x_mp;
            entry["spread"] = m.spread;
        } catch (const EstimationError& e) {
            entry["x_mp"] = nullptr;
            entry["note"] = e.what();
        }
        per_time.push_back(entry);
    }
    summary["snapshots"] = per_time;

    // Overlay of the stationary law across the range of the last snapshot.
    if (config.params.a > 0.0 && config.params.q0 > 0.0) {
        try {
            const TheoryPrediction th = predict(config.process, config.params.q0, config.params.a);
            std::ostringstream overlay;
            overlay << "x,density\n";
            constexpr int kPoints = 400;
            for (int i = 0; i < kPoints; ++i) {
                const double x = lo * std::pow(hi / lo, static_cast<double>(i) / (kPoints - 1));
                overlay << format_double(x) << ','
                        << format_double(stationary_density(x, config.params.a, th.diffusion, th.mu)) << '\n';
            }
            write_text_file(options.out_dir / "theory_overlay.csv", overlay.str());
            summary["theory"] = to_json(th);
        } catch (const DomainError& e) {
            summary["theory"] = nullptr;
            summary["theory_note"] = e.what();
        }
    }

    if (config.record_trajectories) {
        std::ostringstream tr;
        tr << "run,agent,time,budget\n";
        for (std::size_t run = 0; run < ens.trajectories.size(); ++run) {
            for (std::size_t i = 0; i < ens.trajectories[run].size(); ++i) {
                const auto& path = ens.trajectories[run][i];
                for (std::size_t t = 0; t < path.size(); ++t) {
                    tr << run << ',' << i << ',' << t << ',' << format_double(path[t]) << '\n';
                }
            }
        }
        write_text_file(options.out_dir / "trajectories.csv", tr.str());
    }
    write_json_file(options.out_dir / "summary.json", summary);
}

void cmd_sweep(const std::filesystem::path& config_path, const CommandOptions& options) {
    SweepConfig config = SweepConfig::from_json(read_json_file(config_path));
    if (options.seed) {
        config.master_seed = *options.seed;
    }
    ensure_directory(options.out_dir);
    const SweepResult result = run_sweep(config, options.workers, options.log);
    write_json_file(options.out_dir / "sweep.json", to_json(result, config));
    write_text_file(options.out_dir / "sweep.csv", sweep_csv(result));
    write_json_file(options.out_dir / "fit.json", to_json(result.fit));
    if (options.log) {
        *options.log << "[sweep] c = " << result.fit.c << " +/- " << result.fit.standard_error
                     << " (theory " << result.theory_c << "), " << result.excluded.size()
                     << " point(s) excluded\n";
    }
}

Json cmd_theory(const ReturnProcessSpec& process, double q0, double a, const CommandOptions& options) {
    MonteCarloOptions mc;
    if (options.seed) {
        mc.seed = *options.seed;
    }
    Json j;
    j["process"] = to_json(process);
    j["q0"] = q0;
    j["a"] = a;
    const Json prediction = to_json(predict(process, q0, a, mc));
    j.update(prediction);
    if (!options.out_dir.empty()) {
        ensure_directory(options.out_dir);
        write_json_file(options.out_dir / "theory.json", j);
    }
    return j;
}

void cmd_compare(const std::filesystem::path& config_path, const CommandOptions& options) {
    const Json j = read_json_file(config_path);
    CompareConfig config = CompareConfig::from_json(j, config_path.parent_path());
    if (options.seed) {
        config.master_seed = *options.seed;
    }
    if (!std::filesystem::exists(config.sweep_output)) {
        throw IoError("sweep output not found: " + config.sweep_output.string());
    }
    const Json sweep_json = read_json_file(config.sweep_output);
    const SweepResult sweep = sweep_result_from_json(sweep_json);
    if (!j.contains("process") && sweep_json.contains("process")) {
        config.process = process_from_json(sweep_json.at("process"), "sweep.process");
    }
    ensure_directory(options.out_dir);
    const CompareReport report = run_compare(config, sweep, options.workers);
    write_json_file(options.out_dir / "compare.json", to_json(report));
}

}  // namespace kesten
