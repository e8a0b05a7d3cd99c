#include "kesten/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kesten/errors.hpp"

namespace kesten {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path.string() + ": malformed JSON: " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& value) {
    write_text_file(path, value.dump(2) + "\n");
}

namespace config {

const Json& require(const Json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    const auto it = j.find(key);
    if (it == j.end()) {
        throw ConfigError(where + "." + key + ": missing required field");
    }
    return *it;
}

double number(const Json& j, const std::string& key, const std::string& where) {
    const Json& v = require(j, key, where);
    if (!v.is_number()) {
        throw ConfigError(where + "." + key + ": expected a number");
    }
    return v.get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback, const std::string& where) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

std::uint64_t unsigned_or(const Json& j, const std::string& key, std::uint64_t fallback,
                          const std::string& where) {
    if (!j.contains(key)) {
        return fallback;
    }
    const Json& v = j.at(key);
    if (!v.is_number_unsigned()) {
        throw ConfigError(where + "." + key + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

bool bool_or(const Json& j, const std::string& key, bool fallback, const std::string& where) {
    if (!j.contains(key)) {
        return fallback;
    }
    const Json& v = j.at(key);
    if (!v.is_boolean()) {
        throw ConfigError(where + "." + key + ": expected true or false");
    }
    return v.get<bool>();
}

}  // namespace config

ReturnProcessSpec process_from_json(const Json& j, const std::string& where) {
    const Json& kind_field = config::require(j, "kind", where);
    if (!kind_field.is_string()) {
        throw ConfigError(where + ".kind: expected a string");
    }
    const ProcessKind kind = parse_process_kind(kind_field.get<std::string>());
    const double bound = config::number_or(j, "bound", 1.0, where);
    try {
        switch (kind) {
            case ProcessKind::Binary: return ReturnProcessSpec::binary();
            case ProcessKind::Uniform: return ReturnProcessSpec::uniform(bound);
            case ProcessKind::Normal:
                return ReturnProcessSpec::normal(config::number(j, "sigma", where), bound);
            case ProcessKind::Arch1:
                return ReturnProcessSpec::arch1(config::number(j, "alpha0", where),
                                                config::number(j, "alpha1", where), bound);
        }
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        throw ConfigError(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
    }
    throw ConfigError(where + ".kind: unsupported");
}

Json to_json(const ReturnProcessSpec& spec) {
    Json j;
    j["kind"] = std::string(to_string(spec.kind()));
    switch (spec.kind()) {
        case ProcessKind::Binary: break;
        case ProcessKind::Uniform: j["bound"] = spec.bound(); break;
        case ProcessKind::Normal:
            j["sigma"] = spec.sigma();
            j["bound"] = spec.bound();
            break;
        case ProcessKind::Arch1:
            j["alpha0"] = spec.alpha0();
            j["alpha1"] = spec.alpha1();
            j["bound"] = spec.bound();
            break;
    }
    return j;
}

SimulationConfig simulation_config_from_json(const Json& j) {
    const std::string root = "config";
    if (!j.is_object()) {
        throw ConfigError("config: expected a JSON object");
    }
    SimulationConfig c;
    const Json& params = config::require(j, "params", root);
    c.params.x0 = config::number_or(params, "x0", c.params.x0, "params");
    c.params.q0 = config::number(params, "q0", "params");
    c.params.a = config::number(params, "a", "params");
    c.process = process_from_json(config::require(j, "process", root));
    c.n_agents = config::unsigned_or(j, "n_agents", c.n_agents, root);
    c.t_max = static_cast<std::int64_t>(
        config::unsigned_or(j, "t_max", static_cast<std::uint64_t>(c.t_max), root));
    if (j.contains("snapshot_times")) {
        const Json& times = j.at("snapshot_times");
        if (!times.is_array()) {
            throw ConfigError("config.snapshot_times: expected an array of integers");
        }
        c.snapshot_times.clear();
        for (const Json& t : times) {
            if (!t.is_number_unsigned()) {
                throw ConfigError("config.snapshot_times: expected non-negative integers");
            }
            c.snapshot_times.push_back(static_cast<std::int64_t>(t.get<std::uint64_t>()));
        }
    }
    c.master_seed = config::unsigned_or(j, "master_seed", c.master_seed, root);
    c.n_runs = config::unsigned_or(j, "n_runs", c.n_runs, root);
    c.lognormal_limit = config::bool_or(j, "lognormal_limit", c.lognormal_limit, root);
    c.record_trajectories = config::bool_or(j, "record_trajectories", c.record_trajectories, root);
    c.memory_limit_bytes = config::unsigned_or(j, "memory_limit_bytes", c.memory_limit_bytes, root);
    return c;
}

Json to_json(const TheoryPrediction& p) {
    Json j;
    j["mean_log_lambda"] = p.mean_log_lambda;
    j["D"] = p.diffusion;
    j["mu"] = p.mu;
    j["x_mp_exact"] = p.x_mp_exact;
    j["x_mp_paper"] = p.x_mp_paper;
    j["x_mp_approx"] = p.x_mp_approx;
    j["c"] = p.c;
    j["moments_method"] = std::string(to_string(p.moments.method));
    if (p.moments.method == MomentMethod::MonteCarlo) {
        j["mean_log_lambda_stderr"] = p.moments.mean_standard_error;
        j["D_stderr"] = p.moments.diffusion_standard_error;
    }
    return j;
}

Json to_json(const TailFit& fit) {
    Json j;
    j["mu_hat"] = fit.mu_hat;
    j["x_min"] = fit.x_min;
    j["n_tail"] = fit.n_tail;
    j["stderr"] = fit.standard_error;
    return j;
}

Json to_json(const ScalingFit& fit) {
    Json j;
    j["c"] = fit.c;
    j["stderr"] = fit.standard_error;
    j["n_points"] = fit.n_points;
    return j;
}

std::string histogram_csv(const LogHistogram& hist) {
    std::ostringstream os;
    os << "bin_low,bin_high,count,density\n";
    for (std::size_t k = 0; k < hist.size(); ++k) {
        os << format_double(hist.edges()[k]) << ',' << format_double(hist.edges()[k + 1]) << ','
           << hist.counts()[k] << ',' << format_double(hist.density(k)) << '\n';
    }
    return os.str();
}

}  // namespace kesten
