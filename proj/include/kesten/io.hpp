#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "kesten/empirical.hpp"
#include "kesten/ensemble.hpp"
#include "kesten/return_process.hpp"
#include "kesten/theory.hpp"

namespace kesten {

using Json = nlohmann::ordered_json;

// Shortest decimal representation that round-trips.
std::string format_double(double v);

// Reads and parses a JSON file: IoError if unreadable, ConfigError if malformed.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);
void write_json_file(const std::filesystem::path& path, const Json& value);

// {"kind": "binary"|"uniform"|"normal"|"arch1", "sigma"?, "alpha0"?, "alpha1"?, "bound"?}
ReturnProcessSpec process_from_json(const Json& j, const std::string& where = "process");
Json to_json(const ReturnProcessSpec& spec);

SimulationConfig simulation_config_from_json(const Json& j);

Json to_json(const TheoryPrediction& p);
Json to_json(const TailFit& fit);
Json to_json(const ScalingFit& fit);

// "bin_low,bin_high,count,density"
std::string histogram_csv(const LogHistogram& hist);

// Helpers for field-level config errors.
namespace config {

const Json& require(const Json& j, const std::string& key, const std::string& where);
double number(const Json& j, const std::string& key, const std::string& where);
double number_or(const Json& j, const std::string& key, double fallback, const std::string& where);
std::uint64_t unsigned_or(const Json& j, const std::string& key, std::uint64_t fallback,
                          const std::string& where);
bool bool_or(const Json& j, const std::string& key, bool fallback, const std::string& where);

}  // namespace config

}  // namespace kesten
