#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace latentlab::experiments {

inline constexpr const char* kVersion = "latentlab 0.1.0";

/// Raised for schema violations; the message carries the offending field path.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunResult {
  std::string run_id;      ///< hash of the resolved config
  std::string csv;         ///< full results.csv contents
  nlohmann::json summary;  ///< embeds the resolved config and version string
};

/// Registry order is the catalog order printed by `latentlab list`.
std::vector<std::string> experiment_names();

bool is_experiment(const std::string& name);

/// The experiment's bundled, runnable default configuration.
nlohmann::json default_config(const std::string& name);

/// Deep-merges user config over the defaults, rejecting unknown fields and
/// type mismatches. When require_seed is set, "seed" must appear in the user
/// config itself.
nlohmann::json resolve_config(const std::string& name, const nlohmann::json& user,
                              bool require_seed);

/// Runs the experiment on a resolved or partial config (merged internally).
/// Output bytes depend only on (config, seed), never on the thread count.
RunResult run_experiment(const std::string& name, const nlohmann::json& user_config, int threads);

/// Runs and writes <out_dir>/<name>/<run_id>/{results.csv, summary.json};
/// returns the run directory.
std::string run_and_write(const std::string& name, const nlohmann::json& user_config,
                          const std::string& out_dir, int threads);

/// Shortest round-trip decimal representation (used for all CSV floats).
std::string format_double(double value);

}  // namespace latentlab::experiments
