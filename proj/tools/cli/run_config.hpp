#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gwshm/detectors.hpp"
#include "gwshm/pipeline.hpp"
#include "gwshm/simulate.hpp"

namespace gwshm::cli {

/// Name of the environment variable that overrides the output directory.
inline constexpr const char* kOutputDirEnv = "GWSHM_OUTPUT_DIR";

struct SimulateSettings {
  Scenario scenario;
  std::size_t ladder_steps = 6;
  double final_attenuation = 0.5;
  double max_delay = 50e-9;
  double max_scatter = 0.0;
  /// Noise level as SNR in dB against the received burst; ignored when
  /// noise_std is given explicitly.
  std::optional<double> snr_db = 40.0;
};

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path output_dir = "out";
  PipelineConfig pipeline;
  std::vector<Metric> metrics = {Metric::F, Metric::Fm, Metric::Z, Metric::JanapatiDI,
                                 Metric::QiuDI};
  std::vector<double> alphas = {0.05};
  std::vector<double> alpha_grid;  // ROC sweep; default grid when empty
  std::vector<std::string> roc_labels;
  std::filesystem::path cases;  // report input; <output>/detect/cases.csv when empty
  std::uint64_t seed = 1;
  SimulateSettings simulate;
};

/// Settings as `section.key` -> value text. Flags and config files both land
/// here before being parsed, so they share one set of rules.
using Settings = std::map<std::string, std::string>;

/// Loads `[section] key = value` pairs from a config file.
Settings read_settings(const std::filesystem::path& file);

/// Builds a RunConfig from layered settings: defaults, then the config file,
/// then the output-dir environment variable, then command-line overrides.
/// Unknown keys and malformed values throw ValidationError.
RunConfig resolve_config(const Settings& file, const Settings& overrides,
                         const char* env_output_dir);

/// Keys accepted in config files and as overrides.
const std::vector<std::string>& known_keys();

}  // namespace gwshm::cli
