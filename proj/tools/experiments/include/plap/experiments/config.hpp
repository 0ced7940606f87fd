#pragma once

#include "plap/gmm.hpp"
#include "plap/plaplace.hpp"
#include "plap/score_model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plap::experiments {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { fidelity, memorization, bounds };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

struct TrainingOptions {
  TrainConfig train;  // seed is derived per run
  MlpConfig arch;
  int n_train = 1000;
};

struct FidelityOptions {
  int repetitions = 100;
  int dense_samples = 1000000;
  int cosine_grid = 20;
  /// "midpoints": between each pair of component means. "slopes": outward
  /// from each mode by offset_sigmas standard deviations.
  std::string non_maxima = "midpoints";
  double offset_sigmas = 1.5;
};

struct MemorizationOptions {
  int n_base = 1000;
  int n_replicas = 250;
  int grid_size = 40;
  double inflate_sigmas = 2.0;
  int memorized_repeats = 10;
  int n_background = 200;
};

struct BoundsOptions {
  int n_anchors = 64;
  int n_segment = 11;
  bool self_test = false;
  int surface_resolution = 25;
};

struct SampleOptions {
  int n_samples = 1000;
  std::string checkpoint;  // empty: train from the config first
};

struct ExperimentConfig {
  std::optional<ExperimentKind> experiment;
  nlohmann::json gmm_spec;  // as written, kept for the reproducibility header
  GmmParams gmm;
  nlohmann::json schedule_spec;
  NoiseSchedule schedule = NoiseSchedule::standard();
  TrainingOptions training;
  EstimatorConfig estimator;
  std::vector<double> p_values = {1.0, 2.0, 3.0};
  std::vector<std::uint64_t> seeds = {0};
  std::filesystem::path output_dir = "out";
  FidelityOptions fidelity;
  MemorizationOptions memorization;
  BoundsOptions bounds;
  SampleOptions sample;
};

/// Defaults used when a block or key is omitted.
ExperimentConfig default_config();

/// Strict parse: unknown keys anywhere raise ConfigError naming the key path.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved config, every default filled in. Round-trips through config_from_json.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Independent 64-bit seed for one stage of a run.
std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t stage);

namespace stage {
inline constexpr std::uint64_t data = 1;
inline constexpr std::uint64_t training = 2;
inline constexpr std::uint64_t estimation = 3;
inline constexpr std::uint64_t anchors = 4;
inline constexpr std::uint64_t background = 5;
inline constexpr std::uint64_t exact = 6;
}  // namespace stage

}  // namespace plap::experiments
