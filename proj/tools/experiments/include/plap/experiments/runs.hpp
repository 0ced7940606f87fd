#pragma once

#include "plap/bounds.hpp"
#include "plap/experiments/config.hpp"
#include "plap/memorization.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace plap::experiments {

struct SeedFailure {
  std::uint64_t seed = 0;
  std::string error;
};

/// Result of a CLI command over every configured seed. Per-seed artifacts live
/// under out/seed_<s>/; summary.json merges them, errors.json lists failures.
struct RunOutcome {
  nlohmann::json summary;
  std::vector<SeedFailure> failures;

  int exit_code() const { return failures.empty() ? 0 : 1; }
};

/// Training data drawn from the config GMM and a model fit on it.
struct TrainedModel {
  PointList data;
  TrainResult result;
};
TrainedModel train_for_seed(const ExperimentConfig& cfg, std::uint64_t seed);
TrainedModel train_on(const ExperimentConfig& cfg, const PointList& data, std::uint64_t seed);

// ---- fidelity ---------------------------------------------------------------

struct Anchor {
  std::string kind;  // "maximum", "midpoint" or "slope"
  Point x;
};

/// Fixed point of x = sum_k r_k(x) mu_k, which is stationary for equal isotropic components.
Point refine_mode(const GmmParams& g, Point start, int iterations = 500);

/// One refined mode per component, followed by the non-maxima of `opts`:
/// midpoints of every pair of means, or one point per mode moved
/// `offset_sigmas` standard deviations away from the centroid of the means.
std::vector<Anchor> fidelity_anchors(const GmmParams& g, const FidelityOptions& opts);

struct FidelityRow {
  std::string field;  // "oracle" or "learned"
  std::size_t anchor = 0;
  double p = 1.0;
  Formulation formulation = Formulation::boundary;
  int rep = 0;
  PLaplaceEstimate estimate;
};

struct ExactAverage {
  std::size_t anchor = 0;
  double p = 1.0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct FidelitySeedResult {
  std::uint64_t seed = 0;
  std::vector<Anchor> anchors;
  std::vector<FidelityRow> rows;
  std::vector<ExactAverage> exact;
  std::vector<double> cosines;           // cos(s_hat, s) on the evaluation grid
  std::vector<double> magnitude_ratios;  // |s_hat| / |s| on the same grid
  double median_cosine = 0.0;
  std::vector<double> epoch_loss;
};

FidelitySeedResult fidelity_seed(const ExperimentConfig& cfg, std::uint64_t seed);
RunOutcome run_fidelity(const ExperimentConfig& cfg, const std::filesystem::path& out);

// ---- memorization -----------------------------------------------------------

struct CriterionReport {
  DetectionResult detection;
  double p = 0.0;  // 0 for the score-norm baseline
  Eigen::MatrixXd grid;
  double grid_min = 0.0;
  /// Chebyshev distance, in grid cells, from the grid argmin (argmax for the
  /// score norm) to the memorized point.
  double extremum_offset_cells = 0.0;
};

struct MemorizationSeedResult {
  std::uint64_t seed = 0;
  MemorizationScenario scenario;
  Grid2D grid;
  std::vector<CriterionReport> criteria;  // one per p, then score_norm
  std::vector<double> epoch_loss;
};

MemorizationSeedResult memorization_seed(const ExperimentConfig& cfg, std::uint64_t seed);
RunOutcome run_memorization(const ExperimentConfig& cfg, const std::filesystem::path& out);

// ---- bounds -----------------------------------------------------------------

struct BoundsSeedResult {
  std::uint64_t seed = 0;
  PointList anchors;
  std::vector<std::vector<BoundReport>> reports;  // indexed like cfg.p_values
  std::vector<double> epoch_loss;
};

BoundsSeedResult bounds_seed(const ExperimentConfig& cfg, std::uint64_t seed);
RunOutcome run_bounds(const ExperimentConfig& cfg, const std::filesystem::path& out);

// ---- model utilities --------------------------------------------------------

RunOutcome run_train(const ExperimentConfig& cfg, const std::filesystem::path& out);
RunOutcome run_sample(const ExperimentConfig& cfg, const std::filesystem::path& out);

}  // namespace plap::experiments
