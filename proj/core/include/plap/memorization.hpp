#pragma once

#include "plap/gmm.hpp"
#include "plap/plaplace.hpp"
#include "plap/score_field.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace plap {

/// Training set = base samples plus `n_replicas` copies of one of them.
struct MemorizationScenario {
  PointList base_samples;
  Point memorized_point;
  std::size_t memorized_index = 0;
  int n_replicas = 0;
  std::uint64_t seed = 0;

  PointList training_set() const;
};

MemorizationScenario build_scenario(const GmmParams& gmm, int n_base, int n_replicas,
                                    std::uint64_t seed);

/// Rectangular lattice of 2D nodes; node(i, j) = (xs[j], ys[i]).
struct Grid2D {
  std::vector<double> xs;
  std::vector<double> ys;

  static Grid2D linspace(double x_lo, double x_hi, double y_lo, double y_hi, int nx, int ny);
  /// Bounding box of the mixture means inflated by `inflate_sigmas` standard deviations.
  static Grid2D covering(const GmmParams& gmm, int n = 40, double inflate_sigmas = 2.0);

  int rows() const { return static_cast<int>(ys.size()); }
  int cols() const { return static_cast<int>(xs.size()); }
  Point node(int i, int j) const;
};

/// Estimate (cfg.formulation) at every node; node (i, j) uses substream
/// i * cols + j of `seed`. Returns a rows x cols matrix.
Eigen::MatrixXd grid_p_laplace(const ScoreField& field, const Grid2D& grid,
                               const EstimatorConfig& cfg, std::uint64_t seed);

/// 100 * (#{v_i < v} + 0.5 #{v_i == v}) / n.
double percentile_rank(std::span<const double> values, double value);
double percentile_rank(const Eigen::MatrixXd& grid_values, double value);

enum class Orientation { lower_is_positive, higher_is_positive };

/// Mann-Whitney AUC: probability that a memorized value outranks a background
/// value in the given orientation, ties counted as one half.
double auc(std::span<const double> memorized, std::span<const double> background,
           Orientation orientation);

/// ||s_hat(x)||, the promptless score-magnitude baseline.
double score_norm_criterion(const ScoreField& field, const Point& x);

struct DetectionResult {
  std::string criterion_name;  ///< "p_laplace" or "score_norm"
  std::vector<double> values_memorized;
  std::vector<double> values_background;
  double percentile = 0.0;
  double auc = 0.5;
};

}  // namespace plap
