#pragma once

#include "plap/geometry.hpp"
#include "plap/plaplace.hpp"
#include "plap/score_field.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace plap {

/// Error bound on |avg Delta_p s - avg Delta_p s_hat| over B_R for the boundary
/// formulation:
///   (d/R) delta M^(p-2) (p-1)   for p >= 2
///   (d/R) delta m^(p-2) (3-p)   for p < 2
/// `normalized` = false drops the d/R factor to match unnormalized estimates.
/// Throws std::invalid_argument for p < 1, delta < 0 or !(0 < m <= M).
double bound_constant(double p, double delta, double m, double big_m, int dim, double radius,
                      bool normalized = true);

/// min over t in [0, 1] of ||t a + (1 - t) b||, in closed form.
double segment_min_norm(const Point& a, const Point& b);

struct AssumptionConstants {
  double delta_raw = 0.0;  ///< max ||s - s_hat|| over the samples
  double delta = 0.0;      ///< delta_raw inflated by 1%
  double m = 0.0;          ///< min norm over both fields and every segment
  double big_m = 0.0;      ///< max norm over both fields
  double segment_min = 0.0;       ///< closed-form segment minimum
  double segment_min_grid = 0.0;  ///< minimum over the n_segment equispaced t values
  bool assumptions_ok = false;
};

inline constexpr double kDeltaInflation = 1.01;

/// Constants of the bound estimated on a shared sphere sample set. m is the
/// smaller of the grid and closed-form segment minima, so the bound stays
/// valid for the sampled points. assumptions_ok requires m above kGradientFloor.
AssumptionConstants estimate_assumption_constants(const ScoreField& s, const ScoreField& s_hat,
                                                  std::span<const SphereSample> samples,
                                                  int n_segment = 11);
AssumptionConstants estimate_assumption_constants(const ScoreField& s, const ScoreField& s_hat,
                                                  const Point& anchor, double radius,
                                                  int n_samples, int n_segment, Rng& rng);

struct BoundReport {
  Point anchor;
  double p = 1.0;
  double delta = 0.0;
  double m = 0.0;
  double big_m = 0.0;
  double c_p = 0.0;  ///< +inf when assumptions fail and p < 2
  double empirical_error = 0.0;
  bool assumptions_ok = false;
  double segment_min = 0.0;
  double estimate_s = 0.0;
  double estimate_s_hat = 0.0;
};

/// Per anchor: boundary estimates of both fields on one sphere sample set
/// (substream `k` of `seed` for anchor k), assumption constants and c_p.
std::vector<BoundReport> validate_bound(const ScoreField& s, const ScoreField& s_hat,
                                        std::span<const Point> anchors,
                                        const EstimatorConfig& cfg, std::uint64_t seed,
                                        int n_segment = 11);

/// c_p over a delta x m lattice (rows follow `deltas`, columns `ms`).
Eigen::MatrixXd bound_surface(double p, std::span<const double> deltas, std::span<const double> ms,
                              double big_m, int dim, double radius);

}  // namespace plap
