#pragma once

#include "plap/geometry.hpp"
#include "plap/rng.hpp"
#include "plap/score_field.hpp"
#include "plap/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace plap {

enum class Formulation { volume, boundary };

std::string_view to_string(Formulation f);
Formulation formulation_from_string(std::string_view s);

struct EstimatorConfig {
  double p = 1.0;
  double radius = 1.0;
  int n_samples = 100;
  double fd_step = 1e-3;
  Formulation formulation = Formulation::boundary;
  /// Multiply the boundary mean by |dB_R| / |B_R|. Turn off for ranking-only use.
  bool normalize_by_volume = true;

  void validate() const;
};

/// Averaged p-Laplace over B_R(x0).
struct PLaplaceEstimate {
  double value = 0.0;
  /// Standard error of the mean, including any normalization factor.
  double std_error = 0.0;
  int n_used = 0;
  /// Samples skipped because |s| < kGradientFloor with p < 2.
  int singular_hits = 0;
};

/// |s(y)|^(p-2) s(y) . normal. nullopt marks a singular sample (p < 2, |s| < floor).
std::optional<double> flux_density(const ScoreField& field, const Point& y, const Point& normal,
                                   double p);
/// Same, for an already evaluated score vector.
std::optional<double> flux_density(const Point& s, const Point& normal, double p);

/// Central-difference divergence of v(x) = |s(x)|^(p-2) s(x):
/// sum_j (v_j(x + h e_j) - v_j(x - h e_j)) / (2h). nullopt if any stencil point is singular.
std::optional<double> divergence_fd(const ScoreField& field, const Point& x, double p, double h);

PLaplaceEstimate estimate_volume(const ScoreField& field, const Point& x0,
                                 const EstimatorConfig& cfg, Rng& rng);
PLaplaceEstimate estimate_boundary(const ScoreField& field, const Point& x0,
                                   const EstimatorConfig& cfg, Rng& rng);
/// Boundary estimate on a caller-supplied sphere sample set.
PLaplaceEstimate estimate_boundary(const ScoreField& field, std::span<const SphereSample> samples,
                                   const EstimatorConfig& cfg);
/// Dispatches on cfg.formulation.
PLaplaceEstimate estimate(const ScoreField& field, const Point& x0, const EstimatorConfig& cfg,
                          Rng& rng);

/// (1/p) * mean(|s|^p) * region_volume over the supplied sample points.
double dirichlet_energy_mc(const ScoreField& field, std::span<const Point> samples, double p,
                           double region_volume);

}  // namespace plap
