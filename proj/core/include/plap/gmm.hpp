#pragma once

#include "plap/rng.hpp"
#include "plap/score_field.hpp"
#include "plap/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace plap {

/// Gradient norms below this floor make the p < 2 operator singular.
inline constexpr double kGradientFloor = 1e-8;

/// Isotropic Gaussian mixture: sum_k w_k N(x; mu_k, sigma2 I).
struct GmmParams {
  PointList means;
  double sigma2 = 1.0;
  std::vector<double> weights;

  int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }
  int components() const { return static_cast<int>(means.size()); }

  /// Throws std::invalid_argument unless weights sum to 1 (1e-12), dims agree and sigma2 > 0.
  void validate() const;

  static GmmParams equal_weights(PointList means, double sigma2);
  /// K means uniform in [lo, hi]^dim drawn from `seed`, equal weights.
  static GmmParams random(int k, int dim, double sigma2, double lo, double hi, std::uint64_t seed);
};

/// Density of sqrt(1 - alpha) x0 + sqrt(alpha) eps for x0 ~ base.
/// For a GMM this is again a GMM with means sqrt(1 - alpha) mu_k and
/// variance (1 - alpha) sigma2 + alpha.
struct PerturbedGmm {
  GmmParams base;
  double alpha = 0.0;

  PerturbedGmm(GmmParams g, double a);
  GmmParams effective() const;
};

double log_density(const GmmParams& g, const Point& x);
double log_density(const PerturbedGmm& g, const Point& x);

/// grad log p(x) = sum_k r_k(x) (mu_k - x) / sigma2.
Point score(const GmmParams& g, const Point& x);
Point score(const PerturbedGmm& g, const Point& x);

/// Analytic Hessian of log p: sum_k r_k (g_k g_k^T - I / sigma2) - s s^T.
Eigen::MatrixXd hessian(const GmmParams& g, const Point& x);

/// |g|^(p-2) (tr H + (p - 2) g^T H g / |g|^2) for gradient g and Hessian H.
/// Returns nullopt when p < 2 and |g| < kGradientFloor.
std::optional<double> p_laplace_from_derivatives(const Point& grad, const Eigen::MatrixXd& hess,
                                                 double p);

/// Exact pointwise p-Laplace of scale * log p at x (scale = 1 is log p itself).
std::optional<double> pointwise_p_laplace_exact(const GmmParams& g, const Point& x, double p,
                                                double scale = 1.0);
std::optional<double> pointwise_p_laplace_exact(const PerturbedGmm& g, const Point& x, double p,
                                                double scale = 1.0);

PointList sample(const GmmParams& g, int n, Rng& rng);

ScoreField oracle_field(const GmmParams& g);
ScoreField oracle_field(const PerturbedGmm& g);

/// {"means": [[...]], "sigma2": s, "weights": [...]}.
nlohmann::json to_json(const GmmParams& g);
/// Accepts the explicit form above (weights optional, default equal) or a
/// random form {"components", "dim", "sigma2", "mean_range": [lo, hi], "seed"}.
/// Unknown keys are rejected.
GmmParams gmm_from_json(const nlohmann::json& j);

}  // namespace plap
