#include "plap/bounds.hpp"

#include "plap/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plap {

double bound_constant(double p, double delta, double m, double big_m, int dim, double radius,
                      bool normalized) {
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  if (!(m > 0.0 && m <= big_m)) throw std::invalid_argument("need 0 < m <= M");
  const double factor = normalized ? sphere_to_ball_ratio(dim, radius) : 1.0;
  if (p >= 2.0) return factor * delta * std::pow(big_m, p - 2.0) * (p - 1.0);
  return factor * delta * std::pow(m, p - 2.0) * (3.0 - p);
}

double segment_min_norm(const Point& a, const Point& b) {
  // ||b + t (a - b)||^2 is a convex quadratic in t.
  const Point diff = a - b;
  const double dd = diff.squaredNorm();
  double t = 0.0;
  if (dd > 0.0) t = std::clamp(-b.dot(diff) / dd, 0.0, 1.0);
  return (b + t * diff).norm();
}

AssumptionConstants estimate_assumption_constants(const ScoreField& s, const ScoreField& s_hat,
                                                  std::span<const SphereSample> samples,
                                                  int n_segment) {
  if (samples.empty()) throw std::invalid_argument("no sphere samples supplied");
  if (n_segment < 2) throw std::invalid_argument("segment check needs at least 2 points");
  AssumptionConstants c;
  c.segment_min = std::numeric_limits<double>::infinity();
  c.segment_min_grid = std::numeric_limits<double>::infinity();
  for (const auto& sample : samples) {
    const Point a = s(sample.point);
    const Point b = s_hat(sample.point);
    c.delta_raw = std::max(c.delta_raw, (a - b).norm());
    c.big_m = std::max({c.big_m, a.norm(), b.norm()});
    c.segment_min = std::min(c.segment_min, segment_min_norm(a, b));
    for (int i = 0; i < n_segment; ++i) {
      const double t = static_cast<double>(i) / (n_segment - 1);
      c.segment_min_grid = std::min(c.segment_min_grid, (t * a + (1.0 - t) * b).norm());
    }
  }
  c.delta = kDeltaInflation * c.delta_raw;
  c.m = std::min(c.segment_min, c.segment_min_grid);
  c.assumptions_ok = c.m > kGradientFloor;
  return c;
}

AssumptionConstants estimate_assumption_constants(const ScoreField& s, const ScoreField& s_hat,
                                                  const Point& anchor, double radius,
                                                  int n_samples, int n_segment, Rng& rng) {
  const auto samples = sample_sphere_uniform(BallSpec(anchor, radius), n_samples, rng);
  return estimate_assumption_constants(s, s_hat, samples, n_segment);
}

std::vector<BoundReport> validate_bound(const ScoreField& s, const ScoreField& s_hat,
                                        std::span<const Point> anchors,
                                        const EstimatorConfig& cfg, std::uint64_t seed,
                                        int n_segment) {
  cfg.validate();
  if (cfg.formulation != Formulation::boundary)
    throw std::invalid_argument("bound validation applies to the boundary formulation");
  std::vector<BoundReport> out;
  out.reserve(anchors.size());
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    Rng rng = Rng::substream(seed, k);
    const auto samples = sample_sphere_uniform(BallSpec(anchors[k], cfg.radius), cfg.n_samples, rng);
    const auto c = estimate_assumption_constants(s, s_hat, samples, n_segment);

    BoundReport r;
    r.anchor = anchors[k];
    r.p = cfg.p;
    r.delta = c.delta;
    r.m = c.m;
    r.big_m = c.big_m;
    r.segment_min = c.segment_min;
    r.assumptions_ok = c.assumptions_ok;
    if (c.assumptions_ok) {
      r.c_p = bound_constant(cfg.p, c.delta, c.m, c.big_m, s.dim(), cfg.radius,
                             cfg.normalize_by_volume);
    } else if (cfg.p >= 2.0 && c.big_m > 0.0) {
      const double factor = cfg.normalize_by_volume ? sphere_to_ball_ratio(s.dim(), cfg.radius) : 1.0;
      r.c_p = factor * c.delta * std::pow(c.big_m, cfg.p - 2.0) * (cfg.p - 1.0);
    } else {
      r.c_p = std::numeric_limits<double>::infinity();
    }
    const auto est_s = estimate_boundary(s, samples, cfg);
    const auto est_hat = estimate_boundary(s_hat, samples, cfg);
    r.estimate_s = est_s.value;
    r.estimate_s_hat = est_hat.value;
    r.empirical_error = std::abs(est_s.value - est_hat.value);
    out.push_back(std::move(r));
  }
  return out;
}

Eigen::MatrixXd bound_surface(double p, std::span<const double> deltas, std::span<const double> ms,
                              double big_m, int dim, double radius) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(deltas.size()),
                      static_cast<Eigen::Index>(ms.size()));
  for (std::size_t i = 0; i < deltas.size(); ++i)
    for (std::size_t j = 0; j < ms.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          bound_constant(p, deltas[i], ms[j], std::max(big_m, ms[j]), dim, radius);
  return out;
}

}  // namespace plap
