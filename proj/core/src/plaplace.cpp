#include "plap/plaplace.hpp"

#include "plap/gmm.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace plap {
namespace {

// |s|^(p-2) s, or nullopt when singular.
std::optional<Point> flux_vector(const Point& s, double p) {
  if (p == 2.0) return s;
  const double norm = s.norm();
  if (norm < kGradientFloor) {
    if (p < 2.0) return std::nullopt;
    return Point::Zero(s.size());
  }
  return std::pow(norm, p - 2.0) * s;
}

PLaplaceEstimate summarize(const std::vector<double>& values, int n_total, double factor) {
  PLaplaceEstimate e;
  e.n_used = static_cast<int>(values.size());
  e.singular_hits = n_total - e.n_used;
  if (values.empty()) throw EstimationError("every Monte Carlo sample was singular");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(values.size());
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  e.value = factor * mean;
  e.std_error = std::abs(factor) * sd / std::sqrt(n);
  return e;
}

}  // namespace

std::string_view to_string(Formulation f) {
  return f == Formulation::volume ? "volume" : "boundary";
}

Formulation formulation_from_string(std::string_view s) {
  if (s == "volume") return Formulation::volume;
  if (s == "boundary") return Formulation::boundary;
  throw std::invalid_argument("unknown formulation: " + std::string(s));
}

void EstimatorConfig::validate() const {
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step must be > 0");
}

std::optional<double> flux_density(const Point& s, const Point& normal, double p) {
  auto v = flux_vector(s, p);
  if (!v) return std::nullopt;
  return v->dot(normal);
}

std::optional<double> flux_density(const ScoreField& field, const Point& y, const Point& normal,
                                   double p) {
  return flux_density(field(y), normal, p);
}

std::optional<double> divergence_fd(const ScoreField& field, const Point& x, double p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
  double div = 0.0;
  Point probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const auto plus = flux_vector(field(probe), p);
    probe[j] = x[j] - h;
    const auto minus = flux_vector(field(probe), p);
    probe[j] = x[j];
    if (!plus || !minus) return std::nullopt;
    div += ((*plus)[j] - (*minus)[j]) / (2.0 * h);
  }
  return div;
}

PLaplaceEstimate estimate_volume(const ScoreField& field, const Point& x0,
                                 const EstimatorConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto points = sample_ball_uniform(BallSpec(x0, cfg.radius), cfg.n_samples, rng);
  std::vector<double> values;
  values.reserve(points.size());
  for (const auto& x : points)
    if (auto v = divergence_fd(field, x, cfg.p, cfg.fd_step)) values.push_back(*v);
  return summarize(values, cfg.n_samples, 1.0);
}

PLaplaceEstimate estimate_boundary(const ScoreField& field, std::span<const SphereSample> samples,
                                   const EstimatorConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw std::invalid_argument("no sphere samples supplied");
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples)
    if (auto v = flux_density(field, s.point, s.normal, cfg.p)) values.push_back(*v);
  const double factor =
      cfg.normalize_by_volume ? sphere_to_ball_ratio(field.dim(), cfg.radius) : 1.0;
  return summarize(values, static_cast<int>(samples.size()), factor);
}

PLaplaceEstimate estimate_boundary(const ScoreField& field, const Point& x0,
                                   const EstimatorConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto samples = sample_sphere_uniform(BallSpec(x0, cfg.radius), cfg.n_samples, rng);
  return estimate_boundary(field, samples, cfg);
}

PLaplaceEstimate estimate(const ScoreField& field, const Point& x0, const EstimatorConfig& cfg,
                          Rng& rng) {
  return cfg.formulation == Formulation::volume ? estimate_volume(field, x0, cfg, rng)
                                                : estimate_boundary(field, x0, cfg, rng);
}

double dirichlet_energy_mc(const ScoreField& field, std::span<const Point> samples, double p,
                           double region_volume) {
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  if (samples.empty()) throw std::invalid_argument("no region samples supplied");
  double total = 0.0;
  for (const auto& x : samples) total += std::pow(field(x).norm(), p);
  return total / static_cast<double>(samples.size()) * region_volume / p;
}

}  // namespace plap
