#include "plap/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace plap {
namespace {

void check_measure_args(int dim, double radius) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
}

double checked_exp(double log_value, const char* what) {
  const double v = std::exp(log_value);
  if (!std::isfinite(v) || v == 0.0) throw OverflowError(std::string(what) + " not representable");
  return v;
}

Point unit_direction(int dim, Rng& rng) {
  for (;;) {
    Point v = rng.normal_vector(dim);
    const double n = v.norm();
    if (n > 0.0) return v / n;
  }
}

}  // namespace

BallSpec::BallSpec(Point c, double r) : center(std::move(c)), radius(r) {
  if (center.size() < 1) throw std::invalid_argument("ball center must have dim >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be > 0");
}

double ball_volume(int dim, double radius) {
  check_measure_args(dim, radius);
  const double d = dim;
  const double log_v =
      0.5 * d * std::log(std::numbers::pi) + d * std::log(radius) - std::lgamma(0.5 * d + 1.0);
  return checked_exp(log_v, "ball volume");
}

double sphere_area(int dim, double radius) {
  check_measure_args(dim, radius);
  const double d = dim;
  const double log_a = std::log(2.0) + 0.5 * d * std::log(std::numbers::pi) +
                       (d - 1.0) * std::log(radius) - std::lgamma(0.5 * d);
  return checked_exp(log_a, "sphere area");
}

double sphere_to_ball_ratio(int dim, double radius) {
  return sphere_area(dim, radius) / ball_volume(dim, radius);
}

std::vector<SphereSample> sample_sphere_uniform(const BallSpec& spec, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  std::vector<SphereSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Point dir = unit_direction(spec.dim(), rng);
    Point y = spec.center + spec.radius * dir;
    out.push_back({std::move(y), std::move(dir)});
  }
  return out;
}

PointList sample_ball_uniform(const BallSpec& spec, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  PointList out;
  out.reserve(static_cast<std::size_t>(n));
  const double inv_d = 1.0 / spec.dim();
  for (int i = 0; i < n; ++i) {
    Point dir = unit_direction(spec.dim(), rng);
    const double r = spec.radius * std::pow(rng.uniform(), inv_d);
    out.push_back(spec.center + r * dir);
  }
  return out;
}

}  // namespace plap
