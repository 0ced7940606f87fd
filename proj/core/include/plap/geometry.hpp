#pragma once

#include "plap/rng.hpp"
#include "plap/types.hpp"

#include <vector>

namespace plap {

/// Closed ball B_R(center) in R^dim.
struct BallSpec {
  Point center;
  double radius = 1.0;

  BallSpec(Point c, double r);
  int dim() const { return static_cast<int>(center.size()); }
};

/// A point on a sphere together with its outward unit normal.
struct SphereSample {
  Point point;
  Point normal;
};

/// Volume of the d-ball of radius R: pi^(d/2) R^d / Gamma(d/2 + 1).
/// Evaluated in log space; throws OverflowError if the result is not finite.
double ball_volume(int dim, double radius);

/// Surface measure of the sphere bounding the d-ball: 2 pi^(d/2) R^(d-1) / Gamma(d/2).
double sphere_area(int dim, double radius);

/// |dB_R| / |B_R| = d / R, computed from the two measures.
double sphere_to_ball_ratio(int dim, double radius);

// Both samplers are rejection-free in any dimension: direction from a
// normalized standard-normal draw, radius R (sphere) or R * U^(1/d) (ball).
std::vector<SphereSample> sample_sphere_uniform(const BallSpec& spec, int n, Rng& rng);
PointList sample_ball_uniform(const BallSpec& spec, int n, Rng& rng);

}  // namespace plap
