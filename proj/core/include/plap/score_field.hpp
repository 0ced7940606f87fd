#pragma once

#include "plap/types.hpp"

#include <functional>
#include <memory>
#include <string>

namespace plap {

/// An evaluatable score field x -> s(x) with its noise level already bound.
///
/// Oracle (analytic GMM) and learned (diffusion model) scores are both exposed
/// through this type. Copies share the underlying callable, which must be
/// reentrant; every field built by this library is.
class ScoreField {
public:
  using Fn = std::function<Point(const Point&)>;

  ScoreField(int dim, Fn fn, std::string name = "field");

  Point operator()(const Point& x) const { return (*fn_)(x); }
  int dim() const { return dim_; }
  const std::string& name() const { return name_; }

  /// c * s(x); the field of c * u when s = grad u.
  ScoreField scaled(double c) const;

  static ScoreField zero(int dim);
  static ScoreField constant(Point value);
  /// s(x) = A (x - origin).
  static ScoreField linear(Eigen::MatrixXd a, Point origin);

private:
  int dim_;
  std::shared_ptr<const Fn> fn_;
  std::string name_;
};

}  // namespace plap
