#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace plap {

/// A point (or vector) in R^d. Every coordinate in the library uses this type.
using Point = Eigen::VectorXd;
using PointList = std::vector<Point>;

/// Raised when a measure or estimate cannot be represented as a finite double.
class OverflowError : public std::overflow_error {
public:
  using std::overflow_error::overflow_error;
};

/// Raised when p < 2 and the operator is evaluated where the gradient vanishes.
class SingularityError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Training loss or sampler state became non-finite.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, int step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  int step() const noexcept { return step_; }

private:
  int step_;
};

/// All N samples of a Monte Carlo estimate were singular.
class EstimationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace plap
