#include "plap/score_field.hpp"

#include <stdexcept>

namespace plap {

ScoreField::ScoreField(int dim, Fn fn, std::string name)
    : dim_(dim), fn_(std::make_shared<const Fn>(std::move(fn))), name_(std::move(name)) {
  if (dim_ < 1) throw std::invalid_argument("score field dimension must be >= 1");
  if (!*fn_) throw std::invalid_argument("score field callable is empty");
}

ScoreField ScoreField::scaled(double c) const {
  auto inner = fn_;
  return ScoreField(
      dim_, [inner, c](const Point& x) -> Point { return c * (*inner)(x); },
      name_ + "*" + std::to_string(c));
}

ScoreField ScoreField::zero(int dim) {
  return ScoreField(dim, [dim](const Point&) -> Point { return Point::Zero(dim); }, "zero");
}

ScoreField ScoreField::constant(Point value) {
  const int dim = static_cast<int>(value.size());
  return ScoreField(dim, [value = std::move(value)](const Point&) -> Point { return value; },
                    "constant");
}

ScoreField ScoreField::linear(Eigen::MatrixXd a, Point origin) {
  if (a.rows() != a.cols() || a.rows() != origin.size())
    throw std::invalid_argument("linear field needs a square matrix matching the origin");
  const int dim = static_cast<int>(origin.size());
  return ScoreField(
      dim,
      [a = std::move(a), origin = std::move(origin)](const Point& x) -> Point {
        return a * (x - origin);
      },
      "linear");
}

}  // namespace plap
