#pragma once

// Reference computations used only by tests. None of these call into the
// code paths they are used to check.

#include "plap/geometry.hpp"
#include "plap/gmm.hpp"
#include "plap/rng.hpp"
#include "plap/score_field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace plap::oracle {

/// log of the mixture density by direct summation (no log-sum-exp).
inline double direct_log_density(const GmmParams& g, const Point& x) {
  const double d = static_cast<double>(x.size());
  double sum = 0.0;
  for (int k = 0; k < g.components(); ++k) {
    const double r2 = (x - g.means[k]).squaredNorm();
    sum += g.weights[k] * std::pow(2.0 * std::numbers::pi * g.sigma2, -0.5 * d) *
           std::exp(-0.5 * r2 / g.sigma2);
  }
  return std::log(sum);
}

inline Point fd_gradient(const std::function<double(const Point&)>& f, const Point& x, double h) {
  Point g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Point a = x, b = x;
    a[j] += h;
    b[j] -= h;
    g[j] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// Central-difference divergence of |s|^(p-2) s, written independently of divergence_fd.
inline double fd_flux_divergence(const std::function<Point(const Point&)>& s, const Point& x,
                                 double p, double h) {
  auto v = [&](const Point& y) -> Point {
    const Point sy = s(y);
    return std::pow(sy.norm(), p - 2.0) * sy;
  };
  double div = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Point a = x, b = x;
    a[j] += h;
    b[j] -= h;
    div += (v(a)[j] - v(b)[j]) / (2.0 * h);
  }
  return div;
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic 1% critical value of the KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

/// AUC by exhaustive pair counting.
inline double pairwise_auc_lower(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double a : pos)
    for (double b : neg) wins += a < b ? 1.0 : (a == b ? 0.5 : 0.0);
  return wins / static_cast<double>(pos.size() * neg.size());
}

inline double relative_error(const Point& a, const Point& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

struct DenseAverage {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Ball average of the analytic pointwise p-Laplace by dense Monte Carlo.
inline DenseAverage dense_ball_average(const GmmParams& g, const Point& center, double radius,
                                       double p, int n, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  const auto pts = sample_ball_uniform(BallSpec(center, radius), n, rng);
  double sum = 0.0, sq = 0.0;
  int used = 0;
  for (const auto& x : pts) {
    if (auto v = pointwise_p_laplace_exact(g, x, p, scale)) {
      sum += *v;
      sq += *v * *v;
      ++used;
    }
  }
  const double mean = sum / used;
  const double var = (sq / used - mean * mean) * used / (used - 1.0);
  return {mean, std::sqrt(std::max(var, 0.0) / used)};
}

}  // namespace plap::oracle
