#include "plap/memorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace plap {

PointList MemorizationScenario::training_set() const {
  PointList out = base_samples;
  out.reserve(base_samples.size() + static_cast<std::size_t>(n_replicas));
  for (int i = 0; i < n_replicas; ++i) out.push_back(memorized_point);
  return out;
}

MemorizationScenario build_scenario(const GmmParams& gmm, int n_base, int n_replicas,
                                    std::uint64_t seed) {
  if (n_base < 1) throw std::invalid_argument("n_base must be >= 1");
  if (n_replicas < 0) throw std::invalid_argument("n_replicas must be >= 0");
  Rng rng = Rng::substream(seed, 0);
  MemorizationScenario s;
  s.base_samples = sample(gmm, n_base, rng);
  s.memorized_index = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n_base)));
  s.memorized_point = s.base_samples[s.memorized_index];
  s.n_replicas = n_replicas;
  s.seed = seed;
  return s;
}

Grid2D Grid2D::linspace(double x_lo, double x_hi, double y_lo, double y_hi, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid needs at least one node per axis");
  auto axis = [](double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
    return v;
  };
  return {axis(x_lo, x_hi, nx), axis(y_lo, y_hi, ny)};
}

Grid2D Grid2D::covering(const GmmParams& gmm, int n, double inflate_sigmas) {
  if (gmm.dim() != 2) throw std::invalid_argument("grid evaluation is two-dimensional");
  Eigen::Vector2d lo = gmm.means.front(), hi = gmm.means.front();
  for (const auto& m : gmm.means) {
    lo = lo.cwiseMin(Eigen::Vector2d(m));
    hi = hi.cwiseMax(Eigen::Vector2d(m));
  }
  const double pad = inflate_sigmas * std::sqrt(gmm.sigma2);
  return linspace(lo.x() - pad, hi.x() + pad, lo.y() - pad, hi.y() + pad, n, n);
}

Point Grid2D::node(int i, int j) const {
  Point p(2);
  p << xs.at(static_cast<std::size_t>(j)), ys.at(static_cast<std::size_t>(i));
  return p;
}

Eigen::MatrixXd grid_p_laplace(const ScoreField& field, const Grid2D& grid,
                               const EstimatorConfig& cfg, std::uint64_t seed) {
  if (field.dim() != 2) throw std::invalid_argument("grid evaluation is two-dimensional");
  Eigen::MatrixXd out(grid.rows(), grid.cols());
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) {
      Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i) * grid.cols() + j);
      out(i, j) = estimate(field, grid.node(i, j), cfg, rng).value;
    }
  }
  return out;
}

double percentile_rank(std::span<const double> values, double value) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  double below = 0.0;
  for (double v : values) {
    if (v < value) below += 1.0;
    else if (v == value) below += 0.5;
  }
  return 100.0 * below / static_cast<double>(values.size());
}

double percentile_rank(const Eigen::MatrixXd& grid_values, double value) {
  return percentile_rank(std::span<const double>(grid_values.data(),
                                                 static_cast<std::size_t>(grid_values.size())),
                         value);
}

double auc(std::span<const double> memorized, std::span<const double> background,
           Orientation orientation) {
  if (memorized.empty() || background.empty())
    throw std::invalid_argument("AUC needs both groups nonempty");
  const double sign = orientation == Orientation::higher_is_positive ? 1.0 : -1.0;
  struct Item {
    double v;
    bool positive;
  };
  std::vector<Item> all;
  all.reserve(memorized.size() + background.size());
  for (double v : memorized) all.push_back({sign * v, true});
  for (double v : background) all.push_back({sign * v, false});
  std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.v < b.v; });

  // Rank-sum of positives with average ranks over ties.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (all[k].positive) rank_sum += avg_rank;
    i = j;
  }
  const double n_pos = static_cast<double>(memorized.size());
  const double n_neg = static_cast<double>(background.size());
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double score_norm_criterion(const ScoreField& field, const Point& x) { return field(x).norm(); }

}  // namespace plap
