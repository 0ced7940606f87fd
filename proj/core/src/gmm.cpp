#include "plap/gmm.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>

namespace plap {
namespace {

struct Responsibilities {
  std::vector<double> r;
  double log_density;
};

// Softmax-normalized posterior weights of each component at x.
Responsibilities responsibilities(const GmmParams& g, const Point& x) {
  if (x.size() != g.dim()) throw std::invalid_argument("point dimension does not match mixture");
  const int k = g.components();
  const double d = g.dim();
  const double log_norm = -0.5 * d * std::log(2.0 * std::numbers::pi * g.sigma2);
  std::vector<double> logs(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    logs[i] = std::log(g.weights[i]) + log_norm - 0.5 * (x - g.means[i]).squaredNorm() / g.sigma2;
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double total = 0.0;
  for (double& l : logs) {
    l = std::exp(l - top);
    total += l;
  }
  for (double& l : logs) l /= total;
  return {std::move(logs), top + std::log(total)};
}

}  // namespace

void GmmParams::validate() const {
  if (means.empty()) throw std::invalid_argument("mixture needs at least one component");
  if (weights.size() != means.size())
    throw std::invalid_argument("mixture weights and means differ in length");
  const auto d = means.front().size();
  if (d < 1) throw std::invalid_argument("mixture dimension must be >= 1");
  for (const auto& m : means)
    if (m.size() != d) throw std::invalid_argument("mixture means differ in dimension");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("mixture weights must sum to 1");
}

GmmParams GmmParams::equal_weights(PointList means, double sigma2) {
  GmmParams g;
  const auto k = means.size();
  g.means = std::move(means);
  g.sigma2 = sigma2;
  g.weights.assign(k, 1.0 / static_cast<double>(k));
  g.validate();
  return g;
}

GmmParams GmmParams::random(int k, int dim, double sigma2, double lo, double hi,
                            std::uint64_t seed) {
  if (k < 1 || dim < 1) throw std::invalid_argument("need k >= 1 and dim >= 1");
  if (!(hi > lo)) throw std::invalid_argument("mean range must satisfy hi > lo");
  Rng rng(seed);
  PointList means;
  for (int i = 0; i < k; ++i) {
    Point m(dim);
    for (int j = 0; j < dim; ++j) m[j] = lo + (hi - lo) * rng.uniform();
    means.push_back(std::move(m));
  }
  return equal_weights(std::move(means), sigma2);
}

PerturbedGmm::PerturbedGmm(GmmParams g, double a) : base(std::move(g)), alpha(a) {
  base.validate();
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
}

GmmParams PerturbedGmm::effective() const {
  GmmParams g = base;
  const double shrink = std::sqrt(1.0 - alpha);
  for (auto& m : g.means) m *= shrink;
  g.sigma2 = (1.0 - alpha) * base.sigma2 + alpha;
  return g;
}

double log_density(const GmmParams& g, const Point& x) { return responsibilities(g, x).log_density; }
double log_density(const PerturbedGmm& g, const Point& x) { return log_density(g.effective(), x); }

Point score(const GmmParams& g, const Point& x) {
  const auto resp = responsibilities(g, x);
  Point s = Point::Zero(x.size());
  for (int i = 0; i < g.components(); ++i) s += resp.r[i] * (g.means[i] - x);
  return s / g.sigma2;
}

Point score(const PerturbedGmm& g, const Point& x) { return score(g.effective(), x); }

Eigen::MatrixXd hessian(const GmmParams& g, const Point& x) {
  const auto resp = responsibilities(g, x);
  const auto d = x.size();
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
  Point s = Point::Zero(d);
  for (int i = 0; i < g.components(); ++i) {
    const Point gi = (g.means[i] - x) / g.sigma2;
    second.noalias() += resp.r[i] * gi * gi.transpose();
    s += resp.r[i] * gi;
  }
  second.diagonal().array() -= 1.0 / g.sigma2;
  second.noalias() -= s * s.transpose();
  return second;
}

std::optional<double> p_laplace_from_derivatives(const Point& grad, const Eigen::MatrixXd& hess,
                                                 double p) {
  if (p < 1.0) throw std::invalid_argument("p must be >= 1");
  const double norm2 = grad.squaredNorm();
  const double norm = std::sqrt(norm2);
  const double trace = hess.trace();
  if (p == 2.0) return trace;
  if (norm < kGradientFloor) {
    if (p < 2.0) return std::nullopt;
    return 0.0;
  }
  const double quad = grad.dot(hess * grad) / norm2;
  return std::pow(norm, p - 2.0) * (trace + (p - 2.0) * quad);
}

std::optional<double> pointwise_p_laplace_exact(const GmmParams& g, const Point& x, double p,
                                                double scale) {
  return p_laplace_from_derivatives(scale * score(g, x), scale * hessian(g, x), p);
}

std::optional<double> pointwise_p_laplace_exact(const PerturbedGmm& g, const Point& x, double p,
                                                double scale) {
  return pointwise_p_laplace_exact(g.effective(), x, p, scale);
}

PointList sample(const GmmParams& g, int n, Rng& rng) {
  g.validate();
  std::vector<double> cdf(g.weights.size());
  std::partial_sum(g.weights.begin(), g.weights.end(), cdf.begin());
  const double sd = std::sqrt(g.sigma2);
  PointList out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform() * cdf.back();
    auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    k = std::min(k, cdf.size() - 1);
    out.push_back(g.means[k] + sd * rng.normal_vector(g.dim()));
  }
  return out;
}

ScoreField oracle_field(const GmmParams& g) {
  g.validate();
  return ScoreField(
      g.dim(), [g](const Point& x) -> Point { return score(g, x); }, "oracle");
}

ScoreField oracle_field(const PerturbedGmm& g) { return oracle_field(g.effective()); }

nlohmann::json to_json(const GmmParams& g) {
  nlohmann::json means = nlohmann::json::array();
  for (const auto& m : g.means) means.push_back(std::vector<double>(m.data(), m.data() + m.size()));
  return {{"means", means}, {"sigma2", g.sigma2}, {"weights", g.weights}};
}

GmmParams gmm_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("gmm block must be an object");
  static const std::set<std::string> explicit_keys{"means", "sigma2", "weights"};
  static const std::set<std::string> random_keys{"components", "dim", "sigma2", "mean_range",
                                                 "seed"};
  const bool is_explicit = j.contains("means");
  const auto& allowed = is_explicit ? explicit_keys : random_keys;
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw std::invalid_argument("unknown gmm key: " + key);

  const double sigma2 = j.value("sigma2", 1.0);
  if (is_explicit) {
    PointList means;
    for (const auto& row : j.at("means")) {
      const auto v = row.get<std::vector<double>>();
      means.push_back(Eigen::Map<const Point>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    if (!j.contains("weights")) return GmmParams::equal_weights(std::move(means), sigma2);
    GmmParams g;
    g.means = std::move(means);
    g.sigma2 = sigma2;
    g.weights = j.at("weights").get<std::vector<double>>();
    g.validate();
    return g;
  }
  const auto range = j.value("mean_range", std::vector<double>{-5.0, 5.0});
  if (range.size() != 2) throw std::invalid_argument("mean_range must be [lo, hi]");
  return GmmParams::random(j.value("components", 3), j.value("dim", 2), sigma2, range[0], range[1],
                           j.value("seed", std::uint64_t{0}));
}

}  // namespace plap
