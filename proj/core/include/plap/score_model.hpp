#pragma once

#include "plap/rng.hpp"
#include "plap/score_field.hpp"
#include "plap/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace plap {

/// Discrete variance-preserving noise schedule.
///
/// alphas[t] = 1 - prod_{i <= t} (1 - betas[i]) is the noise fraction used by
/// x_t = sqrt(1 - alpha_t) x_0 + sqrt(alpha_t) eps, so alpha is nondecreasing
/// and alphas[0] = betas[0] is the last (least noisy) denoising step.
/// Zero betas are accepted (drift-free limits); a step with alpha = 0 has no
/// recoverable score.
struct NoiseSchedule {
  static constexpr int kDefaultSteps = 100;
  static constexpr double kDefaultBetaStart = 1e-4;
  static constexpr double kDefaultBetaEnd = 0.2;

  std::vector<double> betas;
  std::vector<double> alphas;

  static NoiseSchedule from_betas(std::vector<double> betas);
  static NoiseSchedule linear(int steps, double beta_start, double beta_end);
  /// Linear betas from 1e-4 to 0.2 over 100 steps, so alpha_T is ~1.
  static NoiseSchedule standard();

  int steps() const { return static_cast<int>(betas.size()); }
  double alpha(int t) const;
  double beta(int t) const;
};

struct Perturbation {
  Point x_t;
  Point epsilon;
};

/// sqrt(1 - alpha) x0 + sqrt(alpha) eps. Valid for alpha in [0, 1].
Point perturb(const Point& x0, double alpha, const Point& epsilon);
/// Draws eps ~ N(0, I) and corrupts x0 to step t.
Perturbation forward_perturb(const Point& x0, int t, const NoiseSchedule& schedule, Rng& rng);

/// Transformer-style embedding: pairs (sin(t w_j), cos(t w_j)) with
/// w_j = base^(-j / (dim / 2)), j = 0 .. dim/2 - 1.
Eigen::VectorXd sinusoidal_embed(int t, int dim, double base = 10000.0);

struct MlpConfig {
  int input_dim = 2;
  int hidden_width = 128;
  int embed_dim = 32;
  double embed_base = 10000.0;
};

/// One-hidden-layer noise predictor eps_hat(x, t).
///
/// hidden = silu(W1 [x; embed(t)] + b1), eps_hat = W2 hidden + b2.
/// SiLU keeps the learned score field smooth, which the finite-difference
/// volume estimator relies on.
class MlpScoreModel {
public:
  struct Gradient {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;
    Eigen::VectorXd b2;
  };

  /// Fan-in scaled uniform init for the hidden layer; the output layer starts at
  /// zero so an untrained model predicts zero noise.
  MlpScoreModel(const MlpConfig& cfg, std::uint64_t seed);

  const MlpConfig& config() const { return cfg_; }
  int input_dim() const { return cfg_.input_dim; }

  Point predict_noise(const Point& x, int t) const;

  /// Mean over the batch of ||eps_hat(x_t, t) - eps||^2. Columns of x_t and
  /// eps are samples. Fills `grad` (if non-null) by backpropagation.
  double loss_and_gradient(const Eigen::MatrixXd& x_t, std::span<const int> t,
                           const Eigen::MatrixXd& eps, Gradient* grad) const;

  void sgd_step(const Gradient& grad, double learning_rate);

  /// Flattened (w1, b1, w2, b2), each row-major.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);
  Eigen::Index parameter_count() const;
  /// Gradient flattened in the same order as parameters().
  static Eigen::VectorXd flatten(const Gradient& grad);

  /// Returns a callable x -> eps_hat(x, t) with the time embedding folded into
  /// the hidden bias.
  std::function<Point(const Point&)> noise_predictor_at(int t) const;

  const Eigen::MatrixXd& w1() const { return w1_; }
  const Eigen::VectorXd& b1() const { return b1_; }
  const Eigen::MatrixXd& w2() const { return w2_; }
  const Eigen::VectorXd& b2() const { return b2_; }

  nlohmann::json to_json() const;
  static MlpScoreModel from_json(const nlohmann::json& j);

  friend bool operator==(const MlpScoreModel& a, const MlpScoreModel& b);

private:
  MlpScoreModel() = default;
  Eigen::MatrixXd inputs(const Eigen::MatrixXd& x, std::span<const int> t) const;

  MlpConfig cfg_;
  Eigen::MatrixXd w1_;
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;
  Eigen::VectorXd b2_;
};

struct TrainConfig {
  int epochs = 500;
  double learning_rate = 1e-3;
  int batch_size = 4;
  std::uint64_t seed = 0;
};

struct TrainResult {
  MlpScoreModel model;
  std::vector<double> epoch_loss;
};

using EpochCallback = std::function<void(int epoch, double loss)>;

/// Denoising objective with plain SGD over shuffled minibatches; each sample
/// draws a fresh (t, eps) every epoch. Throws DivergenceError on a non-finite loss.
TrainResult train(const PointList& data, const NoiseSchedule& schedule, const TrainConfig& cfg,
                  const MlpConfig& arch, const EpochCallback& on_epoch = {});

/// s_hat(x) = -eps_hat(x, t) / sqrt(alpha_t).
Point learned_score(const MlpScoreModel& model, const NoiseSchedule& schedule, const Point& x,
                    int t);
ScoreField learned_field(const MlpScoreModel& model, const NoiseSchedule& schedule, int t);

/// Euler-Maruyama on the reverse VP SDE from N(0, I) at t = T - 1 down to t = 0:
/// x <- x + beta_t (x / 2 + s_t(x)) + sqrt(beta_t) z, no noise on the final step.
using TimedScore = std::function<Point(const Point& x, int t)>;
PointList reverse_sample(const TimedScore& score, int dim, const NoiseSchedule& schedule, int n,
                         Rng& rng);
PointList reverse_sample(const MlpScoreModel& model, const NoiseSchedule& schedule, int n,
                         Rng& rng);

nlohmann::json to_json(const NoiseSchedule& s);
NoiseSchedule schedule_from_json(const nlohmann::json& j);

struct Checkpoint {
  MlpScoreModel model;
  NoiseSchedule schedule;
};

nlohmann::json checkpoint_to_json(const MlpScoreModel& model, const NoiseSchedule& schedule);
Checkpoint checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const std::filesystem::path& path, const MlpScoreModel& model,
                     const NoiseSchedule& schedule);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace plap
