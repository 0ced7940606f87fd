#include "plap/gmm.hpp"
#include "plap/score_model.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

using namespace plap;

namespace {

MlpScoreModel randomized_model(int dim, std::uint64_t seed) {
  MlpConfig cfg;
  cfg.input_dim = dim;
  cfg.hidden_width = 16;
  cfg.embed_dim = 8;
  MlpScoreModel m(cfg, seed);
  Rng rng(seed + 1);
  Eigen::VectorXd flat = m.parameters();
  for (Eigen::Index i = 0; i < flat.size(); ++i) flat[i] = 0.5 * rng.normal();
  m.set_parameters(flat);
  return m;
}

GmmParams three_modes() { return GmmParams::random(3, 2, 1.0, -5.0, 5.0, 7); }

}  // namespace

TEST(NoiseSchedule, StandardScheduleInvariants) {
  const auto s = NoiseSchedule::standard();
  ASSERT_EQ(s.steps(), 100);
  EXPECT_NEAR(s.alpha(0), 1e-4, 1e-18);
  for (int t = 0; t < s.steps(); ++t) {
    EXPECT_GT(s.alpha(t), 0.0);
    EXPECT_LT(s.alpha(t), 1.0);
    if (t > 0) {
      EXPECT_GE(s.alpha(t), s.alpha(t - 1));
    }
    EXPECT_NEAR(std::pow(std::sqrt(1.0 - s.alpha(t)), 2) + s.alpha(t), 1.0, 1e-15);
  }
  EXPECT_GT(s.alpha(99), 0.999);
  EXPECT_THROW(s.alpha(100), std::out_of_range);
  EXPECT_THROW(NoiseSchedule::from_betas({0.1, 1.0}), std::invalid_argument);
}

TEST(ForwardPerturb, Limits) {
  Point x0(2), eps(2);
  x0 << 1.5, -2.0;
  eps << 0.3, 0.7;
  EXPECT_EQ(perturb(x0, 0.0, eps), x0);
  EXPECT_EQ(perturb(x0, 1.0, eps), eps);
}

TEST(ForwardPerturb, VarianceIdentity) {
  const auto s = NoiseSchedule::from_betas({0.3});
  Rng rng(4);
  const Point x0 = Point::Zero(2);
  Eigen::Vector2d sum = Eigen::Vector2d::Zero(), sq = Eigen::Vector2d::Zero();
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto p = forward_perturb(x0, 0, s, rng);
    sum += p.x_t;
    sq += p.x_t.cwiseProduct(p.x_t);
  }
  const Eigen::Vector2d mean = sum / n;
  const Eigen::Vector2d var = sq / n - mean.cwiseProduct(mean);
  EXPECT_NEAR(var[0], 0.3, 0.01);
  EXPECT_NEAR(var[1], 0.3, 0.01);
}

TEST(SinusoidalEmbed, ZeroStepAndDistinctness) {
  const auto e0 = sinusoidal_embed(0, 32);
  for (int j = 0; j < 16; ++j) {
    EXPECT_EQ(e0[2 * j], 0.0);
    EXPECT_EQ(e0[2 * j + 1], 1.0);
  }
  EXPECT_NEAR(e0.norm(), std::sqrt(16.0), 1e-15);
  std::vector<Eigen::VectorXd> all;
  for (int t = 0; t < 100; ++t) all.push_back(sinusoidal_embed(t, 32));
  for (int a = 0; a < 100; ++a)
    for (int b = a + 1; b < 100; ++b) EXPECT_GT((all[a] - all[b]).norm(), 1e-6);
  EXPECT_THROW(sinusoidal_embed(1, 7), std::invalid_argument);
}

TEST(MlpScoreModel, BackpropMatchesFiniteDifferences) {
  auto model = randomized_model(2, 3);
  Rng rng(9);
  const int batch = 5;
  Eigen::MatrixXd x(2, batch), eps(2, batch);
  std::vector<int> ts;
  for (int i = 0; i < batch; ++i) {
    x.col(i) = 2.0 * rng.normal_vector(2);
    eps.col(i) = rng.normal_vector(2);
    ts.push_back(static_cast<int>(rng.below(100)));
  }
  MlpScoreModel::Gradient g;
  model.loss_and_gradient(x, ts, eps, &g);
  const Eigen::VectorXd analytic = MlpScoreModel::flatten(g);
  const Eigen::VectorXd theta = model.parameters();
  const double h = 1e-5;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd up = theta, down = theta;
    up[i] += h;
    down[i] -= h;
    MlpScoreModel a = model, b = model;
    a.set_parameters(up);
    b.set_parameters(down);
    const double fd = (a.loss_and_gradient(x, ts, eps, nullptr) -
                       b.loss_and_gradient(x, ts, eps, nullptr)) /
                      (2.0 * h);
    const double rel = std::abs(fd - analytic[i]) / std::max(std::abs(fd), 1e-3);
    worst = std::max(worst, rel);
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(MlpScoreModel, UntrainedPredictsZeroNoise) {
  MlpScoreModel m(MlpConfig{}, 1);
  Point x(2);
  x << 0.3, -4.0;
  EXPECT_EQ(m.predict_noise(x, 17), Point::Zero(2));
  Rng rng(2);
  const int n = 20000;
  Eigen::MatrixXd xt(2, n), eps(2, n);
  std::vector<int> ts(n, 5);
  for (int i = 0; i < n; ++i) {
    xt.col(i) = rng.normal_vector(2);
    eps.col(i) = rng.normal_vector(2);
  }
  EXPECT_NEAR(m.loss_and_gradient(xt, ts, eps, nullptr), 2.0, 0.05);
}

TEST(MlpScoreModel, NoisePredictorAtMatchesPredictNoise) {
  auto model = randomized_model(3, 5);
  Rng rng(6);
  for (int t : {0, 7, 42}) {
    const auto f = model.noise_predictor_at(t);
    for (int i = 0; i < 5; ++i) {
      const Point x = rng.normal_vector(3);
      EXPECT_TRUE(f(x).isApprox(model.predict_noise(x, t), 1e-12));
    }
  }
}

TEST(LearnedScore, ZeroModelGivesZeroScore) {
  MlpScoreModel m(MlpConfig{}, 1);
  const auto s = NoiseSchedule::standard();
  Point x(2);
  x << 1.0, 2.0;
  EXPECT_EQ(learned_score(m, s, x, 0), Point::Zero(2));
  EXPECT_EQ(learned_field(m, s, 0)(x), Point::Zero(2));
  const auto degenerate = NoiseSchedule::from_betas({0.0, 0.1});
  EXPECT_THROW(learned_score(m, degenerate, x, 0), std::domain_error);
  EXPECT_THROW(learned_field(m, s, 100), std::out_of_range);
}

TEST(Training, RejectsBadInput) {
  const auto s = NoiseSchedule::standard();
  EXPECT_THROW(train({}, s, TrainConfig{}, MlpConfig{}), std::invalid_argument);
  TrainConfig bad;
  bad.batch_size = 0;
  EXPECT_THROW(train({Point::Zero(2)}, s, bad, MlpConfig{}), std::invalid_argument);
}

TEST(Training, DivergenceReportsEpoch) {
  const auto s = NoiseSchedule::standard();
  Rng rng(1);
  const auto data = sample(three_modes(), 64, rng);
  TrainConfig cfg;
  cfg.learning_rate = 50.0;
  cfg.epochs = 50;
  try {
    train(data, s, cfg, MlpConfig{});
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.step(), 0);
    EXPECT_LT(e.step(), 50);
  }
}

TEST(Training, DeterministicGivenSeed) {
  const auto s = NoiseSchedule::standard();
  Rng rng(1);
  const auto data = sample(three_modes(), 100, rng);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 77;
  const auto a = train(data, s, cfg, MlpConfig{});
  const auto b = train(data, s, cfg, MlpConfig{});
  EXPECT_TRUE(a.model == b.model);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  cfg.seed = 78;
  EXPECT_FALSE(train(data, s, cfg, MlpConfig{}).model == a.model);
}

TEST(Training, SinglePointDatasetPointsScoreToOrigin) {
  // Data concentrated at 0: p_alpha = N(0, alpha I) and the true score is -x / alpha.
  const auto s = NoiseSchedule::standard();
  const PointList data(256, Point::Zero(2));
  TrainConfig cfg;
  cfg.seed = 3;
  const auto result = train(data, s, cfg, MlpConfig{});
  const auto field = learned_field(result.model, s, 0);
  std::vector<double> cosines;
  Rng rng(8);
  // Unit-scale points, where the estimators' balls live.
  for (int i = 0; i < 200; ++i) {
    const Point x = rng.normal_vector(2);
    const Point oracle = -x / s.alpha(0);
    const Point learned = field(x);
    cosines.push_back(learned.dot(oracle) / (learned.norm() * oracle.norm()));
  }
  std::sort(cosines.begin(), cosines.end());
  EXPECT_GT(cosines[100], 0.9);
}

TEST(Training, LossImprovesOnMixtureData) {
  const auto s = NoiseSchedule::standard();
  Rng rng(2);
  const auto data = sample(three_modes(), 1000, rng);
  TrainConfig cfg;
  cfg.epochs = 60;
  const auto r = train(data, s, cfg, MlpConfig{});
  ASSERT_EQ(r.epoch_loss.size(), 60u);
  EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
}

TEST(ReverseSample, DriftFreeLimitKeepsStandardNormal) {
  const auto s = NoiseSchedule::from_betas(std::vector<double>(20, 0.0));
  Rng a(5), b(5);
  const auto zero = [](const Point& x, int) -> Point { return Point::Zero(x.size()); };
  const auto samples = reverse_sample(zero, 2, s, 2000, a);
  // Each sample takes its start draw, then one (zero-weighted) noise draw per step but the last.
  for (const auto& x : samples) {
    EXPECT_EQ(x, b.normal_vector(2));
    for (int t = 1; t < s.steps(); ++t) b.normal_vector(2);
  }
}

TEST(ReverseSample, TrainedModelCoversModes) {
  const auto gmm = three_modes();
  const auto s = NoiseSchedule::standard();
  Rng rng(3);
  const auto data = sample(gmm, 1000, rng);
  TrainConfig cfg;
  cfg.seed = 4;
  const auto model = train(data, s, cfg, MlpConfig{}).model;
  Rng sampler(10);
  const auto xs = reverse_sample(model, s, 1000, sampler);
  int covered = 0;
  for (const auto& x : xs) {
    double best = 1e300;
    for (const auto& m : gmm.means) best = std::min(best, (x - m).norm());
    if (best <= 3.0 * std::sqrt(gmm.sigma2)) ++covered;
  }
  EXPECT_GE(covered, 950);

  Rng again(10);
  const auto ys = reverse_sample(model, s, 1000, again);
  for (std::size_t i = 0; i < xs.size(); ++i) ASSERT_EQ(xs[i], ys[i]);
}

TEST(Checkpoint, JsonRoundTripIsBitExact) {
  const auto model = randomized_model(2, 12);
  const auto sched = NoiseSchedule::standard();
  const auto text = checkpoint_to_json(model, sched).dump();
  const auto back = checkpoint_from_json(nlohmann::json::parse(text));
  EXPECT_TRUE(back.model == model);
  EXPECT_EQ(back.schedule.betas, sched.betas);
  EXPECT_EQ(back.schedule.alphas, sched.alphas);

  const auto path = std::filesystem::temp_directory_path() / "plap_checkpoint_test.json";
  save_checkpoint(path, model, sched);
  const auto loaded = load_checkpoint(path);
  EXPECT_TRUE(loaded.model == model);
  EXPECT_EQ(checkpoint_to_json(loaded.model, loaded.schedule).dump(), text);
  std::filesystem::remove(path);
}
