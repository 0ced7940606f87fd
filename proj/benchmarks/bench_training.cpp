#include "plap/gmm.hpp"
#include "plap/score_model.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace plap;

void BM_TrainStep(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const auto sched = NoiseSchedule::standard();
  MlpScoreModel model(MlpConfig{}, 1);
  Rng rng(2);
  Eigen::MatrixXd x(2, batch), eps(2, batch);
  std::vector<int> t(static_cast<std::size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    const auto pert = forward_perturb(rng.normal_vector(2), static_cast<int>(rng.below(100)), sched, rng);
    x.col(b) = pert.x_t;
    eps.col(b) = pert.epsilon;
    t[static_cast<std::size_t>(b)] = static_cast<int>(rng.below(100));
  }
  MlpScoreModel::Gradient grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.loss_and_gradient(x, t, eps, &grad));
    model.sgd_step(grad, 1e-3);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_TrainStep)->Arg(1)->Arg(4)->Arg(64);

void BM_ReverseSample(benchmark::State& state) {
  const auto sched = NoiseSchedule::standard();
  MlpScoreModel model(MlpConfig{}, 1);
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(reverse_sample(model, sched, 16, rng));
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_ReverseSample);

void BM_TrainEpoch(benchmark::State& state) {
  Rng rng(5);
  const auto data = sample(GmmParams::random(3, 2, 1.0, -5.0, 5.0, 7), 1000, rng);
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, NoiseSchedule::standard(), cfg, MlpConfig{}));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
