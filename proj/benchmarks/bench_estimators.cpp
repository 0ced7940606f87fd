#include "plap/gmm.hpp"
#include "plap/plaplace.hpp"
#include "plap/score_model.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace plap;

const GmmParams& mixture() {
  static const GmmParams g = GmmParams::random(3, 2, 1.0, -5.0, 5.0, 7);
  return g;
}

EstimatorConfig config(Formulation f, double p, int n) {
  EstimatorConfig c;
  c.formulation = f;
  c.p = p;
  c.n_samples = n;
  return c;
}

void BM_OracleScore(benchmark::State& state) {
  const Point x = mixture().means[0] + Point::Constant(2, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(score(mixture(), x));
}
BENCHMARK(BM_OracleScore);

void BM_LearnedScore(benchmark::State& state) {
  MlpScoreModel model(MlpConfig{}, 1);
  const auto field = learned_field(model, NoiseSchedule::standard(), 0);
  const Point x = Point::Constant(2, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(field(x));
}
BENCHMARK(BM_LearnedScore);

void BM_Estimate(benchmark::State& state, Formulation f) {
  const auto field = oracle_field(mixture());
  const auto cfg = config(f, 1.0, static_cast<int>(state.range(0)));
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(estimate(field, mixture().means[1], cfg, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_Estimate, boundary, Formulation::boundary)->Arg(100)->Arg(1000);
BENCHMARK_CAPTURE(BM_Estimate, volume, Formulation::volume)->Arg(100)->Arg(1000);

void BM_PointwiseExact(benchmark::State& state) {
  const Point x = mixture().means[2] + Point::Constant(2, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(pointwise_p_laplace_exact(mixture(), x, 1.0));
}
BENCHMARK(BM_PointwiseExact);

}  // namespace
