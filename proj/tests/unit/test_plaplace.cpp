#include "plap/gmm.hpp"
#include "plap/plaplace.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace plap;

namespace {

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

EstimatorConfig config(double p, Formulation f, int n = 100) {
  EstimatorConfig c;
  c.p = p;
  c.formulation = f;
  c.n_samples = n;
  return c;
}

GmmParams experiment_gmm() { return GmmParams::random(3, 2, 1.0, -5.0, 5.0, 7); }

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

}  // namespace

TEST(EstimatorConfig, DefaultsAndValidation) {
  EstimatorConfig c;
  EXPECT_EQ(c.radius, 1.0);
  EXPECT_EQ(c.n_samples, 100);
  EXPECT_EQ(c.fd_step, 1e-3);
  EXPECT_TRUE(c.normalize_by_volume);
  c.p = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(formulation_from_string("volume"), Formulation::volume);
  EXPECT_THROW(formulation_from_string("surface"), std::invalid_argument);
}

TEST(FluxDensity, HandValues) {
  const Point n = pt(0.6, 0.8);
  for (double p : {1.0, 1.5, 2.0, 3.0}) EXPECT_NEAR(*flux_density(n, n, p), 1.0, 1e-15);
  for (double c : {1e-3, 0.7, 12.0}) EXPECT_NEAR(*flux_density(Point(c * n), n, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(*flux_density(pt(3, 4), pt(1, 0), 3.0), 15.0, 1e-12);
  EXPECT_FALSE(flux_density(pt(0, 0), n, 1.0).has_value());
  EXPECT_EQ(*flux_density(pt(0, 0), n, 3.0), 0.0);
}

TEST(DivergenceFd, LinearFieldGivesTrace) {
  Eigen::MatrixXd a(2, 2);
  a << 1.5, -0.3, 0.8, -4.0;
  const auto field = ScoreField::linear(a, pt(0.2, 0.1));
  EXPECT_NEAR(*divergence_fd(field, pt(1.0, -2.0), 2.0, 1e-3), a.trace(), 1e-9);
}

TEST(DivergenceFd, SingleGaussianOneLaplace) {
  const Point mu = pt(0.5, -0.5);
  const auto field = oracle_field(GmmParams::equal_weights({mu}, 1.0));
  for (const Point& x : {pt(1.5, 0.0), pt(-2.0, 3.0), pt(0.5, 0.9)}) {
    const double expected = -1.0 / (x - mu).norm();
    EXPECT_NEAR(*divergence_fd(field, x, 1.0, 1e-3), expected, 1e-3 * std::abs(expected));
  }
}

TEST(DivergenceFd, ConstantFieldIsDivergenceFree) {
  const auto field = ScoreField::constant(pt(0.3, -1.7));
  for (double p : {1.0, 2.0, 3.0}) EXPECT_NEAR(*divergence_fd(field, pt(4, 4), p, 1e-3), 0.0, 1e-12);
}

TEST(DivergenceFd, SingularStencilIsFlagged) {
  const auto field = oracle_field(GmmParams::equal_weights({pt(0, 0)}, 1.0));
  EXPECT_FALSE(divergence_fd(field, pt(1e-3, 0), 1.0, 1e-3).has_value());
}

TEST(EstimateVolume, ConstantIntegrandHasNoVariance) {
  const double sigma2 = 0.5;
  const auto field = oracle_field(GmmParams::equal_weights({pt(1, 1)}, sigma2));
  Rng rng(1);
  const auto e = estimate_volume(field, pt(0.3, 0.4), config(2.0, Formulation::volume), rng);
  EXPECT_NEAR(e.value, -2.0 / sigma2, 1e-6);
  EXPECT_LT(e.std_error, 1e-6);
  EXPECT_EQ(e.n_used, 100);
}

TEST(EstimateVolume, ZeroField) {
  Rng rng(2);
  const auto zero = ScoreField::zero(2);
  EXPECT_EQ(estimate_volume(zero, pt(0, 0), config(2.0, Formulation::volume), rng).value, 0.0);
  EXPECT_EQ(estimate_volume(zero, pt(0, 0), config(3.0, Formulation::volume), rng).value, 0.0);
  EXPECT_THROW(estimate_volume(zero, pt(0, 0), config(1.0, Formulation::volume), rng),
               EstimationError);
}

TEST(EstimateVolume, MatchesDenseMonteCarloAtMode) {
  const auto g = experiment_gmm();
  const auto field = oracle_field(g);
  const Point& mode = g.means[0];
  const auto dense = oracle::dense_ball_average(g, mode, 1.0, 1.0, 1000000, 99);
  Rng rng(3);
  const auto e = estimate_volume(field, mode, config(1.0, Formulation::volume), rng);
  EXPECT_LT(std::abs(e.value - dense.mean), 3.0 * combined(e.std_error, dense.std_error))
      << e.value << " vs " << dense.mean;
}

TEST(EstimateBoundary, AntiradialFieldOnSphere) {
  const Point x0 = pt(1.0, 2.0);
  const auto field = oracle_field(GmmParams::equal_weights({x0}, 1.0));
  Rng rng(4);
  const auto e = estimate_boundary(field, x0, config(1.0, Formulation::boundary), rng);
  EXPECT_NEAR(e.value, -2.0, 1e-12);
  EXPECT_NEAR(e.std_error, 0.0, 1e-12);
}

TEST(EstimateBoundary, OutwardIdentityField) {
  const Point x0 = pt(-1.0, 0.5);
  const auto field = ScoreField::linear(Eigen::MatrixXd::Identity(2, 2), x0);
  Rng rng(5);
  const auto e = estimate_boundary(field, x0, config(2.0, Formulation::boundary), rng);
  EXPECT_NEAR(e.value, 2.0, 1e-12);
}

TEST(EstimateBoundary, UnnormalizedDropsMeasureRatio) {
  const Point x0 = pt(0, 0);
  const auto field = ScoreField::linear(Eigen::MatrixXd::Identity(2, 2), x0);
  auto cfg = config(2.0, Formulation::boundary);
  cfg.radius = 2.0;
  cfg.normalize_by_volume = false;
  Rng rng(6);
  // Mean flux of x . n over the radius-2 circle is 2.
  EXPECT_NEAR(estimate_boundary(field, x0, cfg, rng).value, 2.0, 1e-12);
}

TEST(EstimateBoundary, AgreesWithVolumeOnOracleMixture) {
  // Anchors whose balls hold no critical point: near one, the p < 2 integrand
  // is not square integrable and the sample standard error means little.
  const auto g = experiment_gmm();
  const auto field = oracle_field(g);
  Point centroid = (g.means[0] + g.means[1] + g.means[2]) / 3.0;
  std::vector<Point> anchors;
  for (const auto& m : g.means) {
    const Point away = (m - centroid).normalized();
    anchors.push_back(m + 1.6 * away);
    anchors.push_back(m + 1.6 * Point(pt(-away[1], away[0])));
  }
  Rng probe(12);
  for (const auto& a : anchors)
    for (const auto& y : sample_ball_uniform(BallSpec(a, 1.0), 2000, probe)) ASSERT_GT(field(y).norm(), 0.1);
  for (double p : {1.0, 2.0, 3.0}) {
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      Rng a = Rng::substream(10, k), b = Rng::substream(11, k);
      const auto vol = estimate_volume(field, anchors[k], config(p, Formulation::volume), a);
      const auto bnd = estimate_boundary(field, anchors[k], config(p, Formulation::boundary), b);
      EXPECT_LT(std::abs(vol.value - bnd.value), 3.0 * combined(vol.std_error, bnd.std_error))
          << "p=" << p << " anchor " << k;
    }
  }
}

TEST(EstimateBoundary, CountsSingularSamples) {
  // Zero on the left half-plane.
  const ScoreField half(2, [](const Point& x) -> Point {
    Point s(2);
    s << std::max(x[0], 0.0), 0.0;
    return s;
  });
  Rng rng(7);
  const auto e = estimate_boundary(half, pt(0, 0), config(1.0, Formulation::boundary, 400), rng);
  EXPECT_EQ(e.n_used + e.singular_hits, 400);
  EXPECT_GT(e.singular_hits, 150);
  EXPECT_LT(e.singular_hits, 250);
}

TEST(EstimateBoundary, OneLaplaceIgnoresPositiveRescaling) {
  const auto g = experiment_gmm();
  const auto field = oracle_field(g);
  const ScoreField warped(2, [&field](const Point& x) -> Point {
    return (0.1 + x.squaredNorm()) * field(x);
  });
  auto cfg = config(1.0, Formulation::boundary);
  Rng rng(8);
  const auto samples = sample_sphere_uniform(BallSpec(pt(0.5, 0.5), 1.0), 100, rng);
  for (const auto& s : samples) {
    EXPECT_NEAR(*flux_density(field, s.point, s.normal, 1.0),
                *flux_density(warped, s.point, s.normal, 1.0), 1e-12);
  }
  EXPECT_NEAR(estimate_boundary(field, samples, cfg).value,
              estimate_boundary(warped, samples, cfg).value, 1e-12);
}

TEST(Estimators, OperatorHomogeneity) {
  const auto g = experiment_gmm();
  const auto field = oracle_field(g);
  for (auto f : {Formulation::volume, Formulation::boundary}) {
    for (double p : {1.0, 2.0, 3.0}) {
      Rng r0(21);
      const auto base = estimate(field, g.means[1] + pt(0.4, 0.2), config(p, f), r0);
      for (double a : {-2.0, 0.5, 3.0}) {
        Rng r1(21);
        const auto scaled = estimate(field.scaled(a), g.means[1] + pt(0.4, 0.2), config(p, f), r1);
        const double k = a * std::pow(std::abs(a), p - 2.0);
        EXPECT_LE(std::abs(scaled.value - k * base.value),
                  3.0 * combined(scaled.std_error, std::abs(k) * base.std_error) + 1e-9);
        EXPECT_NEAR(scaled.value, k * base.value, 1e-6 * std::max(1.0, std::abs(k * base.value)));
      }
    }
  }
}

TEST(Estimators, DeterministicGivenSeed) {
  const auto field = oracle_field(experiment_gmm());
  for (auto f : {Formulation::volume, Formulation::boundary}) {
    Rng a(5), b(5);
    EXPECT_EQ(estimate(field, pt(0, 0), config(1.0, f), a).value,
              estimate(field, pt(0, 0), config(1.0, f), b).value);
  }
}

TEST(DirichletEnergy, ZeroConstantAndScaling) {
  Rng rng(9);
  const auto disk = sample_ball_uniform(BallSpec(pt(0, 0), 1.0), 5000, rng);
  const double area = ball_volume(2, 1.0);
  EXPECT_EQ(dirichlet_energy_mc(ScoreField::zero(2), disk, 2.0, area), 0.0);
  const auto unit = ScoreField::constant(pt(1, 0));
  EXPECT_NEAR(dirichlet_energy_mc(unit, disk, 2.0, area), std::numbers::pi / 2.0, 1e-12);
  const auto field = oracle_field(experiment_gmm());
  EXPECT_NEAR(dirichlet_energy_mc(field.scaled(2.0), disk, 2.0, area),
              4.0 * dirichlet_energy_mc(field, disk, 2.0, area), 1e-9);
}
