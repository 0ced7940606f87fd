#include "plap/bounds.hpp"
#include "plap/gmm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace plap;

namespace {

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

EstimatorConfig boundary_cfg(double p) {
  EstimatorConfig c;
  c.p = p;
  c.formulation = Formulation::boundary;
  return c;
}

GmmParams experiment_gmm() { return GmmParams::random(3, 2, 1.0, -5.0, 5.0, 7); }

}  // namespace

TEST(BoundConstant, HandValues) {
  EXPECT_NEAR(bound_constant(2.0, 0.1, 0.3, 7.0, 2, 1.0), 0.2, 1e-15);
  EXPECT_NEAR(bound_constant(3.0, 0.1, 0.3, 2.0, 2, 1.0), 0.8, 1e-15);
  EXPECT_NEAR(bound_constant(1.0, 0.1, 0.5, 2.0, 2, 1.0), 0.8, 1e-15);
  EXPECT_NEAR(bound_constant(3.0, 0.1, 0.3, 2.0, 2, 1.0, false), 0.4, 1e-15);
  EXPECT_NEAR(bound_constant(2.0, 0.1, 0.3, 2.0, 4, 2.0), 0.2, 1e-15);
}

TEST(BoundConstant, RejectsBadInput) {
  EXPECT_THROW(bound_constant(0.9, 0.1, 1, 1, 2, 1), std::invalid_argument);
  EXPECT_THROW(bound_constant(2, -0.1, 1, 1, 2, 1), std::invalid_argument);
  EXPECT_THROW(bound_constant(2, 0.1, 0, 1, 2, 1), std::invalid_argument);
  EXPECT_THROW(bound_constant(2, 0.1, 2, 1, 2, 1), std::invalid_argument);
}

TEST(BoundConstant, ContinuousAtTwo) {
  for (double m : {0.01, 0.5, 3.0}) {
    for (double big_m : {m, 4.0 * m, 50.0}) {
      const double at = bound_constant(2.0, 0.3, m, big_m, 2, 1.0);
      EXPECT_NEAR(bound_constant(2.0 - 1e-12, 0.3, m, big_m, 2, 1.0), at, 1e-10);
      EXPECT_NEAR(bound_constant(2.0 + 1e-12, 0.3, m, big_m, 2, 1.0), at, 1e-10);
    }
  }
}

TEST(BoundConstant, Monotone) {
  for (double p : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    double prev = -1.0;
    for (double delta = 0.0; delta < 1.0; delta += 0.1) {
      const double c = bound_constant(p, delta, 0.5, 2.0, 2, 1.0);
      EXPECT_GE(c, prev);
      prev = c;
    }
  }
  double prev = -1.0;
  for (double big_m = 1.0; big_m < 5.0; big_m += 0.5) {
    const double c = bound_constant(3.0, 0.1, 1.0, big_m, 2, 1.0);
    EXPECT_GE(c, prev);
    prev = c;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double m = 0.1; m < 5.0; m += 0.5) {
    const double c = bound_constant(1.5, 0.1, m, 5.0, 2, 1.0);
    EXPECT_LE(c, prev);
    prev = c;
  }
}

TEST(SegmentMin, ClosedForm) {
  EXPECT_NEAR(segment_min_norm(pt(1, 0), pt(-1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(segment_min_norm(pt(1, 0), pt(2, 0)), 1.0, 1e-15);
  EXPECT_NEAR(segment_min_norm(pt(1, 1), pt(1, -1)), 1.0, 1e-15);
  EXPECT_NEAR(segment_min_norm(pt(0.5, 0.5), pt(0.5, 0.5)), std::sqrt(0.5), 1e-15);
  // Brute-force check against a fine grid.
  const Point a = pt(2.0, -0.3), b = pt(-0.4, 1.1);
  double best = 1e9;
  for (int i = 0; i <= 100000; ++i) {
    const double t = i / 100000.0;
    best = std::min(best, (t * a + (1 - t) * b).norm());
  }
  EXPECT_NEAR(segment_min_norm(a, b), best, 1e-8);
}

TEST(AssumptionConstants, IdenticalFields) {
  const auto field = ScoreField::linear(Eigen::MatrixXd::Identity(2, 2), pt(0, 0));
  Rng rng(1);
  const auto c = estimate_assumption_constants(field, field, pt(0, 0), 1.0, 100, 11, rng);
  EXPECT_EQ(c.delta_raw, 0.0);
  EXPECT_NEAR(c.m, 1.0, 1e-12);
  EXPECT_NEAR(c.big_m, 1.0, 1e-12);
  EXPECT_TRUE(c.assumptions_ok);
}

TEST(AssumptionConstants, ColinearDoubling) {
  const auto s = ScoreField::linear(Eigen::MatrixXd::Identity(2, 2), pt(0, 0));
  const auto s_hat = s.scaled(2.0);
  Rng rng(2);
  const auto c = estimate_assumption_constants(s, s_hat, pt(0, 0), 1.0, 100, 11, rng);
  EXPECT_NEAR(c.delta_raw, 1.0, 1e-12);
  EXPECT_NEAR(c.delta, kDeltaInflation, 1e-12);
  EXPECT_NEAR(c.m, 1.0, 1e-12);
  EXPECT_NEAR(c.big_m, 2.0, 1e-12);
  EXPECT_NEAR(c.segment_min, 1.0, 1e-12);
  EXPECT_TRUE(c.assumptions_ok);
}

TEST(AssumptionConstants, AntipodalFieldsFail) {
  const auto s = ScoreField::linear(Eigen::MatrixXd::Identity(2, 2), pt(0, 0));
  Rng rng(3);
  const auto c = estimate_assumption_constants(s, s.scaled(-1.0), pt(0, 0), 1.0, 100, 11, rng);
  EXPECT_NEAR(c.segment_min, 0.0, 1e-12);
  EXPECT_NEAR(c.segment_min_grid, 0.0, 1e-12);
  EXPECT_FALSE(c.assumptions_ok);
}

TEST(ValidateBound, SelfComparisonHasNoError) {
  const auto g = experiment_gmm();
  const auto s = oracle_field(g);
  std::vector<Point> anchors = {g.means[0] + pt(1.3, 0), pt(0, 0), g.means[2] + pt(0, 1.2)};
  for (double p : {1.0, 2.0, 3.0}) {
    const auto reports = validate_bound(s, s, anchors, boundary_cfg(p), 5);
    ASSERT_EQ(reports.size(), anchors.size());
    for (const auto& r : reports) {
      EXPECT_EQ(r.empirical_error, 0.0);
      EXPECT_LE(r.empirical_error, r.c_p);
      EXPECT_EQ(r.estimate_s, r.estimate_s_hat);
    }
  }
}

TEST(ValidateBound, ConstantPerturbationAtTwo) {
  const auto g = experiment_gmm();
  const auto s = oracle_field(g);
  Point shift = pt(0.03, 0.04);
  const ScoreField s_hat(2, [&s, shift](const Point& x) -> Point { return s(x) + shift; });
  std::vector<Point> anchors;
  for (int k = 0; k < 10; ++k) anchors.push_back(pt(-4.0 + k, 0.5 * k - 2.0));
  const auto reports = validate_bound(s, s_hat, anchors, boundary_cfg(2.0), 6);
  for (const auto& r : reports) {
    EXPECT_NEAR(r.delta, 0.05 * kDeltaInflation, 1e-12);
    EXPECT_LE(r.empirical_error, r.c_p);
    EXPECT_NEAR(r.c_p, 2.0 * r.delta, 1e-15);
  }
}

TEST(ValidateBound, DominanceForPerturbedFields) {
  // Smooth multiplicative and additive distortions of the oracle.
  const auto g = experiment_gmm();
  const auto s = oracle_field(g);
  const ScoreField s_hat(2, [&s](const Point& x) -> Point {
    Point v = s(x);
    return (1.0 + 0.2 * std::sin(x[0])) * v + 0.1 * Point::Ones(2) * std::cos(x[1]);
  });
  Rng rng(7);
  const auto anchors = sample(g, 40, rng);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    for (const auto& r : validate_bound(s, s_hat, anchors, boundary_cfg(p), 8)) {
      if (r.assumptions_ok) {
        EXPECT_LE(r.empirical_error, r.c_p) << "p=" << p;
      } else if (p < 2.0) {
        EXPECT_TRUE(std::isinf(r.c_p));
      }
      EXPECT_GE(r.m, 0.0);
      EXPECT_LE(r.m, r.big_m);
    }
  }
}

TEST(ValidateBound, RequiresBoundaryFormulation) {
  auto cfg = boundary_cfg(1.0);
  cfg.formulation = Formulation::volume;
  const auto s = ScoreField::zero(2);
  std::vector<Point> anchors = {pt(0, 0)};
  EXPECT_THROW(validate_bound(s, s, anchors, cfg, 1), std::invalid_argument);
}

TEST(BoundSurface, MatchesPointwiseConstant) {
  const std::vector<double> deltas = {0.1, 0.2, 0.4}, ms = {0.5, 1.0};
  const auto surf = bound_surface(1.0, deltas, ms, 2.0, 2, 1.0);
  ASSERT_EQ(surf.rows(), 3);
  ASSERT_EQ(surf.cols(), 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      EXPECT_EQ(surf(i, j), bound_constant(1.0, deltas[i], ms[j], 2.0, 2, 1.0));
}
