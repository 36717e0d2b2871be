#include <gtest/gtest.h>

#include <numeric>

#include "seisloc/workflow_demo.hpp"

using namespace seisloc;

TEST(PolyTransform, Examples) {
  const Point p{2.0, 3.0};
  EXPECT_EQ(apply_transform(PolyTransform::identity(), p), p);
  EXPECT_EQ(apply_transform(PolyTransform{}, p), (Point{0.0, 0.0}));
  PolyTransform t;
  t.a = {0, 0, 0, 1, 0};
  EXPECT_EQ(apply_transform(t, p).x, 4.0);
}

TEST(PolyTransform, FivePairsRecoverCoefficientsExactly) {
  Rng rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    PolyTransform truth;
    for (auto& v : truth.a) v = u(rng);
    for (auto& v : truth.b) v = u(rng);
    std::vector<PointPair> pairs;
    for (int k = 0; k < 5; ++k) {
      const Point p{u(rng), u(rng)};
      pairs.emplace_back(p, apply_transform(truth, p));
    }
    const auto fit = fit_transform(pairs);
    for (std::size_t k = 0; k < 5; ++k) {
      EXPECT_NEAR(fit.a[k], truth.a[k], 1e-9);
      EXPECT_NEAR(fit.b[k], truth.b[k], 1e-9);
    }
  }
}

TEST(PolyTransform, NoisyFitMatchesNormalEquations) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::normal_distribution<double> noise(0.0, 0.05);
  const auto truth = PolyTransform::moderate_distortion();
  std::vector<PointPair> pairs;
  for (int k = 0; k < 50; ++k) {
    const Point p{u(rng), u(rng)};
    Point q = apply_transform(truth, p);
    q.x += noise(rng);
    q.y += noise(rng);
    pairs.emplace_back(p, q);
  }
  // Accumulate X^T X and X^T y by hand and solve with a plain LU.
  Eigen::Matrix<double, 5, 5> xtx = Eigen::Matrix<double, 5, 5>::Zero();
  Eigen::Matrix<double, 5, 2> xty = Eigen::Matrix<double, 5, 2>::Zero();
  for (const auto& [p, q] : pairs) {
    const double r[5] = {p.x, p.y, p.x * p.y, p.x * p.x, p.y * p.y};
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) xtx(i, j) += r[i] * r[j];
      xty(i, 0) += r[i] * q.x;
      xty(i, 1) += r[i] * q.y;
    }
  }
  const Eigen::Matrix<double, 5, 2> oracle = xtx.fullPivLu().solve(xty);
  const auto fit = fit_transform(pairs);
  for (int k = 0; k < 5; ++k) {
    EXPECT_NEAR(fit.a[static_cast<std::size_t>(k)], oracle(k, 0), 1e-8);
    EXPECT_NEAR(fit.b[static_cast<std::size_t>(k)], oracle(k, 1), 1e-8);
  }
}

TEST(PolyTransform, DegeneratePairsAreRejected) {
  std::vector<PointPair> collinear;
  for (int k = 0; k < 5; ++k) collinear.emplace_back(Point{0.1 * k, 0.3 + 0.2 * k}, Point{1.0 * k, 2.0});
  EXPECT_THROW(fit_transform(collinear), DegeneratePairsError);
  std::vector<PointPair> four(collinear.begin(), collinear.begin() + 4);
  EXPECT_THROW(fit_transform(four), DegeneratePairsError);
}

TEST(PolyTransform, PerClassFit) {
  std::map<int, std::vector<PointPair>> pairs;
  const auto t0 = PolyTransform::identity(), t1 = PolyTransform::moderate_distortion();
  const Point pts[] = {{0.1, 0.2}, {0.9, -0.3}, {-0.5, 0.7}, {0.4, 0.4}, {-0.8, -0.6}, {0.3, -0.9}};
  for (const auto& p : pts) {
    pairs[0].emplace_back(p, apply_transform(t0, p));
    pairs[1].emplace_back(p, apply_transform(t1, p));
  }
  const auto fit = fit_transform_per_class(pairs);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_NEAR(fit.at(0).a[k], t0.a[k], 1e-9);
    EXPECT_NEAR(fit.at(1).b[k], t1.b[k], 1e-9);
  }
}

TEST(DemoPipeline, IdentityTransformLeavesAccuracyUnchanged) {
  DemoConfig cfg;
  cfg.hidden = PolyTransform::identity();
  const auto r = demo_pipeline(cfg);
  EXPECT_EQ(r.source_acc_on_target, r.phyaug_acc_on_target);
}

TEST(DemoPipeline, DistortedInstanceGainsTenPoints) {
  const auto r = demo_pipeline(DemoConfig{});
  EXPECT_GE(r.phyaug_acc_on_target, r.source_acc_on_target + 0.10);
}

TEST(DemoPipeline, DeterministicAndPairOrderInvariant) {
  const DemoConfig cfg;
  const auto a = demo_pipeline(cfg);
  const auto b = demo_pipeline(cfg);
  EXPECT_EQ(a.source_acc_on_target, b.source_acc_on_target);
  EXPECT_EQ(a.phyaug_acc_on_target, b.phyaug_acc_on_target);
  std::vector<std::size_t> order(static_cast<std::size_t>(cfg.pairs));
  std::iota(order.rbegin(), order.rend(), std::size_t{0});
  const auto c = demo_pipeline(cfg, order);
  EXPECT_EQ(a.phyaug_acc_on_target, c.phyaug_acc_on_target);
}
