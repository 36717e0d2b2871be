#include <gtest/gtest.h>

#include <Eigen/QR>
#include <algorithm>
#include <random>

#include "seisloc/tomo.hpp"

using namespace seisloc;

namespace {

struct Scenario {
  FieldConfig field;
  SlownessModel truth;
  SensorArray sensors;
  std::vector<EventRecord> events;
};

Scenario make_scenario(int side, int events, double xi, std::uint64_t seed, bool uniform_sources = false) {
  Scenario sc{FieldConfig::square(side), {}, {}, {}};
  sc.truth = build_synthetic_slowness(sc.field, {});
  sc.sensors = place_boundary_sensors(sc.field);
  Rng rng(seed);
  auto src = uniform_sources ? sample_uniform_events(events, sc.field, rng)
                             : sample_real_events(events, sc.field, 0.2, rng);
  sc.events = simulate_events(src, sc.truth, sc.sensors, {xi, seed}, rng);
  return sc;
}

// Stacked least squares [A; sqrt(eta) L^-1] s = [t; 0], solved by QR.
Eigen::VectorXd stacked_lsq_oracle(const TomoInput& in, const TomoPrior& prior) {
  const int n = in.field.cells();
  const int rows = static_cast<int>(in.rows.size());
  Eigen::MatrixXd sigma = prior_covariance(in.field, prior.smoothness_km);
  Eigen::MatrixXd l = sigma.llt().matrixL();
  Eigen::MatrixXd linv = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(rows + n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows + n);
  for (int r = 0; r < rows; ++r) {
    for (const auto& [c, len] : in.rows[r].entries) big(r, c) = len;
    rhs[r] = in.times[r];
  }
  big.bottomRows(n) = std::sqrt(prior.eta) * linv;
  return big.colPivHouseholderQr().solve(rhs);
}

}  // namespace

TEST(Tomo, ExactRecoveryNoiseFree) {
  auto sc = make_scenario(5, 500, 0.0, 21, true);
  auto prior = TomoPrior::for_field(sc.field);
  prior.eta = 1e-8;
  auto est = estimate_slowness(TomoInput::from_events(sc.events, sc.field), prior);
  EXPECT_LE(relative_error(est, sc.truth), 1e-3);
}

TEST(Tomo, MatchesStackedLeastSquaresOracle) {
  auto sc = make_scenario(5, 60, 0.02, 3);
  auto in = TomoInput::from_events(sc.events, sc.field);
  auto prior = TomoPrior::for_field(sc.field);
  prior.eta = 1e-3;
  prior.clamp_min = 1e-6;
  auto est = estimate_slowness(in, prior, TomoSolver::direct);
  auto oracle = stacked_lsq_oracle(in, prior);
  for (int k = 0; k < est.size(); ++k) {
    ASSERT_GT(oracle[k], prior.clamp_min);
    EXPECT_NEAR(est[k], oracle[k], 1e-8);
  }
}

TEST(Tomo, ConjugateGradientMatchesDirect) {
  auto sc = make_scenario(8, 80, 0.02, 5);
  auto in = TomoInput::from_events(sc.events, sc.field);
  auto prior = TomoPrior::for_field(sc.field);
  auto direct = estimate_slowness(in, prior, TomoSolver::direct);
  auto cg = estimate_slowness(in, prior, TomoSolver::conjugate_gradient);
  for (int k = 0; k < direct.size(); ++k) EXPECT_NEAR(direct[k], cg[k], 1e-7);
}

TEST(Tomo, PermutationInvariant) {
  auto sc = make_scenario(10, 50, 0.02, 9);
  auto prior = TomoPrior::for_field(sc.field);
  auto a = estimate_slowness(TomoInput::from_events(sc.events, sc.field), prior);
  std::mt19937_64 rng(2);
  std::shuffle(sc.events.begin(), sc.events.end(), rng);
  auto b = estimate_slowness(TomoInput::from_events(sc.events, sc.field), prior);
  for (int k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-10);
}

TEST(Tomo, ClampFloorHolds) {
  auto sc = make_scenario(10, 5, 0.08, 4);
  auto prior = TomoPrior::for_field(sc.field);
  prior.clamp_min = 0.2;
  auto est = estimate_slowness(TomoInput::from_events(sc.events, sc.field), prior);
  for (double v : est.flattened()) EXPECT_GE(v, 0.2);
}

TEST(Tomo, RejectsBadInput) {
  FieldConfig f = FieldConfig::square(5);
  TomoInput empty{f, {}, {}};
  EXPECT_THROW(estimate_slowness(empty, TomoPrior::for_field(f)), ParameterError);
  TomoPrior bad = TomoPrior::for_field(f);
  bad.eta = 0.0;
  auto sc = make_scenario(5, 10, 0.0, 1);
  EXPECT_THROW(estimate_slowness(TomoInput::from_events(sc.events, sc.field), bad), ParameterError);
}

TEST(Tomo, RefinementWithMoreEvents) {
  // Averaged over 10 seeds, the estimate improves as L grows.
  std::vector<double> mean_err;
  for (int l : {25, 50, 100, 200}) {
    double acc = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
      auto sc = make_scenario(20, l, 0.02, 1000 + seed);
      auto in = TomoInput::from_events(sc.events, sc.field);
      auto prior = TomoPrior::for_field(sc.field);
      prior.eta = TomoPrior::eta_for_noise(0.02 * in.mean_time(), prior.sigma_s);
      acc += relative_error(estimate_slowness(in, prior), sc.truth);
    }
    mean_err.push_back(acc / 10);
  }
  for (std::size_t k = 1; k < mean_err.size(); ++k) EXPECT_LT(mean_err[k], mean_err[k - 1]);
}
