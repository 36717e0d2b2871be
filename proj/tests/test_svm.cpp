#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "learn_fixtures.hpp"
#include "seisloc/svm.hpp"

using namespace seisloc;


TEST(Svm, BinarySolutionSatisfiesKkt) {
  Rng rng(4);
  const auto d = oracle::blobs({{0, 0}, {0.6, 0.4}}, 150, 0.35, rng);
  const auto norm = Normalizer::fit(d);
  KernelCache kernel(detail::normalized_rows(d, norm), 2, 2.0, std::size_t{1} << 20);
  std::vector<std::int8_t> y;
  for (const auto& s : d.samples) y.push_back(s.label == 0 ? 1 : -1);
  for (double c : {0.25, 1.0, 16.0}) {
    const auto sol = solve_binary_smo(kernel, y, c, 1e-3);
    const auto [gap, box] = audit_binary_solution(kernel, y, sol.alpha, c);
    EXPECT_LE(gap, 1e-3) << "C=" << c;
    EXPECT_LE(box, 0.0);
    double balance = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) balance += y[i] * sol.alpha[i];
    EXPECT_NEAR(balance, 0.0, 1e-9 * c * static_cast<double>(y.size()));
  }
}

TEST(Svm, SmallCacheGivesSameSolution) {
  Rng rng(9);
  const auto d = oracle::blobs({{0, 0}, {0.5, 0.5}}, 60, 0.3, rng);
  const auto norm = Normalizer::fit(d);
  std::vector<std::int8_t> y;
  for (const auto& s : d.samples) y.push_back(s.label == 0 ? 1 : -1);
  KernelCache big(detail::normalized_rows(d, norm), 2, 1.0, std::size_t{1} << 24);
  KernelCache tiny(detail::normalized_rows(d, norm), 2, 1.0, 1);
  const auto a = solve_binary_smo(big, y, 2.0, 1e-3);
  const auto b = solve_binary_smo(tiny, y, 2.0, 1e-3);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.bias, b.bias);
  EXPECT_GT(tiny.computed_rows(), big.computed_rows());
}

TEST(Svm, OneVsRestAgreesWithDenseDualOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) EXPECT_GE(oracle::ovr_agreement(seed, 1.0, 0.5), 0.98) << "seed " << seed;
}

TEST(Svm, SolvesXor) {
  Rng rng(21);
  const auto train = oracle::xor_problem(200, rng);
  const auto test = oracle::xor_problem(500, rng);
  const auto model = fit_svm(train, 4.0, 1.0);
  const auto pred = model.predict(test);
  int ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == test.samples[i].label;
  EXPECT_GE(ok, 475);
}

TEST(Svm, SeparableBlobsAreClassifiedExactly) {
  Rng rng(8);
  const auto d = oracle::blobs({{0, 0}, {3, 0}, {0, 3}}, 30, 0.2, rng);
  const auto model = fit_svm(d, 1.0, 1.0);
  const auto pred = model.predict(d);
  for (std::size_t i = 0; i < pred.size(); ++i) EXPECT_EQ(pred[i], d.samples[i].label);
  EXPECT_LT(model.sv_count(), static_cast<int>(d.size()));
}

TEST(Svm, GridTiesGoToSmallestParameters) {
  Rng rng(8);
  const auto d = oracle::blobs({{0, 0}, {5, 0}, {0, 5}}, 20, 0.1, rng);
  SvmGrid grid = SvmGrid::defaults();
  std::reverse(grid.c_values.begin(), grid.c_values.end());
  const auto sel = select_svm_params(d, grid, rng);
  EXPECT_DOUBLE_EQ(sel.cv_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(sel.c, 0.25);
  EXPECT_DOUBLE_EQ(sel.gamma, 0.0625);
}

TEST(Svm, RejectsDegenerateInput) {
  Rng rng(1);
  const auto one = oracle::blobs({{0, 0}}, 10, 0.1, rng);
  EXPECT_THROW(fit_svm(one, 1.0, 1.0), TrainingInputError);
  EXPECT_THROW(train_svm(Dataset{}, SvmGrid::defaults(), rng), TrainingInputError);
  const auto two = oracle::blobs({{0, 0}, {1, 1}}, 10, 0.1, rng);
  EXPECT_THROW(fit_svm(two, 0.0, 1.0), ParameterError);
  EXPECT_THROW(fit_svm(two, 1.0, -1.0), ParameterError);
  const auto m = fit_svm(two, 1.0, 1.0);
  EXPECT_THROW(m.predict(std::vector<double>{1.0}), ArityError);
}

TEST(Svm, IdenticalPointsWithConflictingLabels) {
  Dataset d{{}, 3, FieldConfig{1.0, 1.0, 2, 2}};
  for (int i = 0; i < 6; ++i) d.samples.push_back({{0.5, 0.5}, {}, i % 2, Provenance::real});
  const auto m = fit_svm(d, 1.0, 1.0);
  const int p = m.predict(std::vector<double>{0.5, 0.5});
  EXPECT_TRUE(p == 0 || p == 1);
}
