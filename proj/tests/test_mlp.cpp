#include <gtest/gtest.h>

#include <cmath>

#include "learn_fixtures.hpp"
#include "seisloc/mlp.hpp"

using namespace seisloc;

TEST(Mlp, GradientMatchesCentralDifferences) {
  Rng rng(7);
  Mlp<double> net({4, 8, 8, 4, 3}, rng);
  for (auto& b : net.biases()) b.setConstant(0.05);
  Mlp<double>::Matrix x = Mlp<double>::Matrix::Random(4, 6);
  const std::vector<int> y{0, 1, 2, 1, 0, 2};
  Mlp<double>::Gradients grad;
  net.loss_and_gradient(x, y, grad);

  const double h = 1e-4;
  Mlp<double>::Gradients scratch;
  double worst = 0.0;
  auto check = [&](double& param, double analytic) {
    const double keep = param;
    param = keep + h;
    const double up = net.loss_and_gradient(x, y, scratch);
    param = keep - h;
    const double down = net.loss_and_gradient(x, y, scratch);
    param = keep;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  };
  for (int l = 0; l < net.layers(); ++l) {
    auto& w = net.weights()[l];
    for (Eigen::Index k = 0; k < w.size(); ++k) check(w.data()[k], grad.weights[l].data()[k]);
    auto& b = net.biases()[l];
    for (Eigen::Index k = 0; k < b.size(); ++k) check(b.data()[k], grad.biases[l].data()[k]);
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(Mlp, LossIsLogClassCountAtZeroWeights) {
  Rng rng(1);
  Mlp<double> net({3, 5, 4}, rng);
  for (auto& w : net.weights()) w.setZero();
  Mlp<double>::Gradients g;
  const double loss = net.loss_and_gradient(Mlp<double>::Matrix::Ones(3, 2), {0, 3}, g);
  EXPECT_NEAR(loss, std::log(4.0), 1e-12);
}

TEST(Mlp, OverfitsSmallSeparableSet) {
  Rng rng(3);
  const auto d = oracle::blobs({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, 50, 0.08, rng);
  MlpHyper h;
  h.hidden = {64, 64};
  h.dropout = 0.0;
  h.epochs = 200;
  h.patience = 0;
  h.batch = 32;
  const auto model = train_mlp(d, h, rng);
  const auto pred = model.predict(d);
  int ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == d.samples[i].label;
  EXPECT_GE(ok, 198);
}

TEST(Mlp, InferenceIsDeterministic) {
  Rng rng(5);
  const auto d = oracle::blobs({{0, 0}, {1, 1}}, 40, 0.3, rng);
  MlpHyper h;
  h.hidden = {16, 16, 8};
  h.epochs = 5;
  const auto model = train_mlp(d, h, rng);
  for (const auto& s : d.samples) {
    Mlp<float>::Matrix x(2, 1);
    model.norm.apply(s.feature, x.data());
    const Mlp<float>::Matrix a = model.net.logits(x);
    const Mlp<float>::Matrix b = model.net.logits(x);
    ASSERT_EQ(a, b);
  }
}

TEST(Mlp, TrainingIsSeedDeterministic) {
  Rng data_rng(2);
  const auto d = oracle::blobs({{0, 0}, {1, 0}, {0, 1}}, 30, 0.3, data_rng);
  MlpHyper h;
  h.hidden = {16, 16, 8};
  h.epochs = 8;
  Rng a(11), b(11);
  const auto ma = train_mlp(d, h, a);
  const auto mb = train_mlp(d, h, b);
  for (int l = 0; l < ma.net.layers(); ++l) EXPECT_EQ(ma.net.weights()[l], mb.net.weights()[l]);
}

TEST(Mlp, RejectsBadInput) {
  Rng rng(1);
  auto one = oracle::blobs({{0, 0}}, 10, 0.1, rng);
  EXPECT_THROW(train_mlp(one, MlpHyper{}, rng), TrainingInputError);
  EXPECT_THROW(train_mlp(Dataset{}, MlpHyper{}, rng), TrainingInputError);
  auto two = oracle::blobs({{0, 0}, {1, 1}}, 10, 0.1, rng);
  MlpHyper h;
  h.dropout = 1.0;
  EXPECT_THROW(train_mlp(two, h, rng), ParameterError);
  h = MlpHyper{};
  h.hidden = {4};
  h.epochs = 1;
  const auto m = train_mlp(two, h, rng);
  EXPECT_THROW(m.predict(std::vector<double>{1.0, 2.0, 3.0}), ArityError);
}
