#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "seisloc/features.hpp"

namespace seisloc {

struct MlpHyper {
  std::vector<int> hidden{1024, 1024, 512};
  /// Drop probability applied between consecutive hidden layers.
  double dropout = 0.2;
  int batch = 128;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 100;
  int patience = 10;
  /// Holdout used for early stopping when no validation set is supplied.
  double validation_fraction = 0.1;
};

/// Feedforward ReLU network with a softmax output over grid cells.
template <typename Scalar = float>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
  };

  Mlp() = default;

  /// sizes = {input, hidden..., output}; He-normal weights, zero biases.
  Mlp(std::vector<int> sizes, Rng& rng) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw ParameterError("network needs an input and an output layer");
    for (int s : sizes_) {
      if (s < 1) throw ParameterError("layer sizes must be positive");
    }
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      std::normal_distribution<double> init(0.0, std::sqrt(2.0 / sizes_[l]));
      Matrix w(sizes_[l + 1], sizes_[l]);
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = static_cast<Scalar>(init(rng));
      weights_.push_back(std::move(w));
      biases_.push_back(Vector::Zero(sizes_[l + 1]));
    }
  }

  Mlp(std::vector<int> sizes, std::vector<Matrix> weights, std::vector<Vector> biases)
      : sizes_(std::move(sizes)), weights_(std::move(weights)), biases_(std::move(biases)) {
    if (weights_.size() + 1 != sizes_.size() || biases_.size() != weights_.size()) {
      throw FormatError("layer count does not match weights");
    }
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      if (weights_[l].rows() != sizes_[l + 1] || weights_[l].cols() != sizes_[l] || biases_[l].size() != sizes_[l + 1]) {
        throw FormatError("weight shape does not match layer sizes at layer " + std::to_string(l));
      }
    }
  }

  const std::vector<int>& sizes() const { return sizes_; }
  int layers() const { return static_cast<int>(weights_.size()); }
  int inputs() const { return sizes_.front(); }
  int outputs() const { return sizes_.back(); }
  std::vector<Matrix>& weights() { return weights_; }
  std::vector<Vector>& biases() { return biases_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Vector>& biases() const { return biases_; }

  /// Logits for the columns of x. No dropout.
  Matrix logits(const Matrix& x) const {
    Matrix a = x;
    for (int l = 0; l < layers(); ++l) {
      Matrix z = weights_[l] * a;
      z.colwise() += biases_[l];
      if (l + 1 < layers()) z = z.cwiseMax(Scalar(0));
      a = std::move(z);
    }
    return a;
  }

  std::vector<int> predict(const Matrix& x) const {
    const Matrix out = logits(x);
    std::vector<int> y(static_cast<std::size_t>(out.cols()));
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      Eigen::Index arg;
      out.col(c).maxCoeff(&arg);
      y[static_cast<std::size_t>(c)] = static_cast<int>(arg);
    }
    return y;
  }

  /// Mean softmax cross-entropy over the batch and its gradient. `keep_masks`
  /// holds pre-scaled dropout masks for hidden layers 0..layers()-3 (may be empty).
  double loss_and_gradient(const Matrix& x, const std::vector<int>& y, Gradients& grad,
                           const std::vector<Matrix>& keep_masks = {}) const {
    const Eigen::Index n = x.cols();
    const int nl = layers();
    std::vector<Matrix> acts;
    acts.reserve(static_cast<std::size_t>(nl + 1));
    acts.push_back(x);
    for (int l = 0; l < nl; ++l) {
      Matrix z = weights_[l] * acts.back();
      z.colwise() += biases_[l];
      if (l + 1 < nl) {
        z = z.cwiseMax(Scalar(0));
        if (static_cast<std::size_t>(l) < keep_masks.size()) z.array() *= keep_masks[static_cast<std::size_t>(l)].array();
      }
      acts.push_back(std::move(z));
    }
    // Softmax on the logits, in place.
    Matrix& p = acts.back();
    double loss = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      const Scalar mx = p.col(c).maxCoeff();
      p.col(c).array() = (p.col(c).array() - mx).exp();
      const Scalar sum = p.col(c).sum();
      p.col(c) /= sum;
      const int label = y[static_cast<std::size_t>(c)];
      loss -= std::log(std::max(static_cast<double>(p(label, c)), 1e-300));
      p(label, c) -= Scalar(1);
    }
    loss /= static_cast<double>(n);

    grad.weights.resize(static_cast<std::size_t>(nl));
    grad.biases.resize(static_cast<std::size_t>(nl));
    Matrix delta = p / static_cast<Scalar>(n);
    for (int l = nl - 1; l >= 0; --l) {
      const Matrix& a_in = acts[static_cast<std::size_t>(l)];
      grad.weights[static_cast<std::size_t>(l)].noalias() = delta * a_in.transpose();
      grad.biases[static_cast<std::size_t>(l)] = delta.rowwise().sum();
      if (l == 0) break;
      Matrix back = weights_[l].transpose() * delta;
      // a_in is the post-ReLU (and post-dropout) activation of layer l-1.
      back.array() *= (a_in.array() > Scalar(0)).template cast<Scalar>();
      if (static_cast<std::size_t>(l - 1) < keep_masks.size()) back.array() *= keep_masks[static_cast<std::size_t>(l - 1)].array();
      delta = std::move(back);
    }
    return loss;
  }

 private:
  std::vector<int> sizes_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

/// Trained classifier: network plus the input normalization it was trained with.
struct MlpModel {
  Mlp<float> net;
  Normalizer norm;

  int predict(const std::vector<double>& feature) const {
    Mlp<float>::Matrix x(static_cast<Eigen::Index>(norm.dim()), 1);
    norm.apply(feature, x.data());
    return net.predict(x).front();
  }

  std::vector<int> predict(const Dataset& d) const {
    std::vector<int> out;
    out.reserve(d.size());
    constexpr std::size_t chunk = 1024;
    for (std::size_t start = 0; start < d.size(); start += chunk) {
      const std::size_t stop = std::min(d.size(), start + chunk);
      Mlp<float>::Matrix x(static_cast<Eigen::Index>(norm.dim()), static_cast<Eigen::Index>(stop - start));
      for (std::size_t i = start; i < stop; ++i) norm.apply(d.samples[i].feature, x.col(static_cast<Eigen::Index>(i - start)).data());
      for (int y : net.predict(x)) out.push_back(y);
    }
    return out;
  }
};

namespace detail {

template <typename Scalar>
struct AdamState {
  std::vector<typename Mlp<Scalar>::Matrix> mw, vw;
  std::vector<typename Mlp<Scalar>::Vector> mb, vb;
  long step = 0;

  explicit AdamState(const Mlp<Scalar>& net) {
    for (int l = 0; l < net.layers(); ++l) {
      mw.push_back(Mlp<Scalar>::Matrix::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
      vw.push_back(mw.back());
      mb.push_back(Mlp<Scalar>::Vector::Zero(net.biases()[l].size()));
      vb.push_back(mb.back());
    }
  }

  void update(Mlp<Scalar>& net, const typename Mlp<Scalar>::Gradients& g, const MlpHyper& h) {
    ++step;
    const Scalar b1 = static_cast<Scalar>(h.beta1), b2 = static_cast<Scalar>(h.beta2);
    const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(step));
    const Scalar lr = static_cast<Scalar>(h.learning_rate * std::sqrt(c2) / c1);
    const Scalar eps = static_cast<Scalar>(h.adam_eps * std::sqrt(c2));
    for (int l = 0; l < net.layers(); ++l) {
      const auto L = static_cast<std::size_t>(l);
      mw[L] = b1 * mw[L] + (Scalar(1) - b1) * g.weights[L];
      vw[L] = b2 * vw[L] + (Scalar(1) - b2) * g.weights[L].cwiseAbs2();
      net.weights()[L].array() -= lr * mw[L].array() / (vw[L].array().sqrt() + eps);
      mb[L] = b1 * mb[L] + (Scalar(1) - b1) * g.biases[L];
      vb[L] = b2 * vb[L] + (Scalar(1) - b2) * g.biases[L].cwiseAbs2();
      net.biases()[L].array() -= lr * mb[L].array() / (vb[L].array().sqrt() + eps);
    }
  }
};

inline double accuracy_of(const std::vector<int>& pred, const std::vector<int>& truth) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == truth[i];
  return pred.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(pred.size());
}

}  // namespace detail

/// Mini-batch Adam training with dropout and early stopping on validation
/// accuracy. The best validation snapshot is returned. When `validation` is
/// null a holdout is split off the training set.
inline MlpModel train_mlp(const Dataset& train_in, const MlpHyper& hyper, Rng& rng,
                          const Dataset* validation = nullptr) {
  if (train_in.empty() || distinct_labels(train_in) < 2) {
    throw TrainingInputError("MLP training needs samples from at least 2 distinct cells");
  }
  if (hyper.batch < 1 || hyper.epochs < 1) throw ParameterError("batch and epochs must be positive");
  if (!(hyper.dropout >= 0.0 && hyper.dropout < 1.0)) throw ParameterError("dropout must be in [0, 1)");

  Dataset train_split, holdout;
  const Dataset* train = &train_in;
  if (validation == nullptr && hyper.patience > 0 && train_in.size() >= 20) {
    std::tie(train_split, holdout) = split_holdout(train_in, hyper.validation_fraction, rng);
    train = &train_split;
    validation = &holdout;
  }
  if (validation != nullptr && validation->empty()) validation = nullptr;

  using Net = Mlp<float>;
  MlpModel model{{}, Normalizer::fit(*train)};
  std::vector<int> sizes{static_cast<int>(model.norm.dim())};
  sizes.insert(sizes.end(), hyper.hidden.begin(), hyper.hidden.end());
  sizes.push_back(train->field.cells());
  model.net = Net(sizes, rng);

  const Net::Matrix x = model.norm.matrix<float>(*train);
  const std::vector<int> y = labels_of(*train);
  for (int label : y) {
    if (label < 0 || label >= sizes.back()) throw TrainingInputError("label outside the field's cell range");
  }
  Net::Matrix xv;
  std::vector<int> yv;
  if (validation) {
    xv = model.norm.matrix<float>(*validation);
    yv = labels_of(*validation);
  }

  detail::AdamState<float> adam(model.net);
  Net::Gradients grad;
  const int n_masks = std::max(0, static_cast<int>(hyper.hidden.size()) - 1);
  std::vector<Net::Matrix> masks(hyper.dropout > 0.0 ? static_cast<std::size_t>(n_masks) : 0);
  std::bernoulli_distribution keep(1.0 - hyper.dropout);
  const float scale = static_cast<float>(1.0 / (1.0 - hyper.dropout));

  std::vector<std::size_t> order(y.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Net best = model.net;
  double best_acc = -1.0;
  int since_best = 0;
  Net::Matrix xb(x.rows(), hyper.batch);
  std::vector<int> yb;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch));
      const auto bn = static_cast<Eigen::Index>(stop - start);
      xb.resize(x.rows(), bn);
      yb.resize(static_cast<std::size_t>(bn));
      for (std::size_t i = start; i < stop; ++i) {
        xb.col(static_cast<Eigen::Index>(i - start)) = x.col(static_cast<Eigen::Index>(order[i]));
        yb[i - start] = y[order[i]];
      }
      for (std::size_t m = 0; m < masks.size(); ++m) {
        masks[m].resize(sizes[m + 1], bn);
        float* data = masks[m].data();
        for (Eigen::Index k = 0; k < masks[m].size(); ++k) data[k] = keep(rng) ? scale : 0.0f;
      }
      model.net.loss_and_gradient(xb, yb, grad, masks);
      adam.update(model.net, grad, hyper);
    }
    if (!validation) continue;
    const double acc = detail::accuracy_of(model.net.predict(xv), yv);
    if (acc > best_acc) {
      best_acc = acc;
      best = model.net;
      since_best = 0;
    } else if (++since_best >= hyper.patience) {
      break;
    }
  }
  if (validation) model.net = std::move(best);
  return model;
}

}  // namespace seisloc
