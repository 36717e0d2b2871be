#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "seisloc/simulate.hpp"

namespace seisloc {

/// Per-dimension z-score statistics taken from a training set.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  static Normalizer fit(const Dataset& d) {
    if (d.empty()) throw TrainingInputError("cannot fit normalization on an empty dataset");
    const std::size_t dim = d.samples.front().feature.size();
    Normalizer n{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
    for (const auto& s : d.samples) {
      if (s.feature.size() != dim) throw ArityError("inconsistent feature dimensions in dataset");
      for (std::size_t k = 0; k < dim; ++k) n.mean[k] += s.feature[k];
    }
    for (auto& m : n.mean) m /= static_cast<double>(d.size());
    for (const auto& s : d.samples) {
      for (std::size_t k = 0; k < dim; ++k) n.stddev[k] += (s.feature[k] - n.mean[k]) * (s.feature[k] - n.mean[k]);
    }
    for (auto& v : n.stddev) v = std::max(std::sqrt(v / static_cast<double>(d.size())), 1e-12);
    return n;
  }

  std::size_t dim() const { return mean.size(); }

  template <typename Scalar>
  void apply(const std::vector<double>& feature, Scalar* out) const {
    if (feature.size() != mean.size()) {
      throw ArityError("feature has dimension " + std::to_string(feature.size()) + ", model expects " +
                       std::to_string(mean.size()));
    }
    for (std::size_t k = 0; k < mean.size(); ++k) out[k] = static_cast<Scalar>((feature[k] - mean[k]) / stddev[k]);
  }

  /// Normalized features as columns of a dim x n matrix.
  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix(const Dataset& d) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x(static_cast<Eigen::Index>(dim()),
                                                            static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) apply(d.samples[i].feature, x.col(static_cast<Eigen::Index>(i)).data());
    return x;
  }
};

inline std::vector<int> labels_of(const Dataset& d) {
  std::vector<int> y;
  y.reserve(d.size());
  for (const auto& s : d.samples) y.push_back(s.label);
  return y;
}

inline int distinct_labels(const Dataset& d) {
  std::set<int> s;
  for (const auto& x : d.samples) s.insert(x.label);
  return static_cast<int>(s.size());
}

/// Splits off a random `fraction` of the samples (at least one) as a holdout.
inline std::pair<Dataset, Dataset> split_holdout(const Dataset& d, double fraction, Rng& rng) {
  std::vector<std::size_t> idx(d.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::size_t hold = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * static_cast<double>(d.size())));
  Dataset train{{}, d.sensor_count, d.field}, held{{}, d.sensor_count, d.field};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    (i < hold ? held : train).samples.push_back(d.samples[idx[i]]);
  }
  return {std::move(train), std::move(held)};
}

}  // namespace seisloc
