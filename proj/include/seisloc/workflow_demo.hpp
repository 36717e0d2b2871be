#pragma once

#include <array>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seisloc/error.hpp"
#include "seisloc/geometry.hpp"
#include "seisloc/random.hpp"

namespace seisloc {

/// x' = a1 x + a2 y + a3 xy + a4 x^2 + a5 y^2, and likewise y' with b.
struct PolyTransform {
  std::array<double, 5> a{};
  std::array<double, 5> b{};

  static PolyTransform identity() { return {{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}}; }
  /// Fixed distortion used by the demo: a near-quarter turn with mild curvature.
  static PolyTransform moderate_distortion() { return {{0.3, 0.9, 0.05, 0.1, 0.0}, {-0.9, 0.3, 0.0, 0.0, 0.1}}; }
};

inline std::array<double, 5> poly_terms(Point p) { return {p.x, p.y, p.x * p.y, p.x * p.x, p.y * p.y}; }

inline Point apply_transform(const PolyTransform& t, Point p) {
  const auto r = poly_terms(p);
  Point out{0.0, 0.0};
  for (std::size_t k = 0; k < 5; ++k) {
    out.x += t.a[k] * r[k];
    out.y += t.b[k] * r[k];
  }
  return out;
}

using PointPair = std::pair<Point, Point>;

/// Least-squares fit of both coordinate polynomials from (source, target) pairs.
inline PolyTransform fit_transform(const std::vector<PointPair>& pairs) {
  if (pairs.size() < 5) throw DegeneratePairsError("need at least 5 pairs to fit 5 coefficients per axis");
  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd design(n, 5);
  Eigen::MatrixXd rhs(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = poly_terms(pairs[static_cast<std::size_t>(i)].first);
    for (Eigen::Index k = 0; k < 5; ++k) design(i, k) = r[static_cast<std::size_t>(k)];
    rhs(i, 0) = pairs[static_cast<std::size_t>(i)].second.x;
    rhs(i, 1) = pairs[static_cast<std::size_t>(i)].second.y;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(4) <= 1e-10 * sv(0)) {
    throw DegeneratePairsError("source points do not determine the transform (design matrix rank < 5)");
  }
  const Eigen::MatrixXd coef = svd.solve(rhs);
  PolyTransform t;
  for (Eigen::Index k = 0; k < 5; ++k) {
    t.a[static_cast<std::size_t>(k)] = coef(k, 0);
    t.b[static_cast<std::size_t>(k)] = coef(k, 1);
  }
  return t;
}

/// Separate transform per class label.
inline std::map<int, PolyTransform> fit_transform_per_class(const std::map<int, std::vector<PointPair>>& pairs) {
  std::map<int, PolyTransform> out;
  for (const auto& [label, list] : pairs) out[label] = fit_transform(list);
  return out;
}

struct LabeledPoint {
  Point p;
  int label = 0;
};

/// Nearest-centroid rule over labels 0..k-1.
struct CentroidClassifier {
  std::vector<Point> centroids;

  static CentroidClassifier fit(const std::vector<LabeledPoint>& data, int classes) {
    std::vector<Point> sum(static_cast<std::size_t>(classes), {0.0, 0.0});
    std::vector<int> count(static_cast<std::size_t>(classes), 0);
    for (const auto& d : data) {
      sum[static_cast<std::size_t>(d.label)].x += d.p.x;
      sum[static_cast<std::size_t>(d.label)].y += d.p.y;
      ++count[static_cast<std::size_t>(d.label)];
    }
    CentroidClassifier c;
    for (int k = 0; k < classes; ++k) {
      const auto K = static_cast<std::size_t>(k);
      if (count[K] == 0) throw TrainingInputError("class " + std::to_string(k) + " has no samples");
      c.centroids.push_back({sum[K].x / count[K], sum[K].y / count[K]});
    }
    return c;
  }

  int predict(Point p) const {
    int best = 0;
    for (std::size_t k = 1; k < centroids.size(); ++k) {
      if (distance(p, centroids[k]) < distance(p, centroids[static_cast<std::size_t>(best)])) best = static_cast<int>(k);
    }
    return best;
  }

  double accuracy(const std::vector<LabeledPoint>& data) const {
    if (data.empty()) throw ParameterError("cannot evaluate on an empty set");
    std::size_t ok = 0;
    for (const auto& d : data) ok += predict(d.p) == d.label;
    return static_cast<double>(ok) / static_cast<double>(data.size());
  }
};

struct DemoConfig {
  std::uint64_t seed = 1;
  PolyTransform hidden = PolyTransform::moderate_distortion();
  std::vector<Point> centres{{-1.0, 0.0}, {1.0, 0.0}};
  double spread = 0.6;
  int train_per_class = 200;
  int test_per_class = 500;
  /// Source/target pairs measured in the target domain for the fit.
  int pairs = 8;
};

struct DemoReport {
  double source_acc_on_target = 0.0;
  double phyaug_acc_on_target = 0.0;
  PolyTransform fitted;
};

namespace detail {

inline std::vector<LabeledPoint> demo_blobs(const DemoConfig& cfg, int per_class, Rng& rng) {
  std::normal_distribution<double> n(0.0, cfg.spread);
  std::vector<LabeledPoint> out;
  for (int i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < cfg.centres.size(); ++c) {
      out.push_back({{cfg.centres[c].x + n(rng), cfg.centres[c].y + n(rng)}, static_cast<int>(c)});
    }
  }
  return out;
}

}  // namespace detail

/// Source-domain training, pair collection, transform fit, data translation,
/// retraining, and evaluation on the target domain. `pair_order` permutes the
/// collected pairs before fitting.
inline DemoReport demo_pipeline(const DemoConfig& cfg, const std::vector<std::size_t>& pair_order = {}) {
  if (cfg.centres.size() < 2) throw ParameterError("demo needs at least two classes");
  if (cfg.train_per_class < 1 || cfg.test_per_class < 1) throw ParameterError("demo sample counts must be positive");
  Rng rng(cfg.seed);
  const int classes = static_cast<int>(cfg.centres.size());
  const auto source_train = detail::demo_blobs(cfg, cfg.train_per_class, rng);
  auto target_test = detail::demo_blobs(cfg, cfg.test_per_class, rng);
  for (auto& d : target_test) d.p = apply_transform(cfg.hidden, d.p);

  const auto source_model = CentroidClassifier::fit(source_train, classes);

  std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(-1.5, 1.5);
  std::vector<PointPair> pairs;
  for (int k = 0; k < cfg.pairs; ++k) {
    const Point p{ux(rng), uy(rng)};
    pairs.emplace_back(p, apply_transform(cfg.hidden, p));
  }
  if (!pair_order.empty()) {
    if (pair_order.size() != pairs.size()) throw ArityError("pair permutation has the wrong length");
    std::vector<PointPair> permuted;
    for (auto i : pair_order) permuted.push_back(pairs.at(i));
    pairs = std::move(permuted);
  }
  DemoReport report;
  report.fitted = fit_transform(pairs);

  auto translated = source_train;
  for (auto& d : translated) d.p = apply_transform(report.fitted, d.p);
  const auto phyaug_model = CentroidClassifier::fit(translated, classes);

  report.source_acc_on_target = source_model.accuracy(target_test);
  report.phyaug_acc_on_target = phyaug_model.accuracy(target_test);
  return report;
}

}  // namespace seisloc
