#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>
#include <vector>

#include "seisloc/simulate.hpp"

namespace seisloc {

struct TomoPrior {
  double eta = 1e-3;
  /// Correlation length of the exponential covariance, in km.
  double smoothness_km = 0.1;
  /// Expected spread of slowness values; used to derive eta from the noise level.
  double sigma_s = 0.05;
  double clamp_min = 0.01;

  void validate() const {
    if (!(eta > 0.0)) throw ParameterError("tomography eta must be positive");
    if (!(smoothness_km > 0.0)) throw ParameterError("tomography smoothness length must be positive");
    if (!(clamp_min > 0.0)) throw ParameterError("tomography clamp_min must be positive");
  }

  /// Defaults for a field: smoothness of two cell widths.
  static TomoPrior for_field(const FieldConfig& f) {
    TomoPrior p;
    p.smoothness_km = 2.0 * f.cell_width();
    return p;
  }

  /// eta = (sigma_eps / sigma_s)^2, floored so the system stays definite at zero noise.
  static double eta_for_noise(double noise_std, double sigma_s, double floor = 1e-8) {
    const double e = (noise_std / sigma_s) * (noise_std / sigma_s);
    return std::max(e, floor);
  }
};

/// Stacked rays and measured times of L events (L*M rows).
struct TomoInput {
  FieldConfig field;
  std::vector<RayRow> rows;
  std::vector<double> times;

  static TomoInput from_events(const std::vector<EventRecord>& events, const FieldConfig& field) {
    TomoInput in{field, {}, {}};
    for (const auto& ev : events) {
      if (!(ev.rays.config == field)) throw ConfigError("event rays are on a different grid");
      if (ev.rays.rows.size() != ev.times.size()) throw ConfigError("event ray/time count mismatch");
      for (std::size_t m = 0; m < ev.times.size(); ++m) {
        if (ev.rays.rows[m].entries.empty()) continue;  // source on the sensor
        in.rows.push_back(ev.rays.rows[m]);
        in.times.push_back(ev.times[m]);
      }
    }
    return in;
  }

  /// Mean of the stacked measured times.
  double mean_time() const {
    if (times.empty()) return 0.0;
    return std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
  }
};

enum class TomoSolver { automatic, direct, conjugate_gradient };

/// Exponential covariance exp(-D_ij / S) between cell centers, plus jitter.
inline Eigen::MatrixXd prior_covariance(const FieldConfig& f, double smoothness_km, double jitter = 1e-10) {
  const int n = f.cells();
  std::vector<Point> c(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = cell_center(k, f);
  Eigen::MatrixXd sigma(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      const double v = std::exp(-distance(c[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(j)]) /
                                smoothness_km);
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  }
  sigma.diagonal().array() += jitter;
  return sigma;
}

namespace detail {

struct CovarianceFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::MatrixXd inverse;  // only filled for the direct path
};

// One factorization per (grid, smoothness), shared process-wide.
inline std::shared_ptr<const CovarianceFactor> covariance_factor(const FieldConfig& f, double smoothness_km,
                                                                 bool need_inverse) {
  using Key = std::tuple<int, int, double, double, double, bool>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const CovarianceFactor>> cache;
  const Key key{f.grid_w1, f.grid_w2, f.width_km, f.height_km, smoothness_km, need_inverse};
  {
    std::lock_guard lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto fac = std::make_shared<CovarianceFactor>();
  fac->llt.compute(prior_covariance(f, smoothness_km));
  if (fac->llt.info() != Eigen::Success) throw NumericalError("prior covariance is not positive definite");
  if (need_inverse) {
    fac->inverse = fac->llt.solve(Eigen::MatrixXd::Identity(f.cells(), f.cells()));
  }
  std::lock_guard lock(mu);
  if (cache.size() > 8) cache.clear();
  return cache.emplace(key, std::move(fac)).first->second;
}

inline Eigen::SparseMatrix<double> ray_matrix(const TomoInput& in) {
  const int n = in.field.cells();
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t r = 0; r < in.rows.size(); ++r) {
    for (const auto& [cell, len] : in.rows[r].entries) {
      if (cell < 0 || cell >= n) throw ConfigError("ray row references a cell outside the grid");
      trip.emplace_back(static_cast<int>(r), cell, len);
    }
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(in.rows.size()), n);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

// Conjugate gradients on (A^T A + eta Sigma^-1) x = b, matrix free.
// Returns false if the relative residual did not reach tol.
inline bool normal_equations_cg(const Eigen::SparseMatrix<double>& a, const Eigen::LLT<Eigen::MatrixXd>& sigma,
                                double eta, const Eigen::VectorXd& b, double tol, int max_iter,
                                Eigen::VectorXd& x) {
  auto apply = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd av = a * v;
    Eigen::VectorXd out = a.transpose() * av;
    out.noalias() += eta * sigma.solve(v);
    return out;
  };
  x = Eigen::VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) return true;
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  for (int it = 0; it < max_iter; ++it) {
    if (std::sqrt(rr) <= tol * bnorm) return true;
    const Eigen::VectorXd hp = apply(p);
    const double php = p.dot(hp);
    if (!(php > 0.0)) return false;  // not positive definite
    const double alpha = rr / php;
    x.noalias() += alpha * p;
    r.noalias() -= alpha * hp;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return std::sqrt(rr) <= tol * bnorm;
}

}  // namespace detail

/// Grid size above which the automatic solver switches to conjugate gradients.
inline constexpr int kDirectSolverMaxCells = 2500;

/// Regularized inversion: solves (A^T A + eta Sigma^-1) s = A^T t and clamps
/// the result from below.
inline SlownessModel estimate_slowness(const TomoInput& in, const TomoPrior& prior,
                                       TomoSolver solver = TomoSolver::automatic) {
  prior.validate();
  in.field.validate();
  if (in.rows.empty()) throw ParameterError("tomography needs at least one non-empty ray");
  if (in.rows.size() != in.times.size()) throw ConfigError("tomography rows and times differ in length");
  const int n = in.field.cells();
  if (solver == TomoSolver::automatic) {
    solver = n <= kDirectSolverMaxCells ? TomoSolver::direct : TomoSolver::conjugate_gradient;
  }

  const Eigen::SparseMatrix<double> a = detail::ray_matrix(in);
  const Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(in.times.data(), static_cast<Eigen::Index>(in.times.size()));
  const Eigen::VectorXd rhs = a.transpose() * t;
  Eigen::VectorXd s;

  if (solver == TomoSolver::direct) {
    auto fac = detail::covariance_factor(in.field, prior.smoothness_km, true);
    Eigen::MatrixXd h = Eigen::MatrixXd(a.transpose() * a);
    h.noalias() += prior.eta * fac->inverse;
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("normal equations are not positive definite (eta too small for the ray coverage?)");
    }
    s = llt.solve(rhs);
  } else {
    auto fac = detail::covariance_factor(in.field, prior.smoothness_km, false);
    if (!detail::normal_equations_cg(a, fac->llt, prior.eta, rhs, 1e-10, 10 * n, s)) {
      throw NumericalError("conjugate gradient did not converge (eta too small for the ray coverage?)");
    }
  }
  if (!s.allFinite()) throw NumericalError("tomography produced non-finite slowness");

  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = std::max(s[k], prior.clamp_min);
  return SlownessModel(in.field, std::move(out));
}

/// ||a - b|| / ||b|| over the flattened models.
inline double relative_error(const SlownessModel& estimate, const SlownessModel& truth) {
  if (!(estimate.config() == truth.config())) throw ConfigError("models are on different grids");
  double num = 0.0, den = 0.0;
  for (int k = 0; k < truth.size(); ++k) {
    const double d = estimate[k] - truth[k];
    num += d * d;
    den += truth[k] * truth[k];
  }
  return std::sqrt(num / den);
}

}  // namespace seisloc
