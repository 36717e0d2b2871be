#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <list>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "seisloc/features.hpp"

namespace seisloc {

/// Row-wise RBF kernel matrix over a fixed sample set, computed lazily and
/// kept in an LRU cache of whole rows.
class KernelCache {
 public:
  /// `samples` is n x dim, row-major.
  KernelCache(std::vector<double> samples, int dim, double gamma, std::size_t cache_bytes)
      : x_(std::move(samples)), dim_(dim), gamma_(gamma) {
    n_ = dim_ > 0 ? static_cast<int>(x_.size() / static_cast<std::size_t>(dim_)) : 0;
    cols_.resize(x_.size());
    for (int k = 0; k < n_; ++k)
      for (int q = 0; q < dim_; ++q) cols_[static_cast<std::size_t>(q) * n_ + k] = x_[static_cast<std::size_t>(k) * dim_ + q];
    const std::size_t row_bytes = sizeof(double) * static_cast<std::size_t>(std::max(n_, 1));
    capacity_ = std::max<std::size_t>(2, cache_bytes / row_bytes);
    capacity_ = std::min<std::size_t>(capacity_, static_cast<std::size_t>(n_) + 1);
    slot_.assign(static_cast<std::size_t>(n_), lru_.end());
  }

  int size() const { return n_; }
  int dim() const { return dim_; }
  double gamma() const { return gamma_; }
  const double* sample(int i) const { return x_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_); }

  double eval(const double* a, const double* b) const {
    double d2 = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double d = a[k] - b[k];
      d2 += d * d;
    }
    return std::exp(-gamma_ * d2);
  }

  double operator()(int i, int j) const { return eval(sample(i), sample(j)); }

  /// Row i of the kernel matrix; valid until the next call to row().
  const double* row(int i) {
    auto& it = slot_[static_cast<std::size_t>(i)];
    if (it != lru_.end()) {
      lru_.splice(lru_.begin(), lru_, it);
      return it->data.data();
    }
    if (lru_.size() >= capacity_) {
      auto& victim = lru_.back();
      slot_[static_cast<std::size_t>(victim.index)] = lru_.end();
      lru_.splice(lru_.begin(), lru_, std::prev(lru_.end()));
      lru_.front().index = i;
    } else {
      lru_.push_front({i, std::vector<double>(static_cast<std::size_t>(n_))});
    }
    it = lru_.begin();
    double* out = it->data.data();
    const double* xi = sample(i);
    std::fill(out, out + n_, 0.0);
    for (int q = 0; q < dim_; ++q) {
      const double v = xi[q];
      const double* col = cols_.data() + static_cast<std::size_t>(q) * n_;
      for (int k = 0; k < n_; ++k) out[k] += (v - col[k]) * (v - col[k]);
    }
    Eigen::Map<Eigen::ArrayXd> r(out, n_);
    r = (-gamma_ * r).exp();
    ++computed_rows_;
    return out;
  }

  std::size_t computed_rows() const { return computed_rows_; }

 private:
  struct Entry {
    int index;
    std::vector<double> data;
  };
  std::vector<double> x_;
  std::vector<double> cols_;  // column-major copy for row evaluation
  int dim_ = 0;
  int n_ = 0;
  double gamma_ = 1.0;
  std::size_t capacity_ = 2;
  std::list<Entry> lru_;
  std::vector<std::list<Entry>::iterator> slot_;
  std::size_t computed_rows_ = 0;
};

struct BinarySolution {
  std::vector<double> alpha;
  /// Decision value is sum_i alpha_i y_i K(x_i, x) + bias.
  double bias = 0.0;
  /// Maximal KKT violation m(alpha) - M(alpha) at exit.
  double gap = 0.0;
  long iterations = 0;
};

/// Soft-margin binary SVM dual solved by SMO with second-order working-set
/// selection. Labels are +1/-1. Stops when the KKT gap drops below `tol`.
inline BinarySolution solve_binary_smo(KernelCache& kernel, const std::vector<std::int8_t>& y, double c, double tol,
                                       long max_iter = -1, bool shrinking = true) {
  const int n = kernel.size();
  if (static_cast<int>(y.size()) != n) throw ArityError("label count does not match kernel size");
  if (!(c > 0.0)) throw ParameterError("SVM penalty C must be positive");
  if (max_iter < 0) max_iter = std::max<long>(10'000'000, 100L * n);
  constexpr double tau = 1e-12;
  constexpr double inf = std::numeric_limits<double>::infinity();

  BinarySolution sol;
  sol.alpha.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<double> g(static_cast<std::size_t>(n), -1.0);
  // g_bar[t] = sum over upper-bounded j of C * Q_tj; lets shrunk gradients be rebuilt.
  std::vector<double> g_bar(static_cast<std::size_t>(n), 0.0);
  auto& a = sol.alpha;
  std::vector<int> active(static_cast<std::size_t>(n));
  std::iota(active.begin(), active.end(), 0);
  bool unshrunk = false;
  std::vector<double> yd(y.begin(), y.end()), off(static_cast<std::size_t>(n), 0.0);
  std::vector<double> up_v(static_cast<std::size_t>(n)), low_v(static_cast<std::size_t>(n));

  auto reconstruct = [&] {
    if (static_cast<int>(active.size()) == n) return;
    std::vector<char> is_active(static_cast<std::size_t>(n), 0);
    for (int t : active) is_active[t] = 1;
    for (int t = 0; t < n; ++t) {
      if (!is_active[t]) g[t] = g_bar[t] - 1.0;
    }
    for (int j : active) {
      if (!(a[j] > 0 && a[j] < c)) continue;
      const double* kj = kernel.row(j);
      const double aj = a[j] * y[j];
      for (int t = 0; t < n; ++t) {
        if (!is_active[t]) g[t] += y[t] * kj[t] * aj;
      }
    }
    active.resize(static_cast<std::size_t>(n));
    std::iota(active.begin(), active.end(), 0);
    std::fill(off.begin(), off.end(), 0.0);
  };

  // A bounded variable whose gradient points firmly outward is unlikely to move again.
  auto shrink = [&] {
    double m1 = -inf, m2 = -inf;
    for (int t : active) {
      if (y[t] > 0) {
        if (a[t] < c) m1 = std::max(m1, -g[t]);
        if (a[t] > 0) m2 = std::max(m2, g[t]);
      } else {
        if (a[t] > 0) m1 = std::max(m1, g[t]);
        if (a[t] < c) m2 = std::max(m2, -g[t]);
      }
    }
    if (!unshrunk && m1 + m2 <= tol * 10) {
      unshrunk = true;
      reconstruct();
    }
    std::size_t w = 0;
    for (int t : active) {
      bool out = false;
      if (a[t] >= c) {
        out = y[t] > 0 ? -g[t] > m1 : -g[t] > m2;
      } else if (a[t] <= 0) {
        out = y[t] > 0 ? g[t] > m2 : g[t] > m1;
      }
      if (out) {
        off[t] = -inf;
      } else {
        active[w++] = t;
      }
    }
    active.resize(w);
  };

  long iter = 0;
  double gap = 0.0;
  const int period = std::min(n, 1000);
  int counter = period;
  for (; iter < max_iter; ++iter) {
    if (shrinking && --counter == 0) {
      counter = period;
      shrink();
    }
    double gmax = -inf, gmax2 = -inf;
    int i = -1, j = -1;
    const double* ki = nullptr;
    if (active.size() * 4 >= static_cast<std::size_t>(n)) {
      // Dense passes over all variables; shrunk ones carry off[t] = -inf.
      for (int t = 0; t < n; ++t) {
        const double up = yd[t] > 0 ? (a[t] < c ? -g[t] : -inf) : (a[t] > 0 ? g[t] : -inf);
        const double low = yd[t] > 0 ? (a[t] > 0 ? g[t] : -inf) : (a[t] < c ? -g[t] : -inf);
        up_v[t] = up + off[t];
        low_v[t] = low + off[t];
      }
      gmax = Eigen::Map<const Eigen::ArrayXd>(up_v.data(), n).maxCoeff();
      gmax2 = Eigen::Map<const Eigen::ArrayXd>(low_v.data(), n).maxCoeff();
      if (gmax > -inf) {
        i = static_cast<int>(std::find(up_v.begin(), up_v.end(), gmax) - up_v.begin());
        ki = kernel.row(i);
        for (int t = 0; t < n; ++t) {
          const double gd = gmax + low_v[t];
          double quad = 2.0 - 2.0 * ki[t];
          quad = quad <= 0 ? tau : quad;
          low_v[t] = gd > 0 ? -(gd * gd) / quad : inf;
        }
        const double obj_min = Eigen::Map<const Eigen::ArrayXd>(low_v.data(), n).minCoeff();
        if (obj_min < inf) j = static_cast<int>(std::find(low_v.begin(), low_v.end(), obj_min) - low_v.begin());
      }
    } else {
      for (int t : active) {
        if (y[t] > 0) {
          if (a[t] < c && -g[t] >= gmax) {
            gmax = -g[t];
            i = t;
          }
        } else if (a[t] > 0 && g[t] >= gmax) {
          gmax = g[t];
          i = t;
        }
      }
      double obj_min = inf;
      if (i >= 0) ki = kernel.row(i);
      for (int t : active) {
        double grad_diff;
        if (y[t] > 0) {
          if (!(a[t] > 0)) continue;
          grad_diff = gmax + g[t];
          gmax2 = std::max(gmax2, g[t]);
        } else {
          if (!(a[t] < c)) continue;
          grad_diff = gmax - g[t];
          gmax2 = std::max(gmax2, -g[t]);
        }
        if (grad_diff > 0 && ki) {
          double quad = 2.0 - 2.0 * ki[t];
          if (quad <= 0) quad = tau;
          const double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= obj_min) {
            obj_min = obj;
            j = t;
          }
        }
      }
    }
    gap = gmax + gmax2;
    if (i < 0 || j < 0 || gap < tol) {
      // Optimal on the active set; confirm on the full set before stopping.
      if (static_cast<int>(active.size()) == n) break;
      reconstruct();
      counter = 2;  // check the full set before shrinking again
      continue;
    }

    const double* kj = kernel.row(j);
    ki = kernel.row(i);
    const double yi = y[i], yj = y[j];
    const double old_i = a[i], old_j = a[j];
    const double kij = ki[j];
    if (yi != yj) {
      double quad = 2.0 - 2.0 * kij;
      if (quad <= 0) quad = tau;
      const double delta = (-g[i] - g[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0) {
        if (a[j] < 0) {
          a[j] = 0;
          a[i] = diff;
        }
      } else if (a[i] < 0) {
        a[i] = 0;
        a[j] = -diff;
      }
      if (diff > 0) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = c - diff;
        }
      } else if (a[j] > c) {
        a[j] = c;
        a[i] = c + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * kij;
      if (quad <= 0) quad = tau;
      const double delta = (g[i] - g[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > c) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = sum - c;
        }
      } else if (a[j] < 0) {
        a[j] = 0;
        a[i] = sum;
      }
      if (sum > c) {
        if (a[j] > c) {
          a[j] = c;
          a[i] = sum - c;
        }
      } else if (a[i] < 0) {
        a[i] = 0;
        a[j] = sum;
      }
    }
    const double di = (a[i] - old_i) * yi;
    const double dj = (a[j] - old_j) * yj;
    if (static_cast<int>(active.size()) == n) {
      for (int t = 0; t < n; ++t) g[t] += y[t] * (ki[t] * di + kj[t] * dj);
    } else {
      for (int t : active) g[t] += y[t] * (ki[t] * di + kj[t] * dj);
    }

    const bool ui = old_i >= c, uj = old_j >= c;
    if (ui != (a[i] >= c)) {
      const double s = (ui ? -c : c) * yi;
      for (int t = 0; t < n; ++t) g_bar[t] += y[t] * ki[t] * s;
    }
    if (uj != (a[j] >= c)) {
      const double s = (uj ? -c : c) * yj;
      for (int t = 0; t < n; ++t) g_bar[t] += y[t] * kj[t] * s;
    }
  }
  sol.iterations = iter;
  sol.gap = gap;

  // Bias from free vectors, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  int n_free = 0;
  for (int t = 0; t < n; ++t) {
    const double yg = y[t] * g[t];
    if (a[t] >= c) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (a[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : (std::isfinite(ub) && std::isfinite(lb) ? (ub + lb) / 2 : 0.0);
  sol.bias = -rho;
  return sol;
}

/// Recomputes the dual gradient from scratch and returns the KKT gap
/// m(alpha) - M(alpha) together with the largest box-constraint violation.
inline std::pair<double, double> audit_binary_solution(const KernelCache& kernel, const std::vector<std::int8_t>& y,
                                                       const std::vector<double>& alpha, double c) {
  const int n = kernel.size();
  double box = 0.0;
  for (double v : alpha) box = std::max({box, -v, v - c});
  double up = -std::numeric_limits<double>::infinity(), low = std::numeric_limits<double>::infinity();
  for (int t = 0; t < n; ++t) {
    double gt = -1.0;
    for (int s = 0; s < n; ++s) {
      if (alpha[s] != 0.0) gt += y[t] * y[s] * kernel(t, s) * alpha[s];
    }
    const double v = -y[t] * gt;
    const bool in_up = (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
    const bool in_low = (y[t] < 0 && alpha[t] < c) || (y[t] > 0 && alpha[t] > 0);
    if (in_up) up = std::max(up, v);
    if (in_low) low = std::min(low, v);
  }
  return {std::max(0.0, up - low), box};
}

struct SvmGrid {
  std::vector<double> c_values;
  std::vector<double> gamma_values;
  int folds = 3;
  /// Cross-validation runs on a random subsample of at most this many points.
  std::size_t cv_max_samples = 4000;
  double tolerance = 1e-3;
  std::size_t cache_bytes = std::size_t{512} << 20;

  /// C in 2^-2..2^6, gamma in 2^-4..2^4.
  static SvmGrid defaults() {
    SvmGrid g;
    for (int e = -2; e <= 6; ++e) g.c_values.push_back(std::ldexp(1.0, e));
    for (int e = -4; e <= 4; ++e) g.gamma_values.push_back(std::ldexp(1.0, e));
    return g;
  }
};

/// One-vs-rest RBF machines sharing a table of support vectors.
struct SvmModel {
  struct Machine {
    int label = 0;
    double bias = 0.0;
    std::vector<int> sv;         // indices into support_vectors
    std::vector<double> coef;    // alpha_i * y_i
  };

  Normalizer norm;
  double gamma = 1.0;
  double c = 1.0;
  int dim = 0;
  /// Normalized support vectors, row-major.
  std::vector<double> support_vectors;
  /// Training-set index of every support vector.
  std::vector<int> sv_source;
  std::vector<Machine> machines;

  int sv_count() const { return static_cast<int>(sv_source.size()); }

  std::vector<double> decision_values(const std::vector<double>& feature) const {
    std::vector<double> z(static_cast<std::size_t>(dim));
    norm.apply(feature, z.data());
    std::vector<double> k(sv_source.size());
    for (std::size_t s = 0; s < k.size(); ++s) {
      const double* v = support_vectors.data() + s * static_cast<std::size_t>(dim);
      double d2 = 0.0;
      for (int q = 0; q < dim; ++q) d2 += (z[q] - v[q]) * (z[q] - v[q]);
      k[s] = std::exp(-gamma * d2);
    }
    std::vector<double> out;
    out.reserve(machines.size());
    for (const auto& m : machines) {
      double f = m.bias;
      for (std::size_t q = 0; q < m.sv.size(); ++q) f += m.coef[q] * k[static_cast<std::size_t>(m.sv[q])];
      out.push_back(f);
    }
    return out;
  }

  int predict(const std::vector<double>& feature) const {
    const auto f = decision_values(feature);
    std::size_t best = 0;
    for (std::size_t q = 1; q < f.size(); ++q) {
      if (f[q] > f[best]) best = q;
    }
    return machines[best].label;
  }

  std::vector<int> predict(const Dataset& d) const {
    std::vector<int> out;
    out.reserve(d.size());
    for (const auto& s : d.samples) out.push_back(predict(s.feature));
    return out;
  }
};

namespace detail {

inline std::vector<double> normalized_rows(const Dataset& d, const Normalizer& norm) {
  const std::size_t dim = norm.dim();
  std::vector<double> x(d.size() * dim);
  for (std::size_t i = 0; i < d.size(); ++i) norm.apply(d.samples[i].feature, x.data() + i * dim);
  return x;
}

// Trains every one-vs-rest machine on a shared kernel cache.
inline SvmModel train_ovr(KernelCache& kernel, const std::vector<int>& labels, const Normalizer& norm, double c,
                          double tol) {
  SvmModel model;
  model.norm = norm;
  model.gamma = kernel.gamma();
  model.c = c;
  model.dim = kernel.dim();
  std::vector<int> classes(labels);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw TrainingInputError("SVM training needs at least 2 distinct cells");

  std::map<int, int> table;  // training index -> support vector slot
  std::vector<std::int8_t> y(labels.size());
  for (int cls : classes) {
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == cls ? 1 : -1;
    auto sol = solve_binary_smo(kernel, y, c, tol);
    SvmModel::Machine m;
    m.label = cls;
    m.bias = sol.bias;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (sol.alpha[i] <= 0.0) continue;
      auto [it, inserted] = table.emplace(static_cast<int>(i), static_cast<int>(table.size()));
      m.sv.push_back(it->second);
      m.coef.push_back(sol.alpha[i] * y[i]);
    }
    model.machines.push_back(std::move(m));
  }
  model.sv_source.resize(table.size());
  model.support_vectors.resize(table.size() * static_cast<std::size_t>(model.dim));
  for (const auto& [train_idx, slot] : table) {
    model.sv_source[static_cast<std::size_t>(slot)] = train_idx;
    std::copy_n(kernel.sample(train_idx), model.dim,
                model.support_vectors.data() + static_cast<std::size_t>(slot) * static_cast<std::size_t>(model.dim));
  }
  return model;
}

}  // namespace detail

/// Fits one-vs-rest machines for a fixed (C, gamma).
inline SvmModel fit_svm(const Dataset& train, double c, double gamma, double tol = 1e-3,
                        std::size_t cache_bytes = std::size_t{512} << 20) {
  if (train.empty() || distinct_labels(train) < 2) throw TrainingInputError("SVM training needs at least 2 distinct cells");
  if (!(gamma > 0.0)) throw ParameterError("SVM gamma must be positive");
  const Normalizer norm = Normalizer::fit(train);
  KernelCache kernel(detail::normalized_rows(train, norm), static_cast<int>(norm.dim()), gamma, cache_bytes);
  return detail::train_ovr(kernel, labels_of(train), norm, c, tol);
}

struct SvmSelection {
  double c = 0.0;
  double gamma = 0.0;
  double cv_accuracy = 0.0;
};

/// k-fold cross-validated grid search; ties go to smaller C, then smaller gamma.
inline SvmSelection select_svm_params(const Dataset& train, const SvmGrid& grid, Rng& rng) {
  if (grid.c_values.empty() || grid.gamma_values.empty()) throw ParameterError("SVM grid is empty");
  if (grid.folds < 2) throw ParameterError("cross-validation needs at least 2 folds");
  std::vector<double> cs = grid.c_values, gs = grid.gamma_values;
  std::sort(cs.begin(), cs.end());
  std::sort(gs.begin(), gs.end());
  if (cs.size() == 1 && gs.size() == 1) return {cs[0], gs[0], std::numeric_limits<double>::quiet_NaN()};

  std::vector<std::size_t> idx(train.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  if (idx.size() > grid.cv_max_samples) idx.resize(grid.cv_max_samples);
  const Dataset all = [&] {
    Dataset d{{}, train.sensor_count, train.field};
    for (auto i : idx) d.samples.push_back(train.samples[i]);
    return d;
  }();
  const auto folds = static_cast<std::size_t>(grid.folds);
  if (all.size() < folds) throw TrainingInputError("too few samples for cross-validation");

  // correct[c][g] accumulated over folds.
  std::vector<std::vector<std::size_t>> correct(cs.size(), std::vector<std::size_t>(gs.size(), 0));
  for (std::size_t f = 0; f < folds; ++f) {
    Dataset tr{{}, all.sensor_count, all.field}, te{{}, all.sensor_count, all.field};
    for (std::size_t i = 0; i < all.size(); ++i) (i % folds == f ? te : tr).samples.push_back(all.samples[i]);
    const auto y = labels_of(tr);
    const bool degenerate = distinct_labels(tr) < 2;
    const Normalizer norm = degenerate ? Normalizer{} : Normalizer::fit(tr);
    for (std::size_t gi = 0; gi < gs.size(); ++gi) {
      if (degenerate) break;
      KernelCache kernel(detail::normalized_rows(tr, norm), static_cast<int>(norm.dim()), gs[gi], grid.cache_bytes);
      for (std::size_t ci = 0; ci < cs.size(); ++ci) {
        const SvmModel m = detail::train_ovr(kernel, y, norm, cs[ci], grid.tolerance);
        for (const auto& s : te.samples) correct[ci][gi] += m.predict(s.feature) == s.label;
      }
    }
  }
  SvmSelection best{cs[0], gs[0], -1.0};
  for (std::size_t ci = 0; ci < cs.size(); ++ci) {
    for (std::size_t gi = 0; gi < gs.size(); ++gi) {
      const double acc = static_cast<double>(correct[ci][gi]) / static_cast<double>(all.size());
      if (acc > best.cv_accuracy) best = {cs[ci], gs[gi], acc};
    }
  }
  return best;
}

/// Grid search followed by a fit on the full training set.
inline SvmModel train_svm(const Dataset& train, const SvmGrid& grid, Rng& rng) {
  if (train.empty() || distinct_labels(train) < 2) throw TrainingInputError("SVM training needs at least 2 distinct cells");
  const auto sel = select_svm_params(train, grid, rng);
  return fit_svm(train, sel.c, sel.gamma, grid.tolerance, grid.cache_bytes);
}

}  // namespace seisloc
