#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "seisloc/simulate.hpp"

namespace seisloc {

struct DeConfig {
  int population = 30;
  double f = 0.7;
  double cr = 0.9;
  int max_generations = 200;
  /// Generations without a best-cost improvement above min_improvement before stopping.
  int patience = 30;
  double min_improvement = 1e-12;
  std::uint64_t seed = 0;
  /// Report the cheapest cell centre among the containing cell and its eight
  /// neighbours instead of the containing cell alone.
  bool refine_cell = true;

  void validate() const {
    if (population < 4) throw ParameterError("DE population must be at least 4");
    if (!(f > 0.0 && f < 2.0)) throw ParameterError("DE weight F must be in (0, 2)");
    if (!(cr >= 0.0 && cr <= 1.0)) throw ParameterError("DE crossover rate must be in [0, 1]");
    if (max_generations < 1) throw ParameterError("DE needs at least one generation");
    if (patience < 1) throw ParameterError("DE patience must be positive");
  }
};

/// Squared TDoA residual between an observed feature and the one predicted
/// at `p` through the slowness model.
inline double de_cost(Point p, const std::vector<double>& f_obs, const SlownessModel& s_hat,
                      const SensorArray& sensors) {
  const auto& cfg = s_hat.config();
  if (!cfg.contains(p)) throw OutOfFieldError("candidate position lies outside the field");
  if (f_obs.size() + 1 != static_cast<std::size_t>(sensors.size())) {
    throw ArityError("observed feature has dimension " + std::to_string(f_obs.size()) + ", expected " +
                     std::to_string(sensors.size() - 1));
  }
  const auto f = tdoa_from_times(propagation_times(assemble_event_matrix(p, sensors, cfg), s_hat));
  double cost = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) cost += (f_obs[k] - f[k]) * (f_obs[k] - f[k]);
  return cost;
}

struct DeResult {
  Point point;
  int cell = 0;
  /// Cost at `point`.
  double cost = 0.0;
  int generations = 0;
  /// Best cost after initialization and after every generation.
  std::vector<double> best_trace;
};

/// Called after initialization (generation 0) and after every generation.
using DeObserver = std::function<void(int generation, const std::vector<Point>& population)>;

/// DE/rand/1/bin over the continuous field box with clipping at the boundary.
inline DeResult de_localize(const std::vector<double>& f_obs, const SlownessModel& s_hat, const SensorArray& sensors,
                            const DeConfig& cfg, const DeObserver& observer = {}) {
  cfg.validate();
  const auto& field = s_hat.config();
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> ux(0.0, field.width_km), uy(0.0, field.height_km), unit(0.0, 1.0);
  const auto np = static_cast<std::size_t>(cfg.population);

  std::vector<Point> pop(np);
  std::vector<double> cost(np);
  for (std::size_t i = 0; i < np; ++i) {
    pop[i] = {ux(rng), uy(rng)};
    cost[i] = de_cost(pop[i], f_obs, s_hat, sensors);
  }
  auto best_index = [&] { return static_cast<std::size_t>(std::min_element(cost.begin(), cost.end()) - cost.begin()); };
  DeResult out;
  double best = cost[best_index()];
  out.best_trace.push_back(best);
  if (observer) observer(0, pop);

  std::uniform_int_distribution<std::size_t> pick(0, np - 1);
  std::uniform_int_distribution<int> coord(0, 1);
  int stale = 0;
  int gen = 0;
  std::vector<Point> next(np);
  while (gen < cfg.max_generations && stale < cfg.patience) {
    ++gen;
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t r1, r2, r3;
      do r1 = pick(rng); while (r1 == i);
      do r2 = pick(rng); while (r2 == i || r2 == r1);
      do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);
      const Point mutant{std::clamp(pop[r1].x + cfg.f * (pop[r2].x - pop[r3].x), 0.0, field.width_km),
                         std::clamp(pop[r1].y + cfg.f * (pop[r2].y - pop[r3].y), 0.0, field.height_km)};
      const int forced = coord(rng);
      Point trial = pop[i];
      if (forced == 0 || unit(rng) < cfg.cr) trial.x = mutant.x;
      if (forced == 1 || unit(rng) < cfg.cr) trial.y = mutant.y;
      const double c = de_cost(trial, f_obs, s_hat, sensors);
      if (c <= cost[i]) {
        next[i] = trial;
        cost[i] = c;
      } else {
        next[i] = pop[i];
      }
    }
    pop.swap(next);
    const double now = cost[best_index()];
    stale = best - now > cfg.min_improvement ? 0 : stale + 1;
    best = std::min(best, now);
    out.best_trace.push_back(now);
    if (observer) observer(gen, pop);
  }
  const auto b = best_index();
  out.point = pop[b];
  out.cell = cell_of(pop[b], field);
  out.cost = cost[b];
  if (cfg.refine_cell) {
    const int ci = out.cell / field.grid_w2, cj = out.cell % field.grid_w2;
    double best_centre = std::numeric_limits<double>::infinity();
    for (int i = std::max(0, ci - 1); i <= std::min(field.grid_w1 - 1, ci + 1); ++i) {
      for (int j = std::max(0, cj - 1); j <= std::min(field.grid_w2 - 1, cj + 1); ++j) {
        const int cell = i * field.grid_w2 + j;
        const double c = de_cost(cell_center(cell, field), f_obs, s_hat, sensors);
        if (c < best_centre) {
          best_centre = c;
          out.cell = cell;
        }
      }
    }
  }
  out.generations = gen;
  return out;
}

/// Euclidean distance in km.
inline double localization_error(Point predicted, Point truth) { return distance(predicted, truth); }

/// Distance from the centre of the predicted cell to the true source.
inline double localization_error(int predicted_cell, Point truth, const FieldConfig& field) {
  return distance(cell_center(predicted_cell, field), truth);
}

inline double mean_localization_error(const std::vector<Point>& predicted, const std::vector<Point>& truth) {
  if (predicted.size() != truth.size()) throw ArityError("prediction and truth counts differ");
  if (predicted.empty()) throw ParameterError("no localizations to average");
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) sum += localization_error(predicted[i], truth[i]);
  return sum / static_cast<double>(predicted.size());
}

}  // namespace seisloc
