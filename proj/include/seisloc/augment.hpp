#pragma once

#include <cmath>
#include <vector>

#include "seisloc/classifier.hpp"

namespace seisloc {

struct AugmentConfig {
  /// Initial augmented volume; 0 means 100 per cell.
  std::size_t initial_x = 0;
  double factor = 2.0;
  /// Minimum validation-accuracy gain, in percentage points, to keep doubling.
  double threshold_points = 0.5;
  int max_rounds = 6;
  bool inject_noise = false;
  /// Share of the initial augmented pool held out for validation.
  double validation_fraction = 0.1;

  std::size_t initial_count(const FieldConfig& f) const {
    return initial_x ? initial_x : 100 * static_cast<std::size_t>(f.cells());
  }

  void validate(const FieldConfig& f) const {
    if (initial_count(f) < static_cast<std::size_t>(f.cells())) {
      throw ParameterError("initial augmented volume must be at least the cell count");
    }
    if (!(factor > 1.0)) throw ParameterError("doubling factor must exceed 1");
    if (!(threshold_points >= 0.0)) throw ParameterError("saturation threshold must be non-negative");
    if (max_rounds < 1) throw ParameterError("max rounds must be at least 1");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
      throw ParameterError("validation fraction must be in (0, 1)");
    }
  }
};

/// Synthetic fingerprints t = A_x s_hat at uniformly drawn sources. Noise at
/// `spec.xi` is added only when `inject_noise` is set.
inline Dataset generate_augmented(const SlownessModel& s_hat, std::size_t count, const SensorArray& sensors,
                                  const NoiseSpec& spec, Rng& rng, bool inject_noise = false) {
  if (count < 1) throw ParameterError("augmented volume must be at least 1");
  const auto sources = sample_uniform_events(static_cast<int>(count), s_hat.config(), rng);
  const NoiseSpec noise{inject_noise ? spec.xi : 0.0, spec.seed};
  return dataset_from_events(simulate_events(sources, s_hat, sensors, noise, rng), sensors, s_hat.config(),
                             Provenance::augmented);
}

struct AugmentResult {
  Classifier model;
  std::size_t final_x = 0;
  /// Augmented volume and validation accuracy of every round.
  std::vector<std::size_t> x_trace;
  std::vector<double> accuracy_trace;
};

/// Trains on the real samples plus X augmented ones, multiplying X by the
/// factor while validation accuracy improves by more than the threshold.
/// The validation set is fixed across rounds so the gains are comparable.
inline AugmentResult augmentation_schedule(const SlownessModel& s_hat, const Dataset& real_train,
                                           const SensorArray& sensors, const Trainer& trainer,
                                           const AugmentConfig& cfg, const NoiseSpec& spec, Rng& rng) {
  const auto& field = s_hat.config();
  cfg.validate(field);
  const std::size_t x0 = cfg.initial_count(field);
  const auto n_val = static_cast<std::size_t>(std::ceil(cfg.validation_fraction * static_cast<double>(x0)));

  Dataset validation = generate_augmented(s_hat, n_val, sensors, spec, rng, cfg.inject_noise);
  Dataset pool{{}, sensors.size(), field};
  AugmentResult result;
  double previous = 0.0;
  std::size_t x = x0;
  for (int round = 0; round < cfg.max_rounds; ++round) {
    if (pool.size() < x) pool.append(generate_augmented(s_hat, x - pool.size(), sensors, spec, rng, cfg.inject_noise));
    Dataset train = real_train;
    if (train.sensor_count == 0) train = Dataset{{}, sensors.size(), field};
    train.append(pool);
    Classifier model = trainer(train, &validation, rng);
    const double acc = evaluate(model, validation);
    result.x_trace.push_back(x);
    result.accuracy_trace.push_back(acc);
    result.model = std::move(model);
    result.final_x = x;
    if ((acc - previous) * 100.0 <= cfg.threshold_points) break;
    previous = acc;
    x = static_cast<std::size_t>(std::llround(static_cast<double>(x) * cfg.factor));
  }
  return result;
}

}  // namespace seisloc
