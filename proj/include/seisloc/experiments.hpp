#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "seisloc/augment.hpp"
#include "seisloc/csv.hpp"
#include "seisloc/locate.hpp"
#include "seisloc/parallel.hpp"
#include "seisloc/tomo.hpp"

namespace seisloc {

struct ExperimentConfig {
  // Field, sensors and events.
  int grid = 20;
  double width_km = 1.0;
  double sigma_km = 0.2;
  double xi = 0.02;
  int test_events = 2000;

  // Sweeps and repetitions.
  std::vector<int> l_values{25, 50, 100, 200, 400, 800, 1600, 3200, 8000};
  /// L values for the PhyAug arm; empty means l_values.
  std::vector<int> phyaug_l_values;
  int seeds = 3;
  std::uint64_t base_seed = 1;
  std::vector<ClassifierKind> classifiers{ClassifierKind::mlp, ClassifierKind::svm};

  MlpHyper mlp;
  /// Epoch cap when training on augmented data; 0 means mlp.epochs.
  int phyaug_mlp_epochs = 0;
  SvmGrid svm = SvmGrid::defaults();
  AugmentConfig augment;

  // Ratio levels: absolute accuracies, or fractions of the best baseline mean.
  std::vector<double> levels;
  std::vector<double> relative_levels{0.80, 0.85, 0.90, 0.95, 1.00};

  // Noise sweep.
  std::vector<double> xi_values{0.0, 0.02, 0.04, 0.06, 0.08};
  int baseline_l = 8000;

  // DE benchmark.
  std::vector<int> bench_grids{10, 20, 30, 50};
  int bench_events = 100;
  int bench_tomo_events = 1000;
  int bench_train_per_cell = 20;
  int bench_mlp_epochs = 30;
  double bench_svm_c = 16.0;
  double bench_svm_gamma = 4.0;
  DeConfig de;

  int threads = default_threads();
  std::string out_dir = ".";
  /// Per-trial progress lines on stderr.
  bool verbose = false;

  FieldConfig field() const { return FieldConfig{width_km, width_km, grid, grid}; }

  const std::vector<int>& phyaug_ls() const { return phyaug_l_values.empty() ? l_values : phyaug_l_values; }

  void validate() const {
    field().validate();
    if (seeds < 1) throw ConfigError("seeds must be at least 1");
    if (l_values.empty()) throw ConfigError("L sweep is empty");
    if (xi_values.empty()) throw ConfigError("noise sweep is empty");
    if (bench_grids.empty()) throw ConfigError("grid-size sweep is empty");
    if (classifiers.empty()) throw ConfigError("no classifier selected");
    if (levels.empty() && relative_levels.empty()) throw ConfigError("no accuracy levels for the ratio");
    for (int l : l_values) {
      if (l < 2) throw ConfigError("L values must be at least 2");
    }
    for (int l : phyaug_l_values) {
      if (l < 2) throw ConfigError("L values must be at least 2");
    }
    for (double x : xi_values) {
      if (!(x >= 0.0)) throw ConfigError("noise levels must be non-negative");
    }
    if (!(xi >= 0.0)) throw ConfigError("noise level must be non-negative");
    if (test_events < 1 || bench_events < 1 || baseline_l < 2) throw ConfigError("event counts must be positive");
    if (bench_tomo_events < 1 || bench_train_per_cell < 1) throw ConfigError("benchmark volumes must be positive");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    augment.validate(field());
    de.validate();
  }
};

/// Ground truth, real events and test set shared by the trials of one seed.
struct Scenario {
  FieldConfig field;
  SlownessModel truth;
  SensorArray sensors;
  double xi = 0.0;
  std::vector<EventRecord> events;
  Dataset test;

  Dataset real(int l) const {
    const std::vector<EventRecord> head(events.begin(), events.begin() + l);
    return dataset_from_events(head, sensors, field, Provenance::real);
  }
};

namespace detail {

inline void progress(const ExperimentConfig& cfg, const std::string& line) {
  if (!cfg.verbose) return;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  std::cerr << line << std::endl;
}

inline std::uint64_t bits_of(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

}  // namespace detail

/// Real events are drawn per seed so that every L sees a prefix of the same
/// event stream; sources do not depend on the noise level.
inline Scenario make_scenario(const ExperimentConfig& cfg, const FieldConfig& field, double xi, int seed_index,
                              int events) {
  Scenario s{field, build_synthetic_slowness(field, {}), place_boundary_sensors(field), xi, {}, {}};
  const auto k = static_cast<std::uint64_t>(seed_index);
  const auto tag = static_cast<std::uint64_t>(field.grid_w1);
  Rng sources = derive_rng({cfg.base_seed, k, tag, 1});
  Rng noise = derive_rng({cfg.base_seed, k, tag, 2});
  Rng test = derive_rng({cfg.base_seed, k, tag, 3});
  const NoiseSpec spec{xi, 0};
  s.events = simulate_events(sample_real_events(events, field, cfg.sigma_km, sources), s.truth, s.sensors, spec, noise);
  s.test = make_dataset(sample_real_events(cfg.test_events, field, cfg.sigma_km, test), s.truth, s.sensors, spec, test);
  return s;
}

/// Tomographic estimate from the first `l` events, with eta set from the noise level.
inline SlownessModel estimate_from_events(const Scenario& s, int l) {
  const std::vector<EventRecord> head(s.events.begin(), s.events.begin() + l);
  const auto input = TomoInput::from_events(head, s.field);
  auto prior = TomoPrior::for_field(s.field);
  prior.eta = TomoPrior::eta_for_noise(s.xi * input.mean_time(), prior.sigma_s);
  return estimate_slowness(input, prior);
}

struct TrialResult {
  double accuracy = 0.0;
  std::size_t augmented = 0;
};

inline TrialResult run_trial(const ExperimentConfig& cfg, const Scenario& s, ClassifierKind kind, bool phyaug, int l,
                             int seed_index) {
  Rng rng = derive_rng({cfg.base_seed, static_cast<std::uint64_t>(seed_index), 100 + static_cast<std::uint64_t>(kind),
                        phyaug ? 1u : 0u, static_cast<std::uint64_t>(l), detail::bits_of(s.xi)});
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset real = s.real(l);
  MlpHyper hyper = cfg.mlp;
  if (phyaug && cfg.phyaug_mlp_epochs > 0) hyper.epochs = cfg.phyaug_mlp_epochs;
  const Trainer trainer = kind == ClassifierKind::mlp ? mlp_trainer(hyper) : svm_trainer(cfg.svm);
  TrialResult out;
  if (!phyaug) {
    out.accuracy = evaluate(trainer(real, nullptr, rng), s.test);
  } else {
    const auto s_hat = estimate_from_events(s, l);
    const auto r = augmentation_schedule(s_hat, real, s.sensors, trainer, cfg.augment, NoiseSpec{s.xi, 0}, rng);
    out = {evaluate(r.model, s.test), r.final_x};
  }
  detail::progress(cfg, std::string(to_string(kind)) + " phyaug=" + (phyaug ? "1" : "0") + " L=" + std::to_string(l) +
                            " seed=" + std::to_string(cfg.base_seed + static_cast<std::uint64_t>(seed_index)) +
                            " xi=" + format_number(s.xi) + " accuracy=" + format_number(out.accuracy) + " (" +
                            format_number(std::round(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count())) +
                            " s)");
  return out;
}

inline std::string flag(bool b) { return b ? "1" : "0"; }

/// Accuracy vs real-sample volume for every classifier, with and without PhyAug.
inline CsvTable cmd_fig9(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Task {
    ClassifierKind kind;
    bool phyaug;
    int l;
    int seed;
  };
  std::vector<Task> tasks;
  int max_l = 0;
  for (auto kind : cfg.classifiers) {
    for (bool phyaug : {false, true}) {
      for (int l : phyaug ? cfg.phyaug_ls() : cfg.l_values) {
        max_l = std::max(max_l, l);
        for (int seed = 0; seed < cfg.seeds; ++seed) tasks.push_back({kind, phyaug, l, seed});
      }
    }
  }
  std::vector<Scenario> scenarios;
  for (int seed = 0; seed < cfg.seeds; ++seed) scenarios.push_back(make_scenario(cfg, cfg.field(), cfg.xi, seed, max_l));
  const auto results = parallel_map(tasks.size(), cfg.threads, [&](std::size_t i) {
    const auto& t = tasks[i];
    return run_trial(cfg, scenarios[static_cast<std::size_t>(t.seed)], t.kind, t.phyaug, t.l, t.seed);
  });
  CsvTable out{{"classifier", "phyaug", "L", "seed", "accuracy"}, {}};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    out.add({to_string(t.kind), flag(t.phyaug), std::to_string(t.l), std::to_string(cfg.base_seed + t.seed),
             format_number(results[i].accuracy)});
  }
  return out;
}

/// Smallest L on a sorted sweep whose accuracy reaches `level`, by bisection.
/// The curve is assumed non-decreasing; the returned L always reaches the level.
inline std::optional<int> min_l_reaching(const std::vector<std::pair<int, double>>& curve, double level) {
  std::size_t lo = 0, hi = curve.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (curve[mid].second >= level) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (lo == curve.size()) return std::nullopt;
  return curve[lo].first;
}

/// Mean accuracy over seeds per L, sorted by L.
inline std::vector<std::pair<int, double>> mean_curve(const CsvTable& t, const std::string& classifier, bool phyaug) {
  const auto cc = t.column("classifier"), cp = t.column("phyaug"), cl = t.column("L"), ca = t.column("accuracy");
  std::map<int, std::pair<double, int>> acc;
  for (const auto& r : t.rows) {
    if (r[cc] != classifier || r[cp] != flag(phyaug)) continue;
    auto& a = acc[parse_number<int>(r[cl])];
    a.first += parse_number<double>(r[ca]);
    ++a.second;
  }
  std::vector<std::pair<int, double>> out;
  for (const auto& [l, a] : acc) out.emplace_back(l, a.first / a.second);
  return out;
}

/// Real-data volume needed with and without PhyAug at each accuracy level.
inline CsvTable ratio_from_sweep(const CsvTable& sweep, const ExperimentConfig& cfg) {
  const auto cc = sweep.column("classifier");
  std::vector<std::string> classifiers;
  for (const auto& r : sweep.rows) {
    if (std::find(classifiers.begin(), classifiers.end(), r[cc]) == classifiers.end()) classifiers.push_back(r[cc]);
  }
  CsvTable out{{"classifier", "accuracy", "L_without", "L_with", "ratio", "status"}, {}};
  for (const auto& c : classifiers) {
    const auto base = mean_curve(sweep, c, false), phy = mean_curve(sweep, c, true);
    std::vector<double> levels = cfg.levels;
    if (levels.empty() && !base.empty()) {
      double best = 0.0;
      for (const auto& p : base) best = std::max(best, p.second);
      for (double f : cfg.relative_levels) levels.push_back(f * best);
    }
    for (double level : levels) {
      const auto lw = min_l_reaching(base, level), lp = min_l_reaching(phy, level);
      const auto show = [](const std::optional<int>& l) { return l ? std::to_string(*l) : std::string("NA"); };
      std::string ratio = "NA", status = "ok";
      if (lw && lp) {
        ratio = format_number(static_cast<double>(*lp) / static_cast<double>(*lw));
      } else {
        status = !lw && !lp ? "unreachable" : (!lw ? "unreachable_without" : "unreachable_with");
      }
      out.add({c, format_number(level), show(lw), show(lp), ratio, status});
    }
  }
  return out;
}

inline CsvTable cmd_ratio(const ExperimentConfig& cfg, const CsvTable* sweep = nullptr) {
  if (sweep) return ratio_from_sweep(*sweep, cfg);
  return ratio_from_sweep(cmd_fig9(cfg), cfg);
}

/// Per noise level, seed and classifier: baseline accuracy at `baseline_l`
/// real samples, then the smallest PhyAug L (bisection over the PhyAug sweep)
/// that matches it.
inline CsvTable cmd_noise_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<int> sweep = cfg.phyaug_ls();
  std::sort(sweep.begin(), sweep.end());
  sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());
  const int max_l = std::max(cfg.baseline_l, sweep.back());

  struct Task {
    std::size_t xi;
    int seed;
    ClassifierKind kind;
  };
  std::vector<Task> tasks;
  for (std::size_t x = 0; x < cfg.xi_values.size(); ++x)
    for (int seed = 0; seed < cfg.seeds; ++seed)
      for (auto kind : cfg.classifiers) tasks.push_back({x, seed, kind});

  struct Outcome {
    double base_acc = 0.0;
    std::optional<int> l_with;
    double phy_acc = 0.0;
  };
  const auto results = parallel_map(tasks.size(), cfg.threads, [&](std::size_t i) {
    const auto& t = tasks[i];
    const auto s = make_scenario(cfg, cfg.field(), cfg.xi_values[t.xi], t.seed, max_l);
    Outcome o;
    o.base_acc = run_trial(cfg, s, t.kind, false, cfg.baseline_l, t.seed).accuracy;
    std::map<int, double> probed;
    auto probe = [&](std::size_t k) {
      auto it = probed.find(sweep[k]);
      if (it == probed.end()) it = probed.emplace(sweep[k], run_trial(cfg, s, t.kind, true, sweep[k], t.seed).accuracy).first;
      return it->second;
    };
    std::size_t lo = 0, hi = sweep.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (probe(mid) >= o.base_acc) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    if (lo < sweep.size()) {
      o.l_with = sweep[lo];
      o.phy_acc = probe(lo);
    } else {
      o.phy_acc = probe(sweep.size() - 1);
    }
    return o;
  });

  CsvTable out{{"xi", "classifier", "phyaug", "seed", "L", "accuracy", "ratio", "status"}, {}};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    const auto& o = results[i];
    const std::string xi = format_number(cfg.xi_values[t.xi]), seed = std::to_string(cfg.base_seed + t.seed);
    out.add({xi, to_string(t.kind), "0", seed, std::to_string(cfg.baseline_l), format_number(o.base_acc), "1", "ok"});
    if (o.l_with) {
      out.add({xi, to_string(t.kind), "1", seed, std::to_string(*o.l_with), format_number(o.phy_acc),
               format_number(static_cast<double>(*o.l_with) / cfg.baseline_l), "ok"});
    } else {
      out.add({xi, to_string(t.kind), "1", seed, std::to_string(sweep.back()), format_number(o.phy_acc), "NA",
               "unreachable"});
    }
  }
  return out;
}

struct BenchPoint {
  int cells = 0;
  std::string method;
  double mean_time_s = 0.0;
  double mean_error_km = 0.0;
  int events = 0;
};

/// Per-inference time and localization error of DE and the selected
/// classifiers across grid sizes. Runs single-threaded so the timings do not
/// compete.
inline CsvTable cmd_de_bench(const ExperimentConfig& cfg) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  CsvTable out{{"N", "method", "mean_time_s", "mean_error_km", "events"}, {}};
  for (int w : cfg.bench_grids) {
    const FieldConfig field = FieldConfig{cfg.width_km, cfg.width_km, w, w};
    const int n = field.cells();
    ExperimentConfig local = cfg;
    local.test_events = cfg.bench_events;
    const auto s = make_scenario(local, field, cfg.xi, 0, cfg.bench_tomo_events);
    const auto s_hat = estimate_from_events(s, cfg.bench_tomo_events);

    Rng rng = derive_rng({cfg.base_seed, static_cast<std::uint64_t>(w), 7});
    Dataset train = s.real(cfg.bench_tomo_events);
    train.append(generate_augmented(s_hat, static_cast<std::size_t>(cfg.bench_train_per_cell) * static_cast<std::size_t>(n),
                                    s.sensors, NoiseSpec{cfg.xi, 0}, rng, cfg.augment.inject_noise));

    auto time_classifier = [&](const Classifier& c, const char* name) {
      double err = 0.0;
      const auto t0 = clock::now();
      std::vector<int> cells;
      for (const auto& e : s.test.samples) cells.push_back(c.predict(e.feature));
      const double secs = std::chrono::duration<double>(clock::now() - t0).count();
      for (std::size_t i = 0; i < cells.size(); ++i) err += localization_error(cells[i], s.test.samples[i].source, field);
      const auto count = static_cast<double>(cells.size());
      out.add({std::to_string(n), name, format_number(secs / count), format_number(err / count),
               std::to_string(cells.size())});
      detail::progress(cfg, "N=" + std::to_string(n) + " " + name + " " + format_number(secs / count) + " s/event");
    };

    double de_err = 0.0, de_secs = 0.0;
    for (std::size_t i = 0; i < s.test.size(); ++i) {
      DeConfig de = cfg.de;
      de.seed = cfg.de.seed + i;
      const auto t0 = clock::now();
      const auto r = de_localize(s.test.samples[i].feature, s_hat, s.sensors, de);
      de_secs += std::chrono::duration<double>(clock::now() - t0).count();
      de_err += localization_error(r.cell, s.test.samples[i].source, field);
    }
    const auto count = static_cast<double>(s.test.size());
    out.add({std::to_string(n), "de", format_number(de_secs / count), format_number(de_err / count),
             std::to_string(s.test.size())});
    detail::progress(cfg, "N=" + std::to_string(n) + " de " + format_number(de_secs / count) + " s/event");
    for (auto kind : cfg.classifiers) {
      if (kind == ClassifierKind::svm) {
        time_classifier(Classifier{fit_svm(train, cfg.bench_svm_c, cfg.bench_svm_gamma, cfg.svm.tolerance,
                                           cfg.svm.cache_bytes)},
                        "svm");
      } else {
        MlpHyper hyper = cfg.mlp;
        hyper.epochs = cfg.bench_mlp_epochs;
        time_classifier(Classifier{train_mlp(train, hyper, rng)}, "mlp");
      }
    }
  }
  return out;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArityError("slope needs at least two paired points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

/// Writes `table` under the configured output directory and returns the path.
inline std::string emit_csv(const ExperimentConfig& cfg, const std::string& name, const CsvTable& table) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  const auto path = (std::filesystem::path(cfg.out_dir) / name).string();
  write_csv(path, table);
  return path;
}

}  // namespace seisloc
