#pragma once

#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "seisloc/field.hpp"
#include "seisloc/random.hpp"
#include "seisloc/raytrace.hpp"

namespace seisloc {

struct NoiseSpec {
  /// Noise std as a fraction of the event's mean propagation time.
  double xi = 0.02;
  std::uint64_t seed = 1;
};

enum class Provenance { real, augmented };

inline const char* to_string(Provenance p) { return p == Provenance::real ? "real" : "augmented"; }

struct TdoaSample {
  std::vector<double> feature;
  Point source;
  int label = 0;
  Provenance provenance = Provenance::real;
};

struct Dataset {
  std::vector<TdoaSample> samples;
  int sensor_count = 0;
  FieldConfig field;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  int feature_dim() const { return sensor_count - 1; }

  void append(const Dataset& other) {
    if (other.empty()) return;
    if (empty() && samples.empty() && sensor_count == 0) {
      sensor_count = other.sensor_count;
      field = other.field;
    }
    if (other.sensor_count != sensor_count || !(other.field == field)) {
      throw ConfigError("cannot merge datasets with different sensor counts or fields");
    }
    samples.insert(samples.end(), other.samples.begin(), other.samples.end());
  }
};

/// Travel time to every sensor: row-by-row inner product with slowness.
inline std::vector<double> propagation_times(const RayMatrix& a, const SlownessModel& s) {
  if (!(a.config == s.config())) throw ConfigError("ray matrix and slowness model are on different grids");
  std::vector<double> t;
  t.reserve(a.rows.size());
  for (const auto& row : a.rows) {
    for (const auto& e : row.entries) {
      if (e.first < 0 || e.first >= s.size()) throw ConfigError("ray matrix references a cell outside the model");
    }
    t.push_back(row.dot(s.flattened()));
  }
  return t;
}

/// Adds i.i.d. Gaussian noise with std xi * mean(t).
inline std::vector<double> add_noise(const std::vector<double>& t, const NoiseSpec& spec, Rng& rng) {
  if (t.empty()) throw ArityError("add_noise: empty time vector");
  if (!(spec.xi >= 0.0)) throw ParameterError("noise level must be non-negative");
  const double mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
  const double sigma = spec.xi * mean;
  std::vector<double> out = t;
  if (sigma == 0.0) return out;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : out) v += noise(rng);
  return out;
}

/// Time differences relative to sensor 0.
inline std::vector<double> tdoa_from_times(const std::vector<double>& t) {
  if (t.size() < 2) throw ArityError("TDoA needs at least 2 arrival times, got " + std::to_string(t.size()));
  std::vector<double> f(t.size() - 1);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) f[k] = t[k + 1] - t[0];
  return f;
}

/// Isotropic Gaussian around the field center, rejection-resampled into the field.
inline std::vector<Point> sample_real_events(int count, const FieldConfig& field, double sigma_km, Rng& rng) {
  if (count < 1) throw ParameterError("event count must be at least 1");
  if (!(sigma_km > 0.0)) throw ParameterError("source spread must be positive");
  const Point c{field.width_km / 2, field.height_km / 2};
  std::normal_distribution<double> gx(c.x, sigma_km), gy(c.y, sigma_km);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    Point p{gx(rng), gy(rng)};
    if (field.contains(p)) out.push_back(p);
  }
  return out;
}

inline std::vector<Point> sample_uniform_events(int count, const FieldConfig& field, Rng& rng) {
  if (count < 1) throw ParameterError("event count must be at least 1");
  std::uniform_real_distribution<double> ux(0.0, field.width_km), uy(0.0, field.height_km);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double x = ux(rng);
    out.push_back({x, uy(rng)});
  }
  return out;
}

/// A simulated event: its rays and the (possibly noisy) measured arrival times.
struct EventRecord {
  Point source;
  RayMatrix rays;
  std::vector<double> times;
};

inline std::vector<EventRecord> simulate_events(const std::vector<Point>& sources, const SlownessModel& s,
                                                const SensorArray& sensors, const NoiseSpec& spec, Rng& rng) {
  const auto& cfg = s.config();
  sensors.validate(cfg);
  std::vector<EventRecord> out;
  out.reserve(sources.size());
  for (const auto& p : sources) {
    (void)cell_of(p, cfg);
    EventRecord ev{p, assemble_event_matrix(p, sensors, cfg), {}};
    ev.times = add_noise(propagation_times(ev.rays, s), spec, rng);
    out.push_back(std::move(ev));
  }
  return out;
}

inline Dataset dataset_from_events(const std::vector<EventRecord>& events, const SensorArray& sensors,
                                   const FieldConfig& cfg, Provenance provenance) {
  Dataset d{{}, sensors.size(), cfg};
  d.samples.reserve(events.size());
  for (const auto& ev : events) {
    d.samples.push_back({tdoa_from_times(ev.times), ev.source, cell_of(ev.source, cfg), provenance});
  }
  return d;
}

inline Dataset make_dataset(const std::vector<Point>& sources, const SlownessModel& s, const SensorArray& sensors,
                            const NoiseSpec& spec, Rng& rng) {
  return dataset_from_events(simulate_events(sources, s, sensors, spec, rng), sensors, s.config(), Provenance::real);
}

// Dataset CSV: label,src_x,src_y,provenance,f1,...,f{M-1}
inline void write_dataset_csv(std::ostream& os, const Dataset& d) {
  os << "label,src_x,src_y,provenance";
  for (int k = 1; k < d.sensor_count; ++k) os << ",f" << k;
  os << '\n';
  for (const auto& s : d.samples) {
    os << s.label << ',' << format_number(s.source.x) << ',' << format_number(s.source.y) << ','
       << to_string(s.provenance);
    for (double v : s.feature) os << ',' << format_number(v);
    os << '\n';
  }
}

inline Dataset read_dataset_csv(std::istream& is, const FieldConfig& field) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("dataset CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto head = split(line, ',');
  const char* fixed[] = {"label", "src_x", "src_y", "provenance"};
  if (head.size() < 5) throw FormatError("dataset CSV: header needs label,src_x,src_y,provenance and features");
  for (std::size_t k = 0; k < 4; ++k) {
    if (head[k] != fixed[k]) throw FormatError(std::string("dataset CSV: missing column '") + fixed[k] + "'");
  }
  for (std::size_t k = 4; k < head.size(); ++k) {
    if (head[k] != "f" + std::to_string(k - 3)) {
      throw FormatError("dataset CSV: expected column 'f" + std::to_string(k - 3) + "'");
    }
  }
  Dataset d{{}, static_cast<int>(head.size()) - 3, field};
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != head.size()) {
      throw FormatError("dataset CSV line " + std::to_string(lineno) + ": wrong column count");
    }
    TdoaSample s;
    s.label = parse_number<int>(cols[0]);
    s.source = {parse_number<double>(cols[1]), parse_number<double>(cols[2])};
    if (cols[3] == "real") {
      s.provenance = Provenance::real;
    } else if (cols[3] == "augmented") {
      s.provenance = Provenance::augmented;
    } else {
      throw FormatError("dataset CSV line " + std::to_string(lineno) + ": bad provenance");
    }
    for (std::size_t k = 4; k < cols.size(); ++k) s.feature.push_back(parse_number<double>(cols[k]));
    if (s.label != cell_of(s.source, field)) {
      throw FormatError("dataset CSV line " + std::to_string(lineno) + ": label does not match source cell");
    }
    d.samples.push_back(std::move(s));
  }
  return d;
}

inline void save_dataset(const std::string& path, const Dataset& d) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_dataset_csv(os, d);
  if (!os) throw IoError("write failed for '" + path + "'");
}

inline Dataset load_dataset(const std::string& path, const FieldConfig& field) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_dataset_csv(is, field);
}

}  // namespace seisloc
