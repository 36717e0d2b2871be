#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "seisloc/error.hpp"
#include "seisloc/format.hpp"
#include "seisloc/geometry.hpp"

namespace seisloc {

/// Rectangular field split into grid_w1 cells along x and grid_w2 cells
/// along y. Cell (i, j) has flat index i * grid_w2 + j.
struct FieldConfig {
  double width_km = 1.0;
  double height_km = 1.0;
  int grid_w1 = 20;
  int grid_w2 = 20;

  int cells() const { return grid_w1 * grid_w2; }
  double cell_width() const { return width_km / grid_w1; }
  double cell_height() const { return height_km / grid_w2; }

  /// Position of the k-th vertical gridline, k in [0, grid_w1].
  double x_line(int k) const { return (k * width_km) / grid_w1; }
  double y_line(int k) const { return (k * height_km) / grid_w2; }

  bool contains(Point p) const {
    return p.x >= 0.0 && p.x <= width_km && p.y >= 0.0 && p.y <= height_km;
  }

  void validate() const {
    if (grid_w1 < 2 || grid_w2 < 2) {
      throw ParameterError("field grid must be at least 2x2, got " + std::to_string(grid_w1) + "x" +
                           std::to_string(grid_w2));
    }
    if (!(width_km > 0.0) || !(height_km > 0.0) || !std::isfinite(width_km) || !std::isfinite(height_km)) {
      throw ParameterError("field dimensions must be positive and finite");
    }
  }

  /// Square unit field with side cells along each axis.
  static FieldConfig square(int side, double size_km = 1.0) { return {size_km, size_km, side, side}; }

  friend bool operator==(const FieldConfig&, const FieldConfig&) = default;
};

namespace detail {

// Cell coordinate along one axis: points on an interior line go to the
// larger index, points on the far boundary to the last cell.
template <typename LineFn>
int axis_cell(double v, int cells, LineFn line) {
  int k = static_cast<int>(std::floor(v * cells / line(cells)));
  if (k < 0) k = 0;
  if (k > cells - 1) k = cells - 1;
  while (k + 1 < cells && v >= line(k + 1)) ++k;
  while (k > 0 && v < line(k)) --k;
  return k;
}

}  // namespace detail

inline int cell_x(double x, const FieldConfig& cfg) {
  return detail::axis_cell(x, cfg.grid_w1, [&](int k) { return cfg.x_line(k); });
}

inline int cell_y(double y, const FieldConfig& cfg) {
  return detail::axis_cell(y, cfg.grid_w2, [&](int k) { return cfg.y_line(k); });
}

inline int cell_of(Point p, const FieldConfig& cfg) {
  if (!cfg.contains(p)) {
    std::ostringstream os;
    os << "position (" << p.x << ", " << p.y << ") is outside the " << cfg.width_km << "x" << cfg.height_km
       << " km field";
    throw OutOfFieldError(os.str());
  }
  return cell_x(p.x, cfg) * cfg.grid_w2 + cell_y(p.y, cfg);
}

inline Point cell_center(int cell, const FieldConfig& cfg) {
  if (cell < 0 || cell >= cfg.cells()) {
    throw ParameterError("cell index " + std::to_string(cell) + " out of range");
  }
  const int i = cell / cfg.grid_w2;
  const int j = cell % cfg.grid_w2;
  return {((i + 0.5) * cfg.width_km) / cfg.grid_w1, ((j + 0.5) * cfg.height_km) / cfg.grid_w2};
}

/// Per-cell slowness in s/km, stored flattened row-wise.
class SlownessModel {
 public:
  SlownessModel() = default;

  SlownessModel(FieldConfig config, std::vector<double> flattened)
      : config_(config), values_(std::move(flattened)) {
    config_.validate();
    if (static_cast<int>(values_.size()) != config_.cells()) {
      throw ConfigError("slowness vector has " + std::to_string(values_.size()) + " entries, field has " +
                        std::to_string(config_.cells()) + " cells");
    }
    for (double v : values_) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError("slowness values must be positive and finite");
    }
  }

  static SlownessModel uniform(const FieldConfig& config, double value) {
    return SlownessModel(config, std::vector<double>(static_cast<std::size_t>(config.cells()), value));
  }

  const FieldConfig& config() const { return config_; }
  const std::vector<double>& flattened() const { return values_; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i * config_.grid_w2 + j)]; }
  double operator[](int cell) const { return values_[static_cast<std::size_t>(cell)]; }
  int size() const { return static_cast<int>(values_.size()); }

  friend bool operator==(const SlownessModel&, const SlownessModel&) = default;

 private:
  FieldConfig config_;
  std::vector<double> values_;
};

/// Smooth wavy background plus a horizontal slow barrier band.
struct WavyBarrierParams {
  double base = 0.30;
  double amplitude = 0.08;
  int waves = 3;
  bool barrier = true;
  double barrier_lo_km = 0.475;
  double barrier_hi_km = 0.525;
  double barrier_slowness = 0.50;
};

inline SlownessModel build_synthetic_slowness(const FieldConfig& cfg, const WavyBarrierParams& p) {
  cfg.validate();
  if (!(p.base > 0.0)) throw ParameterError("base slowness must be positive");
  if (!(std::abs(p.amplitude) < p.base)) throw ParameterError("wave amplitude must be smaller than base slowness");
  if (p.barrier) {
    if (!(p.barrier_slowness > 0.0)) throw ParameterError("barrier slowness must be positive");
    if (!(p.barrier_lo_km >= 0.0 && p.barrier_lo_km <= p.barrier_hi_km && p.barrier_hi_km <= cfg.height_km)) {
      throw ParameterError("barrier band must lie within [0, height]");
    }
  }
  const double pi = std::numbers::pi;
  std::vector<double> values(static_cast<std::size_t>(cfg.cells()));
  for (int i = 0; i < cfg.grid_w1; ++i) {
    for (int j = 0; j < cfg.grid_w2; ++j) {
      const Point c = cell_center(i * cfg.grid_w2 + j, cfg);
      double v = p.base + p.amplitude * std::sin(p.waves * pi * c.x / cfg.width_km) *
                              std::sin(p.waves * pi * c.y / cfg.height_km);
      if (p.barrier && c.y >= p.barrier_lo_km && c.y <= p.barrier_hi_km) v = p.barrier_slowness;
      if (!(v > 0.0)) throw ParameterError("synthetic slowness is non-positive at cell " + std::to_string(i) + "," +
                                           std::to_string(j));
      values[static_cast<std::size_t>(i * cfg.grid_w2 + j)] = v;
    }
  }
  return SlownessModel(cfg, std::move(values));
}

// Slowness text format:
//   W1 W2 width_km height_km
//   W1 lines of W2 space-separated values
inline void write_slowness(std::ostream& os, const SlownessModel& s) {
  const auto& c = s.config();
  os << c.grid_w1 << ' ' << c.grid_w2 << ' ' << format_number(c.width_km) << ' ' << format_number(c.height_km)
     << '\n';
  for (int i = 0; i < c.grid_w1; ++i) {
    for (int j = 0; j < c.grid_w2; ++j) {
      if (j) os << ' ';
      os << format_number(s.at(i, j));
    }
    os << '\n';
  }
}

inline SlownessModel read_slowness(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("slowness file: missing header line");
  auto head = split_ws(line);
  if (head.size() != 4) throw FormatError("slowness file: header must be 'W1 W2 width_km height_km'");
  FieldConfig cfg{parse_number<double>(head[2]), parse_number<double>(head[3]), parse_number<int>(head[0]),
                  parse_number<int>(head[1])};
  cfg.validate();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(cfg.cells()));
  for (int i = 0; i < cfg.grid_w1; ++i) {
    if (!std::getline(is, line)) throw FormatError("slowness file: expected " + std::to_string(cfg.grid_w1) + " rows");
    auto toks = split_ws(line);
    if (static_cast<int>(toks.size()) != cfg.grid_w2) {
      throw FormatError("slowness file: row " + std::to_string(i) + " has " + std::to_string(toks.size()) +
                        " values, expected " + std::to_string(cfg.grid_w2));
    }
    for (auto t : toks) values.push_back(parse_number<double>(t));
  }
  return SlownessModel(cfg, std::move(values));
}

inline void save_slowness(const std::string& path, const SlownessModel& s) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_slowness(os, s);
  if (!os) throw IoError("write failed for '" + path + "'");
}

inline SlownessModel load_slowness(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_slowness(is);
}

/// Sensor positions; index 0 is the TDoA reference.
struct SensorArray {
  std::vector<Point> positions;

  int size() const { return static_cast<int>(positions.size()); }
  const Point& operator[](int m) const { return positions[static_cast<std::size_t>(m)]; }

  void validate(const FieldConfig& cfg) const {
    if (positions.size() < 2) throw ParameterError("sensor array needs at least 2 sensors");
    for (const auto& p : positions) {
      if (!cfg.contains(p)) throw OutOfFieldError("sensor lies outside the field");
    }
  }
};

/// Four corners followed by the four edge midpoints.
inline SensorArray place_boundary_sensors(const FieldConfig& cfg) {
  const double w = cfg.width_km;
  const double h = cfg.height_km;
  return SensorArray{{{0.0, 0.0}, {w, 0.0}, {0.0, h}, {w, h}, {w / 2, 0.0}, {w / 2, h}, {0.0, h / 2}, {w, h / 2}}};
}

}  // namespace seisloc
