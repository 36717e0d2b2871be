#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "seisloc/field.hpp"

namespace seisloc {

/// Path lengths (km) of one straight ray through the grid cells it crosses.
struct RayRow {
  /// (cell, length) pairs sorted by cell index, lengths > 0.
  std::vector<std::pair<int, double>> entries;
  double total_length = 0.0;

  double length_in(int cell) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), cell,
                               [](const auto& e, int c) { return e.first < c; });
    return (it != entries.end() && it->first == cell) ? it->second : 0.0;
  }

  double dot(const std::vector<double>& cell_values) const {
    double acc = 0.0;
    for (const auto& [cell, len] : entries) acc += len * cell_values[static_cast<std::size_t>(cell)];
    return acc;
  }
};

/// One row per sensor, in sensor order.
struct RayMatrix {
  FieldConfig config;
  std::vector<RayRow> rows;
};

namespace detail {

// Ray parameters in (0, 1) at which the segment crosses interior gridlines
// of one axis, in increasing order.
template <typename LineFn>
void axis_crossings(double from, double to, int cells, LineFn line, std::vector<double>& out) {
  out.clear();
  if (from == to) return;
  const double inv = 1.0 / (to - from);
  if (to > from) {
    for (int k = 1; k < cells; ++k) {
      const double g = line(k);
      if (g > from && g < to) out.push_back((g - from) * inv);
    }
  } else {
    for (int k = cells - 1; k >= 1; --k) {
      const double g = line(k);
      if (g < from && g > to) out.push_back((g - from) * inv);
    }
  }
}

}  // namespace detail

/// Exact straight-ray traversal: the segment is cut at every gridline
/// crossing and each piece is credited to the cell holding its midpoint.
/// The result does not depend on the direction of travel.
inline RayRow trace_ray(Point src, Point dst, const FieldConfig& cfg) {
  if (!cfg.contains(src)) (void)cell_of(src, cfg);
  if (!cfg.contains(dst)) (void)cell_of(dst, cfg);
  RayRow row;
  if (src == dst) return row;
  // Canonical orientation so that a->b and b->a are bit-identical.
  if (dst.x < src.x || (dst.x == src.x && dst.y < src.y)) std::swap(src, dst);

  const double len = distance(src, dst);
  row.total_length = len;

  thread_local std::vector<double> tx, ty;
  detail::axis_crossings(src.x, dst.x, cfg.grid_w1, [&](int k) { return cfg.x_line(k); }, tx);
  detail::axis_crossings(src.y, dst.y, cfg.grid_w2, [&](int k) { return cfg.y_line(k); }, ty);

  const double dx = dst.x - src.x;
  const double dy = dst.y - src.y;
  auto credit = [&](double t0, double t1) {
    if (!(t1 - t0 > 1e-14)) return;
    const double tm = 0.5 * (t0 + t1);
    const Point mid{src.x + tm * dx, src.y + tm * dy};
    const int cell = cell_x(std::clamp(mid.x, 0.0, cfg.width_km), cfg) * cfg.grid_w2 +
                     cell_y(std::clamp(mid.y, 0.0, cfg.height_km), cfg);
    const double piece = (t1 - t0) * len;
    if (!row.entries.empty() && row.entries.back().first == cell) {
      row.entries.back().second += piece;
    } else {
      row.entries.emplace_back(cell, piece);
    }
  };

  double prev = 0.0;
  std::size_t a = 0, b = 0;
  while (a < tx.size() || b < ty.size()) {
    double next;
    if (b >= ty.size() || (a < tx.size() && tx[a] <= ty[b])) {
      next = tx[a++];
    } else {
      next = ty[b++];
    }
    credit(prev, std::max(prev, next));
    prev = std::max(prev, next);
  }
  credit(prev, 1.0);

  std::sort(row.entries.begin(), row.entries.end());
  // A cell can show up twice only through sub-ulp slivers at grid corners.
  std::vector<std::pair<int, double>> merged;
  merged.reserve(row.entries.size());
  for (const auto& e : row.entries) {
    if (!merged.empty() && merged.back().first == e.first) {
      merged.back().second += e.second;
    } else {
      merged.push_back(e);
    }
  }
  row.entries = std::move(merged);
  return row;
}

inline RayMatrix assemble_event_matrix(Point src, const SensorArray& sensors, const FieldConfig& cfg) {
  RayMatrix a{cfg, {}};
  a.rows.reserve(sensors.positions.size());
  for (const auto& s : sensors.positions) a.rows.push_back(trace_ray(src, s, cfg));
  return a;
}

}  // namespace seisloc
