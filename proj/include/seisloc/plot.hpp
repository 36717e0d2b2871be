#pragma once

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "seisloc/csv.hpp"

namespace seisloc {

struct PlotSpec {
  std::string x;
  std::string y;
  std::vector<std::string> series;
  bool log_x = false;
  bool log_y = false;
  std::string title;
};

/// Default chart for each CSV the experiments write, picked from the header.
inline PlotSpec default_plot_spec(const CsvTable& t) {
  if (t.has_column("L_without")) return {"accuracy", "ratio", {"classifier"}, false, true, "data ratio vs accuracy"};
  if (t.has_column("xi")) return {"xi", "accuracy", {"classifier", "phyaug"}, false, false, "accuracy vs noise level"};
  if (t.has_column("method")) return {"N", "mean_time_s", {"method"}, true, true, "inference time vs grid size"};
  if (t.has_column("L")) return {"L", "accuracy", {"classifier", "phyaug"}, true, false, "accuracy vs real samples"};
  throw FormatError("CSV matches no known schema; missing column 'L'");
}

namespace detail {

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, r.ptr);
}

inline std::optional<double> numeric(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace detail

/// Line chart of mean y per (series, x). Rows whose x or y is not a finite
/// number are skipped; series are drawn in lexicographic key order.
inline std::string render_svg(const CsvTable& t, const PlotSpec& spec) {
  const auto cx = t.column(spec.x), cy = t.column(spec.y);
  std::vector<std::size_t> cs;
  for (const auto& s : spec.series) cs.push_back(t.column(s));

  std::map<std::string, std::map<double, std::pair<double, int>>> groups;
  for (const auto& row : t.rows) {
    auto x = detail::numeric(row[cx]), y = detail::numeric(row[cy]);
    if (!x || !y || (spec.log_x && *x <= 0) || (spec.log_y && *y <= 0)) continue;
    std::string key;
    for (std::size_t k = 0; k < cs.size(); ++k) key += (k ? " " : "") + spec.series[k] + "=" + row[cs[k]];
    auto& cell = groups[key][*x];
    cell.first += *y;
    ++cell.second;
  }

  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& [key, pts] : groups) {
    for (const auto& [x, acc] : pts) {
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(acc.first / acc.second));
      y1 = std::max(y1, ty(acc.first / acc.second));
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;

  const double w = 640, h = 420, left = 70, right = 170, top = 40, bottom = 60;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (v - y0) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << detail::escape(spec.title) << "</text>\n";
  os << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw
     << "\" y2=\"" << top + ph << "\"/><line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
     << top + ph << "\"/></g>\n";
  os << "<g font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = x0 + (x1 - x0) * k / 4, vy = y0 + (y1 - y0) * k / 4;
    const double lx = spec.log_x ? std::pow(10.0, vx) : vx, ly = spec.log_y ? std::pow(10.0, vy) : vy;
    os << "<line x1=\"" << detail::fixed(px(vx)) << "\" y1=\"" << top + ph << "\" x2=\"" << detail::fixed(px(vx))
       << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>";
    os << "<text x=\"" << detail::fixed(px(vx)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
       << detail::fixed(lx, spec.log_x ? 0 : 3) << "</text>\n";
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << detail::fixed(py(vy)) << "\" x2=\"" << left << "\" y2=\""
       << detail::fixed(py(vy)) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << left - 8 << "\" y=\"" << detail::fixed(py(vy) + 4) << "\" text-anchor=\"end\">"
       << detail::fixed(ly, 3) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">"
     << detail::escape(spec.x) << (spec.log_x ? " (log)" : "") << "</text>\n";
  os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << top + ph / 2 << ")\">" << detail::escape(spec.y) << (spec.log_y ? " (log)" : "") << "</text>\n";
  os << "</g>\n";

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  int idx = 0;
  for (const auto& [key, pts] : groups) {
    const char* colour = palette[idx % 8];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& [x, acc] : pts) {
      os << (first ? "" : " ") << detail::fixed(px(tx(x))) << ',' << detail::fixed(py(ty(acc.first / acc.second)));
      first = false;
    }
    os << "\"/>\n";
    const double ly = top + 10 + 18 * idx;
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
       << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/><text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4
       << "\" font-size=\"11\">" << detail::escape(key) << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace seisloc
