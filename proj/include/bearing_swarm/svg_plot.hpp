#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "bearing_swarm/errors.hpp"
#include "bearing_swarm/reference.hpp"
#include "bearing_swarm/sim.hpp"

namespace bearing_swarm {
namespace svg_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline const char* palette(int i) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  return kColors[i % 8];
}

/// Affine map from data coordinates to pixel coordinates (y flipped).
struct Frame {
  double x0, x1, y0, y1;        // data ranges
  double px0, px1, py0, py1;    // pixel box (py0 = top)

  double px(double x) const { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); }
  double py(double y) const { return py1 - (y - y0) / (y1 - y0) * (py1 - py0); }
};

inline std::string polyline(const std::vector<std::pair<double, double>>& pts,
                            const std::string& color, double width, bool dashed = false) {
  std::string s = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                  num(width) + "\"";
  if (dashed) s += " stroke-dasharray=\"6 4\"";
  s += " points=\"";
  for (const auto& [x, y] : pts) s += num(x) + "," + num(y) + " ";
  if (!pts.empty()) s.pop_back();
  s += "\"/>\n";
  return s;
}

inline std::string text(double x, double y, const std::string& body,
                        const std::string& anchor = "start", int size = 12) {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + body + "</text>\n";
}

inline std::string line(double x1, double y1, double x2, double y2, const std::string& color,
                        double width = 1.0) {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
         num(y2) + "\" stroke=\"" + color + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

inline void write_file(const std::string& path, const std::string& body, int w, int h) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SimError("cannot open " + path + " for writing");
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
     << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n"
     << body << "</svg>\n";
}

}  // namespace svg_detail

/// Error norms vs time on a log-scale y axis: stacked estimation error,
/// stacked tracking error, and the worst per-edge bearing error.
inline void write_errors_svg(const SimTrace& trace, const std::string& path) {
  using namespace svg_detail;
  const int w = 820, h = 520;
  if (trace.rows.empty()) {
    write_file(path, text(w / 2.0, h / 2.0, "empty trace", "middle"), w, h);
    return;
  }
  const double floor_val = 1e-16;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  auto series_val = [&](const TraceRow& r, int s) {
    const double v = s == 0   ? r.metrics.delta_norm
                     : s == 1 ? r.metrics.ptilde_norm
                              : r.metrics.bearing_err_max;
    return std::max(v, floor_val);
  };
  for (const TraceRow& r : trace.rows)
    for (int s = 0; s < 3; ++s) {
      lo = std::min(lo, series_val(r, s));
      hi = std::max(hi, series_val(r, s));
    }
  double ylo = std::floor(std::log10(lo));
  double yhi = std::ceil(std::log10(hi));
  if (yhi <= ylo) yhi = ylo + 1.0;
  const double t0 = trace.rows.front().t;
  const double t1 = std::max(trace.rows.back().t, t0 + 1e-12);
  Frame f{t0, t1, ylo, yhi, 70, w - 20, 20, h - 50};

  std::string body;
  body += line(f.px0, f.py1, f.px1, f.py1, "#000000");
  body += line(f.px0, f.py0, f.px0, f.py1, "#000000");
  const int decade_step = std::max(1, static_cast<int>((yhi - ylo) / 8.0 + 0.999));
  for (int d = static_cast<int>(ylo); d <= static_cast<int>(yhi); d += decade_step) {
    const double py = f.py(d);
    body += line(f.px0, py, f.px1, py, "#dddddd", 0.5);
    body += text(f.px0 - 6, py + 4, "1e" + std::to_string(d), "end");
  }
  for (int k = 0; k <= 6; ++k) {
    const double t = t0 + (t1 - t0) * k / 6.0;
    body += text(f.px(t), f.py1 + 18, num(t), "middle");
  }
  body += text((f.px0 + f.px1) / 2.0, h - 12, "t [s]", "middle");

  static const char* kNames[] = {"estimation error", "tracking error", "max bearing error"};
  for (int s = 0; s < 3; ++s) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(trace.rows.size());
    for (const TraceRow& r : trace.rows)
      pts.emplace_back(f.px(r.t), f.py(std::log10(series_val(r, s))));
    body += polyline(pts, palette(s), 1.5);
    body += line(f.px0 + 12, 36 + 18 * s, f.px0 + 40, 36 + 18 * s, palette(s), 2.0);
    body += text(f.px0 + 46, 40 + 18 * s, kNames[s]);
  }
  write_file(path, body, w, h);
}

/// Equal-axis plan view: desired paths dashed, true paths solid, with start
/// markers (circles) and end markers (squares).
inline void write_trajectories_svg(const SimTrace& trace, const ScenarioSpec& spec,
                                   const std::string& path) {
  using namespace svg_detail;
  const int w = 820, h = 620;
  if (trace.rows.empty()) {
    write_file(path, text(w / 2.0, h / 2.0, "empty trace", "middle"), w, h);
    return;
  }
  const int n = static_cast<int>(trace.rows.front().agents.size());
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  auto grow = [&](const Eigen::Vector2d& p) {
    xlo = std::min(xlo, p.x());
    xhi = std::max(xhi, p.x());
    ylo = std::min(ylo, p.y());
    yhi = std::max(yhi, p.y());
  };
  for (const TraceRow& r : trace.rows)
    for (int i = 0; i < n; ++i) {
      grow(r.agents[i].position());
      grow(sample(spec, i + 1, r.t).p_star);
    }
  const double pad = 0.05 * std::max({xhi - xlo, yhi - ylo, 1.0});
  xlo -= pad, xhi += pad, ylo -= pad, yhi += pad;
  // Equalize scales so geometry is not distorted.
  const double box_w = w - 90, box_h = h - 70;
  const double scale = std::min(box_w / (xhi - xlo), box_h / (yhi - ylo));
  const double cx = (xlo + xhi) / 2.0, cy = (ylo + yhi) / 2.0;
  const double half_w = box_w / scale / 2.0, half_h = box_h / scale / 2.0;
  Frame f{cx - half_w, cx + half_w, cy - half_h, cy + half_h, 70, w - 20, 20, h - 50};

  std::string body;
  body += line(f.px0, f.py1, f.px1, f.py1, "#000000");
  body += line(f.px0, f.py0, f.px0, f.py1, "#000000");
  for (int k = 0; k <= 6; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 6.0;
    const double y = f.y0 + (f.y1 - f.y0) * k / 6.0;
    body += text(f.px(x), f.py1 + 18, num(x), "middle");
    body += text(f.px0 - 6, f.py(y) + 4, num(y), "end");
  }
  body += text((f.px0 + f.px1) / 2.0, h - 12, "x [m]", "middle");

  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, double>> want, got;
    want.reserve(trace.rows.size());
    got.reserve(trace.rows.size());
    for (const TraceRow& r : trace.rows) {
      const Eigen::Vector2d ps = sample(spec, i + 1, r.t).p_star;
      want.emplace_back(f.px(ps.x()), f.py(ps.y()));
      got.emplace_back(f.px(r.agents[i].x), f.py(r.agents[i].y));
    }
    body += polyline(want, "#aaaaaa", 1.0, true);
    body += polyline(got, palette(i), 1.3);
    body += "<circle cx=\"" + num(got.front().first) + "\" cy=\"" + num(got.front().second) +
            "\" r=\"4\" fill=\"" + palette(i) + "\"/>\n";
    body += "<rect x=\"" + num(got.back().first - 3.5) + "\" y=\"" +
            num(got.back().second - 3.5) + "\" width=\"7\" height=\"7\" fill=\"" + palette(i) +
            "\"/>\n";
    body += text(got.front().first + 6, got.front().second - 6, std::to_string(i + 1), "start",
                 11);
  }
  body += line(f.px0 + 12, 36, f.px0 + 40, 36, "#aaaaaa", 1.0);
  body += text(f.px0 + 46, 40, "desired (dashed) / actual (solid), start = circle, end = square");
  write_file(path, body, w, h);
}

}  // namespace bearing_swarm
