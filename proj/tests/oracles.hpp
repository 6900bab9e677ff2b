#pragma once

// Independent reference implementations used to freeze expected values.
// These deliberately use different algorithms from the library so agreement
// is evidence, not tautology.

#include <cmath>
#include <vector>

#include "curvnet/geometry.hpp"

namespace oracle {

using curvnet::Point2;

// Chordal arclength walk along a polyline, accumulating segment by segment.
inline Point2 walk_to_arclength(const std::vector<Point2>& pts, double target) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double seg = std::hypot(pts[i + 1].x - pts[i].x,
                                  pts[i + 1].y - pts[i].y);
    if (acc + seg >= target || i + 2 == pts.size()) {
      const double w = seg > 0.0 ? std::min(std::max((target - acc) / seg, 0.0), 1.0) : 0.0;
      return {pts[i].x + w * (pts[i + 1].x - pts[i].x),
              pts[i].y + w * (pts[i + 1].y - pts[i].y)};
    }
    acc += seg;
  }
  return pts.back();
}

inline double polyline_length(const std::vector<Point2>& pts, bool closed) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    acc += std::hypot(pts[i + 1].x - pts[i].x, pts[i + 1].y - pts[i].y);
  if (closed && pts.size() > 1)
    acc += std::hypot(pts.front().x - pts.back().x,
                      pts.front().y - pts.back().y);
  return acc;
}

// Orientation-predicate segment intersection for segments in general
// position (no tolerance logic; callers avoid degenerate inputs).
inline bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
  auto orient = [](Point2 p, Point2 q, Point2 r) {
    const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

// Fan triangulation area from the first vertex, an alternative to the
// shoelace accumulation.
inline double fan_area(const std::vector<Point2>& pts) {
  double acc = 0.0;
  for (size_t i = 1; i + 1 < pts.size(); ++i) {
    const Point2 u{pts[i].x - pts[0].x, pts[i].y - pts[0].y};
    const Point2 v{pts[i + 1].x - pts[0].x, pts[i + 1].y - pts[0].y};
    acc += 0.5 * (u.x * v.y - u.y * v.x);
  }
  return std::fabs(acc);
}

// Trapezoidal quadrature of the normalised backward heat kernel along a
// polyline, the low-order reference for the closed-form library quadrature.
inline double trapezoid_gaussian_density(const std::vector<Point2>& pts,
                                         bool closed, Point2 x0, double sigma,
                                         size_t subdiv = 1) {
  const size_t n = pts.size();
  const size_t nseg = closed ? n : n - 1;
  const double norm = 1.0 / std::sqrt(4.0 * M_PI * sigma);
  auto rho = [&](Point2 p) {
    const double dx = p.x - x0.x, dy = p.y - x0.y;
    return norm * std::exp(-(dx * dx + dy * dy) / (4.0 * sigma));
  };
  double acc = 0.0;
  for (size_t i = 0; i < nseg; ++i) {
    const Point2 a = pts[i], b = pts[(i + 1) % n];
    const double h =
        std::hypot(b.x - a.x, b.y - a.y) / static_cast<double>(subdiv);
    for (size_t k = 0; k < subdiv; ++k) {
      const double u0 = static_cast<double>(k) / subdiv;
      const double u1 = static_cast<double>(k + 1) / subdiv;
      const Point2 p0{a.x + (b.x - a.x) * u0, a.y + (b.y - a.y) * u0};
      const Point2 p1{a.x + (b.x - a.x) * u1, a.y + (b.y - a.y) * u1};
      acc += 0.5 * (rho(p0) + rho(p1)) * h;
    }
  }
  return acc;
}

// Same trapezoidal scheme for the unnormalised Gaussian weight exp(-|x|^2/2).
inline double trapezoid_gauss_weight(const std::vector<Point2>& pts,
                                     bool closed, size_t subdiv = 1) {
  const size_t n = pts.size();
  const size_t nseg = closed ? n : n - 1;
  auto rho = [](Point2 p) { return std::exp(-0.5 * (p.x * p.x + p.y * p.y)); };
  double acc = 0.0;
  for (size_t i = 0; i < nseg; ++i) {
    const Point2 a = pts[i], b = pts[(i + 1) % n];
    const double h =
        std::hypot(b.x - a.x, b.y - a.y) / static_cast<double>(subdiv);
    for (size_t k = 0; k < subdiv; ++k) {
      const double u0 = static_cast<double>(k) / subdiv;
      const double u1 = static_cast<double>(k + 1) / subdiv;
      const Point2 p0{a.x + (b.x - a.x) * u0, a.y + (b.y - a.y) * u0};
      const Point2 p1{a.x + (b.x - a.x) * u1, a.y + (b.y - a.y) * u1};
      acc += 0.5 * (rho(p0) + rho(p1)) * h;
    }
  }
  return acc;
}

}  // namespace oracle
