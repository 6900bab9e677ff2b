#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "curvnet/errors.hpp"

namespace curvnet {

inline constexpr double kPi = std::numbers::pi;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double c) const { return {x * c, y * c}; }
  Point2 operator/(double c) const { return {x / c, y / c}; }
  Point2& operator+=(Point2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Point2& operator-=(Point2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
};

inline Point2 operator*(double c, Point2 p) { return p * c; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Point2 p) { return p.x * p.x + p.y * p.y; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
// counterclockwise rotation by pi/2; the normal convention nu = R tau
inline Point2 rot90(Point2 p) { return {-p.y, p.x}; }
inline Point2 normalized(Point2 p) {
  const double n = norm(p);
  if (n <= 0.0) throw DegenerateCurve("cannot normalize zero vector");
  return p / n;
}
inline double angle_of(Point2 p) { return std::atan2(p.y, p.x); }
inline Point2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }
inline Point2 rotate(Point2 p, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

// Open or closed polyline with per-node geometry. Derived arrays are filled
// by update_geometry and are only as fresh as the last call.
struct Curve {
  std::vector<Point2> nodes;
  bool closed = false;

  std::vector<Point2> tau;   // unit tangent
  std::vector<Point2> nu;    // nu = rot90(tau)
  std::vector<double> k;     // signed curvature, k_vec = k * nu
  std::vector<double> lam;   // tangential speed lambda
  std::vector<double> s;     // cumulative arclength from node 0

  size_t size() const { return nodes.size(); }
  size_t segment_count() const {
    if (nodes.size() < 2) return 0;
    return closed ? nodes.size() : nodes.size() - 1;
  }
  Point2 front() const { return nodes.front(); }
  Point2 back() const { return nodes.back(); }

  double length() const {
    double L = 0.0;
    for (size_t i = 0; i + 1 < nodes.size(); ++i)
      L += distance(nodes[i], nodes[i + 1]);
    if (closed && nodes.size() >= 2) L += distance(nodes.back(), nodes.front());
    return L;
  }

  double min_segment() const {
    double m = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < nodes.size(); ++i)
      m = std::min(m, distance(nodes[i], nodes[i + 1]));
    if (closed && nodes.size() >= 2)
      m = std::min(m, distance(nodes.back(), nodes.front()));
    return m;
  }

  double max_segment() const {
    double m = 0.0;
    for (size_t i = 0; i + 1 < nodes.size(); ++i)
      m = std::max(m, distance(nodes[i], nodes[i + 1]));
    if (closed && nodes.size() >= 2)
      m = std::max(m, distance(nodes.back(), nodes.front()));
    return m;
  }
};

namespace detail {

// Nonuniform three-point derivatives at the middle node of (p0, p1, p2)
// where a = |p1-p0|, b = |p2-p1| are the arclength steps.
inline Point2 first_derivative_mid(Point2 p0, Point2 p1, Point2 p2, double a,
                                   double b) {
  return (p2 - p1) * (a / (b * (a + b))) + (p1 - p0) * (b / (a * (a + b)));
}

inline Point2 second_derivative(Point2 p0, Point2 p1, Point2 p2, double a,
                                double b) {
  return ((p2 - p1) / b - (p1 - p0) / a) * (2.0 / (a + b));
}

// One-sided first derivative at p0 of the stencil (p0, p1, p2).
inline Point2 first_derivative_left(Point2 p0, Point2 p1, Point2 p2, double a,
                                    double b) {
  const double c0 = -(2.0 * a + b) / (a * (a + b));
  const double c1 = (a + b) / (a * b);
  const double c2 = -a / (b * (a + b));
  return p0 * c0 + p1 * c1 + p2 * c2;
}

}  // namespace detail

// Signed curvature per node by three-point finite differences on the
// (chordal) arclength grid; one-sided values at the ends of open curves.
inline std::vector<double> discrete_curvature(const Curve& curve);

// Recomputes s, tau, nu, k from the node positions. lam is preserved if
// already sized, else zeroed.
inline void update_geometry(Curve& curve) {
  const size_t n = curve.nodes.size();
  if (n < 3) throw DegenerateCurve("curve needs >= 3 nodes");
  auto& pts = curve.nodes;

  curve.s.resize(n);
  curve.s[0] = 0.0;
  for (size_t i = 1; i < n; ++i) {
    const double h = distance(pts[i - 1], pts[i]);
    if (h <= 0.0) throw DegenerateCurve("zero-length segment");
    curve.s[i] = curve.s[i - 1] + h;
  }
  if (curve.closed && distance(pts.back(), pts.front()) <= 0.0)
    throw DegenerateCurve("zero-length closing segment");

  curve.tau.resize(n);
  curve.nu.resize(n);
  curve.k.resize(n);
  if (curve.lam.size() != n) curve.lam.assign(n, 0.0);

  auto seg_len = [&](size_t i) {  // length of segment starting at node i
    return distance(pts[i], pts[(i + 1) % n]);
  };

  for (size_t i = 0; i < n; ++i) {
    Point2 d1, d2;
    if (curve.closed) {
      const size_t im = (i + n - 1) % n, ip = (i + 1) % n;
      const double a = seg_len(im), b = seg_len(i);
      d1 = detail::first_derivative_mid(pts[im], pts[i], pts[ip], a, b);
      d2 = detail::second_derivative(pts[im], pts[i], pts[ip], a, b);
    } else if (i == 0) {
      const double a = seg_len(0), b = seg_len(1);
      d1 = detail::first_derivative_left(pts[0], pts[1], pts[2], a, b);
      d2 = detail::second_derivative(pts[0], pts[1], pts[2], a, b);
    } else if (i == n - 1) {
      const double a = seg_len(n - 3), b = seg_len(n - 2);
      // mirrored one-sided stencil at the right end
      const double c2 = (2.0 * b + a) / (b * (a + b));
      const double c1 = -(a + b) / (a * b);
      const double c0 = b / (a * (a + b));
      d1 = pts[n - 3] * c0 + pts[n - 2] * c1 + pts[n - 1] * c2;
      d2 = detail::second_derivative(pts[n - 3], pts[n - 2], pts[n - 1], a, b);
    } else {
      const double a = seg_len(i - 1), b = seg_len(i);
      d1 = detail::first_derivative_mid(pts[i - 1], pts[i], pts[i + 1], a, b);
      d2 = detail::second_derivative(pts[i - 1], pts[i], pts[i + 1], a, b);
    }
    curve.tau[i] = normalized(d1);
    curve.nu[i] = rot90(curve.tau[i]);
    curve.k[i] = dot(d2, curve.nu[i]);
  }
}

inline std::vector<double> discrete_curvature(const Curve& curve) {
  Curve tmp = curve;
  update_geometry(tmp);
  return tmp.k;
}

// Point at chordal arclength t along the polyline (t clamped to [0, L]).
inline Point2 point_at_arclength(const Curve& curve, double t) {
  const auto& pts = curve.nodes;
  const size_t nseg = curve.segment_count();
  if (nseg == 0) throw DegenerateCurve("empty curve");
  double acc = 0.0;
  for (size_t i = 0; i < nseg; ++i) {
    const Point2 a = pts[i], b = pts[(i + 1) % pts.size()];
    const double h = distance(a, b);
    if (t <= acc + h || i == nseg - 1) {
      const double u = h > 0 ? std::clamp((t - acc) / h, 0.0, 1.0) : 0.0;
      return a + (b - a) * u;
    }
    acc += h;
  }
  return pts.back();
}

inline Curve resample_equidistant(const Curve& curve, size_t n) {
  if (n < 3) throw InvalidArgument("resample target below 3 nodes");
  if (curve.nodes.size() < 2) throw DegenerateCurve("curve too short");
  const double L = curve.length();
  if (L <= 0.0) throw DegenerateCurve("zero-length curve");

  Curve out;
  out.closed = curve.closed;
  out.nodes.resize(n);
  if (curve.closed) {
    for (size_t j = 0; j < n; ++j)
      out.nodes[j] = point_at_arclength(curve, L * double(j) / double(n));
  } else {
    for (size_t j = 0; j < n; ++j)
      out.nodes[j] = point_at_arclength(curve, L * double(j) / double(n - 1));
    out.nodes.front() = curve.nodes.front();  // endpoints exactly preserved
    out.nodes.back() = curve.nodes.back();
  }
  update_geometry(out);
  return out;
}

inline double signed_polygon_area(const std::vector<Point2>& pts) {
  double acc = 0.0;
  const size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2 a = pts[i], b = pts[(i + 1) % n];
    acc += cross(a, b);
  }
  return 0.5 * acc;
}

// --- segment predicates ------------------------------------------------

namespace detail {

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = norm2(ab);
  if (len2 <= 0.0) return distance(p, a);
  const double u = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * u);
}

// All intersection points of segments [a,b] and [c,d] within tolerance tol:
// 0, 1, or (collinear overlap) 2 representative points.
inline int segment_intersection_points(Point2 a, Point2 b, Point2 c, Point2 d,
                                       double tol, Point2 out[2]) {
  const Point2 r = b - a, sdir = d - c;
  const double denom = cross(r, sdir);
  const double len_r = norm(r), len_s = norm(sdir);
  if (std::fabs(denom) > 1e-12 * len_r * len_s) {
    const double t = cross(c - a, sdir) / denom;
    const double u = cross(c - a, r) / denom;
    const double tpad = tol / std::max(len_r, 1e-300);
    const double upad = tol / std::max(len_s, 1e-300);
    if (t < -tpad || t > 1.0 + tpad || u < -upad || u > 1.0 + upad) return 0;
    out[0] = a + r * std::clamp(t, 0.0, 1.0);
    return 1;
  }
  // near-parallel: report overlap only if the lines are close
  if (point_segment_distance(c, a, b) > tol &&
      point_segment_distance(d, a, b) > tol &&
      point_segment_distance(a, c, d) > tol &&
      point_segment_distance(b, c, d) > tol)
    return 0;
  // project [c,d] onto [a,b] and clip
  const Point2 dir = r / std::max(len_r, 1e-300);
  double tc = dot(c - a, dir), td = dot(d - a, dir);
  if (tc > td) std::swap(tc, td);
  const double lo = std::max(0.0, tc), hi = std::min(len_r, td);
  if (hi < lo - tol) return 0;
  out[0] = a + dir * std::clamp(lo, 0.0, len_r);
  out[1] = a + dir * std::clamp(hi, 0.0, len_r);
  return 2;
}

}  // namespace detail

// True iff the open segment (a,b) meets any polyline segment of `curves` at
// a point farther than tol from every excluded node (the pair's own spots).
inline bool segment_hits_network(Point2 a, Point2 b,
                                 const std::vector<Curve>& curves,
                                 const std::vector<Point2>& excluded,
                                 double tol) {
  auto is_excluded = [&](Point2 p) {
    for (const Point2& e : excluded)
      if (distance(p, e) <= tol) return true;
    return false;
  };
  Point2 hits[2];
  for (const Curve& c : curves) {
    const size_t n = c.nodes.size();
    const size_t nseg = c.segment_count();
    for (size_t i = 0; i < nseg; ++i) {
      const Point2 p = c.nodes[i], q = c.nodes[(i + 1) % n];
      const int m = detail::segment_intersection_points(a, b, p, q, tol, hits);
      if (m == 2) {
        // collinear overlap: a chord lying along the very segment whose
        // endpoints are both excluded is that pair's own segment, not a hit
        if (is_excluded(p) && is_excluded(q)) continue;
        const Point2 midp = (hits[0] + hits[1]) / 2.0;
        if (!is_excluded(hits[0]) || !is_excluded(hits[1]) ||
            (distance(hits[0], hits[1]) > 2.0 * tol && !is_excluded(midp)))
          return true;
        continue;
      }
      for (int j = 0; j < m; ++j)
        if (!is_excluded(hits[j])) return true;
    }
  }
  return false;
}

inline bool polyline_self_intersects(const std::vector<Point2>& pts,
                                     bool closed, double tol) {
  const size_t n = pts.size();
  const size_t nseg = closed ? n : n - 1;
  Point2 hits[2];
  for (size_t i = 0; i < nseg; ++i) {
    const Point2 a = pts[i], b = pts[(i + 1) % n];
    for (size_t j = i + 1; j < nseg; ++j) {
      const bool adjacent =
          (j == i + 1) || (closed && i == 0 && j == nseg - 1);
      const Point2 c = pts[j], d = pts[(j + 1) % n];
      const int m = detail::segment_intersection_points(a, b, c, d, tol, hits);
      if (m == 0) continue;
      if (adjacent) {
        const Point2 shared = (j == i + 1) ? b : a;
        bool bad = false;
        for (int h = 0; h < m; ++h)
          if (distance(hits[h], shared) > tol) bad = true;
        if (m == 2 && distance(hits[0], hits[1]) > 2.0 * tol) bad = true;
        if (bad) return true;
      } else {
        return true;
      }
    }
  }
  return false;
}

// Positive area regardless of orientation; rejects self-intersecting input
// unless the caller vouches for simplicity.
inline double polygon_area(const std::vector<Point2>& pts,
                           bool check_simple = true) {
  if (pts.size() < 3) throw InvalidArgument("polygon needs >= 3 vertices");
  if (check_simple) {
    double diam = 0.0;
    for (const Point2& p : pts)
      diam = std::max(diam, distance(p, pts.front()));
    if (polyline_self_intersects(pts, true, 1e-12 * std::max(diam, 1e-30)))
      throw NotSimple("self-intersecting polygon");
  }
  return std::fabs(signed_polygon_area(pts));
}

// Even-odd rule point-in-polygon test.
inline bool point_in_polygon(Point2 p, const std::vector<Point2>& poly) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = poly[j], b = poly[i];
    if ((b.y > p.y) != (a.y > p.y)) {
      const double xint = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

// --- convex domain ------------------------------------------------------

// Dense convex polygon standing in for the smooth strictly convex set; the
// network's fixed endpoints sit on (snap to) its vertices.
struct ConvexDomain {
  std::vector<Point2> vertices;  // counterclockwise

  bool valid() const {
    const size_t n = vertices.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
      const Point2 a = vertices[i];
      const Point2 b = vertices[(i + 1) % n];
      const Point2 c = vertices[(i + 2) % n];
      if (cross(b - a, c - b) <= 0.0) return false;  // strict convexity
    }
    return true;
  }

  double diameter() const {
    double d = 0.0;
    for (size_t i = 0; i < vertices.size(); ++i)
      for (size_t j = i + 1; j < vertices.size(); ++j)
        d = std::max(d, distance(vertices[i], vertices[j]));
    return d;
  }

  bool contains(Point2 p, double tol = 0.0) const {
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i) {
      const Point2 a = vertices[i], b = vertices[(i + 1) % n];
      if (cross(b - a, p - a) < -tol) return false;
    }
    return true;
  }

  double boundary_distance(Point2 p) const {
    double d = std::numeric_limits<double>::infinity();
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i)
      d = std::min(d, detail::point_segment_distance(p, vertices[i],
                                                     vertices[(i + 1) % n]));
    return d;
  }

  bool on_boundary(Point2 p, double tol) const {
    return boundary_distance(p) <= tol;
  }

  double area() const { return std::fabs(signed_polygon_area(vertices)); }

  // Moves the nearest vertex onto p exactly (used to anchor endpoints).
  void snap_vertex_to(Point2 p) {
    size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < vertices.size(); ++i) {
      const double d = distance(vertices[i], p);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    vertices[best] = p;
  }
};

inline ConvexDomain make_circle_domain(Point2 center, double radius,
                                       size_t nverts = 192) {
  if (radius <= 0.0 || nverts < 8) throw InvalidArgument("bad circle domain");
  ConvexDomain d;
  d.vertices.resize(nverts);
  for (size_t i = 0; i < nverts; ++i) {
    const double a = 2.0 * kPi * double(i) / double(nverts);
    d.vertices[i] = center + Point2{radius * std::cos(a), radius * std::sin(a)};
  }
  return d;
}

inline Curve make_circle_curve(Point2 center, double radius, size_t n) {
  if (radius <= 0.0 || n < 8) throw InvalidArgument("bad circle curve");
  Curve c;
  c.closed = true;
  c.nodes.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * double(i) / double(n);
    c.nodes[i] = center + Point2{radius * std::cos(a), radius * std::sin(a)};
  }
  update_geometry(c);
  return c;
}

inline Curve make_segment_curve(Point2 a, Point2 b, size_t n) {
  if (n < 3) throw InvalidArgument("segment needs >= 3 nodes");
  Curve c;
  c.nodes.resize(n);
  for (size_t i = 0; i < n; ++i)
    c.nodes[i] = a + (b - a) * (double(i) / double(n - 1));
  update_geometry(c);
  return c;
}

}  // namespace curvnet
