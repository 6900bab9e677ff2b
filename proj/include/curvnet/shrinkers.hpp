#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "curvnet/diagnostics.hpp"
#include "curvnet/errors.hpp"
#include "curvnet/geometry.hpp"
#include "curvnet/network.hpp"
#include "curvnet/numerics.hpp"

namespace curvnet {

// Self-similar profiles. A unit-speed curve gamma(s) sweeps a shrinking
// profile when k = -<gamma, nu> and an expanding one when k = <gamma, nu>;
// both are integrated as the angle ODE
//   x' = (cos theta, sin theta),   theta' = k.

struct OdeState {
  Point2 x;
  double theta = 0.0;
};

inline constexpr double kOdeStepTol = 1e-10;     // per-step local error bound
inline constexpr double kTruncationRadius = 8.0;  // where unbounded tails are cut

namespace shr_detail {

inline double wrap_pi(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

// sign = +1 integrates the shrinking equation, -1 the expanding one.
inline std::array<double, 3> ode_rhs(const OdeState& s, double sign) {
  const double c = std::cos(s.theta), n = std::sin(s.theta);
  return {c, n, sign * (s.x.x * n - s.x.y * c)};
}

inline OdeState ode_advance(const OdeState& s, const std::array<double, 3>& d,
                            double h) {
  return {{s.x.x + h * d[0], s.x.y + h * d[1]}, s.theta + h * d[2]};
}

inline OdeState rk4(const OdeState& s, double ds, double sign) {
  const auto k1 = ode_rhs(s, sign);
  const auto k2 = ode_rhs(ode_advance(s, k1, 0.5 * ds), sign);
  const auto k3 = ode_rhs(ode_advance(s, k2, 0.5 * ds), sign);
  const auto k4 = ode_rhs(ode_advance(s, k3, ds), sign);
  OdeState out = s;
  out.x.x += ds / 6.0 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]);
  out.x.y += ds / 6.0 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]);
  out.theta += ds / 6.0 * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2]);
  return out;
}

// Step-doubled RK4: the halved pair is returned, the gap to the full step
// estimates the local error.
inline OdeState checked_step(const OdeState& s, double ds, double sign,
                             double tol) {
  if (!(std::isfinite(ds)) || ds == 0.0)
    throw InvalidArgument("ode step needs a finite nonzero ds");
  const OdeState full = rk4(s, ds, sign);
  const OdeState half = rk4(rk4(s, 0.5 * ds, sign), 0.5 * ds, sign);
  const double err = std::max(norm(half.x - full.x),
                              std::fabs(half.theta - full.theta)) /
                     15.0;
  if (err > tol)
    throw StepRejected("local error " + std::to_string(err) +
                       " above tolerance at ds = " + std::to_string(ds));
  return half;
}

}  // namespace shr_detail

// One error-checked step along a shrinking self-similar curve.
inline OdeState shrinker_curve_ode_step(const OdeState& s, double ds,
                                        double tol = kOdeStepTol) {
  return shr_detail::checked_step(s, ds, +1.0, tol);
}

// Same integrator for the expanding equation.
inline OdeState expander_curve_ode_step(const OdeState& s, double ds,
                                        double tol = kOdeStepTol) {
  return shr_detail::checked_step(s, ds, -1.0, tol);
}

namespace shr_detail {

struct ArcTrace {
  std::vector<OdeState> states;  // uniformly spaced, last one on the axis
  double step = 0.0;
  double length = 0.0;
};

inline double coord_of(const OdeState& s, int coord) {
  return coord == 0 ? s.x.x : s.x.y;
}

// Integrates with fixed ds until the chosen coordinate crosses zero; the
// crossing is bisected inside the final step and placed exactly on the axis.
// Arcs that start on the axis are armed only after leaving a 4*ds collar.
inline ArcTrace trace_to_axis(OdeState s0, double ds, double sign, int coord,
                              double s_max) {
  ArcTrace tr;
  tr.step = ds;
  tr.states.push_back(s0);
  bool armed = std::fabs(coord_of(s0, coord)) > 4.0 * ds;
  double travelled = 0.0;
  while (travelled < s_max) {
    const OdeState prev = tr.states.back();
    const OdeState next = rk4(prev, ds, sign);
    const double g0 = coord_of(prev, coord), g1 = coord_of(next, coord);
    if (armed && g0 != 0.0 && (g0 > 0.0) != (g1 > 0.0)) {
      double lo = 0.0, hi = ds;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const OdeState probe = rk4(prev, mid, sign);
        if ((coord_of(probe, coord) > 0.0) == (g0 > 0.0))
          lo = mid;
        else
          hi = mid;
      }
      OdeState hit = rk4(prev, 0.5 * (lo + hi), sign);
      (coord == 0 ? hit.x.x : hit.x.y) = 0.0;
      tr.states.push_back(hit);
      tr.length = travelled + 0.5 * (lo + hi);
      return tr;
    }
    if (!armed && std::fabs(g1) > 4.0 * ds) armed = true;
    tr.states.push_back(next);
    travelled += ds;
  }
  throw SolverFailed("arc never crossed the target axis within s_max = " +
                     std::to_string(s_max));
}

// Re-traces the arc with the step tuned so the crossing lands on the final
// node and the spacing stays uniform throughout.
inline ArcTrace trace_to_axis_uniform(OdeState s0, double ds, double sign,
                                      int coord, double s_max) {
  const ArcTrace rough = trace_to_axis(s0, ds, sign, coord, s_max);
  const size_t m =
      std::max<size_t>(4, size_t(std::llround(rough.length / ds)));
  ArcTrace tr;
  tr.step = rough.length / double(m);
  tr.length = rough.length;
  tr.states.reserve(m + 1);
  tr.states.push_back(s0);
  for (size_t i = 0; i < m; ++i)
    tr.states.push_back(rk4(tr.states.back(), tr.step, sign));
  OdeState& last = tr.states.back();
  (coord == 0 ? last.x.x : last.x.y) = 0.0;
  return tr;
}

// Signed closure defect of a junction arc: the tangent angle at the first
// axis crossing minus the angle a mirror-smooth closure requires there.
inline double closure_residual(Point2 start, double departure, double target,
                               int coord, double ds, double s_max = 40.0) {
  const ArcTrace tr =
      trace_to_axis({start, departure}, ds, +1.0, coord, s_max);
  return tr.states.back().theta - target;
}

inline std::vector<Point2> arc_points(const ArcTrace& tr) {
  std::vector<Point2> pts;
  pts.reserve(tr.states.size());
  for (const OdeState& s : tr.states) pts.push_back(s.x);
  return pts;
}

inline Curve curve_of(std::vector<Point2> pts, bool closed = false) {
  Curve c;
  c.nodes = std::move(pts);
  c.closed = closed;
  return c;
}

// Straight tail along the ray through the origin, from |from| out to the
// truncation radius.
inline Curve ray_curve(Point2 from, Point2 dir, double h = 0.02) {
  const Point2 u = normalized(dir);
  const double r0 = dot(from, u);
  const double span = kTruncationRadius - r0;
  if (!(span > 0.0)) throw InvalidArgument("ray tail starts past truncation");
  const size_t n = std::max<size_t>(4, size_t(std::llround(span / h)));
  std::vector<Point2> pts;
  pts.reserve(n + 1);
  for (size_t i = 0; i <= n; ++i)
    pts.push_back(from + u * (span * double(i) / double(n)));
  return curve_of(std::move(pts));
}

inline Point2 mirror_x(Point2 p) { return {p.x, -p.y}; }
inline Point2 mirror_y(Point2 p) { return {-p.x, p.y}; }

// Appends the x-mirror of pts (excluding the shared axis node) in reverse.
inline std::vector<Point2> close_across_x(std::vector<Point2> pts) {
  for (size_t i = pts.size() - 1; i-- > 0;) pts.push_back(mirror_x(pts[i]));
  return pts;
}

inline std::vector<Point2> close_across_y(std::vector<Point2> pts) {
  for (size_t i = pts.size() - 1; i-- > 0;) pts.push_back(mirror_y(pts[i]));
  return pts;
}

}  // namespace shr_detail

enum class ShrinkerName {
  Line,
  Halfline,
  Circle,
  StandardTriod,
  BrakkeSpoon,
  StandardLens,
  Fish,
  FourHalflines,
  TwoHalflines120,
};

inline const char* to_string(ShrinkerName n) {
  switch (n) {
    case ShrinkerName::Line: return "Line";
    case ShrinkerName::Halfline: return "Halfline";
    case ShrinkerName::Circle: return "Circle";
    case ShrinkerName::StandardTriod: return "StandardTriod";
    case ShrinkerName::BrakkeSpoon: return "BrakkeSpoon";
    case ShrinkerName::StandardLens: return "StandardLens";
    case ShrinkerName::Fish: return "Fish";
    case ShrinkerName::FourHalflines: return "FourHalflines";
    case ShrinkerName::TwoHalflines120: return "TwoHalflines120";
  }
  return "?";
}

struct ShrinkerProfile {
  ShrinkerName name{};
  Network geometry;                    // tails cut at kTruncationRadius
  std::vector<Point2> ray_directions;  // exact directions of the cut tails
  int symmetry_axes = 0;               // reflection axes certified node-wise
  std::vector<double> shooting_params;
  double residual = 0.0;        // sup |k + <x,nu>| over two-sided nodes
  double junction_defect = 0.0; // worst angle deviation from 2pi/3, radians
  bool degenerate = false;      // analytic ray bundle, not a classical shrinker
};

// Pointwise defect of the self-similar equation, sampled at nodes with a
// two-sided stencil (curve ends are skipped); nodes beyond within_radius
// are ignored.
inline double self_similar_residual(
    const Network& net, double sign,
    double within_radius = std::numeric_limits<double>::infinity()) {
  double worst = 0.0;
  for (const Curve& c : net.curves) {
    Curve g = c;
    update_geometry(g);
    const size_t n = g.nodes.size();
    const size_t lo = g.closed ? 0 : 1;
    const size_t hi = g.closed ? n : n - 1;
    for (size_t i = lo; i < hi; ++i) {
      if (norm(g.nodes[i]) > within_radius) continue;
      const double defect = g.k[i] + sign * dot(g.nodes[i], g.nu[i]);
      worst = std::max(worst, std::fabs(defect));
    }
  }
  return worst;
}

inline double shrinker_residual(
    const Network& net,
    double within_radius = std::numeric_limits<double>::infinity()) {
  return self_similar_residual(net, +1.0, within_radius);
}

inline double expander_residual(
    const Network& net,
    double within_radius = std::numeric_limits<double>::infinity()) {
  return self_similar_residual(net, -1.0, within_radius);
}

// Largest distance from any node's mirror image (across the line through the
// origin with the given direction) to the nearest node of the network.
inline double reflection_defect(const Network& net, Point2 axis) {
  std::vector<Point2> nodes;
  for (const Curve& c : net.curves)
    nodes.insert(nodes.end(), c.nodes.begin(), c.nodes.end());
  if (nodes.empty())
    throw InvalidArgument("reflection defect of an empty network");
  const Point2 u = normalized(axis);

  std::vector<Point2> sorted = nodes;
  std::sort(sorted.begin(), sorted.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  auto nearest2 = [&](Point2 q) {
    const auto it = std::lower_bound(
        sorted.begin(), sorted.end(), q.x,
        [](Point2 p, double x) { return p.x < x; });
    double best = std::numeric_limits<double>::infinity();
    const size_t at = size_t(it - sorted.begin());
    for (size_t r = at; r < sorted.size(); ++r) {
      const double dx = sorted[r].x - q.x;
      if (dx * dx >= best) break;
      best = std::min(best, norm2(sorted[r] - q));
    }
    for (size_t l = at; l-- > 0;) {
      const double dx = sorted[l].x - q.x;
      if (dx * dx >= best) break;
      best = std::min(best, norm2(sorted[l] - q));
    }
    return best;
  };

  double worst2 = 0.0;
  for (const Point2& p : nodes) {
    const Point2 image = u * (2.0 * dot(p, u)) - p;
    worst2 = std::max(worst2, nearest2(image));
  }
  return std::sqrt(worst2);
}

namespace shr_detail {

// Fills the certification fields from the assembled geometry.
inline void certify(ShrinkerProfile& p) {
  p.geometry.update_all_geometry();
  p.residual = shrinker_residual(p.geometry);
  p.junction_defect = validate_regular(p.geometry).max_deviation;
}

}  // namespace shr_detail

// --- analytic profiles -----------------------------------------------------

inline ShrinkerProfile line_profile() {
  ShrinkerProfile p;
  p.name = ShrinkerName::Line;
  p.ray_directions = {{1.0, 0.0}, {-1.0, 0.0}};
  p.symmetry_axes = 2;
  const size_t n = 800;
  std::vector<Point2> pts;
  pts.reserve(n + 1);
  for (size_t i = 0; i <= n; ++i) {
    const double t = -1.0 + 2.0 * double(i) / double(n);
    pts.push_back({kTruncationRadius * t, 0.0});
  }
  p.geometry.curves.push_back(shr_detail::curve_of(std::move(pts)));
  p.geometry.endpoints.push_back(
      {{-kTruncationRadius, 0.0}, {0, CurveEnd::Start}});
  p.geometry.endpoints.push_back(
      {{kTruncationRadius, 0.0}, {0, CurveEnd::End}});
  shr_detail::certify(p);
  return p;
}

inline ShrinkerProfile halfline_profile() {
  ShrinkerProfile p;
  p.name = ShrinkerName::Halfline;
  p.ray_directions = {{1.0, 0.0}};
  p.symmetry_axes = 1;
  p.geometry.curves.push_back(shr_detail::ray_curve({0.0, 0.0}, {1.0, 0.0}));
  p.geometry.endpoints.push_back({{0.0, 0.0}, {0, CurveEnd::Start}});
  p.geometry.endpoints.push_back(
      {{kTruncationRadius, 0.0}, {0, CurveEnd::End}});
  shr_detail::certify(p);
  return p;
}

inline ShrinkerProfile circle_profile() {
  ShrinkerProfile p;
  p.name = ShrinkerName::Circle;
  p.symmetry_axes = 2;
  const size_t n = 2048;
  std::vector<Point2> pts;
  pts.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * double(i) / double(n);
    pts.push_back({std::cos(a), std::sin(a)});
  }
  p.geometry.curves.push_back(shr_detail::curve_of(std::move(pts), true));
  shr_detail::certify(p);
  return p;
}

inline ShrinkerProfile triod_profile() {
  ShrinkerProfile p;
  p.name = ShrinkerName::StandardTriod;
  p.symmetry_axes = 3;
  Junction j;
  j.position = {0.0, 0.0};
  for (size_t i = 0; i < 3; ++i) {
    const Point2 u = unit_from_angle(kPi / 2.0 + 2.0 * kPi * double(i) / 3.0);
    p.ray_directions.push_back(u);
    p.geometry.curves.push_back(shr_detail::ray_curve({0.0, 0.0}, u));
    j.incident.push_back({i, CurveEnd::Start});
    p.geometry.endpoints.push_back(
        {u * kTruncationRadius, {i, CurveEnd::End}});
  }
  p.geometry.junctions.push_back(std::move(j));
  shr_detail::certify(p);
  return p;
}

// Degenerate 4-ray blow-up pattern: two straight lines through the origin
// whose four tails alternate 120/60 degree gaps.
inline ShrinkerProfile four_halflines_profile() {
  ShrinkerProfile p;
  p.name = ShrinkerName::FourHalflines;
  p.symmetry_axes = 2;
  p.degenerate = true;
  const std::array<double, 2> line_angles = {kPi / 3.0, 2.0 * kPi / 3.0};
  const size_t n = 800;
  for (size_t li = 0; li < 2; ++li) {
    const Point2 u = unit_from_angle(line_angles[li]);
    std::vector<Point2> pts;
    pts.reserve(n + 1);
    for (size_t i = 0; i <= n; ++i) {
      const double t = -1.0 + 2.0 * double(i) / double(n);
      pts.push_back(u * (kTruncationRadius * t));
    }
    p.geometry.curves.push_back(shr_detail::curve_of(std::move(pts)));
    p.geometry.endpoints.push_back(
        {u * -kTruncationRadius, {li, CurveEnd::Start}});
    p.geometry.endpoints.push_back(
        {u * kTruncationRadius, {li, CurveEnd::End}});
  }
  p.ray_directions = {unit_from_angle(kPi / 3.0),
                      unit_from_angle(2.0 * kPi / 3.0),
                      unit_from_angle(-2.0 * kPi / 3.0),
                      unit_from_angle(-kPi / 3.0)};
  shr_detail::certify(p);
  return p;
}

// Degenerate 2-ray pattern at 120 degrees, the boundary 2-point limit.
inline ShrinkerProfile two_halflines_profile() {
  ShrinkerProfile p;
  p.name = ShrinkerName::TwoHalflines120;
  p.symmetry_axes = 1;
  p.degenerate = true;
  const std::array<double, 2> angles = {kPi / 3.0, -kPi / 3.0};
  for (size_t i = 0; i < 2; ++i) {
    const Point2 u = unit_from_angle(angles[i]);
    p.ray_directions.push_back(u);
    p.geometry.curves.push_back(shr_detail::ray_curve({0.0, 0.0}, u));
    p.geometry.endpoints.push_back({{0.0, 0.0}, {i, CurveEnd::Start}});
    p.geometry.endpoints.push_back(
        {u * kTruncationRadius, {i, CurveEnd::End}});
  }
  shr_detail::certify(p);
  return p;
}

// --- shooting solvers -------------------------------------------------------

namespace shr_detail {

inline constexpr double kShootDs = 1e-3;   // step while shooting
inline constexpr double kBuildDs = 5e-4;   // step when assembling geometry
inline constexpr double kShootTol = 1e-11; // closure residual target

// Scans [lo, hi] for a sign change of f, then polishes with find_root.
inline double bracketed_root(const std::function<double(double)>& f,
                             double lo, double hi, size_t scan,
                             const std::string& what) {
  double prev_x = lo, prev_f = f(lo);
  for (size_t i = 1; i <= scan; ++i) {
    const double x = lo + (hi - lo) * double(i) / double(scan);
    const double fx = f(x);
    if (std::isfinite(prev_f) && std::isfinite(fx) &&
        (prev_f > 0.0) != (fx > 0.0))
      return find_root(f, prev_x, x, kShootTol);
    prev_x = x;
    prev_f = fx;
  }
  throw SolverFailed(what + ": no closure bracket in [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace shr_detail

// Standard lens: junctions on the x axis at (+-a, 0), two mirror arcs, two
// collinear halfline tails. The upper-right quarter arc departs at 120
// degrees and must cross the y axis horizontally.
inline ShrinkerProfile solve_lens() {
  using namespace shr_detail;
  auto f = [](double a) {
    return closure_residual({a, 0.0}, 2.0 * kPi / 3.0, kPi, 0, kShootDs);
  };
  const double a = bracketed_root(f, 0.05, 1.5, 40, "solve_lens");

  const ArcTrace quarter = trace_to_axis_uniform(
      {{a, 0.0}, 2.0 * kPi / 3.0}, kBuildDs, +1.0, 0, 40.0);
  std::vector<Point2> upper = close_across_y(arc_points(quarter));
  std::vector<Point2> lower;
  lower.reserve(upper.size());
  for (const Point2& q : upper) lower.push_back(mirror_x(q));

  ShrinkerProfile p;
  p.name = ShrinkerName::StandardLens;
  p.symmetry_axes = 2;
  p.shooting_params = {a};
  p.ray_directions = {{1.0, 0.0}, {-1.0, 0.0}};
  p.geometry.curves.push_back(curve_of(std::move(upper)));
  p.geometry.curves.push_back(curve_of(std::move(lower)));
  p.geometry.curves.push_back(ray_curve({a, 0.0}, {1.0, 0.0}));
  p.geometry.curves.push_back(ray_curve({-a, 0.0}, {-1.0, 0.0}));
  p.geometry.junctions.push_back(
      {{a, 0.0},
       {{0, CurveEnd::Start}, {1, CurveEnd::Start}, {2, CurveEnd::Start}}});
  p.geometry.junctions.push_back(
      {{-a, 0.0},
       {{0, CurveEnd::End}, {1, CurveEnd::End}, {3, CurveEnd::Start}}});
  p.geometry.endpoints.push_back(
      {{kTruncationRadius, 0.0}, {2, CurveEnd::End}});
  p.geometry.endpoints.push_back(
      {{-kTruncationRadius, 0.0}, {3, CurveEnd::End}});
  certify(p);
  return p;
}

// Brakke spoon: one junction at (b, 0), a handle along the positive x axis
// and a loop around the origin departing at +-120 degrees. The upper half
// loop must cross the x axis vertically on the far side.
inline ShrinkerProfile solve_spoon() {
  using namespace shr_detail;
  auto f = [](double b) {
    return closure_residual({b, 0.0}, 2.0 * kPi / 3.0, 1.5 * kPi, 1, kShootDs);
  };
  const double b = bracketed_root(f, 0.05, 1.5, 40, "solve_spoon");

  const ArcTrace half = trace_to_axis_uniform(
      {{b, 0.0}, 2.0 * kPi / 3.0}, kBuildDs, +1.0, 1, 40.0);
  std::vector<Point2> loop = close_across_x(arc_points(half));

  ShrinkerProfile p;
  p.name = ShrinkerName::BrakkeSpoon;
  p.symmetry_axes = 1;
  p.shooting_params = {b};
  p.ray_directions = {{1.0, 0.0}};
  p.geometry.curves.push_back(curve_of(std::move(loop)));
  p.geometry.curves.push_back(ray_curve({b, 0.0}, {1.0, 0.0}));
  p.geometry.junctions.push_back(
      {{b, 0.0},
       {{0, CurveEnd::Start}, {0, CurveEnd::End}, {1, CurveEnd::Start}}});
  p.geometry.endpoints.push_back(
      {{kTruncationRadius, 0.0}, {1, CurveEnd::End}});
  certify(p);
  return p;
}

namespace shr_detail {

// Closure residuals of the fish's two arcs from the upper junction J: the
// halfline leaves J radially, the body departs 120 degrees clockwise from
// it and the mouth 120 degrees counter-clockwise; both arcs must cross the
// symmetry axis vertically.
inline std::array<double, 2> fish_residuals(Point2 j, double ds,
                                            double s_max = 40.0) {
  const double phi = angle_of(j);
  std::array<double, 2> r{};
  r[0] = closure_residual(j, phi - 2.0 * kPi / 3.0, -0.5 * kPi, 1, ds, s_max);
  r[1] = closure_residual(j, phi + 2.0 * kPi / 3.0, 1.5 * kPi, 1, ds, s_max);
  return r;
}

}  // namespace shr_detail

namespace shr_detail {

// Damped Newton on the fish closure pair. The system has a spurious root at
// jx = 0 (the lens rotated onto the y axis), so trials are kept strictly
// left of it; stalled runs report back with mag unchanged so the caller can
// move to the next seed.
inline std::pair<Point2, double> fish_newton(Point2 j) {
  auto res = fish_residuals(j, kShootDs);
  double mag = std::max(std::fabs(res[0]), std::fabs(res[1]));
  for (int it = 0; it < 60 && mag > kShootTol; ++it) {
    const double eps = 1e-7;
    const auto rx = fish_residuals({j.x + eps, j.y}, kShootDs);
    const auto ry = fish_residuals({j.x, j.y + eps}, kShootDs);
    const double a00 = (rx[0] - res[0]) / eps, a01 = (ry[0] - res[0]) / eps;
    const double a10 = (rx[1] - res[1]) / eps, a11 = (ry[1] - res[1]) / eps;
    const double det = a00 * a11 - a01 * a10;
    if (std::fabs(det) < 1e-14) break;
    const Point2 delta{(res[0] * a11 - res[1] * a01) / det,
                       (res[1] * a00 - res[0] * a10) / det};
    double damp = 1.0;
    bool moved = false;
    for (int cut = 0; cut < 12 && !moved; ++cut) {
      const Point2 trial{j.x - damp * delta.x, j.y - damp * delta.y};
      if (trial.x <= -0.02 && trial.y >= 0.01) {
        try {
          const auto rt = fish_residuals(trial, kShootDs);
          const double mt = std::max(std::fabs(rt[0]), std::fabs(rt[1]));
          if (mt < mag) {
            j = trial;
            res = rt;
            mag = mt;
            moved = true;
          }
        } catch (const SolverFailed&) {
        }
      }
      damp *= 0.5;
    }
    if (!moved) break;
  }
  return {j, mag};
}

}  // namespace shr_detail

// Fish: same topology as the lens, junctions mirrored across one axis only,
// at (jx, +-jy) with the halflines radial. Newton on (jx, jy), tried from
// coarse grid seeds in order of closure defect.
inline ShrinkerProfile solve_fish() {
  using namespace shr_detail;

  struct Seed {
    Point2 j;
    double mag;
  };
  std::vector<Seed> seeds;
  for (int ix = 0; ix < 24; ++ix)
    for (int iy = 0; iy < 24; ++iy) {
      const Point2 cand{-1.2 + 1.15 * double(ix) / 23.0,
                        0.03 + 1.17 * double(iy) / 23.0};
      try {
        const auto r = fish_residuals(cand, 2e-3, 12.0);
        seeds.push_back({cand, std::max(std::fabs(r[0]), std::fabs(r[1]))});
      } catch (const SolverFailed&) {
      }
    }
  if (seeds.empty())
    throw SolverFailed("solve_fish: closure grid found no viable seed");
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& a, const Seed& b) { return a.mag < b.mag; });

  Point2 j{};
  double mag = std::numeric_limits<double>::infinity();
  const size_t tries = std::min<size_t>(10, seeds.size());
  for (size_t i = 0; i < tries; ++i) {
    const auto [root, m] = fish_newton(seeds[i].j);
    if (m < kShootTol && root.x <= -0.05) {
      j = root;
      mag = m;
      break;
    }
  }
  if (mag > kShootTol)
    throw SolverFailed("solve_fish: no off-axis closure root from " +
                       std::to_string(tries) + " seeds");

  const double phi = angle_of(j);
  const ArcTrace body_half = trace_to_axis_uniform(
      {j, phi - 2.0 * kPi / 3.0}, kBuildDs, +1.0, 1, 40.0);
  const ArcTrace mouth_half = trace_to_axis_uniform(
      {j, phi + 2.0 * kPi / 3.0}, kBuildDs, +1.0, 1, 40.0);
  std::vector<Point2> body = close_across_x(arc_points(body_half));
  std::vector<Point2> mouth = close_across_x(arc_points(mouth_half));
  const Point2 u = normalized(j);

  ShrinkerProfile p;
  p.name = ShrinkerName::Fish;
  p.symmetry_axes = 1;
  p.shooting_params = {j.x, j.y};
  p.ray_directions = {u, shr_detail::mirror_x(u)};
  p.geometry.curves.push_back(curve_of(std::move(body)));
  p.geometry.curves.push_back(curve_of(std::move(mouth)));
  p.geometry.curves.push_back(ray_curve(j, u));
  p.geometry.curves.push_back(
      ray_curve(shr_detail::mirror_x(j), shr_detail::mirror_x(u)));
  p.geometry.junctions.push_back(
      {j, {{0, CurveEnd::Start}, {1, CurveEnd::Start}, {2, CurveEnd::Start}}});
  p.geometry.junctions.push_back(
      {shr_detail::mirror_x(j),
       {{0, CurveEnd::End}, {1, CurveEnd::End}, {3, CurveEnd::Start}}});
  p.geometry.endpoints.push_back(
      {u * kTruncationRadius, {2, CurveEnd::End}});
  p.geometry.endpoints.push_back(
      {shr_detail::mirror_x(u) * kTruncationRadius, {3, CurveEnd::End}});
  certify(p);
  return p;
}

// --- closure sweeps ---------------------------------------------------------

struct ShootingSweep {
  double lo = 0.0, hi = 0.0;
  std::vector<double> params;     // junction offsets sampled
  std::vector<double> residuals;  // closure defect, NaN where no crossing
  size_t valid = 0;
  size_t sign_changes = 0;
};

namespace shr_detail {

inline ShootingSweep closure_sweep(double departure, double target, double lo,
                                   double hi, size_t samples) {
  if (samples < 2) throw InvalidArgument("sweep needs at least two samples");
  ShootingSweep sw;
  sw.lo = lo;
  sw.hi = hi;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < samples; ++i) {
    const double a = lo + (hi - lo) * double(i) / double(samples - 1);
    double r = std::numeric_limits<double>::quiet_NaN();
    try {
      r = closure_residual({a, 0.0}, departure, target, 0, kShootDs);
    } catch (const SolverFailed&) {
    }
    sw.params.push_back(a);
    sw.residuals.push_back(r);
    if (std::isfinite(r)) {
      ++sw.valid;
      if (std::isfinite(prev) && (prev > 0.0) != (r > 0.0)) ++sw.sign_changes;
      prev = r;
    }
  }
  return sw;
}

}  // namespace shr_detail

// Sweep for a theta-shaped shrinker: junctions at (+-a, 0) joined by a
// straight middle segment, so the cell arcs depart at 60 degrees and would
// have to cross the y axis horizontally. The sweep records the closure
// defect; no sign change supports the nonexistence result.
inline ShootingSweep theta_nonexistence_probe(double lo = 0.05,
                                              double hi = 1.6,
                                              size_t samples = 256) {
  return shr_detail::closure_sweep(kPi / 3.0, kPi, lo, hi, samples);
}

// Identical sweep machinery pointed at the lens closure (arcs depart at 120
// degrees); this one must bracket a root.
inline ShootingSweep lens_control_sweep(double lo = 0.05, double hi = 1.6,
                                        size_t samples = 256) {
  return shr_detail::closure_sweep(2.0 * kPi / 3.0, kPi, lo, hi, samples);
}

// --- atlas -------------------------------------------------------------------

inline std::vector<ShrinkerProfile> build_shrinker_atlas() {
  std::vector<ShrinkerProfile> atlas;
  atlas.push_back(line_profile());
  atlas.push_back(halfline_profile());
  atlas.push_back(circle_profile());
  atlas.push_back(triod_profile());
  atlas.push_back(solve_spoon());
  atlas.push_back(solve_lens());
  atlas.push_back(solve_fish());
  atlas.push_back(four_halflines_profile());
  atlas.push_back(two_halflines_profile());
  return atlas;
}

inline const std::vector<ShrinkerProfile>& shrinker_atlas() {
  static const std::vector<ShrinkerProfile> atlas = build_shrinker_atlas();
  return atlas;
}

inline const ShrinkerProfile& atlas_profile(ShrinkerName name) {
  for (const ShrinkerProfile& p : shrinker_atlas())
    if (p.name == name) return p;
  throw InvalidArgument("profile missing from the atlas");
}

// --- Hausdorff distance and blow-up classification ---------------------------

namespace shr_detail {

struct BallShape {
  std::vector<Point2> pts;
  std::vector<std::array<Point2, 2>> segs;
};

// Clip parameters of segment a + t (b - a) against the disc of radius R;
// returns false when the segment misses it.
inline bool clip_params(Point2 a, Point2 b, double R, double& t0,
                        double& t1) {
  const Point2 d = b - a;
  const double A = norm2(d);
  if (A == 0.0) return false;
  t0 = 0.0;
  t1 = 1.0;
  if (norm2(a) > R * R || norm2(b) > R * R) {
    const double B = dot(a, d), C = norm2(a) - R * R;
    const double disc = B * B - A * C;
    if (disc <= 0.0) return false;
    const double sq = std::sqrt(disc);
    t0 = std::max(0.0, (-B - sq) / A);
    t1 = std::min(1.0, (-B + sq) / A);
    if (!(t1 > t0)) return false;
  }
  return true;
}

// Resamples one in-ball polyline run at stride h and appends its points and
// chords to the shape. Endpoints of the run are kept exactly.
inline void emit_run(const std::vector<Point2>& run, double h,
                     BallShape& shape) {
  if (run.size() < 2) return;
  double total = 0.0;
  for (size_t i = 1; i < run.size(); ++i)
    total += distance(run[i - 1], run[i]);
  if (total == 0.0) return;
  const size_t m = std::max<size_t>(1, size_t(std::ceil(total / h)));
  const double stride = total / double(m);
  const size_t first = shape.pts.size();
  shape.pts.push_back(run.front());
  size_t seg = 1;
  double into = 0.0;  // arclength already consumed of run[seg-1] .. run[seg]
  for (size_t k = 1; k < m; ++k) {
    double need = stride;
    while (seg < run.size()) {
      const double len = distance(run[seg - 1], run[seg]);
      if (into + need <= len) {
        into += need;
        const double t = len > 0.0 ? into / len : 0.0;
        shape.pts.push_back(run[seg - 1] + (run[seg] - run[seg - 1]) * t);
        break;
      }
      need -= len - into;
      into = 0.0;
      ++seg;
    }
  }
  shape.pts.push_back(run.back());
  for (size_t i = first + 1; i < shape.pts.size(); ++i)
    shape.segs.push_back({shape.pts[i - 1], shape.pts[i]});
}

inline BallShape sample_in_ball(const Network& net, double R, double h) {
  BallShape shape;
  std::vector<Point2> run;
  for (const Curve& c : net.curves) {
    const size_t n = c.nodes.size();
    const size_t nseg = c.closed ? n : n - 1;
    run.clear();
    for (size_t i = 0; i < nseg; ++i) {
      const Point2 a = c.nodes[i], b = c.nodes[(i + 1) % n];
      double t0, t1;
      if (!clip_params(a, b, R, t0, t1)) {
        emit_run(run, h, shape);
        run.clear();
        continue;
      }
      const Point2 d = b - a;
      if (run.empty() || t0 > 0.0) {
        emit_run(run, h, shape);
        run.clear();
        run.push_back(a + d * t0);
      }
      run.push_back(a + d * t1);
      if (t1 < 1.0) {
        emit_run(run, h, shape);
        run.clear();
      }
    }
    emit_run(run, h, shape);
    run.clear();
  }
  return shape;
}

// sup over points of a (rotated by ang) of the distance to segments of b.
inline double directed_sup(const BallShape& a, double ang,
                           const BallShape& b) {
  const double ca = std::cos(ang), sa = std::sin(ang);
  double worst = 0.0;
  for (const Point2& p : a.pts) {
    const Point2 q{ca * p.x - sa * p.y, sa * p.x + ca * p.y};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : b.segs) {
      best = std::min(best, detail::point_segment_distance(q, s[0], s[1]));
      if (best <= worst) break;
    }
    if (best > worst) worst = best;
  }
  return worst;
}

inline double hausdorff_at(const BallShape& a, const BallShape& b,
                           double ang) {
  return std::max(directed_sup(a, ang, b), directed_sup(b, -ang, a));
}

}  // namespace shr_detail

// Hausdorff distance between the parts of two networks inside the ball of
// the given radius about the origin.
inline double hausdorff_in_ball(const Network& a, const Network& b,
                                double radius, double spacing = 0.02) {
  const auto sa = shr_detail::sample_in_ball(a, radius, spacing);
  const auto sb = shr_detail::sample_in_ball(b, radius, spacing);
  if (sa.pts.empty() || sb.pts.empty())
    throw EmptyBlowup("nothing inside the comparison ball");
  return shr_detail::hausdorff_at(sa, sb, 0.0);
}

struct AlignedDistance {
  double distance = 0.0;
  double rotation = 0.0;  // applied to the first network
};

// Minimal in-ball Hausdorff distance over rotations of the first network:
// 0.5 degree grid scan, then golden-section refinement around the best cell.
inline AlignedDistance rotation_aligned_distance(const Network& a,
                                                 const Network& b,
                                                 double radius,
                                                 double spacing = 0.02) {
  using namespace shr_detail;
  const double coarse_h = std::max(spacing, 0.08);
  const BallShape ac = sample_in_ball(a, radius, coarse_h);
  const BallShape bc = sample_in_ball(b, radius, coarse_h);
  if (ac.pts.empty() || bc.pts.empty())
    throw EmptyBlowup("nothing inside the comparison ball");

  const double step = 0.5 * kPi / 180.0;
  double best_ang = 0.0;
  double best = std::numeric_limits<double>::infinity();
  const size_t cells = size_t(std::llround(2.0 * kPi / step));
  for (size_t i = 0; i < cells; ++i) {
    const double ang = double(i) * step;
    const double d = hausdorff_at(ac, bc, ang);
    if (d < best) {
      best = d;
      best_ang = ang;
    }
  }

  const BallShape af = sample_in_ball(a, radius, spacing);
  const BallShape bf = sample_in_ball(b, radius, spacing);
  double lo = best_ang - step, hi = best_ang + step;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = hausdorff_at(af, bf, x1), f2 = hausdorff_at(af, bf, x2);
  for (int it = 0; it < 48; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = hausdorff_at(af, bf, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = hausdorff_at(af, bf, x2);
    }
  }
  AlignedDistance out;
  if (f1 < f2) {
    out.distance = f1;
    out.rotation = shr_detail::wrap_pi(x1);
  } else {
    out.distance = f2;
    out.rotation = shr_detail::wrap_pi(x2);
  }
  return out;
}

struct BlowupClassification {
  ShrinkerName best{};
  double distance = std::numeric_limits<double>::infinity();
  double rotation = 0.0;
  double residual = 0.0;  // frame's shrinker defect inside the ball
  std::vector<std::pair<ShrinkerName, double>> distances;
};

// Matches a rescaled frame against every catalog profile by rotation-
// optimized Hausdorff distance inside the ball of the given radius.
inline BlowupClassification classify_blowup(const RescaledFrame& frame,
                                            double radius = 5.0) {
  if (shr_detail::sample_in_ball(frame.network, radius, 0.1).pts.empty())
    throw EmptyBlowup("rescaled frame has no points inside the ball");
  BlowupClassification out;
  out.residual = shrinker_residual(frame.network, radius);
  for (const ShrinkerProfile& p : shrinker_atlas()) {
    const AlignedDistance ad =
        rotation_aligned_distance(frame.network, p.geometry, radius);
    out.distances.push_back({p.name, ad.distance});
    if (ad.distance < out.distance) {
      out.distance = ad.distance;
      out.rotation = ad.rotation;
      out.best = p.name;
    }
  }
  return out;
}

// --- self-expander germ -------------------------------------------------------

struct ExpanderGerm {
  std::array<Point2, 4> directions{};  // matched rays, paired per junction
  Network geometry;                    // bridge is curve 0
  double scale = 1.0;
  double residual = 0.0;        // sup |k - <x,nu>| before scaling
  double junction_defect = 0.0;
  double direction_defect = 0.0;  // worst asymptotic angle error, radians
  double bridge_length = 0.0;     // at the requested scale
  std::vector<double> shooting_params;  // {j1x, j1y, bridge angle, length}
};

namespace shr_detail {

// Integrates an expander branch far enough out that its tangent angle has
// frozen; returns the asymptotic angle.
inline double expander_asymptote(OdeState s, double ds, double r_stop) {
  double travelled = 0.0;
  while (norm(s.x) < r_stop && travelled < 8.0 * r_stop) {
    s = rk4(s, ds, -1.0);
    travelled += ds;
  }
  if (norm(s.x) < r_stop)
    throw SolverFailed("expander branch failed to leave the core");
  return s.theta;
}

// Traces an expander branch until it exits the truncation radius.
inline std::vector<Point2> expander_branch(OdeState s, double ds) {
  std::vector<Point2> pts{s.x};
  double travelled = 0.0;
  while (norm(s.x) < kTruncationRadius && travelled < 16.0 * kTruncationRadius) {
    s = rk4(s, ds, -1.0);
    pts.push_back(s.x);
    travelled += ds;
  }
  if (norm(s.x) < kTruncationRadius)
    throw SolverFailed("expander branch failed to reach truncation");
  return pts;
}

// Residuals of the four asymptotic directions for bridge unknowns
// u = (j1x, j1y, bridge departure angle, bridge length). The first two
// targets belong to the J1 side.
inline std::array<double, 4> germ_residuals(const std::array<double, 4>& u,
                                            const std::array<double, 4>& tgt,
                                            double ds) {
  const Point2 j1{u[0], u[1]};
  const double beta = u[2], len = u[3];
  if (!(len > 0.0)) throw SolverFailed("bridge length collapsed");
  OdeState bridge{j1, beta};
  const size_t m = std::max<size_t>(8, size_t(std::llround(len / ds)));
  const double h = len / double(m);
  for (size_t i = 0; i < m; ++i) bridge = rk4(bridge, h, -1.0);
  const double back = bridge.theta + kPi;  // bridge direction out of J2

  std::array<double, 4> r{};
  r[0] = wrap_pi(expander_asymptote({j1, beta + 2.0 * kPi / 3.0}, ds, 7.0) -
                 tgt[0]);
  r[1] = wrap_pi(expander_asymptote({j1, beta - 2.0 * kPi / 3.0}, ds, 7.0) -
                 tgt[1]);
  r[2] = wrap_pi(expander_asymptote({bridge.x, back + 2.0 * kPi / 3.0}, ds,
                                    7.0) -
                 tgt[2]);
  r[3] = wrap_pi(expander_asymptote({bridge.x, back - 2.0 * kPi / 3.0}, ds,
                                    7.0) -
                 tgt[3]);
  return r;
}

// Symmetric canonical germ: rays at +-60 and +-120 degrees, junctions on the
// y axis, straight bridge through the origin. One shooting parameter: the
// junction height c, with branches departing 120 degrees off the bridge.
inline double canonical_germ_height(double ds) {
  auto f = [ds](double c) {
    return wrap_pi(
        expander_asymptote({{0.0, c}, -0.5 * kPi + 2.0 * kPi / 3.0}, ds, 7.0) -
        kPi / 3.0);
  };
  return bracketed_root(f, 0.02, 1.5, 40, "expander_germ");
}

}  // namespace shr_detail

// Unique connected tree-like self-expander spanning four rays that alternate
// 120/60 degree gaps (within 2 degrees): two junctions joined by a short
// bridge across the 60 degree gaps, four branches asymptotic to the rays.
// The returned geometry is the certified unit-scale germ multiplied by
// `scale`.
inline ExpanderGerm expander_germ(const std::array<Point2, 4>& directions,
                                  double scale = 1.0) {
  using namespace shr_detail;
  if (!(scale > 0.0)) throw InvalidArgument("germ scale must be positive");

  std::array<double, 4> ang{};
  for (size_t i = 0; i < 4; ++i) {
    if (!(norm(directions[i]) > 0.0))
      throw InvalidArgument("zero ray direction");
    ang[i] = angle_of(directions[i]);
  }
  std::sort(ang.begin(), ang.end());
  std::array<double, 4> gap{};
  for (size_t i = 0; i < 4; ++i) {
    const double next = (i + 1 < 4) ? ang[i + 1] : ang[0] + 2.0 * kPi;
    gap[i] = next - ang[i];
  }
  const double tol = 2.0 * kPi / 180.0;
  int narrow_first = -1;
  for (int phase = 0; phase < 2 && narrow_first < 0; ++phase) {
    bool ok = true;
    for (size_t i = 0; i < 4; ++i) {
      const double want = ((i + size_t(phase)) % 2 == 0) ? kPi / 3.0
                                                         : 2.0 * kPi / 3.0;
      if (std::fabs(gap[i] - want) > tol) ok = false;
    }
    if (ok) narrow_first = phase;
  }
  if (narrow_first < 0)
    throw InvalidArgument("ray gaps are not a 120/60 alternating pattern");

  // index of the 60 degree gap whose bisector carries J1
  const size_t g1 = (narrow_first == 0) ? 0 : 1;
  const double bis1 = ang[g1] + 0.5 * gap[g1];
  const std::array<double, 4> targets = {
      ang[g1], ang[(g1 + 1) % 4],             // J1 branches, ccw then cw
      ang[(g1 + 2) % 4], ang[(g1 + 3) % 4]};  // J2 branches

  const double ds = kShootDs;
  const double c0 = canonical_germ_height(ds);
  std::array<double, 4> u = {c0 * std::cos(bis1), c0 * std::sin(bis1),
                             bis1 + kPi, 2.0 * c0};
  auto res = germ_residuals(u, targets, ds);
  auto mag = [](const std::array<double, 4>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::fabs(v));
    return m;
  };
  double best = mag(res);
  for (int it = 0; it < 60 && best > kShootTol; ++it) {
    std::vector<std::vector<double>> J(4, std::vector<double>(4, 0.0));
    std::vector<double> rhs(4);
    const double eps = 1e-7;
    for (size_t col = 0; col < 4; ++col) {
      auto up = u;
      up[col] += eps;
      const auto rp = germ_residuals(up, targets, ds);
      for (size_t row = 0; row < 4; ++row)
        J[row][col] = (rp[row] - res[row]) / eps;
    }
    for (size_t row = 0; row < 4; ++row) rhs[row] = res[row];
    const std::vector<double> delta = solve_dense(J, rhs);
    double damp = 1.0;
    bool moved = false;
    for (int cut = 0; cut < 10 && !moved; ++cut) {
      auto trial = u;
      for (size_t i = 0; i < 4; ++i) trial[i] -= damp * delta[i];
      try {
        const auto rt = germ_residuals(trial, targets, ds);
        if (mag(rt) < best) {
          u = trial;
          res = rt;
          best = mag(rt);
          moved = true;
        }
      } catch (const SolverFailed&) {
      }
      damp *= 0.5;
    }
    if (!moved) break;
  }
  if (best > 1e-9)
    throw SolverFailed("expander_germ: asymptote match stalled at " +
                       std::to_string(best));

  const Point2 j1{u[0], u[1]};
  const double beta = u[2], len = u[3];
  const double fine = kBuildDs;
  std::vector<Point2> bridge_pts{j1};
  OdeState arr{j1, beta};
  {
    const size_t m = std::max<size_t>(8, size_t(std::llround(len / fine)));
    const double h = len / double(m);
    for (size_t i = 0; i < m; ++i) {
      arr = rk4(arr, h, -1.0);
      bridge_pts.push_back(arr.x);
    }
  }
  const Point2 j2 = bridge_pts.back();
  const double back = arr.theta + kPi;

  ExpanderGerm germ;
  germ.scale = scale;
  germ.shooting_params = {u[0], u[1], u[2], u[3]};
  for (size_t i = 0; i < 4; ++i)
    germ.directions[i] = unit_from_angle(targets[i]);
  germ.direction_defect = best;

  Network net;
  net.curves.push_back(curve_of(std::move(bridge_pts)));
  const std::array<OdeState, 4> seeds = {
      OdeState{j1, beta + 2.0 * kPi / 3.0},
      OdeState{j1, beta - 2.0 * kPi / 3.0},
      OdeState{j2, back + 2.0 * kPi / 3.0},
      OdeState{j2, back - 2.0 * kPi / 3.0}};
  for (size_t i = 0; i < 4; ++i) {
    net.curves.push_back(curve_of(expander_branch(seeds[i], fine)));
    net.endpoints.push_back(
        {net.curves.back().nodes.back(), {i + 1, CurveEnd::End}});
  }
  net.junctions.push_back(
      {j1, {{1, CurveEnd::Start}, {2, CurveEnd::Start}, {0, CurveEnd::Start}}});
  net.junctions.push_back(
      {j2, {{3, CurveEnd::Start}, {4, CurveEnd::Start}, {0, CurveEnd::End}}});
  net.update_all_geometry();

  germ.residual = expander_residual(net);
  germ.junction_defect = validate_regular(net).max_deviation;
  germ.bridge_length = len * scale;
  if (scale != 1.0) net = scaled_copy(net, scale);
  germ.geometry = std::move(net);
  return germ;
}

}  // namespace curvnet
