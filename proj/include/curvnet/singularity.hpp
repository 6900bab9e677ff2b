#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curvnet/diagnostics.hpp"
#include "curvnet/errors.hpp"
#include "curvnet/flow.hpp"
#include "curvnet/geometry.hpp"
#include "curvnet/network.hpp"
#include "curvnet/shrinkers.hpp"

namespace curvnet {

enum class SingularKind {
  InternalCurveCollapse,
  BoundaryCurveCollapse,
  RegionCollapse,
  CurvatureBlowup,
};

inline const char* to_string(SingularKind k) {
  switch (k) {
    case SingularKind::InternalCurveCollapse: return "InternalCurveCollapse";
    case SingularKind::BoundaryCurveCollapse: return "BoundaryCurveCollapse";
    case SingularKind::RegionCollapse: return "RegionCollapse";
    case SingularKind::CurvatureBlowup: return "CurvatureBlowup";
  }
  return "?";
}

// Bridge length of the unit-scale four-ray expander germ. Time-reversed it
// doubles as the closing rate of a 4-point: a vanishing junction-junction
// curve obeys L(t) ~ kGermBridgeUnit sqrt(2(T - t)) up to slow corrections.
inline constexpr double kGermBridgeUnit = 1.3262518980;

struct SingularityThresholds {
  double eps_len = 0.0;   // a curve below this length counts as collapsed
  double eps_area = 0.0;  // a loop below this area counts as a vanishing region
  double k_hi = std::numeric_limits<double>::infinity();
};

// Mesh-scale defaults: below 4h the discretisation cannot represent a curve,
// and 10/h exceeds any curvature the mesh resolves faithfully.
inline SingularityThresholds mesh_scale_thresholds(double h_target) {
  if (!(h_target > 0.0))
    throw InvalidArgument("thresholds need a positive reference spacing");
  return {4.0 * h_target, 16.0 * h_target * h_target, 10.0 / h_target};
}

struct SingularEvent {
  SingularKind kind{};
  double T = 0.0;         // estimated singular time
  double t_detect = 0.0;  // flow time at which the event fired
  Point2 location{};
  std::vector<size_t> curves;  // the collapsing curve, or the loop boundary
  std::optional<ShrinkerName> blowup_class;
  bool anomalous = false;  // curvature passed k_hi with nothing collapsing
};

// The enclosed area of an m-cornered region drains at the constant rate
// (6 - m) pi / 3, so a region vanishing alone meets zero at this horizon.
inline double predicted_collapse_time(const Loop& loop, double t_now) {
  if (loop.m >= 6)
    throw InvalidArgument("a region with six or more corners cannot vanish");
  return t_now + 3.0 * loop.area / ((6.0 - double(loop.m)) * kPi);
}

// Rigid fit of four ray directions to the alternating 120/60 gap pattern of
// a 4-point. idealized[i] pairs with rays[i].
struct CrossPattern {
  std::array<double, 4> idealized{};  // exact pattern angles, radians
  double max_deviation = 0.0;         // worst ray's angular misfit, radians
};

inline CrossPattern fit_four_ray_pattern(const std::array<Point2, 4>& rays) {
  std::array<double, 4> ang{};
  for (size_t i = 0; i < 4; ++i) {
    if (!(norm(rays[i]) > 0.0)) throw InvalidArgument("zero ray direction");
    ang[i] = angle_of(rays[i]);
  }
  std::array<size_t, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return ang[a] < ang[b]; });

  CrossPattern best;
  best.max_deviation = std::numeric_limits<double>::infinity();
  for (int phase = 0; phase < 2; ++phase) {
    // cumulative pattern offsets with gaps 60/120 alternating, narrow first
    // for phase 0
    std::array<double, 4> rel{};
    double acc = 0.0;
    for (size_t i = 0; i < 4; ++i) {
      rel[i] = acc;
      acc += ((i + size_t(phase)) % 2 == 0) ? kPi / 3.0 : 2.0 * kPi / 3.0;
    }
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < 4; ++i) {
      const double d = ang[order[i]] - rel[i];
      sx += std::cos(d);
      sy += std::sin(d);
    }
    const double psi = std::atan2(sy, sx);
    double dev = 0.0;
    for (size_t i = 0; i < 4; ++i)
      dev = std::max(dev, std::fabs(wrap_pi(ang[order[i]] - rel[i] - psi)));
    if (dev < best.max_deviation) {
      best.max_deviation = dev;
      for (size_t i = 0; i < 4; ++i) best.idealized[order[i]] = rel[i] + psi;
    }
  }
  return best;
}

namespace sing_detail {

// Anchor bookkeeping for one curve end: at most one of the two is set.
struct EndAnchor {
  std::optional<size_t> junction;
  std::optional<size_t> endpoint;
};

inline std::array<EndAnchor, 2> end_anchors(const Network& net, size_t ci) {
  std::array<EndAnchor, 2> a{};
  for (size_t ji = 0; ji < net.junctions.size(); ++ji)
    for (const Incidence& inc : net.junctions[ji].incident)
      if (inc.curve == ci) a[inc.end == CurveEnd::End].junction = ji;
  for (size_t ei = 0; ei < net.endpoints.size(); ++ei)
    if (net.endpoints[ei].incident.curve == ci)
      a[net.endpoints[ei].incident.end == CurveEnd::End].endpoint = ei;
  return a;
}

inline double loop_max_curvature(const Network& net, const Loop& loop) {
  double m = 0.0;
  for (size_t ci : loop.curve_ids)
    for (double v : net.curves[ci].k) m = std::max(m, std::fabs(v));
  return m;
}

inline Point2 polygon_centroid(const std::vector<Point2>& poly) {
  double twice_area = 0.0;
  Point2 acc{0.0, 0.0};
  const size_t n = poly.size();
  Point2 mean{0.0, 0.0};
  for (size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i], b = poly[(i + 1) % n];
    const double cr = cross(a, b);
    twice_area += cr;
    acc += (a + b) * cr;
    mean += a;
  }
  if (std::fabs(twice_area) < 1e-30) return mean / double(n);
  return acc / (3.0 * twice_area);
}

// Extrapolated vanishing time of a collapsing curve. Near a 4-point the
// squared length is asymptotically linear in t, so a least-squares line
// through the trailing history pins its root; without usable history the
// germ rate converts the current length into a horizon directly.
inline double curve_collapse_time(size_t ci, double len_now, double t_now,
                                  const std::vector<DiagnosticsSample>& hist) {
  std::vector<double> ts, ys;
  for (size_t i = hist.size(); i-- > 0 && ts.size() < 5;) {
    const DiagnosticsSample& s = hist[i];
    if (!(s.t < t_now) || ci >= s.curve_lengths.size()) break;
    if (!ts.empty() && !(s.t < ts.back())) break;
    ts.push_back(s.t);
    ys.push_back(s.curve_lengths[ci] * s.curve_lengths[ci]);
  }
  std::reverse(ts.begin(), ts.end());
  std::reverse(ys.begin(), ys.end());
  ts.push_back(t_now);
  ys.push_back(len_now * len_now);

  if (ts.size() >= 3) {
    const double n = double(ts.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < ts.size(); ++i) {
      sx += ts[i];
      sy += ys[i];
      sxx += ts[i] * ts[i];
      sxy += ts[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom > 0.0) {
      const double b = (n * sxy - sx * sy) / denom;
      const double a = (sy - b * sx) / n;
      if (b < 0.0) {
        const double root = -a / b;
        if (root > t_now) return root;
      }
    }
  }
  const double r = len_now / kGermBridgeUnit;
  return t_now + 0.5 * r * r;
}

}  // namespace sing_detail

// Scans the current state for the singular alternatives: a vanishing region
// outranks any lone curve collapse, an internal (junction-junction) collapse
// outranks a boundary one, and a bare curvature spike is flagged anomalous.
// A collapsing curve that bounds a loop whose area is already below eps_area
// is reported as that region's collapse, not as a curve event.
inline std::optional<SingularEvent> detect(
    const FlowState& st, const SingularityThresholds& th,
    const std::vector<DiagnosticsSample>& history = {}) {
  const Network& net = st.network;
  const std::vector<Loop> loops = extract_loops(net);

  auto region_event = [&](const Loop& loop) {
    SingularEvent ev;
    ev.kind = SingularKind::RegionCollapse;
    ev.t_detect = st.t;
    ev.curves = loop.curve_ids;
    ev.T = predicted_collapse_time(loop, st.t);
    ev.location = sing_detail::polygon_centroid(loop_polygon(net, loop));
    try {
      ev.blowup_class =
          classify_blowup(rescale(net, ev.location, st.t, ev.T)).best;
    } catch (const Error&) {
      // wreckage too degenerate to rescale; leave the class unset
    }
    return ev;
  };

  // vanishing regions: area below threshold, confirmed by either blown-up
  // curvature on the loop or a loop curve already at collapse length
  {
    size_t pick = loops.size();
    double horizon = std::numeric_limits<double>::infinity();
    for (size_t li = 0; li < loops.size(); ++li) {
      const Loop& loop = loops[li];
      if (!(loop.area < th.eps_area)) continue;
      double shortest = std::numeric_limits<double>::infinity();
      for (size_t ci : loop.curve_ids)
        shortest = std::min(shortest, net.curves[ci].length());
      if (!(sing_detail::loop_max_curvature(net, loop) > th.k_hi) &&
          !(shortest < th.eps_len))
        continue;
      const double T = predicted_collapse_time(loop, st.t);
      if (T < horizon) {
        horizon = T;
        pick = li;
      }
    }
    if (pick < loops.size()) return region_event(loops[pick]);
  }

  // lone curve collapses, internal before boundary, shortest first
  std::vector<size_t> small_loop_members;
  for (const Loop& loop : loops)
    if (loop.area < th.eps_area)
      small_loop_members.insert(small_loop_members.end(),
                                loop.curve_ids.begin(), loop.curve_ids.end());
  size_t best_internal = net.curves.size(), best_boundary = net.curves.size();
  double len_internal = th.eps_len, len_boundary = th.eps_len;
  for (size_t ci = 0; ci < net.curves.size(); ++ci) {
    const Curve& c = net.curves[ci];
    if (c.closed) continue;
    const double len = c.length();
    if (!(len < th.eps_len)) continue;
    if (std::find(small_loop_members.begin(), small_loop_members.end(), ci) !=
        small_loop_members.end())
      continue;
    const auto anch = sing_detail::end_anchors(net, ci);
    if (anch[0].junction && anch[1].junction) {
      if (*anch[0].junction == *anch[1].junction) continue;  // self-loop
      if (len < len_internal) {
        len_internal = len;
        best_internal = ci;
      }
    } else if (anch[0].junction || anch[1].junction) {
      if (len < len_boundary) {
        len_boundary = len;
        best_boundary = ci;
      }
    }
  }

  if (best_internal < net.curves.size()) {
    const size_t ci = best_internal;
    const auto anch = sing_detail::end_anchors(net, ci);
    SingularEvent ev;
    ev.kind = SingularKind::InternalCurveCollapse;
    ev.t_detect = st.t;
    ev.curves = {ci};
    ev.T = sing_detail::curve_collapse_time(ci, len_internal, st.t, history);
    ev.location = (net.junctions[*anch[0].junction].position +
                   net.junctions[*anch[1].junction].position) /
                  2.0;
    std::array<Point2, 4> outer{};
    size_t n_out = 0;
    for (size_t ji : {*anch[0].junction, *anch[1].junction})
      for (const Incidence& inc : net.junctions[ji].incident)
        if (inc.curve != ci && n_out < 4)
          outer[n_out++] = exterior_tangent(net, inc);
    if (n_out == 4 &&
        fit_four_ray_pattern(outer).max_deviation <= 10.0 * kPi / 180.0)
      ev.blowup_class = ShrinkerName::FourHalflines;
    return ev;
  }

  if (best_boundary < net.curves.size()) {
    const size_t ci = best_boundary;
    const auto anch = sing_detail::end_anchors(net, ci);
    const size_t ji = anch[0].junction ? *anch[0].junction : *anch[1].junction;
    const size_t ei = anch[0].endpoint ? *anch[0].endpoint : *anch[1].endpoint;
    SingularEvent ev;
    ev.kind = SingularKind::BoundaryCurveCollapse;
    ev.t_detect = st.t;
    ev.curves = {ci};
    ev.T = sing_detail::curve_collapse_time(ci, len_boundary, st.t, history);
    ev.location = net.endpoints[ei].position;
    std::array<Point2, 2> sv{};
    size_t n_sv = 0;
    for (const Incidence& inc : net.junctions[ji].incident)
      if (inc.curve != ci && n_sv < 2)
        sv[n_sv++] = exterior_tangent(net, inc);
    if (n_sv == 2) {
      const double gap =
          std::acos(std::clamp(dot(sv[0], sv[1]), -1.0, 1.0));
      if (std::fabs(gap - 2.0 * kPi / 3.0) <= 10.0 * kPi / 180.0)
        ev.blowup_class = ShrinkerName::TwoHalflines120;
    }
    return ev;
  }

  const double mk = max_abs_curvature(net);
  if (mk > th.k_hi) {
    SingularEvent ev;
    ev.kind = SingularKind::CurvatureBlowup;
    ev.t_detect = st.t;
    ev.T = st.t;
    ev.anomalous = true;
    for (const Curve& c : net.curves)
      for (size_t i = 0; i < c.k.size(); ++i)
        if (std::fabs(c.k[i]) == mk) ev.location = c.nodes[i];
    return ev;
  }
  return std::nullopt;
}

struct BlowupRateReport {
  double slope = 0.0;           // d log(max k^2) / d log(T - t)
  double lower_constant = 0.0;  // largest C with max k^2 sqrt(T - t) >= C
  size_t samples = 0;
  bool blows_up = false;
};

// Least-squares fit of log max k^2 against log(T - t) over a trajectory
// tail approaching the singular time T.
inline BlowupRateReport blowup_rate_check(
    const std::vector<DiagnosticsSample>& tail, double T) {
  std::vector<double> x, y;
  double prod_min = std::numeric_limits<double>::infinity();
  for (const DiagnosticsSample& s : tail) {
    if (!(s.t < T) || !(s.max_abs_k > 0.0)) continue;
    x.push_back(std::log(T - s.t));
    y.push_back(2.0 * std::log(s.max_abs_k));
    prod_min = std::min(prod_min,
                        s.max_abs_k * s.max_abs_k * std::sqrt(T - s.t));
  }
  if (x.size() < 10)
    throw InvalidArgument("blow-up rate fit needs at least 10 samples");

  const double n = double(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  BlowupRateReport rep;
  rep.samples = x.size();
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.lower_constant = prod_min;
  rep.blows_up = rep.slope < -0.25 && (y.back() - y.front()) > std::log(4.0);
  return rep;
}

struct TransitionRecord {
  TopologyTag pre{};
  TopologyTag post{};
  Point2 pivot{};
  size_t inserted_curve = 0;
  double delta = 0.0;  // initial length of the inserted curve
  double time = 0.0;
};

namespace sing_detail {

// Arclength grid growing geometrically from h0 at the anchored end(s) toward
// h_cap, so the one-sided junction tangent keeps its certified direction
// while the far part matches the ambient mesh.
inline Curve graded_polyline(const Curve& fine, double h0, double h_cap,
                             bool both_ends) {
  const double L = fine.length();
  std::vector<double> left{0.0};
  double h = h0;
  const double reach = both_ends ? 0.5 * L : L;
  while (left.back() + h < reach) {
    left.push_back(left.back() + h);
    h = std::min(h * 1.6, h_cap);
  }
  std::vector<double> pos = left;
  if (both_ends) {
    for (size_t i = left.size(); i-- > 0;) {
      const double mirrored = L - left[i];
      if (mirrored > pos.back() + 0.25 * h0) pos.push_back(mirrored);
    }
  } else if (L > pos.back() + 0.25 * h0) {
    pos.push_back(L);
  } else {
    pos.back() = L;
  }
  if (pos.size() < 3) pos = {0.0, 0.5 * L, L};

  Curve out;
  out.nodes.reserve(pos.size());
  for (double p : pos) out.nodes.push_back(point_at_arclength(fine, p));
  out.nodes.front() = fine.nodes.front();
  out.nodes.back() = fine.nodes.back();
  update_geometry(out);
  return out;
}

}  // namespace sing_detail

// Restart surgery at a 4-point. The collapsed junction-junction curve is
// replaced by the expander germ scaled to bridge length delta: the two
// junction slots move to the germ junctions, the four surviving branches are
// re-launched along germ branch stubs out to the meld radius and spliced to
// their outer remainders, and the bridge takes the collapsed curve's id.
// The 60/120 gap pairs switch sides across the surgery.
inline std::pair<Network, TransitionRecord> standard_transition(
    const Network& net, size_t collapsed, double delta, double t_now = 0.0) {
  if (collapsed >= net.curves.size())
    throw InvalidArgument("standard transition: no such curve");
  if (!(delta > 0.0))
    throw InvalidArgument("insertion length must be positive");
  const auto anch = sing_detail::end_anchors(net, collapsed);
  if (!anch[0].junction || !anch[1].junction ||
      *anch[0].junction == *anch[1].junction)
    throw InvalidArgument(
        "standard transition needs a curve joining the two junctions");
  const size_t ja = *anch[0].junction, jb = *anch[1].junction;
  const Point2 pivot =
      (net.junctions[ja].position + net.junctions[jb].position) / 2.0;

  struct Outer {
    Incidence inc;
    double ideal = 0.0;
    size_t branch = 4;
  };
  std::array<Outer, 4> outer{};
  std::array<Point2, 4> rays{};
  size_t n_out = 0;
  for (size_t ji : {ja, jb})
    for (const Incidence& inc : net.junctions[ji].incident)
      if (inc.curve != collapsed) {
        outer[n_out].inc = inc;
        rays[n_out] = exterior_tangent(net, inc);
        ++n_out;
      }
  if (n_out != 4)
    throw InvalidArgument("collapsed curve is doubly anchored at a junction");

  const CrossPattern fit = fit_four_ray_pattern(rays);
  if (fit.max_deviation > 10.0 * kPi / 180.0)
    throw TransitionRefused(
        "outer branches deviate " +
        std::to_string(fit.max_deviation * 180.0 / kPi) +
        " degrees from the 120/60 pattern");
  std::array<Point2, 4> ideal_dirs{};
  for (size_t i = 0; i < 4; ++i) {
    outer[i].ideal = fit.idealized[i];
    ideal_dirs[i] = unit_from_angle(fit.idealized[i]);
  }

  ExpanderGerm germ = expander_germ(ideal_dirs);
  const double s = delta / germ.bridge_length;
  Network g = scaled_copy(germ.geometry, s);
  for (Curve& c : g.curves)
    for (Point2& p : c.nodes) p += pivot;
  for (Junction& j : g.junctions) j.position += pivot;
  for (Endpoint& e : g.endpoints) e.position += pivot;
  g.update_all_geometry();

  // pair each surviving branch with the germ branch launched toward it
  for (Outer& o : outer) {
    for (size_t k = 0; k < 4; ++k)
      if (std::fabs(wrap_pi(angle_of(germ.directions[k]) - o.ideal)) < 1e-9)
        o.branch = k;
    if (o.branch == 4)
      throw SolverFailed("germ branch matching failed");
  }

  const double r_meld = 2.5 * delta;
  const double h_cap = delta / 12.0;
  const double h0 = delta / 96.0;

  Network out = net;
  out.curves[collapsed] =
      sing_detail::graded_polyline(g.curves[0], h0, h_cap, true);

  struct Splice {
    bool at_start = false;
    Curve stub;
  };
  std::vector<std::vector<Splice>> splices(net.curves.size());
  for (const Outer& o : outer) {
    const Curve& branch = g.curves[o.branch + 1];
    std::vector<Point2> stub_pts;
    for (const Point2& p : branch.nodes) {
      if (distance(p, pivot) > r_meld) break;
      stub_pts.push_back(p);
    }
    if (stub_pts.size() < 3)
      throw TransitionRefused("meld radius holds no germ branch nodes");
    Curve stub =
        sing_detail::graded_polyline(curve_of(std::move(stub_pts)), h0, h_cap,
                                     false);
    splices[o.inc.curve].push_back(
        {o.inc.end == CurveEnd::Start, std::move(stub)});
  }

  for (size_t ci = 0; ci < splices.size(); ++ci) {
    if (splices[ci].empty()) continue;
    const Curve& old = net.curves[ci];
    bool trim_start = false, trim_end = false;
    for (const Splice& sp : splices[ci])
      (sp.at_start ? trim_start : trim_end) = true;
    size_t lo = 0, hi = old.nodes.size();
    if (trim_start)
      while (lo < hi && distance(old.nodes[lo], pivot) <= r_meld) ++lo;
    if (trim_end)
      while (hi > lo && distance(old.nodes[hi - 1], pivot) <= r_meld) --hi;
    if (hi <= lo)
      throw TransitionRefused(
          "surviving branch does not leave the surgery neighbourhood");
    std::vector<Point2> pts;
    for (const Splice& sp : splices[ci])
      if (sp.at_start) pts = sp.stub.nodes;
    pts.insert(pts.end(), old.nodes.begin() + long(lo),
               old.nodes.begin() + long(hi));
    for (const Splice& sp : splices[ci])
      if (!sp.at_start)
        for (size_t i = sp.stub.nodes.size(); i-- > 0;)
          pts.push_back(sp.stub.nodes[i]);
    out.curves[ci] = curve_of(std::move(pts));
  }

  // germ junction 0 anchors branches 0 and 1 plus the bridge start
  Junction j0 = g.junctions[0], j1 = g.junctions[1];
  j0.incident.clear();
  j1.incident.clear();
  for (const Outer& o : outer)
    (o.branch < 2 ? j0 : j1).incident.push_back(o.inc);
  j0.incident.push_back({collapsed, CurveEnd::Start});
  j1.incident.push_back({collapsed, CurveEnd::End});
  out.junctions[ja] = std::move(j0);
  out.junctions[jb] = std::move(j1);
  out.update_all_geometry();

  TransitionRecord rec;
  rec.pre = classify_topology(net);
  rec.post = classify_topology(out);
  rec.pivot = pivot;
  rec.inserted_curve = collapsed;
  rec.delta = delta;
  rec.time = t_now;
  return {std::move(out), rec};
}

// Limit configuration of a boundary curve collapse: the junction lands on
// the fixed endpoint, leaving a 2-point where the two surviving curves meet
// at 120 degrees. The restart theorem does not cover this configuration, so
// the record is informational and carries no resumable state.
struct BoundaryTransitionReport {
  Network limit;
  Point2 two_point{};
  double angle = 0.0;  // radians between the surviving exterior tangents
  bool restart_supported = false;
};

inline BoundaryTransitionReport boundary_transition(const Network& net,
                                                    size_t collapsed) {
  if (collapsed >= net.curves.size())
    throw InvalidArgument("boundary transition: no such curve");
  const auto anch = sing_detail::end_anchors(net, collapsed);
  const bool j_first = anch[0].junction.has_value();
  if (!(j_first ? anch[1].endpoint.has_value()
                : (anch[0].endpoint && anch[1].junction)))
    throw InvalidArgument(
        "boundary transition needs a junction-endpoint curve");
  const size_t ji = j_first ? *anch[0].junction : *anch[1].junction;
  const size_t ei = j_first ? *anch[1].endpoint : *anch[0].endpoint;
  const Point2 P = net.endpoints[ei].position;

  std::array<Incidence, 2> sv{};
  size_t n_sv = 0;
  for (const Incidence& inc : net.junctions[ji].incident)
    if (inc.curve != collapsed && n_sv < 2) sv[n_sv++] = inc;
  if (n_sv != 2)
    throw InvalidArgument("collapsed curve anchors the junction twice");

  Network lim = net;
  for (const Incidence& inc : sv) {
    Curve& c = lim.curves[inc.curve];
    (inc.end == CurveEnd::Start ? c.nodes.front() : c.nodes.back()) = P;
  }
  lim.curves.erase(lim.curves.begin() + long(collapsed));
  lim.junctions.erase(lim.junctions.begin() + long(ji));
  lim.endpoints.erase(lim.endpoints.begin() + long(ei));
  auto renumber = [&](Incidence inc) {
    if (inc.curve > collapsed) --inc.curve;
    return inc;
  };
  for (Junction& j : lim.junctions)
    for (Incidence& inc : j.incident) inc = renumber(inc);
  for (Endpoint& e : lim.endpoints) e.incident = renumber(e.incident);
  for (const Incidence& inc : sv)
    lim.endpoints.push_back({P, renumber(inc)});
  lim.update_all_geometry();

  BoundaryTransitionReport rep;
  const Point2 t0 = exterior_tangent(lim, renumber(sv[0]));
  const Point2 t1 = exterior_tangent(lim, renumber(sv[1]));
  rep.angle = std::acos(std::clamp(dot(t0, t1), -1.0, 1.0));
  rep.two_point = P;
  rep.limit = std::move(lim);
  return rep;
}

// Continuation past a region collapse with a two-junction blow-up class:
// the vanished loop and both junctions are excised and the two surviving
// arcs are joined through the collapse point. The join is C0; the lens
// class lands C1 while the fish keeps a kink.
inline Network region_collapse_continuation(const Network& net,
                                            const SingularEvent& ev) {
  if (ev.kind != SingularKind::RegionCollapse)
    throw InvalidArgument("continuation needs a RegionCollapse event");
  if (!ev.blowup_class)
    throw ContinuationUnsupported("collapse without a certified blow-up class");
  if (*ev.blowup_class == ShrinkerName::BrakkeSpoon)
    throw ContinuationUnsupported(
        "spoon collapse leaves a free end-point, outside the classical restart");
  if (*ev.blowup_class != ShrinkerName::StandardLens &&
      *ev.blowup_class != ShrinkerName::Fish)
    throw ContinuationUnsupported(std::string("no continuation rule for ") +
                                  to_string(*ev.blowup_class));
  if (ev.curves.size() != 2 || net.junctions.size() != 2)
    throw ContinuationUnsupported("region boundary is not a two-arc loop");

  std::array<Incidence, 2> ext{};
  for (size_t ji = 0; ji < 2; ++ji) {
    size_t found = 0;
    for (const Incidence& inc : net.junctions[ji].incident)
      if (inc.curve != ev.curves[0] && inc.curve != ev.curves[1]) {
        ext[ji] = inc;
        ++found;
      }
    if (found != 1)
      throw ContinuationUnsupported("junction not shaped as loop plus one arc");
  }

  // everything of the collapsed region sits inside this radius; the
  // surviving arcs are trimmed back to its rim before the join
  double r_trim = 0.0;
  for (size_t ci : ev.curves)
    for (const Point2& p : net.curves[ci].nodes)
      r_trim = std::max(r_trim, distance(p, ev.location));
  r_trim *= 1.5;

  if (ext[0].curve == ext[1].curve) {
    // both surviving ends belong to one arc: close it through the collapse
    std::vector<Point2> pts = net.curves[ext[0].curve].nodes;
    size_t lo = 0, hi = pts.size();
    while (lo < hi && distance(pts[lo], ev.location) <= r_trim) ++lo;
    while (hi > lo && distance(pts[hi - 1], ev.location) <= r_trim) --hi;
    if (hi - lo < 3)
      throw ContinuationUnsupported(
          "surviving arc swallowed by the collapse region");
    std::vector<Point2> ring(pts.begin() + long(lo), pts.begin() + long(hi));
    ring.push_back(ev.location);
    Network out;
    out.domain = net.domain;
    out.curves.push_back(curve_of(std::move(ring), true));
    out.update_all_geometry();
    return out;
  }

  auto trimmed = [&](const Incidence& inc) {
    std::vector<Point2> pts = net.curves[inc.curve].nodes;
    if (inc.end == CurveEnd::Start) std::reverse(pts.begin(), pts.end());
    while (!pts.empty() && distance(pts.back(), ev.location) <= r_trim)
      pts.pop_back();
    if (pts.size() < 2)
      throw ContinuationUnsupported(
          "surviving arc swallowed by the collapse region");
    return pts;  // runs far anchor to rim
  };
  std::vector<Point2> a = trimmed(ext[0]);
  const std::vector<Point2> b = trimmed(ext[1]);
  a.push_back(ev.location);
  for (size_t i = b.size(); i-- > 0;) a.push_back(b[i]);

  Network out;
  out.domain = net.domain;
  out.curves.push_back(curve_of(std::move(a)));
  for (const Endpoint& e : net.endpoints) {
    if (e.incident.curve == ext[0].curve)
      out.endpoints.push_back({e.position, {0, CurveEnd::Start}});
    else if (e.incident.curve == ext[1].curve)
      out.endpoints.push_back({e.position, {0, CurveEnd::End}});
  }
  out.update_all_geometry();
  return out;
}

// One flow leg ends at the first detected event; the driver below strings
// legs together across standard transitions and region continuations.
struct TransitionRunConfig {
  StepControl control;
  StopSpec stop;  // stop_event is reserved for detection; max_steps is per leg
  size_t max_transitions = 8;
  double delta_factor = 8.0;  // inserted length, in units of h_target
  bool continue_regions = true;
};

struct TransitionRun {
  std::vector<DiagnosticsSample> samples;
  std::vector<Snapshot> snapshots;
  std::vector<SingularEvent> events;
  std::vector<TransitionRecord> transitions;
  std::optional<BoundaryTransitionReport> boundary;
  FlowState state;
  StopReason reason = StopReason::MaxTime;
  bool halted_on_singularity = false;
};

inline TransitionRun run_with_transitions(Network net0,
                                          const TransitionRunConfig& cfg) {
  TransitionRun out;
  FlowState st = make_flow_state(std::move(net0), cfg.control);
  size_t restarts = 0;
  std::vector<DiagnosticsSample> leg;  // history for collapse-time fits

  while (true) {
    const SingularityThresholds th = mesh_scale_thresholds(st.h_target);
    std::optional<SingularEvent> ev;
    StopSpec stop = cfg.stop;
    const auto user_stop = cfg.stop.stop_event;
    stop.stop_event = [&](const FlowState& s) {
      ev = detect(s, th, leg);
      if (ev) return true;
      return user_stop && user_stop(s);
    };

    FlowTrajectory traj = run_until(st, cfg.control, stop);
    for (DiagnosticsSample& s : traj.samples) {
      if (!out.samples.empty() && !(s.t > out.samples.back().t)) continue;
      leg.push_back(s);
      out.samples.push_back(std::move(s));
    }
    if (cfg.stop.keep_snapshots)
      out.snapshots.insert(out.snapshots.end(), traj.snapshots.begin(),
                           traj.snapshots.end());
    out.reason = traj.reason;
    if (traj.reason != StopReason::Event || !ev) break;

    out.events.push_back(*ev);
    if (ev->kind == SingularKind::InternalCurveCollapse &&
        restarts < cfg.max_transitions) {
      auto [next, rec] = standard_transition(
          st.network, ev->curves[0], cfg.delta_factor * st.h_target, st.t);
      out.transitions.push_back(rec);
      st = make_flow_state(std::move(next), cfg.control, st.t);
      if (cfg.stop.keep_snapshots) out.snapshots.push_back({st.t, st.network});
      ++restarts;
      leg.clear();
      continue;
    }
    if (ev->kind == SingularKind::RegionCollapse && cfg.continue_regions &&
        restarts < cfg.max_transitions) {
      try {
        Network next = region_collapse_continuation(st.network, *ev);
        st = make_flow_state(std::move(next), cfg.control,
                             std::max(ev->T, st.t));
        if (cfg.stop.keep_snapshots)
          out.snapshots.push_back({st.t, st.network});
        ++restarts;
        leg.clear();
        continue;
      } catch (const ContinuationUnsupported&) {
        // fall through to the halt below
      }
    }
    if (ev->kind == SingularKind::BoundaryCurveCollapse)
      out.boundary = boundary_transition(st.network, ev->curves[0]);
    out.halted_on_singularity = true;
    break;
  }
  out.state = std::move(st);
  return out;
}

}  // namespace curvnet
