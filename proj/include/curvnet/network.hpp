#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curvnet/errors.hpp"
#include "curvnet/geometry.hpp"

namespace curvnet {

enum class CurveEnd { Start, End };

struct Incidence {
  size_t curve = 0;
  CurveEnd end = CurveEnd::Start;
  bool operator==(const Incidence& o) const {
    return curve == o.curve && end == o.end;
  }
};

// Triple junction O^p. A curve attached at both ends contributes two
// incidences, so a self-loop plus one other curve fills all three slots.
struct Junction {
  Point2 position;
  std::vector<Incidence> incident;  // exactly 3
};

// Fixed endpoint P^r on the domain boundary.
struct Endpoint {
  Point2 position;
  Incidence incident;
};

enum class TopologyTag { Tree, Lens, Island, Theta, EyeglassesA, EyeglassesB };

inline const char* to_string(TopologyTag t) {
  switch (t) {
    case TopologyTag::Tree: return "Tree";
    case TopologyTag::Lens: return "Lens";
    case TopologyTag::Island: return "Island";
    case TopologyTag::Theta: return "Theta";
    case TopologyTag::EyeglassesA: return "EyeglassesA";
    case TopologyTag::EyeglassesB: return "EyeglassesB";
  }
  return "?";
}

// Jordan loop in the network. m counts the constituent curves; a free
// closed curve (no junction on it) is bookkept with m = 0.
struct Loop {
  std::vector<size_t> curve_ids;
  int m = 0;
  double area = 0.0;
  double length = 0.0;
};

struct Network {
  std::vector<Curve> curves;
  std::vector<Junction> junctions;   // at most 2
  std::vector<Endpoint> endpoints;   // 0, 2, or 4
  ConvexDomain domain;               // may be empty for templates

  Point2 end_position(const Incidence& inc) const {
    const Curve& c = curves[inc.curve];
    return inc.end == CurveEnd::Start ? c.nodes.front() : c.nodes.back();
  }

  double total_length() const {
    double L = 0.0;
    for (const Curve& c : curves) L += c.length();
    return L;
  }

  double min_segment() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Curve& c : curves) m = std::min(m, c.min_segment());
    return m;
  }

  double max_segment() const {
    double m = 0.0;
    for (const Curve& c : curves) m = std::max(m, c.max_segment());
    return m;
  }

  double diameter() const {
    double lox = std::numeric_limits<double>::infinity(), hix = -lox;
    double loy = lox, hiy = -lox;
    for (const Curve& c : curves)
      for (const Point2& p : c.nodes) {
        lox = std::min(lox, p.x);
        hix = std::max(hix, p.x);
        loy = std::min(loy, p.y);
        hiy = std::max(hiy, p.y);
      }
    if (curves.empty()) return 0.0;
    return std::hypot(hix - lox, hiy - loy);
  }

  void update_all_geometry() {
    for (Curve& c : curves) update_geometry(c);
  }
};

// Uniformly scaled copy about the origin.
inline Network scaled_copy(Network net, double factor) {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  for (Curve& c : net.curves)
    for (Point2& p : c.nodes) p = p * factor;
  for (Junction& j : net.junctions) j.position = j.position * factor;
  for (Endpoint& e : net.endpoints) e.position = e.position * factor;
  for (Point2& v : net.domain.vertices) v = v * factor;
  net.update_all_geometry();
  return net;
}

// Copy rotated about the origin by the given angle.
inline Network rotated_copy(Network net, double angle) {
  for (Curve& c : net.curves)
    for (Point2& p : c.nodes) p = rotate(p, angle);
  for (Junction& j : net.junctions) j.position = rotate(j.position, angle);
  for (Endpoint& e : net.endpoints) e.position = rotate(e.position, angle);
  for (Point2& v : net.domain.vertices) v = rotate(v, angle);
  net.update_all_geometry();
  return net;
}

// Second-order one-sided tangent pointing away from the given end into the
// curve body; this is the discrete exterior tangent of the Herring sum.
inline Point2 exterior_tangent(const Network& net, const Incidence& inc) {
  const Curve& c = net.curves[inc.curve];
  if (c.tau.empty()) throw DegenerateCurve("geometry not updated");
  return inc.end == CurveEnd::Start ? c.tau.front() : c.tau.back() * -1.0;
}

inline double max_abs_curvature(const Network& net) {
  double m = 0.0;
  for (const Curve& c : net.curves)
    for (double v : c.k) m = std::max(m, std::fabs(v));
  return m;
}

// Trapezoidal node masses (h_{i-1}+h_i)/2, halved at open ends.
inline std::vector<double> node_masses(const Curve& c) {
  const size_t n = c.nodes.size();
  std::vector<double> mass(n, 0.0);
  auto h = [&](size_t i) { return distance(c.nodes[i], c.nodes[(i + 1) % n]); };
  if (c.closed) {
    for (size_t i = 0; i < n; ++i) mass[i] = 0.5 * (h((i + n - 1) % n) + h(i));
  } else {
    mass[0] = 0.5 * h(0);
    mass[n - 1] = 0.5 * h(n - 2);
    for (size_t i = 1; i + 1 < n; ++i) mass[i] = 0.5 * (h(i - 1) + h(i));
  }
  return mass;
}

inline double curvature_square_integral(const Network& net) {
  double acc = 0.0;
  for (const Curve& c : net.curves) {
    const std::vector<double> mass = node_masses(c);
    for (size_t i = 0; i < c.k.size(); ++i) acc += mass[i] * c.k[i] * c.k[i];
  }
  return acc;
}

namespace detail {

inline bool is_self_loop(const Network& net, size_t idx) {
  if (net.curves[idx].closed) return true;
  for (const Junction& j : net.junctions) {
    int cnt = 0;
    for (const Incidence& inc : j.incident)
      if (inc.curve == idx) ++cnt;
    if (cnt == 2) return true;
  }
  return false;
}

}  // namespace detail

// Concatenated node polygon of a loop, oriented counterclockwise; the
// duplicate junction node between consecutive curves is dropped.
inline std::vector<Point2> loop_polygon(const Network& net, const Loop& loop) {
  std::vector<Point2> poly;
  if (loop.curve_ids.size() == 1) {
    const Curve& c = net.curves[loop.curve_ids[0]];
    poly = c.nodes;
    if (!c.closed) poly.pop_back();  // self-loop: last node repeats the first
  } else if (loop.curve_ids.size() == 2) {
    const Curve& a = net.curves[loop.curve_ids[0]];
    const Curve& b = net.curves[loop.curve_ids[1]];
    // both curves run between the same two junctions; traverse a forward
    // and b backward (matching ends), dropping duplicated junction nodes
    poly.assign(a.nodes.begin(), a.nodes.end() - 1);
    const bool b_reversed = distance(b.nodes.back(), a.nodes.back()) <
                            distance(b.nodes.front(), a.nodes.back());
    if (b_reversed) {
      for (size_t i = b.nodes.size(); i-- > 1;) poly.push_back(b.nodes[i]);
    } else {
      for (size_t i = 0; i + 1 < b.nodes.size(); ++i) poly.push_back(b.nodes[i]);
    }
  } else {
    throw UnsupportedTopology("loops have at most two curves");
  }
  if (signed_polygon_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

// All minimal Jordan loops: self-loop curves, pairs of junction-to-junction
// parallel curves (for theta, the two cells sharing the middle curve).
inline std::vector<Loop> extract_loops(const Network& net) {
  std::vector<Loop> loops;
  std::vector<size_t> parallel;  // open curves joining the two junctions

  for (size_t i = 0; i < net.curves.size(); ++i) {
    if (detail::is_self_loop(net, i)) {
      Loop l;
      l.curve_ids = {i};
      l.m = net.curves[i].closed ? 0 : 1;
      l.length = net.curves[i].length();
      l.area = polygon_area(loop_polygon(net, l), false);
      loops.push_back(std::move(l));
      continue;
    }
    if (net.junctions.size() == 2) {
      int touches = 0;
      for (const Junction& j : net.junctions)
        for (const Incidence& inc : j.incident)
          if (inc.curve == i) ++touches;
      if (touches == 2) parallel.push_back(i);
    }
  }

  if (parallel.size() == 2) {
    Loop l;
    l.curve_ids = parallel;
    l.m = 2;
    l.length = net.curves[parallel[0]].length() + net.curves[parallel[1]].length();
    l.area = polygon_area(loop_polygon(net, l), false);
    loops.push_back(std::move(l));
  } else if (parallel.size() == 3) {
    // theta: keep the two smallest-area pairs (the planar faces)
    std::vector<Loop> cand;
    for (size_t a = 0; a < 3; ++a)
      for (size_t b = a + 1; b < 3; ++b) {
        Loop l;
        l.curve_ids = {parallel[a], parallel[b]};
        l.m = 2;
        l.length = net.curves[parallel[a]].length() +
                   net.curves[parallel[b]].length();
        l.area = polygon_area(loop_polygon(net, l), false);
        cand.push_back(std::move(l));
      }
    std::sort(cand.begin(), cand.end(),
              [](const Loop& x, const Loop& y) { return x.area < y.area; });
    cand.pop_back();
    loops.insert(loops.end(), cand.begin(), cand.end());
  }
  std::sort(loops.begin(), loops.end(), [](const Loop& x, const Loop& y) {
    return x.curve_ids < y.curve_ids;
  });
  return loops;
}

struct JunctionAngles {
  std::array<double, 3> pairwise{};  // radians between exterior tangents
  double max_deviation = 0.0;        // from 2*pi/3
  double tangent_sum_norm = 0.0;
};

struct RegularityReport {
  bool pass = true;
  double max_deviation = 0.0;  // radians, worst junction
  std::vector<JunctionAngles> junctions;
};

inline RegularityReport validate_regular(const Network& net,
                                         double angle_tol = 0.5 * kPi / 180.0) {
  RegularityReport rep;
  for (const Junction& j : net.junctions) {
    if (j.incident.size() != 3)
      throw UnsupportedTopology("junction without three incidences");
    std::array<Point2, 3> t;
    for (int i = 0; i < 3; ++i) t[i] = exterior_tangent(net, j.incident[i]);
    JunctionAngles ja;
    Point2 sum{0, 0};
    int slot = 0;
    for (int a = 0; a < 3; ++a) {
      sum += t[a];
      for (int b = a + 1; b < 3; ++b) {
        const double ang =
            std::acos(std::clamp(dot(t[a], t[b]), -1.0, 1.0));
        ja.pairwise[slot++] = ang;
        ja.max_deviation =
            std::max(ja.max_deviation, std::fabs(ang - 2.0 * kPi / 3.0));
      }
    }
    ja.tangent_sum_norm = norm(sum);
    rep.max_deviation = std::max(rep.max_deviation, ja.max_deviation);
    rep.junctions.push_back(ja);
  }
  rep.pass = rep.max_deviation <= angle_tol;
  return rep;
}

inline TopologyTag classify_topology(const Network& net) {
  if (net.junctions.size() != 2)
    throw UnsupportedTopology("classification needs two triple junctions");
  size_t n_closed = 0;
  for (size_t i = 0; i < net.curves.size(); ++i)
    if (detail::is_self_loop(net, i)) ++n_closed;
  const size_t n_end = net.endpoints.size();
  const size_t n_curves = net.curves.size();

  if (n_closed == 0 && n_end == 0 && n_curves == 3) return TopologyTag::Theta;
  if (n_closed == 0 && n_end == 2 && n_curves == 4) return TopologyTag::Lens;
  if (n_closed == 0 && n_end == 4 && n_curves == 5) return TopologyTag::Tree;
  if (n_closed == 1 && n_end == 2 && n_curves == 4) return TopologyTag::Island;
  if (n_closed == 2 && n_end == 0 && n_curves == 3) {
    // nested loops -> type B, loops in each other's exterior -> type A
    std::vector<size_t> loops_idx;
    for (size_t i = 0; i < n_curves; ++i)
      if (detail::is_self_loop(net, i)) loops_idx.push_back(i);
    Loop l0, l1;
    l0.curve_ids = {loops_idx[0]};
    l1.curve_ids = {loops_idx[1]};
    const std::vector<Point2> p0 = loop_polygon(net, l0);
    const std::vector<Point2> p1 = loop_polygon(net, l1);
    auto probe = [](const std::vector<Point2>& poly) {
      Point2 acc{0, 0};
      for (const Point2& p : poly) acc += p;
      return acc / double(poly.size());
    };
    const bool zero_in_one = point_in_polygon(probe(p0), p1);
    const bool one_in_zero = point_in_polygon(probe(p1), p0);
    return (zero_in_one || one_in_zero) ? TopologyTag::EyeglassesB
                                        : TopologyTag::EyeglassesA;
  }
  throw UnsupportedTopology("no matching two-junction topology row");
}

// --- structural validation ----------------------------------------------

// Checks anchoring, incidence counts, connectivity, embeddedness of curve
// interiors, endpoint placement, and collinearity of endpoints. Throws on
// the first violation.
inline void validate_network(const Network& net, bool check_embedded = true) {
  if (net.curves.empty()) throw InvalidArgument("network has no curves");
  if (net.junctions.size() > 2)
    throw UnsupportedTopology("more than two junctions");
  const double diam = net.diameter();
  const double tol = 1e-9 * std::max(diam, 1e-30);

  // each open curve end is anchored exactly once
  std::vector<std::array<int, 2>> anchor_count(net.curves.size(), {0, 0});
  for (const Junction& j : net.junctions) {
    if (j.incident.size() != 3)
      throw UnsupportedTopology("junction needs exactly three incidences");
    for (const Incidence& inc : j.incident) {
      if (inc.curve >= net.curves.size())
        throw InvalidArgument("incidence names a missing curve");
      if (net.curves[inc.curve].closed)
        throw InvalidArgument("closed curve cannot join a junction");
      anchor_count[inc.curve][inc.end == CurveEnd::End] += 1;
      if (distance(net.end_position(inc), j.position) > tol)
        throw InvalidArgument("curve end detached from its junction");
    }
  }
  for (const Endpoint& e : net.endpoints) {
    if (e.incident.curve >= net.curves.size())
      throw InvalidArgument("endpoint names a missing curve");
    anchor_count[e.incident.curve][e.incident.end == CurveEnd::End] += 1;
    if (distance(net.end_position(e.incident), e.position) > tol)
      throw InvalidArgument("curve end detached from its endpoint");
    if (!net.domain.vertices.empty() &&
        !net.domain.on_boundary(e.position, 1e-6 * std::max(diam, 1e-30)))
      throw InvalidArgument("endpoint off the domain boundary");
  }
  for (size_t i = 0; i < net.curves.size(); ++i) {
    if (net.curves[i].closed) {
      if (anchor_count[i][0] + anchor_count[i][1] != 0)
        throw InvalidArgument("closed curve with anchors");
      continue;
    }
    if (anchor_count[i][0] != 1 || anchor_count[i][1] != 1)
      throw InvalidArgument("open curve end not anchored exactly once");
  }

  // endpoints pairwise distinct, no three collinear
  for (size_t i = 0; i < net.endpoints.size(); ++i)
    for (size_t j = i + 1; j < net.endpoints.size(); ++j) {
      if (distance(net.endpoints[i].position, net.endpoints[j].position) <= tol)
        throw InvalidArgument("coincident endpoints");
      for (size_t k = j + 1; k < net.endpoints.size(); ++k) {
        const Point2 u = net.endpoints[j].position - net.endpoints[i].position;
        const Point2 v = net.endpoints[k].position - net.endpoints[i].position;
        if (std::fabs(cross(u, v)) <= tol * diam)
          throw InvalidArgument("three collinear endpoints");
      }
    }

  // connectivity across shared anchors
  if (net.curves.size() > 1) {
    std::vector<size_t> comp(net.curves.size());
    for (size_t i = 0; i < comp.size(); ++i) comp[i] = i;
    std::function<size_t(size_t)> find = [&](size_t x) {
      while (comp[x] != x) x = comp[x] = comp[comp[x]];
      return x;
    };
    for (const Junction& j : net.junctions)
      for (size_t a = 1; a < j.incident.size(); ++a)
        comp[find(j.incident[a].curve)] = find(j.incident[0].curve);
    const size_t root = find(0);
    for (size_t i = 1; i < net.curves.size(); ++i)
      if (find(i) != root) throw InvalidArgument("network not connected");
  }

  if (check_embedded) {
    // each curve simple, and distinct curves meet only near shared anchors
    std::vector<Point2> anchors;
    for (const Junction& j : net.junctions) anchors.push_back(j.position);
    for (const Endpoint& e : net.endpoints) anchors.push_back(e.position);
    for (const Curve& c : net.curves) {
      if (!c.closed && c.nodes.size() > 3 &&
          distance(c.nodes.front(), c.nodes.back()) <= tol) {
        // self-loop: ends meet at a junction by construction, so test the
        // ring with the duplicate node dropped
        std::vector<Point2> ring(c.nodes.begin(), c.nodes.end() - 1);
        if (polyline_self_intersects(ring, true, tol))
          throw NotEmbedded("curve crosses itself");
      } else if (polyline_self_intersects(c.nodes, c.closed, tol)) {
        throw NotEmbedded("curve crosses itself");
      }
    }
    Point2 hits[2];
    for (size_t i = 0; i < net.curves.size(); ++i)
      for (size_t j = i + 1; j < net.curves.size(); ++j) {
        const Curve& ca = net.curves[i];
        const Curve& cb = net.curves[j];
        const size_t na = ca.nodes.size(), nb = cb.nodes.size();
        for (size_t si = 0; si < ca.segment_count(); ++si)
          for (size_t sj = 0; sj < cb.segment_count(); ++sj) {
            const int m = detail::segment_intersection_points(
                ca.nodes[si], ca.nodes[(si + 1) % na], cb.nodes[sj],
                cb.nodes[(sj + 1) % nb], tol, hits);
            for (int h = 0; h < m; ++h) {
              bool at_anchor = false;
              for (const Point2& a : anchors)
                if (distance(hits[h], a) <= 2.0 * tol) at_anchor = true;
              if (!at_anchor) throw NotEmbedded("curves cross away from anchors");
            }
          }
      }
  }
}

}  // namespace curvnet
