#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "curvnet/errors.hpp"
#include "curvnet/geometry.hpp"
#include "curvnet/network.hpp"

namespace curvnet {

inline constexpr double kEmbeddednessCap = 6.928203230275509;  // 4*sqrt(3)

struct PairLocation {
  size_t curve = 0;
  size_t node = 0;
  bool on_loop = false;
  bool is_junction = false;
  bool is_endpoint = false;
};

struct EmbeddednessReport {
  double E = kEmbeddednessCap;
  Point2 p, q;
  PairLocation p_loc, q_loc;
  double A_pq = 0.0;
  double psi = 0.0;
  double ambient_area = 0.0;      // loop-face area A when the psi branch fired
  double alpha_p = 0.0;           // angle chord-vs-tangent at p, in (0, pi)
  double alpha_q = 0.0;
  bool used_psi_branch = false;
  bool pair_is_junction_diagonal = true;  // no pair beat the 4*sqrt(3) value
};

struct EmbeddednessOptions {
  bool validate = true;  // reject non-embedded input
  bool refine = true;    // sub-node polish of the minimizing pair
};

inline void refine_pair(const Network& net, EmbeddednessReport& rep,
                        std::vector<Point2> path, double tol);

namespace emb_detail {

struct NodeRef {
  size_t curve, node;
  Point2 pos;
  bool junction = false, endpoint = false;
  unsigned loop_mask = 0;
};

// Arc of one curve between two graph vertices, referenced without copying.
struct Arc {
  int va, vb;
  size_t curve;
  size_t i0, i1;     // node index range walked from i0 toward i1
  bool wraps;        // closed-curve arc passing through node 0
};

struct FaceInfo {
  std::vector<std::vector<Point2>> polys;
  std::vector<double> loop_area;
  std::vector<double> face_area;   // loop area minus direct children
  double outer_area = -1.0;        // < 0 when no usable domain
};

inline FaceInfo build_faces(const Network& net, const std::vector<Loop>& loops) {
  FaceInfo f;
  const size_t n = loops.size();
  f.polys.resize(n);
  f.loop_area.assign(n, 0.0);
  f.face_area.assign(n, 0.0);
  std::vector<int> parent(n, -1);
  for (size_t i = 0; i < n; ++i) {
    f.polys[i] = loop_polygon(net, loops[i]);
    f.loop_area[i] = loops[i].area;
  }
  for (size_t i = 0; i < n; ++i) {
    Point2 c{0, 0};
    for (const Point2& p : f.polys[i]) c += p;
    c = c / double(f.polys[i].size());
    for (size_t j = 0; j < n; ++j) {
      if (i == j || loops[j].area <= loops[i].area) continue;
      if (point_in_polygon(c, f.polys[j]))
        if (parent[i] < 0 || loops[j].area < loops[size_t(parent[i])].area)
          parent[i] = int(j);
    }
  }
  double top_total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    f.face_area[i] = loops[i].area;
    if (parent[i] < 0) top_total += loops[i].area;
  }
  for (size_t i = 0; i < n; ++i)
    if (parent[i] >= 0) f.face_area[size_t(parent[i])] -= loops[i].area;
  if (!net.domain.vertices.empty()) {
    const double outer = net.domain.area() - top_total;
    if (outer > 0.0) f.outer_area = outer;
  }
  return f;
}

// Face area of the complement component containing the point. The innermost
// containing loop is the one of smallest loop area. Outside all loops the
// outer-face area is returned; it is < 0 when no domain bounds it.
inline double locate_face_area(const FaceInfo& f, Point2 p) {
  int best = -1;
  for (size_t i = 0; i < f.polys.size(); ++i)
    if (point_in_polygon(p, f.polys[i]))
      if (best < 0 || f.loop_area[i] < f.loop_area[size_t(best)]) best = int(i);
  return best >= 0 ? f.face_area[size_t(best)] : f.outer_area;
}

inline bool point_near_polygon(Point2 p, const std::vector<Point2>& poly,
                               double eps) {
  for (size_t i = 0; i < poly.size(); ++i)
    if (detail::point_segment_distance(p, poly[i],
                                       poly[(i + 1) % poly.size()]) <= eps)
      return true;
  return false;
}

// Ambient face for a pair sharing a loop. Chords hugging the loop boundary
// defeat a bare point-in-polygon test at the midpoint, so loops the pair
// actually lies on are tried first, accepting near-boundary midpoints.
inline double ambient_face_area(const FaceInfo& f,
                                const std::vector<Loop>& loops,
                                unsigned shared_mask, Point2 mid, double eps) {
  int pick = -1;
  for (size_t li = 0; li < loops.size(); ++li) {
    if (!(shared_mask & (1u << li))) continue;
    if (pick >= 0 && f.loop_area[li] >= f.loop_area[size_t(pick)]) continue;
    if (point_in_polygon(mid, f.polys[li]) ||
        point_near_polygon(mid, f.polys[li], eps))
      pick = int(li);
  }
  return pick >= 0 ? f.face_area[size_t(pick)] : locate_face_area(f, mid);
}

struct PathWalker {
  const Network* net;
  std::vector<const Arc*> arcs;
  std::vector<bool> reversed;

  template <typename Emit>
  void walk(Emit&& emit) const {
    for (size_t a = 0; a < arcs.size(); ++a) {
      const Arc& arc = *arcs[a];
      const Curve& c = net->curves[arc.curve];
      const size_t n = c.nodes.size();
      if (!arc.wraps) {
        if (!reversed[a]) {
          for (size_t i = arc.i0 + 1; i <= arc.i1; ++i) emit(c.nodes[i]);
        } else {
          for (size_t i = arc.i1; i-- > arc.i0;) emit(c.nodes[i]);
        }
      } else {
        if (!reversed[a]) {
          for (size_t i = (arc.i0 + 1) % n;; i = (i + 1) % n) {
            emit(c.nodes[i]);
            if (i == arc.i1) break;
          }
        } else {
          for (size_t i = (arc.i1 + n - 1) % n;; i = (i + n - 1) % n) {
            emit(c.nodes[i]);
            if (i == arc.i0) break;
          }
        }
      }
    }
  }

  // Shoelace over the path plus the chord back from q to p.
  double polygon_area_abs(Point2 p_first, Point2 q_last) const {
    double acc = 0.0;
    Point2 prev = p_first;
    walk([&](Point2 nxt) {
      acc += cross(prev, nxt);
      prev = nxt;
    });
    acc += cross(prev, q_last);
    acc += cross(q_last, p_first);
    return 0.5 * std::fabs(acc);
  }

  std::vector<Point2> materialize(Point2 p_first, Point2 q_last) const {
    std::vector<Point2> pts{p_first};
    walk([&](Point2 nxt) { pts.push_back(nxt); });
    pts.push_back(q_last);
    return pts;
  }
};

inline double circuit_area(const std::vector<Point2>& pts) {
  double acc = 0.0;
  for (size_t i = 0; i < pts.size(); ++i)
    acc += cross(pts[i], pts[(i + 1) % pts.size()]);
  return 0.5 * std::fabs(acc);
}

// Chord-tangent angles at the minimizing pair. Each angle sits between the
// chord toward the partner and the curve tangent oriented away from the
// walked path, past its endpoint. At a minimizer whose chord meets the curve
// in convex contact this orientation makes the first-order relation read
// cot(alpha) = -(E/4) cos(pi A_pq / A) at both ends with equal angles.
// Optional hints replace the coarse path-edge directions with exact segment
// tangents; only their sign is taken from the path.
inline void assign_contact_angles(EmbeddednessReport& rep,
                                  const std::vector<Point2>& pts,
                                  Point2 tp_hint = {0.0, 0.0},
                                  Point2 tq_hint = {0.0, 0.0}) {
  const size_t n = pts.size();
  if (n < 2) return;

  size_t j = 1;
  while (j + 1 < n && norm2(pts[j] - pts.front()) == 0.0) ++j;
  size_t k = n - 2;
  while (k > 0 && norm2(pts[k] - pts.back()) == 0.0) --k;

  Point2 dep = normalized(pts[j] - pts.front());
  Point2 arr = normalized(pts.back() - pts[k]);
  if (norm2(tp_hint) > 0.0)
    dep = dot(tp_hint, dep) >= 0.0 ? normalized(tp_hint)
                                   : normalized(tp_hint) * -1.0;
  if (norm2(tq_hint) > 0.0)
    arr = dot(tq_hint, arr) >= 0.0 ? normalized(tq_hint)
                                   : normalized(tq_hint) * -1.0;

  const Point2 chord = normalized(rep.q - rep.p);
  rep.alpha_p = std::acos(std::clamp(dot(chord, dep * -1.0), -1.0, 1.0));
  rep.alpha_q = std::acos(std::clamp(dot(chord * -1.0, arr), -1.0, 1.0));
}

}  // namespace emb_detail

// Exhaustive admissible-pair search for the embeddedness measure. Pairs are
// scanned in increasing chord length so the |pq|^2 / A_bound lower bound
// prunes the whole tail with one break.
inline EmbeddednessReport embeddedness_measure(
    const Network& net, const EmbeddednessOptions& opts = {}) {
  using emb_detail::Arc;
  using emb_detail::NodeRef;

  if (opts.validate) validate_network(net, true);

  const double diam = net.diameter();
  if (diam <= 0.0) throw InvalidArgument("degenerate network");
  const double tol = 1e-9 * diam;

  const std::vector<Loop> loops = extract_loops(net);
  const emb_detail::FaceInfo faces = emb_detail::build_faces(net, loops);
  std::vector<unsigned> curve_mask(net.curves.size(), 0);
  for (size_t li = 0; li < loops.size(); ++li)
    for (size_t cid : loops[li].curve_ids) curve_mask[cid] |= 1u << li;

  // candidate points: interior nodes, plus each junction and endpoint once
  std::vector<NodeRef> pts;
  for (size_t ci = 0; ci < net.curves.size(); ++ci) {
    const Curve& c = net.curves[ci];
    const size_t lo = c.closed ? 0 : 1;
    const size_t hi = c.closed ? c.nodes.size() : c.nodes.size() - 1;
    for (size_t ni = lo; ni < hi; ++ni)
      pts.push_back({ci, ni, c.nodes[ni], false, false, curve_mask[ci]});
  }
  for (const Junction& j : net.junctions) {
    unsigned mask = 0;
    for (const Incidence& inc : j.incident) mask |= curve_mask[inc.curve];
    const Incidence& inc = j.incident.front();
    const size_t node =
        inc.end == CurveEnd::Start ? 0 : net.curves[inc.curve].nodes.size() - 1;
    pts.push_back({inc.curve, node, j.position, true, false, mask});
  }
  for (const Endpoint& e : net.endpoints) {
    const size_t node = e.incident.end == CurveEnd::Start
                            ? 0
                            : net.curves[e.incident.curve].nodes.size() - 1;
    pts.push_back({e.incident.curve, node, e.position, false, true,
                   curve_mask[e.incident.curve]});
  }

  // bounding-box area bounds every area a path region can enclose
  double lox = 1e300, hix = -1e300, loy = 1e300, hiy = -1e300;
  for (const Curve& c : net.curves)
    for (const Point2& p : c.nodes) {
      lox = std::min(lox, p.x);
      hix = std::max(hix, p.x);
      loy = std::min(loy, p.y);
      hiy = std::max(hiy, p.y);
    }
  const double a_bound = std::max((hix - lox) * (hiy - loy), 1e-300);

  struct PairIdx {
    double d2;
    unsigned i, j;
  };
  std::vector<PairIdx> order;
  order.reserve(pts.size() * (pts.size() - 1) / 2);
  for (unsigned i = 0; i < pts.size(); ++i)
    for (unsigned j = i + 1; j < pts.size(); ++j) {
      const double d2 = norm2(pts[i].pos - pts[j].pos);
      if (d2 <= tol * tol) continue;
      order.push_back({d2, i, j});
    }
  std::sort(order.begin(), order.end(), [](const PairIdx& a, const PairIdx& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  auto curve_anchor_vertex = [&](size_t ci, CurveEnd end) -> int {
    for (size_t ji = 0; ji < net.junctions.size(); ++ji)
      for (const Incidence& inc : net.junctions[ji].incident)
        if (inc.curve == ci && inc.end == end) return int(ji);
    return -1;  // endpoint anchor: dead vertex
  };

  EmbeddednessReport rep;
  rep.E = kEmbeddednessCap;
  std::vector<Point2> best_path;

  for (const PairIdx& pr : order) {
    if (pr.d2 / a_bound >= rep.E) break;
    const NodeRef& P = pts[pr.i];
    const NodeRef& Q = pts[pr.j];

    if (segment_hits_network(P.pos, Q.pos, net.curves, {P.pos, Q.pos}, tol))
      continue;

    // graph vertices: 0..1 junctions, 2 = P, 3 = Q (junction points alias)
    const int vP = P.junction
                       ? curve_anchor_vertex(P.curve, P.node == 0
                                                          ? CurveEnd::Start
                                                          : CurveEnd::End)
                       : 2;
    const int vQ = Q.junction
                       ? curve_anchor_vertex(Q.curve, Q.node == 0
                                                          ? CurveEnd::Start
                                                          : CurveEnd::End)
                       : 3;
    if (vP < 0 || vQ < 0 || vP == vQ) continue;

    std::vector<Arc> arcs;
    for (size_t ci = 0; ci < net.curves.size(); ++ci) {
      const Curve& c = net.curves[ci];
      const size_t last = c.nodes.size() - 1;
      std::vector<std::pair<size_t, int>> cuts;
      if (!c.closed) {
        int v_start = curve_anchor_vertex(ci, CurveEnd::Start);
        int v_end = curve_anchor_vertex(ci, CurveEnd::End);
        if (!P.junction && P.curve == ci) {
          if (P.node == 0) v_start = 2;
          if (P.node == last) v_end = 2;
        }
        if (!Q.junction && Q.curve == ci) {
          if (Q.node == 0) v_start = 3;
          if (Q.node == last) v_end = 3;
        }
        cuts.push_back({0, v_start});
        if (!P.junction && P.curve == ci && P.node > 0 && P.node < last)
          cuts.push_back({P.node, 2});
        if (!Q.junction && Q.curve == ci && Q.node > 0 && Q.node < last)
          cuts.push_back({Q.node, 3});
        cuts.push_back({last, v_end});
      } else {
        if (P.curve == ci && !P.junction) cuts.push_back({P.node, 2});
        if (Q.curve == ci && !Q.junction) cuts.push_back({Q.node, 3});
        if (cuts.size() < 2) continue;  // unreachable floating loop
      }
      std::sort(cuts.begin(), cuts.end());
      if (c.closed) {
        for (size_t k = 0; k < cuts.size(); ++k) {
          const auto& a = cuts[k];
          const auto& b = cuts[(k + 1) % cuts.size()];
          arcs.push_back({a.second, b.second, ci, a.first, b.first,
                          k + 1 == cuts.size()});
        }
      } else {
        for (size_t k = 0; k + 1 < cuts.size(); ++k)
          if (cuts[k].first != cuts[k + 1].first)
            arcs.push_back({cuts[k].second, cuts[k + 1].second, ci,
                            cuts[k].first, cuts[k + 1].first, false});
      }
    }

    double a_pq = std::numeric_limits<double>::infinity();
    emb_detail::PathWalker walker{&net, {}, {}};
    emb_detail::PathWalker best_walker{&net, {}, {}};
    std::vector<bool> vertex_used(4, false);

    std::function<void(int)> dfs = [&](int v) {
      for (const Arc& arc : arcs) {
        int nxt = -1;
        bool rev = false;
        if (arc.va == v && arc.vb >= 0) {
          nxt = arc.vb;
        } else if (arc.vb == v && arc.va >= 0) {
          nxt = arc.va;
          rev = true;
        } else {
          continue;
        }
        if (nxt == v) continue;  // injective paths cannot revisit a point
        if (nxt != vQ && vertex_used[size_t(nxt)]) continue;
        walker.arcs.push_back(&arc);
        walker.reversed.push_back(rev);
        if (nxt == vQ) {
          const double area = walker.polygon_area_abs(P.pos, Q.pos);
          if (area < a_pq) {
            a_pq = area;
            best_walker = walker;
          }
        } else {
          vertex_used[size_t(nxt)] = true;
          dfs(nxt);
          vertex_used[size_t(nxt)] = false;
        }
        walker.arcs.pop_back();
        walker.reversed.pop_back();
      }
    };
    vertex_used[size_t(vP)] = true;
    dfs(vP);
    if (!std::isfinite(a_pq)) continue;
    if (a_pq <= tol * diam) continue;  // chord hugs its circuit: ratio diverges

    const unsigned shared_mask = P.loop_mask & Q.loop_mask;
    double phi, psi = 0.0, ambient = 0.0;
    bool used_psi = false;
    if (shared_mask != 0) {
      const double A = emb_detail::ambient_face_area(
          faces, loops, shared_mask, (P.pos + Q.pos) / 2.0, tol);
      if (A > 0.0) {
        psi = (A / kPi) * std::sin(kPi * a_pq / A);
        if (psi <= 0.0) continue;  // circuit swallows the whole face
        phi = pr.d2 / psi;
        used_psi = true;
        ambient = A;
      } else {
        phi = pr.d2 / a_pq;
      }
    } else {
      phi = pr.d2 / a_pq;
    }

    if (phi < rep.E) {
      rep.E = phi;
      rep.p = P.pos;
      rep.q = Q.pos;
      rep.p_loc = {P.curve, P.node, P.loop_mask != 0, P.junction, P.endpoint};
      rep.q_loc = {Q.curve, Q.node, Q.loop_mask != 0, Q.junction, Q.endpoint};
      rep.A_pq = a_pq;
      rep.psi = psi;
      rep.ambient_area = ambient;
      rep.used_psi_branch = used_psi;
      rep.pair_is_junction_diagonal = false;
      best_path = best_walker.materialize(P.pos, Q.pos);
    }
  }

  if (!rep.pair_is_junction_diagonal) {
    emb_detail::assign_contact_angles(
        rep, best_path, net.curves[rep.p_loc.curve].tau[rep.p_loc.node],
        net.curves[rep.q_loc.curve].tau[rep.q_loc.node]);
    if (opts.refine && !rep.p_loc.is_junction && !rep.q_loc.is_junction &&
        !rep.p_loc.is_endpoint && !rep.q_loc.is_endpoint &&
        best_path.size() >= 3) {
      refine_pair(net, rep, best_path, tol);
    }
  }
  return rep;
}

// Slides the minimizing pair within the polyline segments adjacent to its
// nodes, keeping the winning path fixed, to polish the ratio and the contact
// angles below node resolution.
inline void refine_pair(const Network& net, EmbeddednessReport& rep,
                        std::vector<Point2> path, double tol) {
  const Curve& cp = net.curves[rep.p_loc.curve];
  const Curve& cq = net.curves[rep.q_loc.curve];
  const size_t ip = rep.p_loc.node, iq = rep.q_loc.node;

  auto neighbor = [](const Curve& c, size_t i,
                     int step) -> std::optional<Point2> {
    const size_t n = c.nodes.size();
    if (c.closed) return c.nodes[(i + n + size_t(int(n) + step) % n) % n];
    if (step < 0 && i == 0) return std::nullopt;
    if (step > 0 && i + 1 == n) return std::nullopt;
    return c.nodes[step < 0 ? i - 1 : i + 1];
  };
  const auto pm = neighbor(cp, ip, -1), pp = neighbor(cp, ip, +1);
  const auto qm = neighbor(cq, iq, -1), qp = neighbor(cq, iq, +1);
  if (!pm || !pp || !qm || !qp) return;

  // u, v in [-1, 1]: position within the two segments flanking each node
  auto place = [](Point2 base, Point2 lo, Point2 hi, double u) {
    return u >= 0.0 ? base + (hi - base) * u : base + (lo - base) * (-u);
  };
  auto eval = [&](double u, double v) {
    std::vector<Point2> pts = path;
    pts.front() = place(cp.nodes[ip], *pm, *pp, u);
    pts.back() = place(cq.nodes[iq], *qm, *qp, v);
    const double a_pq = emb_detail::circuit_area(pts);
    if (a_pq <= tol) return std::numeric_limits<double>::infinity();
    const double d2 = norm2(pts.front() - pts.back());
    if (d2 <= tol * tol) return std::numeric_limits<double>::infinity();
    if (rep.used_psi_branch) {
      const double psi =
          (rep.ambient_area / kPi) * std::sin(kPi * a_pq / rep.ambient_area);
      return psi > 0.0 ? d2 / psi : std::numeric_limits<double>::infinity();
    }
    return d2 / a_pq;
  };

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double u = 0.0, v = 0.0, f = eval(u, v);
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (int coord = 0; coord < 2; ++coord) {
      double lo = -1.0, hi = 1.0;
      auto g = [&](double x) { return coord == 0 ? eval(x, v) : eval(u, x); };
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = g(x1), f2 = g(x2);
      for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = g(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = g(x2);
        }
      }
      const double xbest = (f1 < f2) ? x1 : x2, fbest = std::min(f1, f2);
      if (fbest < f) {
        f = fbest;
        (coord == 0 ? u : v) = xbest;
      }
    }
  }
  if (f >= rep.E) return;

  const Point2 p_new = place(cp.nodes[ip], *pm, *pp, u);
  const Point2 q_new = place(cq.nodes[iq], *qm, *qp, v);
  if (segment_hits_network(p_new, q_new, net.curves, {p_new, q_new}, tol))
    return;

  std::vector<Point2> pts = path;
  pts.front() = p_new;
  pts.back() = q_new;
  rep.E = f;
  rep.p = p_new;
  rep.q = q_new;
  rep.A_pq = emb_detail::circuit_area(pts);
  if (rep.used_psi_branch)
    rep.psi =
        (rep.ambient_area / kPi) * std::sin(kPi * rep.A_pq / rep.ambient_area);
  auto seg_dir = [](const Curve& c, size_t i, double w, Point2 lo, Point2 hi) {
    const Point2 base = c.nodes[i];
    if (std::fabs(w) < 1e-12) return c.tau[i];
    return w > 0 ? normalized(hi - base) : normalized(base - lo);
  };
  // direction signs come from the unmoved path: sliding an endpoint backward
  // would make its stale duplicate read as a reversed edge
  emb_detail::assign_contact_angles(rep, path, seg_dir(cp, ip, u, *pm, *pp),
                                    seg_dir(cq, iq, v, *qm, *qp));
}

// Point reflection of the network through one endpoint; the anchored curve
// and its mirror merge into a single smooth curve through that point.
inline Network reflect_through_endpoint(const Network& net,
                                        size_t endpoint_idx) {
  const Endpoint& ep = net.endpoints[endpoint_idx];
  const Point2 C = ep.position;
  auto mirror = [&](Point2 p) { return C * 2.0 - p; };

  Network out;
  out.curves = net.curves;
  const size_t host = ep.incident.curve;
  const bool flipped = ep.incident.end == CurveEnd::Start;
  if (flipped)
    std::reverse(out.curves[host].nodes.begin(), out.curves[host].nodes.end());

  const size_t ncurves = net.curves.size();
  std::vector<size_t> mirror_id(ncurves);
  for (size_t ci = 0; ci < ncurves; ++ci) {
    if (ci == host) {
      Curve& c = out.curves[host];
      const std::vector<Point2> run = c.nodes;
      for (size_t i = run.size() - 1; i-- > 0;)
        c.nodes.push_back(mirror(run[i]));
      mirror_id[ci] = host;
      continue;
    }
    Curve m = net.curves[ci];
    for (Point2& p : m.nodes) p = mirror(p);
    mirror_id[ci] = out.curves.size();
    out.curves.push_back(std::move(m));
  }

  auto map_end = [&](const Incidence& inc, bool mirrored) -> Incidence {
    if (inc.curve != host)
      return {mirrored ? mirror_id[inc.curve] : inc.curve, inc.end};
    if (mirrored) return {host, CurveEnd::End};
    if (!flipped) return {host, inc.end};
    return {host, inc.end == CurveEnd::End ? CurveEnd::Start : CurveEnd::End};
  };

  for (const Junction& j : net.junctions) {
    Junction a = j;
    for (Incidence& inc : a.incident) inc = map_end(inc, false);
    out.junctions.push_back(a);
    Junction b;
    b.position = mirror(j.position);
    for (const Incidence& inc : j.incident)
      b.incident.push_back(map_end(inc, true));
    out.junctions.push_back(b);
  }
  for (size_t ei = 0; ei < net.endpoints.size(); ++ei) {
    if (ei == endpoint_idx) continue;
    Endpoint a = net.endpoints[ei];
    a.incident = map_end(a.incident, false);
    out.endpoints.push_back(a);
    Endpoint b;
    b.position = mirror(net.endpoints[ei].position);
    b.incident = map_end(net.endpoints[ei].incident, true);
    out.endpoints.push_back(b);
  }
  out.update_all_geometry();
  return out;
}

// Pi = min over endpoints of E(doubled network); E itself when there are no
// endpoints to reflect through.
inline double reflected_measure(const Network& net) {
  EmbeddednessOptions opts;
  opts.validate = false;
  opts.refine = false;
  if (net.endpoints.empty()) return embeddedness_measure(net, opts).E;
  double best = std::numeric_limits<double>::infinity();
  for (size_t ei = 0; ei < net.endpoints.size(); ++ei) {
    const Network doubled = reflect_through_endpoint(net, ei);
    best = std::min(best, embeddedness_measure(doubled, opts).E);
  }
  return best;
}

}  // namespace curvnet
