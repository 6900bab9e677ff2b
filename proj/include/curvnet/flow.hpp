#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "curvnet/diagnostics.hpp"
#include "curvnet/errors.hpp"
#include "curvnet/geometry.hpp"
#include "curvnet/network.hpp"
#include "curvnet/numerics.hpp"

namespace curvnet {

struct StepControl {
  double cfl = 0.4;              // fraction of the parabolic limit dt <= cfl h^2
  double dt_max = std::numeric_limits<double>::infinity();
  size_t target_nodes = 60;      // per-curve resolution at initialisation
  size_t min_nodes = 12;
  double remesh_ratio = 3.0;     // max/min segment ratio that forces a resample
  double equidistribution = 0.4; // tangential relaxation strength, in [0, 1)
  size_t junction_max_iters = 50;
  double junction_tol = 1e-3;    // acceptable |sum of exterior tangents|

  void validate() const {
    if (!(cfl > 0.0 && cfl <= 0.5))
      throw InvalidArgument("cfl must lie in (0, 0.5]");
    if (target_nodes < 8) throw InvalidArgument("target_nodes must be >= 8");
    if (min_nodes < 4) throw InvalidArgument("min_nodes must be >= 4");
    if (!(remesh_ratio > 1.0))
      throw InvalidArgument("remesh_ratio must exceed 1");
    if (!(equidistribution >= 0.0 && equidistribution < 1.0))
      throw InvalidArgument("equidistribution must lie in [0, 1)");
  }
};

struct FlowState {
  Network network;
  double t = 0.0;
  size_t step_index = 0;
  double h_target = 0.0;  // reference spacing, fixed at initialisation
  double last_dt = 0.0;
};

// Tangential node speed that relaxes the imbalance of adjacent spacings
// (their difference is the deviation of both from the local mean). Zero at
// endpoints and junction anchors so boundary conditions stay untouched.
inline std::vector<double> tangential_velocity(const Curve& c,
                                               double cfl = 0.4,
                                               double relax = 0.4) {
  const size_t n = c.nodes.size();
  std::vector<double> lam(n, 0.0);
  if (n < 3) return lam;
  const double hmin = c.min_segment();
  if (!(hmin > 0.0)) throw DegenerateCurve("zero segment");
  const double dt_ref = cfl * hmin * hmin;
  if (c.closed) {
    for (size_t i = 0; i < n; ++i) {
      const double h_prev = c.s[i] - c.s[(i + n - 1) % n] +
                            (i == 0 ? c.length() : 0.0);
      const double h_next =
          (i + 1 < n ? c.s[i + 1] : c.length()) - c.s[i];
      lam[i] = relax * (h_next - h_prev) / (2.0 * dt_ref);
    }
  } else {
    for (size_t i = 1; i + 1 < n; ++i) {
      const double h_prev = c.s[i] - c.s[i - 1];
      const double h_next = c.s[i + 1] - c.s[i];
      lam[i] = relax * (h_next - h_prev) / (2.0 * dt_ref);
    }
  }
  return lam;
}

namespace flow_detail {

// One linearly implicit update of a single curve: solves
// (I - dt Lh) X = x + dt lambda tau with spacings frozen at time n.
// Open curves treat both end nodes as Dirichlet data already stored in
// c.nodes.front()/back(); closed curves solve the cyclic system.
inline void solve_curve_implicit(Curve& c, double dt,
                                 const std::vector<double>& lam) {
  const size_t n = c.nodes.size();
  if (!c.closed && n < 3) return;

  if (c.closed) {
    std::vector<double> sub(n), dia(n), sup(n), rx(n), ry(n);
    for (size_t i = 0; i < n; ++i) {
      const size_t im = (i + n - 1) % n, ip = (i + 1) % n;
      const double a = distance(c.nodes[im], c.nodes[i]);
      const double b = distance(c.nodes[i], c.nodes[ip]);
      const double cm = 2.0 / (a * (a + b));
      const double cp = 2.0 / (b * (a + b));
      sub[i] = -dt * cm;
      sup[i] = -dt * cp;
      dia[i] = 1.0 + dt * (cm + cp);
      const Point2 rhs = c.nodes[i] + c.tau[i] * (dt * lam[i]);
      rx[i] = rhs.x;
      ry[i] = rhs.y;
    }
    const double alpha = sub[0], beta = sup[n - 1];
    const std::vector<double> X =
        solve_cyclic_tridiagonal(sub, dia, sup, rx, alpha, beta);
    const std::vector<double> Y =
        solve_cyclic_tridiagonal(sub, dia, sup, ry, alpha, beta);
    for (size_t i = 0; i < n; ++i) c.nodes[i] = {X[i], Y[i]};
    return;
  }

  const size_t m = n - 2;
  std::vector<double> sub(m), dia(m), sup(m), rx(m), ry(m);
  for (size_t k = 0; k < m; ++k) {
    const size_t i = k + 1;
    const double a = distance(c.nodes[i - 1], c.nodes[i]);
    const double b = distance(c.nodes[i], c.nodes[i + 1]);
    const double cm = 2.0 / (a * (a + b));
    const double cp = 2.0 / (b * (a + b));
    sub[k] = -dt * cm;
    sup[k] = -dt * cp;
    dia[k] = 1.0 + dt * (cm + cp);
    Point2 rhs = c.nodes[i] + c.tau[i] * (dt * lam[i]);
    if (k == 0) rhs += c.nodes.front() * (dt * cm);
    if (k + 1 == m) rhs += c.nodes.back() * (dt * cp);
    rx[k] = rhs.x;
    ry[k] = rhs.y;
  }
  const std::vector<double> X = solve_tridiagonal(sub, dia, sup, rx);
  const std::vector<double> Y = solve_tridiagonal(sub, dia, sup, ry);
  for (size_t k = 0; k < m; ++k) c.nodes[k + 1] = {X[k], Y[k]};
}

// Sum of one-sided exterior tangents at a junction, evaluated against the
// two nearest interior nodes of each incident curve with the junction
// placed at O.
inline Point2 junction_residual(const Network& net, const Junction& j,
                                Point2 O) {
  Point2 sum{0, 0};
  for (const Incidence& inc : j.incident) {
    const Curve& c = net.curves[inc.curve];
    const size_t n = c.nodes.size();
    Point2 n1, n2;
    if (inc.end == CurveEnd::Start) {
      n1 = c.nodes[1];
      n2 = c.nodes[2];
    } else {
      n1 = c.nodes[n - 2];
      n2 = c.nodes[n - 3];
    }
    const double a = distance(O, n1);
    const double b = distance(n1, n2);
    if (!(a > 0.0 && b > 0.0)) throw DegenerateCurve("junction stencil");
    sum += normalized(detail::first_derivative_left(O, n1, n2, a, b));
  }
  return sum;
}

// Local 2x2 Newton solve for the junction position that annihilates the
// exterior tangent sum. Throws JunctionSolveFailed when the iteration cap
// is exhausted away from the tolerance.
inline Point2 solve_junction_position(const Network& net, const Junction& j,
                                      Point2 guess, size_t max_iters,
                                      double tol) {
  double h_local = std::numeric_limits<double>::infinity();
  for (const Incidence& inc : j.incident) {
    const Curve& c = net.curves[inc.curve];
    const size_t n = c.nodes.size();
    const Point2 n1 =
        inc.end == CurveEnd::Start ? c.nodes[1] : c.nodes[n - 2];
    h_local = std::min(h_local, distance(guess, n1));
  }
  const double fd = 1e-7 * std::max(h_local, 1e-12);

  Point2 O = guess;
  for (size_t it = 0; it < max_iters; ++it) {
    const Point2 R = junction_residual(net, j, O);
    if (norm(R) < 1e-12) return O;
    const Point2 Rxp = junction_residual(net, j, {O.x + fd, O.y});
    const Point2 Rxm = junction_residual(net, j, {O.x - fd, O.y});
    const Point2 Ryp = junction_residual(net, j, {O.x, O.y + fd});
    const Point2 Rym = junction_residual(net, j, {O.x, O.y - fd});
    const double j00 = (Rxp.x - Rxm.x) / (2 * fd);
    const double j01 = (Ryp.x - Rym.x) / (2 * fd);
    const double j10 = (Rxp.y - Rxm.y) / (2 * fd);
    const double j11 = (Ryp.y - Rym.y) / (2 * fd);
    const double det = j00 * j11 - j01 * j10;
    if (std::fabs(det) < 1e-30)
      throw JunctionSolveFailed("singular tangent-sum Jacobian");
    Point2 dO{(-R.x * j11 + R.y * j01) / det, (R.x * j10 - R.y * j00) / det};
    const double cap = 0.3 * h_local;
    const double len = norm(dO);
    if (len > cap) dO = dO * (cap / len);
    O += dO;
  }
  if (norm(junction_residual(net, j, O)) < tol) return O;
  throw JunctionSolveFailed("tangent-sum iteration did not converge");
}

inline void write_junction_position(Network& net, size_t ji, Point2 O) {
  Junction& j = net.junctions[ji];
  j.position = O;
  for (const Incidence& inc : j.incident) {
    Curve& c = net.curves[inc.curve];
    if (inc.end == CurveEnd::Start)
      c.nodes.front() = O;
    else
      c.nodes.back() = O;
  }
}

}  // namespace flow_detail

// Places every junction at the root of its exterior tangent sum for the
// current interior geometry. Used at initialisation and after surgeries.
inline void project_junctions(Network& net, const StepControl& ctl) {
  for (size_t ji = 0; ji < net.junctions.size(); ++ji) {
    const Point2 O = flow_detail::solve_junction_position(
        net, net.junctions[ji], net.junctions[ji].position,
        ctl.junction_max_iters, ctl.junction_tol);
    flow_detail::write_junction_position(net, ji, O);
  }
  net.update_all_geometry();
}

// Advances the network by one time step of curvature motion. The parabolic
// step is linearly implicit per curve; junction positions are coupled in by
// a fixed-point loop that re-solves incident curves after each junction
// update until the configuration is self-consistent.
inline void step(FlowState& st, const StepControl& ctl,
                 double dt_cap = std::numeric_limits<double>::infinity()) {
  ctl.validate();
  Network& net = st.network;

  for (const Curve& c : net.curves)
    if (c.length() < 1e-3 * st.h_target)
      throw MeshCollapse("curve shorter than the mesh floor");

  const double h_min = net.min_segment();
  if (!(h_min > 0.0)) throw DegenerateCurve("zero segment before step");
  const double dt = std::min({ctl.cfl * h_min * h_min, ctl.dt_max, dt_cap});
  if (!(dt > 0.0)) throw InvalidArgument("nonpositive time step");

  std::vector<std::vector<double>> lambdas(net.curves.size());
  for (size_t ci = 0; ci < net.curves.size(); ++ci) {
    lambdas[ci] =
        tangential_velocity(net.curves[ci], ctl.cfl, ctl.equidistribution);
    net.curves[ci].lam = lambdas[ci];
  }

  // frozen pre-step copies carry the coefficients and right-hand sides
  const std::vector<Curve> frozen = net.curves;
  auto resolve_curve = [&](size_t ci) {
    Curve work = frozen[ci];
    // Dirichlet data lives in the end nodes of the evolving copy
    work.nodes.front() = net.curves[ci].nodes.front();
    work.nodes.back() = net.curves[ci].nodes.back();
    flow_detail::solve_curve_implicit(work, dt, lambdas[ci]);
    net.curves[ci].nodes = work.nodes;
  };

  for (size_t ci = 0; ci < net.curves.size(); ++ci) resolve_curve(ci);

  if (!net.junctions.empty()) {
    const double move_tol = 1e-12 * std::max(net.diameter(), 1e-12);
    bool settled = false;
    for (size_t outer = 0; outer < ctl.junction_max_iters && !settled;
         ++outer) {
      double max_move = 0.0;
      for (size_t ji = 0; ji < net.junctions.size(); ++ji) {
        const Point2 before = net.junctions[ji].position;
        const Point2 O = flow_detail::solve_junction_position(
            net, net.junctions[ji], before, ctl.junction_max_iters,
            ctl.junction_tol);
        flow_detail::write_junction_position(net, ji, O);
        max_move = std::max(max_move, distance(before, O));
      }
      for (size_t ji = 0; ji < net.junctions.size(); ++ji)
        for (const Incidence& inc : net.junctions[ji].incident)
          resolve_curve(inc.curve);
      settled = max_move < move_tol;
    }
    if (!settled) {
      for (const Junction& j : net.junctions)
        if (norm(flow_detail::junction_residual(net, j, j.position)) >
            ctl.junction_tol)
          throw JunctionSolveFailed("junction coupling did not settle");
    }
  }

  net.update_all_geometry();
  st.t += dt;
  st.last_dt = dt;
  ++st.step_index;
}

// Resamples curves whose spacing degraded or whose target node count moved,
// keeping node counts proportional to length. Curves shorter than
// suppress_below are left untouched so collapses stay observable.
inline bool maintain_mesh(FlowState& st, const StepControl& ctl,
                          double suppress_below = 0.0) {
  bool changed = false;
  const size_t n_max = std::max<size_t>(ctl.min_nodes, 8 * ctl.target_nodes);
  for (Curve& c : st.network.curves) {
    const double L = c.length();
    if (L < suppress_below) continue;
    const size_t n_tgt = std::clamp<size_t>(
        size_t(std::llround(L / st.h_target)), ctl.min_nodes, n_max);
    const double ratio = c.max_segment() / c.min_segment();
    const size_t n_cur = c.nodes.size();
    if (ratio > ctl.remesh_ratio || n_cur > 2 * n_tgt || 2 * n_cur < n_tgt) {
      c = resample_equidistant(c, n_tgt);
      changed = true;
    }
  }
  if (changed) st.network.update_all_geometry();
  return changed;
}

// Builds the evolving state: meshes every curve near the target spacing and
// projects the junctions once so the discrete configuration starts
// consistent.
inline FlowState make_flow_state(Network net, const StepControl& ctl,
                                 double t0 = 0.0) {
  ctl.validate();
  net.update_all_geometry();
  FlowState st;
  const double total = net.total_length();
  if (!(total > 0.0)) throw DegenerateCurve("empty network");
  st.h_target = total / (double(net.curves.size()) * double(ctl.target_nodes));
  for (Curve& c : net.curves) {
    const size_t n_tgt =
        std::clamp<size_t>(size_t(std::llround(c.length() / st.h_target)),
                           ctl.min_nodes, 8 * ctl.target_nodes);
    c = resample_equidistant(c, n_tgt);
  }
  net.update_all_geometry();
  st.network = std::move(net);
  st.t = t0;
  if (!st.network.junctions.empty()) project_junctions(st.network, ctl);
  return st;
}

enum class StopReason { MaxTime, MaxSteps, Event };

struct Snapshot {
  double t = 0.0;
  Network network;
};

struct StopSpec {
  double max_time = std::numeric_limits<double>::infinity();
  size_t max_steps = std::numeric_limits<size_t>::max();
  size_t sample_every = 20;       // steps between diagnostic samples
  size_t embeddedness_every = 0;  // samples between E/Pi columns, 0 = never
  SampleOptions sample_options;
  std::function<bool(const FlowState&)> stop_event;  // checked at samples
  bool keep_snapshots = false;
  double suppress_remesh_below = 0.0;
};

struct FlowTrajectory {
  std::vector<DiagnosticsSample> samples;
  std::vector<Snapshot> snapshots;
  StopReason reason = StopReason::MaxTime;
};

// Runs the flow until the stop condition fires, sampling diagnostics on a
// fixed step cadence. Mesh maintenance happens right before each sample so
// every inter-sample window evolves on one fixed mesh.
inline FlowTrajectory run_until(FlowState& st, const StepControl& ctl,
                                const StopSpec& stop) {
  ctl.validate();
  FlowTrajectory traj;
  size_t sample_count = 0;

  auto take_sample = [&](bool allow_remesh) {
    if (allow_remesh) maintain_mesh(st, ctl, stop.suppress_remesh_below);
    SampleOptions opts = stop.sample_options;
    opts.with_embeddedness =
        stop.embeddedness_every > 0 &&
        sample_count % stop.embeddedness_every == 0;
    opts.with_reflected = opts.with_embeddedness && opts.with_reflected;
    traj.samples.push_back(compute_sample(st.network, st.t, opts));
    if (stop.keep_snapshots) traj.snapshots.push_back({st.t, st.network});
    ++sample_count;
  };

  const size_t step_budget = stop.max_steps;
  size_t taken = 0;
  while (true) {
    if (st.step_index % stop.sample_every == 0 || st.t >= stop.max_time) {
      take_sample(st.t < stop.max_time);
      if (stop.stop_event && stop.stop_event(st)) {
        traj.reason = StopReason::Event;
        return traj;
      }
    }
    if (st.t >= stop.max_time * (1.0 - 1e-14)) {
      traj.reason = StopReason::MaxTime;
      return traj;
    }
    if (taken >= step_budget) {
      traj.reason = StopReason::MaxSteps;
      if (traj.samples.empty() || traj.samples.back().t < st.t)
        take_sample(false);
      return traj;
    }
    step(st, ctl, stop.max_time - st.t);
    ++taken;
  }
}

}  // namespace curvnet
