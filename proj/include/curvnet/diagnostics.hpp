#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "curvnet/embeddedness.hpp"
#include "curvnet/errors.hpp"
#include "curvnet/geometry.hpp"
#include "curvnet/network.hpp"

namespace curvnet {

// One backward-heat-kernel probe centre for Gaussian density tracking.
struct DensityProbe {
  Point2 x0;
  double t0 = 0.0;
};

struct DiagnosticsSample {
  double t = 0.0;
  double total_length = 0.0;
  std::vector<double> curve_lengths;
  std::vector<double> loop_areas;   // aligned with extract_loops order
  double k2_integral = 0.0;
  double max_abs_k = 0.0;
  double herring_deviation = 0.0;   // max junction angle deviation, radians
  double E = std::numeric_limits<double>::quiet_NaN();
  double Pi = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> theta_probes;
};

namespace detail {

// Integral of exp(-|x - x0|^2 / (4 sigma)) over one straight segment,
// normalised by 1/sqrt(4 pi sigma). Exact via the error function: with the
// foot-of-perpendicular decomposition the contribution reduces to
// (1/2) exp(-d_perp^2/(4 sigma)) [erf((c+len)/(2 sqrt(sigma))) - erf(c/(2 sqrt(sigma)))].
inline double kernel_segment_integral(Point2 a, Point2 b, Point2 x0,
                                      double sigma) {
  const Point2 d = b - a;
  const double len = norm(d);
  if (len <= 0.0) return 0.0;
  const Point2 u = d / len;
  const Point2 r = a - x0;
  const double c = dot(r, u);
  const double perp2 = std::max(norm2(r) - c * c, 0.0);
  const double q = perp2 / (4.0 * sigma);
  if (q > 40.0) return 0.0;  // tail below 4e-18, truncated
  const double inv = 1.0 / (2.0 * std::sqrt(sigma));
  return 0.5 * std::exp(-q) *
         (std::erf((c + len) * inv) - std::erf(c * inv));
}

// Integral of exp(-|x|^2 / 2) along one straight segment (no normalisation).
inline double gauss_weight_segment_integral(Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double len = norm(d);
  if (len <= 0.0) return 0.0;
  const Point2 u = d / len;
  const double c = dot(a, u);
  const double perp2 = std::max(norm2(a) - c * c, 0.0);
  if (perp2 > 80.0) return 0.0;
  const double s = 1.0 / std::sqrt(2.0);
  return std::exp(-0.5 * perp2) * std::sqrt(kPi / 2.0) *
         (std::erf((c + len) * s) - std::erf(c * s));
}

}  // namespace detail

// Gaussian density Theta_{x0,t0}(t): the backward heat kernel centred at
// (x0, t0) integrated over the network at time t < t0.
inline double gaussian_density(const Network& net, Point2 x0, double t0,
                               double t) {
  const double sigma = t0 - t;
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian_density needs t < t0");
  double total = 0.0;
  for (const Curve& c : net.curves) {
    const size_t n = c.nodes.size();
    const size_t nseg = c.segment_count();
    for (size_t i = 0; i < nseg; ++i)
      total += detail::kernel_segment_integral(c.nodes[i], c.nodes[(i + 1) % n],
                                               x0, sigma);
  }
  return total;
}

// Parabolically rescaled view of the network about a space-time centre:
// positions map to (x - x0) / sqrt(2 (T - t)), so curvature scales by
// sqrt(2 (T - t)) and the rescaled time is -log(T - t) / 2.
struct RescaledFrame {
  Network network;
  Point2 x0;
  double T = 0.0;
  double t = 0.0;
  double scale = 0.0;      // 1 / sqrt(2 (T - t))
  double rescaled_time = 0.0;
};

inline RescaledFrame rescale(const Network& net, Point2 x0, double t,
                             double T) {
  if (!(t < T)) throw InvalidArgument("rescale needs t < T");
  RescaledFrame fr;
  fr.x0 = x0;
  fr.T = T;
  fr.t = t;
  fr.scale = 1.0 / std::sqrt(2.0 * (T - t));
  fr.rescaled_time = -0.5 * std::log(T - t);
  fr.network = net;
  auto map = [&](Point2 p) { return (p - x0) * fr.scale; };
  for (Curve& c : fr.network.curves)
    for (Point2& p : c.nodes) p = map(p);
  for (Junction& j : fr.network.junctions) j.position = map(j.position);
  for (Endpoint& e : fr.network.endpoints) e.position = map(e.position);
  for (Point2& v : fr.network.domain.vertices) v = map(v);
  fr.network.update_all_geometry();
  return fr;
}

struct MonotonicityResult {
  double value = 0.0;   // integral of exp(-|x|^2/2) over the rescaled network
  double defect = 0.0;  // integral of (k + <x, nu>)^2 exp(-|x|^2/2)
};

inline MonotonicityResult monotonicity_functional(const RescaledFrame& frame) {
  MonotonicityResult r;
  for (const Curve& c : frame.network.curves) {
    const size_t n = c.nodes.size();
    const size_t nseg = c.segment_count();
    for (size_t i = 0; i < nseg; ++i)
      r.value += detail::gauss_weight_segment_integral(c.nodes[i],
                                                       c.nodes[(i + 1) % n]);
    const std::vector<double> mass = node_masses(c);
    for (size_t i = 0; i < n; ++i) {
      const double dev = c.k[i] + dot(c.nodes[i], c.nu[i]);
      r.defect += mass[i] * dev * dev * std::exp(-0.5 * norm2(c.nodes[i]));
    }
  }
  return r;
}

// Residual of dL/dt = -int k^2 ds over one sampling window, with the
// dissipation integral taken as the trapezoidal average of the endpoint
// samples (a midpoint-accurate value for the window).
struct DissipationResidual {
  double absolute = 0.0;
  double relative = 0.0;
};

inline DissipationResidual length_dissipation_residual(
    const DiagnosticsSample& s0, const DiagnosticsSample& s1) {
  const double dt = s1.t - s0.t;
  if (!(dt > 0.0)) throw InvalidArgument("window must advance in time");
  const double rate = (s1.total_length - s0.total_length) / dt;
  const double dissipation = 0.5 * (s0.k2_integral + s1.k2_integral);
  DissipationResidual r;
  r.absolute = std::fabs(rate + dissipation);
  r.relative = dissipation > 0.0 ? r.absolute / dissipation : r.absolute;
  return r;
}

// Residual of dA/dt = -2 pi + m pi / 3 for one bounded face over a window.
inline double area_law_residual(double a0, double a1, double dt, int m) {
  if (!(dt > 0.0)) throw InvalidArgument("window must advance in time");
  const double law = -2.0 * kPi + double(m) * kPi / 3.0;
  return std::fabs((a1 - a0) / dt - law);
}

struct SampleOptions {
  bool with_embeddedness = false;
  bool with_reflected = false;
  size_t embeddedness_nodes = 40;   // per-curve downsample cap, 0 = as-is
  std::vector<DensityProbe> probes;
};

// Downsampled copy used for the O(n^2) embeddedness scan inside sampling.
inline Network coarsened_for_embeddedness(const Network& net, size_t cap) {
  if (cap == 0) return net;
  Network coarse = net;
  for (Curve& c : coarse.curves) {
    const size_t keep = std::max<size_t>(12, cap);
    if (c.nodes.size() > keep) c = resample_equidistant(c, keep);
  }
  coarse.update_all_geometry();
  return coarse;
}

inline DiagnosticsSample compute_sample(const Network& net, double t,
                                        const SampleOptions& opts = {}) {
  DiagnosticsSample s;
  s.t = t;
  for (const Curve& c : net.curves) {
    const double L = c.length();
    s.curve_lengths.push_back(L);
    s.total_length += L;
  }
  for (const Loop& loop : extract_loops(net)) s.loop_areas.push_back(loop.area);
  s.k2_integral = curvature_square_integral(net);
  s.max_abs_k = max_abs_curvature(net);
  if (!net.junctions.empty()) {
    const RegularityReport reg = validate_regular(net, kPi);  // report only
    s.herring_deviation = reg.max_deviation;
  }
  for (const DensityProbe& pr : opts.probes) {
    if (t < pr.t0)
      s.theta_probes.push_back(gaussian_density(net, pr.x0, pr.t0, t));
    else
      s.theta_probes.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  if (opts.with_embeddedness) {
    const Network coarse =
        coarsened_for_embeddedness(net, opts.embeddedness_nodes);
    EmbeddednessOptions eo;
    eo.validate = false;
    eo.refine = false;
    s.E = embeddedness_measure(coarse, eo).E;
    if (opts.with_reflected) s.Pi = reflected_measure(coarse);
  }
  return s;
}

}  // namespace curvnet
