#pragma once

// Handmade candidate networks shared across test suites. Geometry is only
// approximately regular; structural properties are what matter here.

#include <cmath>

#include "curvnet/network.hpp"

using namespace curvnet;

namespace builders {

inline Curve arc_curve(Point2 center, double r, double th0, double th1, size_t n) {
  Curve c;
  for (size_t i = 0; i < n; ++i) {
    const double th = th0 + (th1 - th0) * double(i) / double(n - 1);
    c.nodes.push_back(center + Point2{r * std::cos(th), r * std::sin(th)});
  }
  update_geometry(c);
  return c;
}

// Two junctions at (-1, 0), (1, 0); three curves between them.
inline Network make_theta() {
  Network net;
  net.curves.push_back(arc_curve({0, 0}, 1.0, kPi, 0.0, 65));        // top
  net.curves.push_back(arc_curve({0, 0}, 1.0, kPi, 2.0 * kPi, 65));  // bottom
  net.curves.push_back(make_segment_curve({-1, 0}, {1, 0}, 33));     // middle
  Junction j0, j1;
  j0.position = {-1, 0};
  j0.incident = {{0, CurveEnd::Start}, {1, CurveEnd::Start}, {2, CurveEnd::Start}};
  j1.position = {1, 0};
  j1.incident = {{0, CurveEnd::End}, {1, CurveEnd::End}, {2, CurveEnd::End}};
  net.junctions = {j0, j1};
  net.update_all_geometry();
  return net;
}

inline Curve teardrop(Point2 anchor, Point2 center, double r, size_t n) {
  // ring through the anchor, stored as an open curve whose ends coincide
  const double th0 = angle_of(anchor - center);
  Curve c;
  for (size_t i = 0; i <= n; ++i) {
    const double th = th0 + 2.0 * kPi * double(i) / double(n);
    c.nodes.push_back(center + Point2{r * std::cos(th), r * std::sin(th)});
  }
  c.nodes.back() = anchor;
  update_geometry(c);
  return c;
}

inline Network make_island() {
  Network net;
  net.curves.push_back(teardrop({0, 0}, {-0.5, 0}, 0.5, 64));       // loop
  net.curves.push_back(make_segment_curve({0, 0}, {1, 0}, 17));     // bridge
  net.curves.push_back(make_segment_curve({1, 0}, {2, 1}, 17));
  net.curves.push_back(make_segment_curve({1, 0}, {2, -1}, 17));
  Junction j0, j1;
  j0.position = {0, 0};
  j0.incident = {{0, CurveEnd::Start}, {0, CurveEnd::End}, {1, CurveEnd::Start}};
  j1.position = {1, 0};
  j1.incident = {{1, CurveEnd::End}, {2, CurveEnd::Start}, {3, CurveEnd::Start}};
  net.junctions = {j0, j1};
  Endpoint e0, e1;
  e0.position = {2, 1};
  e0.incident = {2, CurveEnd::End};
  e1.position = {2, -1};
  e1.incident = {3, CurveEnd::End};
  net.endpoints = {e0, e1};
  net.update_all_geometry();
  return net;
}

inline Network make_lens() {
  Network net;
  net.curves.push_back(arc_curve({0, -1.2}, std::hypot(1.0, 1.2), kPi - std::atan2(1.2, 1.0),
                                 std::atan2(1.2, 1.0), 49));  // upper arc
  net.curves.push_back(arc_curve({0, 1.2}, std::hypot(1.0, 1.2), kPi + std::atan2(1.2, 1.0),
                                 2.0 * kPi - std::atan2(1.2, 1.0), 49));  // lower arc
  net.curves.push_back(make_segment_curve({-1, 0}, {-2, 0.3}, 17));
  net.curves.push_back(make_segment_curve({1, 0}, {2, -0.3}, 17));
  Junction j0, j1;
  j0.position = {-1, 0};
  j0.incident = {{0, CurveEnd::Start}, {1, CurveEnd::Start}, {2, CurveEnd::Start}};
  j1.position = {1, 0};
  j1.incident = {{0, CurveEnd::End}, {1, CurveEnd::End}, {3, CurveEnd::Start}};
  net.junctions = {j0, j1};
  Endpoint e0, e1;
  e0.position = {-2, 0.3};
  e0.incident = {2, CurveEnd::End};
  e1.position = {2, -0.3};
  e1.incident = {3, CurveEnd::End};
  net.endpoints = {e0, e1};
  net.update_all_geometry();
  return net;
}

inline Network make_tree() {
  Network net;
  net.curves.push_back(make_segment_curve({-0.5, 0}, {0.5, 0}, 17));  // bar
  net.curves.push_back(make_segment_curve({-0.5, 0}, {-1.5, 1}, 17));
  net.curves.push_back(make_segment_curve({-0.5, 0}, {-1.5, -1}, 17));
  net.curves.push_back(make_segment_curve({0.5, 0}, {1.5, 1}, 17));
  net.curves.push_back(make_segment_curve({0.5, 0}, {1.5, -1}, 17));
  Junction j0, j1;
  j0.position = {-0.5, 0};
  j0.incident = {{0, CurveEnd::Start}, {1, CurveEnd::Start}, {2, CurveEnd::Start}};
  j1.position = {0.5, 0};
  j1.incident = {{0, CurveEnd::End}, {3, CurveEnd::Start}, {4, CurveEnd::Start}};
  net.junctions = {j0, j1};
  for (size_t i = 1; i <= 4; ++i) {
    Endpoint e;
    e.incident = {i, CurveEnd::End};
    e.position = net.curves[i].nodes.back();
    net.endpoints.push_back(e);
  }
  net.update_all_geometry();
  return net;
}

inline Network make_eyeglasses(bool nested) {
  Network net;
  net.curves.push_back(teardrop({0, 0}, {-0.5, 0}, 0.5, 64));
  if (nested)
    net.curves.push_back(teardrop({1, 0}, {-0.2, 0}, 1.2, 96));
  else
    net.curves.push_back(teardrop({1, 0}, {1.5, 0}, 0.5, 64));
  net.curves.push_back(make_segment_curve({0, 0}, {1, 0}, 17));
  Junction j0, j1;
  j0.position = {0, 0};
  j0.incident = {{0, CurveEnd::Start}, {0, CurveEnd::End}, {2, CurveEnd::Start}};
  j1.position = {1, 0};
  j1.incident = {{1, CurveEnd::Start}, {1, CurveEnd::End}, {2, CurveEnd::End}};
  net.junctions = {j0, j1};
  net.update_all_geometry();
  return net;
}

}  // namespace builders
