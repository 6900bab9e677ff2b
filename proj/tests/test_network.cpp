#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "curvnet/network.hpp"
#include "oracles.hpp"

using namespace curvnet;

#include "builders.hpp"
using namespace builders;


TEST_CASE("topology classification covers all two-junction patterns") {
  REQUIRE(classify_topology(make_theta()) == TopologyTag::Theta);
  REQUIRE(classify_topology(make_lens()) == TopologyTag::Lens);
  REQUIRE(classify_topology(make_tree()) == TopologyTag::Tree);
  REQUIRE(classify_topology(make_island()) == TopologyTag::Island);
  REQUIRE(classify_topology(make_eyeglasses(false)) == TopologyTag::EyeglassesA);
  REQUIRE(classify_topology(make_eyeglasses(true)) == TopologyTag::EyeglassesB);
}

TEST_CASE("classification requires exactly two junctions") {
  Network net;
  net.curves.push_back(make_circle_curve({0, 0}, 1.0, 64));
  net.curves[0].closed = true;
  net.update_all_geometry();
  REQUIRE_THROWS_AS(classify_topology(net), UnsupportedTopology);
}

TEST_CASE("theta loops are the two cells") {
  const Network net = make_theta();
  const std::vector<Loop> loops = extract_loops(net);
  REQUIRE(loops.size() == 2);
  for (const Loop& l : loops) {
    REQUIRE(l.m == 2);
    REQUIRE(l.area == Catch::Approx(kPi / 2.0).margin(2e-3));
  }
  // lexicographic curve-id order keeps sample columns stable
  REQUIRE(loops[0].curve_ids < loops[1].curve_ids);
}

TEST_CASE("island yields one single-junction loop") {
  const Network net = make_island();
  const std::vector<Loop> loops = extract_loops(net);
  REQUIRE(loops.size() == 1);
  REQUIRE(loops[0].m == 1);
  REQUIRE(loops[0].area == Catch::Approx(kPi * 0.25).margin(2e-3));
}

TEST_CASE("lens yields one two-junction loop and tree yields none") {
  const std::vector<Loop> lens_loops = extract_loops(make_lens());
  REQUIRE(lens_loops.size() == 1);
  REQUIRE(lens_loops[0].m == 2);
  REQUIRE(extract_loops(make_tree()).empty());
}

TEST_CASE("nested eyeglass loop areas are additive over faces") {
  const Network net = make_eyeglasses(true);
  const std::vector<Loop> loops = extract_loops(net);
  REQUIRE(loops.size() == 2);
  const double inner = std::min(loops[0].area, loops[1].area);
  const double outer = std::max(loops[0].area, loops[1].area);
  REQUIRE(inner == Catch::Approx(kPi * 0.25).margin(2e-3));
  REQUIRE(outer == Catch::Approx(kPi * 1.44).margin(8e-3));
  // inner-face area plus between-face area recovers the outer loop area
  const double between_face = outer - inner;
  REQUIRE(inner + between_face == Catch::Approx(outer).margin(1e-12));
}

TEST_CASE("validation accepts the handmade topologies") {
  for (const Network& net :
       {make_theta(), make_lens(), make_tree(), make_island(),
        make_eyeglasses(false), make_eyeglasses(true)}) {
    REQUIRE_NOTHROW(validate_network(net));
  }
}

TEST_CASE("validation rejects structural defects") {
  {
    Network net = make_theta();
    net.junctions[0].incident.pop_back();
    REQUIRE_THROWS_AS(validate_network(net), UnsupportedTopology);
  }
  {
    Network net = make_theta();
    net.junctions[1].position += Point2{0.1, 0};
    REQUIRE_THROWS_AS(validate_network(net), InvalidArgument);
  }
  {
    Network net = make_tree();
    net.endpoints.pop_back();  // dangling open end
    REQUIRE_THROWS_AS(validate_network(net), InvalidArgument);
  }
  {
    // single curve crossing itself
    Network net;
    Curve c;
    c.nodes = {{0, 0}, {2, 0}, {2, 1}, {1, -1}};
    update_geometry(c);
    net.curves.push_back(c);
    Endpoint e0{{0, 0}, {0, CurveEnd::Start}}, e1{{1, -1}, {0, CurveEnd::End}};
    net.endpoints = {e0, e1};
    net.update_all_geometry();
    REQUIRE_THROWS_AS(validate_network(net), NotEmbedded);
  }
}

TEST_CASE("validation rejects collinear endpoints") {
  Network net = make_tree();
  // drag two endpoints onto a line through a third
  net.endpoints[0].position = {-1.5, 1};
  net.endpoints[1].position = {0, 1};
  net.endpoints[2].position = {1.5, 1};
  net.curves[1].nodes.back() = {-1.5, 1};
  net.curves[2].nodes.back() = {0, 1};
  net.curves[3].nodes.back() = {1.5, 1};
  net.update_all_geometry();
  REQUIRE_THROWS_AS(validate_network(net, false), InvalidArgument);
}

TEST_CASE("regular triods pass the angle gate and skewed ones fail") {
  auto triod = [](double skew) {
    Network net;
    for (int k = 0; k < 3; ++k) {
      const double th = 2.0 * kPi * k / 3.0 + (k == 0 ? skew : 0.0);
      net.curves.push_back(
          make_segment_curve({0, 0}, unit_from_angle(th), 17));
      Endpoint e;
      e.incident = {size_t(k), CurveEnd::End};
      e.position = net.curves[k].nodes.back();
      net.endpoints.push_back(e);
    }
    Junction j;
    j.position = {0, 0};
    j.incident = {{0, CurveEnd::Start}, {1, CurveEnd::Start}, {2, CurveEnd::Start}};
    net.junctions = {j};
    net.update_all_geometry();
    return net;
  };
  const RegularityReport ok = validate_regular(triod(0.0));
  REQUIRE(ok.pass);
  REQUIRE(ok.max_deviation < 1e-10);
  const RegularityReport bad = validate_regular(triod(0.035));  // 2 degrees
  REQUIRE_FALSE(bad.pass);
  REQUIRE(bad.max_deviation == Catch::Approx(0.035).margin(2e-3));
}

TEST_CASE("exterior tangents agree for both anchoring orientations") {
  Network net;
  net.curves.push_back(make_segment_curve({0, 0}, {1, 0}, 9));
  net.curves.push_back(make_segment_curve({1, 1}, {0, 0}, 9));  // end-anchored
  net.update_all_geometry();
  const Point2 t0 = exterior_tangent(net, {0, CurveEnd::Start});
  const Point2 t1 = exterior_tangent(net, {1, CurveEnd::End});
  REQUIRE(t0.x == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(t0.y == Catch::Approx(0.0).margin(1e-12));
  const Point2 away = normalized(Point2{1, 1});
  REQUIRE(t1.x == Catch::Approx(away.x).margin(1e-12));
  REQUIRE(t1.y == Catch::Approx(away.y).margin(1e-12));
}

TEST_CASE("loop polygons traverse two-curve loops consistently") {
  const Network net = make_theta();
  const std::vector<Loop> loops = extract_loops(net);
  for (const Loop& l : loops) {
    const std::vector<Point2> poly = loop_polygon(net, l);
    REQUIRE(poly.size() > 60);
    REQUIRE(signed_polygon_area(poly) > 0.0);  // counterclockwise
    REQUIRE(std::fabs(polygon_area(poly, false) - l.area) < 1e-12);
  }
}
