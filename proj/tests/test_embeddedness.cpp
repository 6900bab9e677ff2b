#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "curvnet/embeddedness.hpp"

using namespace curvnet;

#include "builders.hpp"
using namespace builders;

namespace {

Curve closed_polar(int n, double base, double c1, double s2, double c2 = 0.0) {
  Curve c;
  c.closed = true;
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * static_cast<double>(i) / n;
    const double r = base + c1 * std::cos(th) + s2 * std::sin(2.0 * th) +
                     c2 * std::cos(2.0 * th);
    c.nodes.push_back({r * std::cos(th), r * std::sin(th)});
  }
  update_geometry(c);
  return c;
}

Network closed_net(const Curve& c) {
  Network net;
  net.curves.push_back(c);
  net.update_all_geometry();
  return net;
}

Network transformed(const Network& net, double scale, double angle,
                    Point2 shift) {
  Network out = net;
  auto map = [&](Point2 p) { return rotate(p, angle) * scale + shift; };
  for (Curve& c : out.curves)
    for (Point2& p : c.nodes) p = map(p);
  for (Junction& j : out.junctions) j.position = map(j.position);
  for (Endpoint& e : out.endpoints) e.position = map(e.position);
  for (Point2& v : out.domain.vertices) v = map(v);
  out.update_all_geometry();
  return out;
}

Network bare_segment(Point2 a, Point2 b, size_t n) {
  Network net;
  net.curves.push_back(make_segment_curve(a, b, n));
  Endpoint e0, e1;
  e0.position = a;
  e0.incident = {0, CurveEnd::Start};
  e1.position = b;
  e1.incident = {0, CurveEnd::End};
  net.endpoints = {e0, e1};
  net.update_all_geometry();
  return net;
}

}  // namespace

TEST_CASE("straight segment has no admissible pair and sits at the cap") {
  Network net = bare_segment({-1.0, 0.0}, {2.0, 0.5}, 41);
  const auto rep = embeddedness_measure(net);
  REQUIRE(rep.E == kEmbeddednessCap);
  REQUIRE(rep.pair_is_junction_diagonal);
  REQUIRE(std::abs(kEmbeddednessCap - 4.0 * std::sqrt(3.0)) < 1e-14);

  REQUIRE(reflected_measure(net) == kEmbeddednessCap);
}

TEST_CASE("round circle scores four through the loop branch") {
  Network net = closed_net(closed_polar(256, 1.0, 0.0, 0.0));
  const auto rep = embeddedness_measure(net);

  REQUIRE(rep.used_psi_branch);
  REQUIRE(!rep.pair_is_junction_diagonal);
  REQUIRE(std::abs(rep.E - 4.0) < 2e-3);
  REQUIRE(std::abs(norm(rep.p - rep.q) - 2.0) < 1e-2);
  REQUIRE(std::abs(rep.A_pq - kPi / 2.0) < 2e-2);
  REQUIRE(std::abs(rep.ambient_area - kPi) < 1e-3);
  REQUIRE(std::abs(rep.alpha_p - kPi / 2.0) < 2e-2);
  REQUIRE(std::abs(rep.alpha_q - kPi / 2.0) < 2e-2);
}

TEST_CASE("measure is invariant under similarity transforms") {
  Network base = closed_net(closed_polar(200, 1.0, 0.3, 0.15));
  const double e0 = embeddedness_measure(base).E;

  for (auto [s, a, dx, dy] :
       {std::array{3.7, 0.83, 5.0, -2.0}, std::array{0.23, -2.1, -40.0, 7.5},
        std::array{11.0, 2.9, 0.0, 100.0}}) {
    Network moved = transformed(base, s, a, {dx, dy});
    const double e1 = embeddedness_measure(moved).E;
    REQUIRE(std::abs(e1 - e0) < 1e-9);
  }
}

TEST_CASE("pinched closed curve is scored by its neck pair") {
  // Two lobes joined across a waist on the x axis: the winning chord spans
  // the waist, well below the round-circle value of 4.
  Curve c = closed_polar(512, 1.0, 0.2, 0.0, -0.55);
  Network net = closed_net(c);
  const auto rep = embeddedness_measure(net);

  REQUIRE(rep.used_psi_branch);
  REQUIRE(rep.E < 4.0);
  REQUIRE(norm(rep.p - rep.q) < 1.0);
  REQUIRE(std::abs(rep.p.y) < 0.05);
  REQUIRE(std::abs(rep.q.y) < 0.05);
  REQUIRE(std::max(rep.p.x, rep.q.x) > 0.4);
  REQUIRE(std::min(rep.p.x, rep.q.x) < 0.0);
  REQUIRE(rep.A_pq > 0.0);
  REQUIRE(rep.A_pq < rep.ambient_area);
}

TEST_CASE("minimizing pair satisfies the chord-tangent relation") {
  // The first-order condition at an interior minimizing pair on a loop:
  // cot(alpha) = -(E/4) cos(pi A_pq / A), with equal angles at both ends.
  Curve c = closed_polar(300, 1.0, 0.3, 0.2);
  Network net = closed_net(c);
  const auto rep = embeddedness_measure(net);

  REQUIRE(rep.used_psi_branch);
  const double lhs_p = 1.0 / std::tan(rep.alpha_p);
  const double lhs_q = 1.0 / std::tan(rep.alpha_q);
  const double rhs =
      -(rep.E / 4.0) * std::cos(kPi * rep.A_pq / rep.ambient_area);

  const double margin = 0.05 * std::max(std::abs(rhs), 0.02);
  REQUIRE(std::abs(lhs_p - rhs) < margin);
  REQUIRE(std::abs(lhs_q - rhs) < margin);
  REQUIRE(std::abs(rep.alpha_p - rep.alpha_q) < 0.02);
}

TEST_CASE("refinement only lowers the reported minimum") {
  Curve c = closed_polar(96, 1.0, 0.25, 0.1);
  Network net = closed_net(c);

  EmbeddednessOptions coarse;
  coarse.refine = false;
  EmbeddednessOptions fine;
  fine.refine = true;

  const double e_coarse = embeddedness_measure(net, coarse).E;
  const double e_fine = embeddedness_measure(net, fine).E;
  REQUIRE(e_fine <= e_coarse + 1e-12);
}

TEST_CASE("winner pair is mutually visible and consistent") {
  Curve c = closed_polar(300, 1.0, 0.3, 0.2);
  Network net = closed_net(c);
  const auto rep = embeddedness_measure(net);

  REQUIRE(!segment_hits_network(rep.p, rep.q, net.curves, {rep.p, rep.q},
                                1e-9));
  REQUIRE(rep.used_psi_branch);
  REQUIRE(rep.psi > 0.0);
  REQUIRE(std::abs(rep.E - norm2(rep.p - rep.q) / rep.psi) < 1e-9);
}

TEST_CASE("non-embedded input is rejected unless validation is waived") {
  Curve c;
  c.closed = true;
  const int n = 64;
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * static_cast<double>(i) / n;
    const double r = 0.3 + std::cos(2.0 * th);  // r < 0: figure crosses itself
    c.nodes.push_back({r * std::cos(th), r * std::sin(th)});
  }
  update_geometry(c);
  Network net;
  net.curves.push_back(c);
  net.update_all_geometry();

  REQUIRE_THROWS_AS(embeddedness_measure(net), NotEmbedded);
}

TEST_CASE("theta network pairs across the middle chord") {
  Network net = make_theta();
  const auto rep = embeddedness_measure(net);
  REQUIRE(rep.E > 0.0);
  REQUIRE(rep.E <= kEmbeddednessCap);
  REQUIRE(!rep.pair_is_junction_diagonal);

  // Same combinatorics after a similarity move.
  Network moved = transformed(net, 2.4, 1.2, {-3.0, 8.0});
  REQUIRE(std::abs(embeddedness_measure(moved).E - rep.E) < 1e-9);
}

TEST_CASE("tree network has a finite measure from junction separation") {
  Network net = make_tree();
  const auto rep = embeddedness_measure(net);
  REQUIRE(rep.E > 0.0);
  REQUIRE(rep.E <= kEmbeddednessCap);
}

TEST_CASE("reflected measure of a triod is positive and capped") {
  Network net = make_tree();
  const double pi_val = reflected_measure(net);
  REQUIRE(pi_val > 0.0);
  REQUIRE(pi_val <= kEmbeddednessCap);

  Network moved = transformed(net, 0.8, -0.4, {2.0, 2.0});
  REQUIRE(std::abs(reflected_measure(moved) - pi_val) < 1e-9);
}

TEST_CASE("closed loop networks have no reflection and reuse the measure") {
  Network net = closed_net(closed_polar(128, 1.0, 0.0, 0.0));
  EmbeddednessOptions opts;
  opts.validate = false;
  opts.refine = false;
  const double e = embeddedness_measure(net, opts).E;
  REQUIRE(std::abs(reflected_measure(net) - e) < 1e-12);
}
