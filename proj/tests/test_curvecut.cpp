#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "hjlab/curvecut.hpp"
#include "oracles.hpp"

using namespace hjlab;

namespace {

using Intervals = std::vector<std::pair<double, double>>;

PolyPath straight_path(int dim, const Pt& a, const Pt& b, double T) {
  PolyPath p;
  p.dim = dim;
  p.t = {0.0, T};
  p.x = {a, b};
  return p;
}

PolyPath random_path(oracles::Golden& g, int dim, int nodes, double T) {
  PolyPath p;
  p.dim = dim;
  for (int i = 0; i < nodes; ++i) {
    p.t.push_back(T * i / (nodes - 1));
    p.x.push_back(pt(g.range(-2.0, 2.0), dim == 2 ? g.range(-2.0, 2.0) : 0.0));
  }
  return p;
}

double measure_of(const Intervals& iv) {
  double s = 0;
  for (const auto& [a, b] : iv) s += b - a;
  return s;
}

double increment_over(const std::function<MapVal(double)>& xi, const Intervals& iv, int d) {
  double s = 0;
  for (const auto& [a, b] : iv) s += xi(b)[d] - xi(a)[d];
  return s;
}

void check_sorted_disjoint(const Intervals& iv, double t0, double t1) {
  double cur = t0 - 1e-12;
  for (const auto& [a, b] : iv) {
    CHECK(a >= cur - 1e-12);
    CHECK(b > a);
    CHECK(a >= t0 - 1e-12);
    CHECK(b <= t1 + 1e-12);
    cur = b;
  }
}

double quad_action(const PolyPath& p) {
  return path_action(p, [](const Pt&, const Pt& v) { return 0.5 * (v[0] * v[0] + v[1] * v[1]); });
}

}  // namespace

TEST_CASE("polyline evaluation clamps outside and interpolates inside") {
  PolyPath p;
  p.dim = 2;
  p.t = {0.0, 2.0, 5.0};
  p.x = {pt(0.0, 1.0), pt(4.0, 3.0), pt(1.0, 0.0)};

  CHECK(p.duration() == 5.0);
  // clamped to the endpoint values, bitwise
  CHECK(p.eval(-1.0)[0] == 0.0);
  CHECK(p.eval(-1.0)[1] == 1.0);
  CHECK(p.eval(7.0)[0] == 1.0);
  CHECK(p.eval(7.0)[1] == 0.0);
  // breakpoints reproduce the stored nodes
  CHECK(p.eval(2.0)[0] == 4.0);
  CHECK(p.eval(2.0)[1] == 3.0);
  // linear in between
  CHECK(p.eval(1.0)[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p.eval(1.0)[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p.eval(3.5)[0] == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(p.eval(3.5)[1] == doctest::Approx(1.5).epsilon(1e-14));

  CHECK(p.velocity(0)[0] == 2.0);
  CHECK(p.velocity(0)[1] == 1.0);
  CHECK(p.velocity(1)[0] == -1.0);
  CHECK(p.velocity(1)[1] == -1.0);

  PolyPath empty;
  empty.dim = 1;
  CHECK_THROWS_AS(empty.eval(0.0), DomainError);
}

TEST_CASE("slice keeps interior nodes and interpolates the cut points") {
  PolyPath p;
  p.dim = 2;
  p.t = {0.0, 2.0, 5.0};
  p.x = {pt(0.0, 1.0), pt(4.0, 3.0), pt(1.0, 0.0)};

  PolyPath s = p.slice(1.0, 3.5);
  REQUIRE(s.t.size() == 3);
  CHECK(s.t[0] == 1.0);
  CHECK(s.t[1] == 2.0);
  CHECK(s.t[2] == 3.5);
  // the interior node is carried over bitwise
  CHECK(s.x[1][0] == 4.0);
  CHECK(s.x[1][1] == 3.0);
  CHECK(s.x[0][0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s.x[2][0] == doctest::Approx(2.5).epsilon(1e-14));

  // a window covering everything returns the whole path
  PolyPath w = p.slice(-3.0, 100.0);
  REQUIRE(w.t.size() == 3);
  CHECK(w.t[0] == 0.0);
  CHECK(w.t[2] == 5.0);
  CHECK(w.x[1][0] == 4.0);

  CHECK_THROWS_AS(p.slice(3.0, 3.0), DomainError);
  CHECK_THROWS_AS(p.slice(6.0, 7.0), DomainError);
  CHECK_THROWS_AS(p.slice(5.0, 6.0), DomainError);
}

TEST_CASE("path action integrates low-degree polynomial integrands exactly") {
  // x(s) = 0.3 + 0.5 s on [0,2] with L = v^2 + x:
  // integral = 2*0.25 + (0.6 + 1.0) = 2.1, and Simpson is exact here.
  PolyPath p1 = straight_path(1, pt(0.3), pt(1.3), 2.0);
  const double a1 =
      path_action(p1, [](const Pt& x, const Pt& v) { return v[0] * v[0] + x[0]; });
  CHECK(a1 == doctest::Approx(2.1).epsilon(1e-13));

  // x(s) = s on [0,1], L = x^2 -> 1/3; L = x^3 on [0,2] -> 4 (Simpson exact for cubics)
  PolyPath p2 = straight_path(1, pt(0.0), pt(1.0), 1.0);
  CHECK(path_action(p2, [](const Pt& x, const Pt&) { return x[0] * x[0]; }) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  PolyPath p3 = straight_path(1, pt(0.0), pt(2.0), 2.0);
  CHECK(path_action(p3, [](const Pt& x, const Pt&) { return x[0] * x[0] * x[0]; }) ==
        doctest::Approx(4.0).epsilon(1e-13));

  // quartic is no longer exact but 16 panels per unit keep the defect tiny
  const double a4 =
      path_action(p2, [](const Pt& x, const Pt&) { return std::pow(x[0], 4); });
  CHECK(std::abs(a4 - 0.2) <= 1e-6);

  // piecewise: speeds 1 then -0.5, L = v^2 -> 1*1 + 2*0.25 = 1.5
  PolyPath pw;
  pw.dim = 1;
  pw.t = {0.0, 1.0, 3.0};
  pw.x = {pt(0.0), pt(1.0), pt(0.0)};
  CHECK(path_action(pw, [](const Pt&, const Pt& v) { return v[0] * v[0]; }) ==
        doctest::Approx(1.5).epsilon(1e-13));

  // a single-node path carries no action
  PolyPath one;
  one.dim = 1;
  one.t = {0.0};
  one.x = {pt(0.0)};
  CHECK(path_action(one, [](const Pt&, const Pt&) { return 1.0; }) == 0.0);
}

TEST_CASE("sphere search finds zeros of odd maps") {
  // f(x) = (x0, x1) on S^2 vanishes exactly at the poles +-e2, which are seeds
  OddZeroResult z = odd_map_zero(2, 2, [](const SpherePt& x) {
    return MapVal{x[0], x[1], 0.0};
  });
  CHECK(z.residual <= 1e-15);
  CHECK(std::abs(z.x[2]) >= 1.0 - 1e-12);

  // f(x) = x0^3 on S^1 vanishes at (0, +-1)
  OddZeroResult z1 = odd_map_zero(1, 1, [](const SpherePt& x) {
    return MapVal{x[0] * x[0] * x[0], 0.0, 0.0};
  });
  CHECK(z1.residual <= 1e-10);
  CHECK(std::abs(z1.x[0]) <= 1e-5);

  // a full-rank odd map on S^3: linear part plus cubic perturbation
  auto f3 = [](const SpherePt& x) {
    return MapVal{x[0] + 0.4 * x[1] - 0.2 * x[3] + 0.3 * x[2] * x[2] * x[2],
                  x[1] - 0.3 * x[2] + 0.1 * x[0] * x[0] * x[0],
                  x[2] + 0.5 * x[3] - 0.2 * x[1] * x[1] * x[1]};
  };
  OddZeroResult z3 = odd_map_zero(3, 3, f3);
  CHECK(z3.residual <= 1e-6);

  // deterministic: same inputs, bitwise-identical result
  OddZeroResult z3b = odd_map_zero(3, 3, f3);
  CHECK(z3b.residual == z3.residual);
  for (int i = 0; i < 4; ++i) CHECK(z3b.x[i] == z3.x[i]);

  // fewer starts still solve the easy pole map
  OddZeroOptions small;
  small.starts = 8;
  small.iters = 60;
  OddZeroResult zs = odd_map_zero(2, 2, [](const SpherePt& x) {
    return MapVal{x[0], x[1], 0.0};
  }, small);
  CHECK(zs.residual <= 1e-15);

  auto id1 = [](const SpherePt& x) { return MapVal{x[0], 0.0, 0.0}; };
  CHECK_THROWS_AS(odd_map_zero(0, 1, id1), DomainError);
  CHECK_THROWS_AS(odd_map_zero(4, 1, id1), DomainError);
  CHECK_THROWS_AS(odd_map_zero(2, 0, id1), DomainError);
  CHECK_THROWS_AS(odd_map_zero(2, 3, id1), DomainError);
}

TEST_CASE("interval decomposition halves a monotone increment") {
  auto xi = [](double t) { return MapVal{t * t, 0.0, 0.0}; };
  IntervalDecomposition dec = decompose_half(xi, 1, 1, 0.0, 1.0);
  CHECK(dec.residual <= 1e-9);

  check_sorted_disjoint(dec.plus, 0.0, 1.0);
  check_sorted_disjoint(dec.minus, 0.0, 1.0);
  CHECK(measure_of(dec.plus) + measure_of(dec.minus) == doctest::Approx(1.0).epsilon(1e-12));

  // each sign class carries exactly half of the increment, up to the residual
  CHECK(std::abs(increment_over(xi, dec.plus, 0) - 0.5) <= 0.5 * dec.residual + 1e-9);
  CHECK(std::abs(increment_over(xi, dec.minus, 0) - 0.5) <= 0.5 * dec.residual + 1e-9);

  // the reported sphere point is actually on the sphere
  double nrm = 0;
  for (int i = 0; i < 2; ++i) nrm += dec.x[i] * dec.x[i];
  CHECK(nrm == doctest::Approx(1.0).epsilon(1e-10));

  const std::size_t smaller = std::min(dec.plus.size(), dec.minus.size());
  CHECK(smaller <= 1);

  CHECK_THROWS_AS(decompose_half(xi, 1, 1, 2.0, 2.0), DomainError);
  CHECK_THROWS_AS(decompose_half(xi, 1, 2, 0.0, 1.0), DomainError);
}

TEST_CASE("random polyline increments split in half with few pieces") {
  oracles::Golden gold(0.137);
  for (int m = 1; m <= 3; ++m) {
    for (int rep = 0; rep < 12; ++rep) {
      const double T = 4.0 + gold.range(0.0, 8.0);
      PolyPath p = random_path(gold, 2, 8, T);
      // component 0 is time itself for m >= 2, so durations get halved too
      auto xi = [&](double t) {
        const Pt y = p.eval(t);
        if (m == 1) return MapVal{y[0], 0.0, 0.0};
        if (m == 2) return MapVal{t, y[0], 0.0};
        return MapVal{t, y[0], y[1]};
      };
      IntervalDecomposition dec = decompose_half(xi, m, m, 0.0, T);
      CHECK(dec.residual <= 1e-6);

      check_sorted_disjoint(dec.plus, 0.0, T);
      check_sorted_disjoint(dec.minus, 0.0, T);
      CHECK(measure_of(dec.plus) + measure_of(dec.minus) ==
            doctest::Approx(T).epsilon(1e-10));

      for (int d = 0; d < m; ++d) {
        const double total = xi(T)[d] - xi(0.0)[d];
        CHECK(std::abs(increment_over(xi, dec.plus, d) - 0.5 * total) <=
              0.5 * dec.residual + 1e-8);
        CHECK(std::abs(increment_over(xi, dec.minus, d) - 0.5 * total) <=
              0.5 * dec.residual + 1e-8);
      }

      const std::size_t smaller = std::min(dec.plus.size(), dec.minus.size());
      CHECK(smaller <= static_cast<std::size_t>((m + 1) / 2));
    }
  }

  // time reversal changes the increments' signs but not the guarantees
  oracles::Golden g2(0.91);
  PolyPath p = random_path(g2, 2, 10, 9.0);
  auto xi_rev = [&](double t) {
    const Pt y = p.eval(9.0 - t);
    return MapVal{t, y[0], y[1]};
  };
  IntervalDecomposition dec = decompose_half(xi_rev, 3, 3, 0.0, 9.0);
  CHECK(dec.residual <= 1e-6);
  const double tot0 = xi_rev(9.0)[1] - xi_rev(0.0)[1];
  CHECK(std::abs(increment_over(xi_rev, dec.plus, 1) - 0.5 * tot0) <=
        0.5 * dec.residual + 1e-8);
}

TEST_CASE("complement intervals fill exactly the gaps") {
  const Intervals kept = {{1.0, 2.0}, {4.0, 7.0}};
  const Intervals gaps = complement_intervals(kept, 0.0, 10.0);
  REQUIRE(gaps.size() == 3);
  CHECK(gaps[0] == std::pair<double, double>{0.0, 1.0});
  CHECK(gaps[1] == std::pair<double, double>{2.0, 4.0});
  CHECK(gaps[2] == std::pair<double, double>{7.0, 10.0});
  CHECK(measure_of(kept) + measure_of(gaps) == doctest::Approx(10.0).epsilon(1e-14));

  // complement of the complement restores the original interior intervals
  const Intervals back = complement_intervals(gaps, 0.0, 10.0);
  REQUIRE(back.size() == kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    CHECK(back[i].first == kept[i].first);
    CHECK(back[i].second == kept[i].second);
  }

  CHECK(complement_intervals({{0.0, 3.0}}, 0.0, 10.0) ==
        Intervals{{3.0, 10.0}});
  CHECK(complement_intervals({}, 0.0, 10.0) == Intervals{{0.0, 10.0}});
  CHECK(complement_intervals({{0.0, 10.0}}, 0.0, 10.0).empty());
}

TEST_CASE("reassembled path runs the kept pieces in half the time") {
  // straight line x = t/4 on [0,12]; keep [0,3] and [6,9] (duration 6 = T/2,
  // displacement 1.5 = half of 3). Every number below is hand-checkable.
  PolyPath gamma = straight_path(1, pt(0.0), pt(3.0), 12.0);
  const Intervals kept = {{0.0, 3.0}, {6.0, 9.0}};
  PolyPath eta = reassemble_half_time(gamma, kept);

  CHECK(eta.dim == 1);
  REQUIRE(eta.t.size() == 7);
  CHECK(eta.duration() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(eta.t.front() == 0.0);

  // start is copied bitwise; the end is the midpoint of the full displacement
  CHECK(eta.x.front()[0] == 0.0);
  CHECK(eta.x.back()[0] == 1.5);

  // nodes: start, piece 1 with its first unit run at double speed, piece 2, end
  const double c = 1.0 / 6.0;
  const double tt[7] = {0.0, c, c + 0.5, c + 2.5, 2.0 * c + 2.5, 2.0 * c + 5.5, 6.0};
  const double xx[7] = {0.0, 0.0, 0.25, 0.75, 1.5, 2.25, 1.5};
  for (int i = 0; i < 7; ++i) {
    CHECK(eta.t[i] == doctest::Approx(tt[i]).epsilon(1e-13));
    CHECK(eta.x[i][0] == doctest::Approx(xx[i]).epsilon(1e-13));
  }

  // connectors have duration 1/(2k+2) and junction jumps inside [0,1)
  CHECK(eta.x[1][0] - eta.x[0][0] == 0.0);           // first junction
  const double jump = eta.x[4][0] - eta.x[3][0];     // between the pieces
  CHECK(jump >= 0.0);
  CHECK(jump < 1.0);

  // the doubled-speed stretch really runs at twice the original speed
  CHECK(eta.velocity(1)[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(eta.velocity(2)[0] == doctest::Approx(0.25).epsilon(1e-12));

  for (std::size_t i = 0; i + 1 < eta.t.size(); ++i) CHECK(eta.t[i + 1] > eta.t[i]);
}

TEST_CASE("reassembly falls back to one straight connector on short horizons") {
  // half horizon below 2: a single straight segment from start to midpoint
  PolyPath g3 = straight_path(1, pt(0.0), pt(1.2), 3.0);
  PolyPath e3 = reassemble_half_time(g3, {{0.0, 0.75}, {1.5, 2.25}});
  REQUIRE(e3.t.size() == 2);
  CHECK(e3.duration() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(e3.x.front()[0] == 0.0);
  CHECK(e3.x.back()[0] == doctest::Approx(0.6).epsilon(1e-14));

  // long horizon but every kept piece shorter than one time unit: same fallback
  PolyPath g12 = straight_path(1, pt(0.0), pt(3.0), 12.0);
  Intervals shreds;
  for (int i = 0; i < 8; ++i) shreds.emplace_back(1.5 * i, 1.5 * i + 0.75);
  PolyPath e12 = reassemble_half_time(g12, shreds);
  REQUIRE(e12.t.size() == 2);
  CHECK(e12.duration() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(e12.x.back()[0] == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("reassembly validates its inputs") {
  PolyPath gamma = straight_path(1, pt(0.0), pt(3.0), 10.0);

  PolyPath lone;
  lone.dim = 1;
  lone.t = {0.0};
  lone.x = {pt(0.0)};
  CHECK_THROWS_AS(reassemble_half_time(lone, {{0.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(reassemble_half_time(gamma, {}), DomainError);

  // kept duration far from half the horizon
  CHECK_THROWS_AS(reassemble_half_time(gamma, {{0.0, 2.0}}), DomainError);

  // every kept interval degenerate
  CHECK_THROWS_AS(reassemble_half_time(gamma, {{1.0, 1.0 + 1e-12}}), DomainError);

  // a tiny deficit must be absorbable by stretching the last interval; if that
  // interval already touches the end of the horizon there is no room left
  CHECK_THROWS_AS(reassemble_half_time(gamma, {{5.002, 10.0}}), DomainError);
  PolyPath ok = reassemble_half_time(gamma, {{4.999, 9.998}});
  CHECK(ok.duration() == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("halved decomposition reassembles into a valid half-time path") {
  PolyPath gamma;
  gamma.dim = 2;
  gamma.t = {0.0, 3.0, 7.0, 10.0, 13.0, 16.0};
  gamma.x = {pt(0.2, 0.7), pt(1.4, 0.1), pt(2.2, 2.0),
             pt(2.6, 0.9), pt(4.1, 1.5), pt(5.2, 2.7)};
  const double T = gamma.duration();

  // track time and both coordinates so kept pieces carry half of each
  auto xi = [&](double t) {
    const Pt y = gamma.eval(t);
    return MapVal{t, y[0], y[1]};
  };
  IntervalDecomposition dec = decompose_half(xi, 3, 3, 0.0, T);
  REQUIRE(dec.residual <= 1e-6);

  Pt mid = {0, 0};
  for (int ax = 0; ax < 2; ++ax)
    mid[ax] = gamma.x.front()[ax] + 0.5 * (gamma.x.back()[ax] - gamma.x.front()[ax]);

  for (const Intervals& kept : {dec.plus, dec.minus}) {
    CHECK(std::abs(measure_of(kept) - 0.5 * T) <= dec.residual + 1e-9);
    PolyPath eta = reassemble_half_time(gamma, kept);
    CHECK(eta.duration() == doctest::Approx(0.5 * T).epsilon(1e-9));
    CHECK(eta.x.front()[0] == gamma.x.front()[0]);
    CHECK(eta.x.front()[1] == gamma.x.front()[1]);
    CHECK(std::abs(eta.x.back()[0] - mid[0]) <= 1e-12);
    CHECK(std::abs(eta.x.back()[1] - mid[1]) <= 1e-12);
    for (std::size_t i = 0; i + 1 < eta.t.size(); ++i) CHECK(eta.t[i + 1] > eta.t[i]);
    const double a = quad_action(eta);
    CHECK(a >= 0.0);
    CHECK(a < 1e3);
  }
}
