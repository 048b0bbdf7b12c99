#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hjlab/action_metric.hpp"
#include "hjlab/graph_metric.hpp"
#include "oracles.hpp"

using namespace hjlab;

namespace {

HamiltonianModel model_1d(HamKind kind, const std::string& field) {
  return make_model(kind, make_builtin_potential(field, 1));
}

HamiltonianModel model_2d(HamKind kind, const std::string& field) {
  return make_model(kind, make_builtin_potential(field, 2));
}

}  // namespace

TEST_CASE("flat quadratic action: straight unit-speed crossing") {
  const auto M = make_action_metric(model_1d(HamKind::Quadratic, "constant:0"), 8, 0.25);
  // 4 steps of 2 cells each = speed 1; kinetic cost 0.5 * 1^2 per unit time.
  CHECK(std::abs(M.value(4, {0, 0}, {8, 0}) - 0.5) <= 1e-9);
  const auto path = M.shortest(4, {0, 0}, {8, 0});
  CHECK(std::abs(path.value - 0.5) <= 1e-9);
  REQUIRE(path.nodes.size() == 5);
  for (int k = 0; k <= 4; ++k) CHECK(path.nodes[k][0] == 2 * k);  // strictly convex => unique
}

TEST_CASE("resting on the potential maximum is optimal") {
  const auto M = make_action_metric(model_1d(HamKind::Quadratic, "cos1d"), 8, 0.25);
  // L(y,0) = -V(y) >= -1 bounds every per-step cost from below.
  CHECK(std::abs(M.value(8, {0, 0}, {0, 0}) - (-2.0)) <= 1e-9);

  const int d0 = M.reach;  // zero-displacement column of lv
  const double stay = 8 * M.tau * M.lv[static_cast<std::size_t>(M.cell_of({0, 0})) * M.ndisp + d0];
  CHECK(M.value(8, {0, 0}, {0, 0}) <= stay + 1e-12);
  const double lmin = *std::min_element(M.lv.begin(), M.lv.end());
  CHECK(M.value(8, {0, 0}, {0, 0}) >= 8 * M.tau * lmin - 1e-12);
}

TEST_CASE("dynamic program agrees with exhaustive path enumeration") {
  ActionMetricOptions o1;
  o1.reach = 1;
  const auto M2 = make_action_metric(model_2d(HamKind::Quadratic, "cos2d"), 4, 0.5, o1);
  for (const Node b : {Node{2, 0}, Node{1, -2}, Node{0, 0}, Node{-3, 3}}) {
    const double dp = M2.value(4, {0, 0}, b);
    const double brute = oracles::enumerate_metric(M2, 4, {0, 0}, b);
    CHECK(std::abs(dp - brute) <= 1e-12);
  }

  ActionMetricOptions o2;
  o2.reach = 2;
  const auto M1 = make_action_metric(model_1d(HamKind::AbsPlus, "cos1d"), 8, 0.25, o2);
  for (const Node b : {Node{4, 0}, Node{-7, 0}, Node{1, 0}}) {
    const double dp = M1.value(5, {0, 0}, b);
    const double brute = oracles::enumerate_metric(M1, 5, {0, 0}, b);
    CHECK(std::abs(dp - brute) <= 1e-12);
  }
}

TEST_CASE("speeds outside the Lagrangian domain are rejected") {
  // tau so small that every non-zero lattice displacement exceeds |q| = 1.
  const auto M = make_action_metric(model_1d(HamKind::AbsPlus, "cos1d"), 8, 1.0 / 32.0);
  CHECK_THROWS_AS(M.value(2, {0, 0}, {1, 0}), DomainError);
  CHECK(std::isfinite(M.value(2, {0, 0}, {0, 0})));  // resting stays admissible

  const auto Q = make_action_metric(model_1d(HamKind::Quadratic, "constant:0"), 8, 0.25);
  CHECK_THROWS_AS(Q.value(2, {0, 0}, {7, 0}), SpeedRangeError);  // outside the cone
  CHECK_THROWS_AS(Q.value(0, {0, 0}, {1, 0}), SpeedRangeError);
  CHECK_THROWS_AS(Q.value(-1, {0, 0}, {0, 0}), DomainError);
  CHECK(Q.value(0, {2, 0}, {2, 0}) == 0.0);
}

TEST_CASE("one-sweep slices equal individual shortest-path values") {
  const auto M = make_action_metric(model_2d(HamKind::Quadratic, "cos2d"), 8, 0.25);
  const std::vector<int> steps = {2, 4};
  const std::vector<std::vector<Node>> targets = {{Node{3, 1}, Node{0, 0}},
                                                  {Node{6, 2}, Node{5, 0}}};
  const auto vals = metric_slices(M, steps, targets);
  REQUIRE(vals.size() == 2);
  for (std::size_t i = 0; i < steps.size(); ++i)
    for (std::size_t j = 0; j < targets[i].size(); ++j)
      CHECK(std::abs(vals[i][j] - M.value(steps[i], {0, 0}, targets[i][j])) <= 1e-12);

  CHECK_THROWS_AS(metric_slices(M, {2}, {{Node{100, 0}}}), SpeedRangeError);
  CHECK_THROWS_AS(metric_slices(M, {}, {}), DomainError);
  CHECK_THROWS_AS(metric_slices(M, {4, 2}, {{Node{1, 0}}, {Node{1, 0}}}), DomainError);
  CHECK_THROWS_AS(metric_slices(M, {2}, {}), DomainError);
  CHECK_THROWS_AS(metric_slices(M, {0}, {{Node{0, 0}}}), DomainError);
}

TEST_CASE("metric audits: subadditivity exact, periodicity bitwise") {
  const auto M = make_action_metric(model_1d(HamKind::Quadratic, "cos1d"), 8, 0.25);
  const auto rep = metric_inequality_report(M, 10, 60);
  CHECK(rep.trials == 60);
  CHECK(rep.worst_subadd <= 1e-12);
  CHECK(rep.worst_periodicity == 0.0);
  CHECK_THROWS_AS(metric_inequality_report(M, 0, 10), DomainError);
}

TEST_CASE("doubling ladder: flat potential is exactly homogeneous") {
  const auto M = make_action_metric(model_2d(HamKind::Quadratic, "constant:0"), 8, 0.25);
  const auto rep = metric_inequality_report(M, 6, 10, 3, 4);
  REQUIRE(rep.ladder_steps == std::vector<int>{4, 8, 16});
  REQUIRE(rep.doubling_c.size() == 2);
  REQUIRE(rep.superadd_c.size() == 2);
  for (double c : rep.doubling_c) CHECK(std::abs(c) <= 1e-9);
  for (double c : rep.superadd_c) CHECK(std::abs(c) <= 1e-9);
  CHECK(rep.ladder_pass);
}

TEST_CASE("doubling ladder: oscillatory potential has bounded constants") {
  const auto M = make_action_metric(model_2d(HamKind::Quadratic, "cos2d"), 8, 0.25);
  const auto rep = metric_inequality_report(M, 6, 10, 3, 4);
  REQUIRE(rep.doubling_c.size() == 2);
  for (std::size_t i = 0; i < rep.doubling_c.size(); ++i) {
    CHECK(rep.doubling_c[i] >= 0.0);
    CHECK(rep.doubling_c[i] <= 1.0);
    CHECK(rep.superadd_c[i] >= 0.0);
    CHECK(rep.superadd_c[i] <= 1.0);
  }
  CHECK(rep.ladder_pass);
}

TEST_CASE("optimal-control solve: one step matches the direct minimum") {
  const auto M = make_action_metric(model_1d(HamKind::Quadratic, "cos1d"), 8, 0.25);
  const double eps = 0.125;
  const auto g = [](const Pt& x) { return 0.3 * std::sin(kTau * x[0]); };
  const double t1 = eps * M.tau;  // a single lattice step
  const auto u = oc_solve(M, eps, g, t1);
  const double dxl = eps * M.h;
  for (int j = 0; j < 64; j += 7) {
    double direct = 1e300;
    for (int d = -M.reach; d <= M.reach; ++d) {
      const double lz = M.lv[static_cast<std::size_t>(M.cell_of({j - d, 0})) * M.ndisp + (d + M.reach)];
      const double lx = M.lv[static_cast<std::size_t>(M.cell_of({j, 0})) * M.ndisp + (d + M.reach)];
      direct = std::min(direct, g(pt(dxl * (j - d))) + eps * M.tau * 0.5 * (lz + lx));
    }
    CHECK(std::abs(u.eval(1, pt(dxl * j)) - direct) <= 1e-12);
    CHECK(oc_value(M, eps, g, pt(dxl * j), t1) == u.eval(1, pt(dxl * j)));
  }
}

TEST_CASE("optimal-control solve approaches the variational solution") {
  const auto M = make_action_metric(model_1d(HamKind::Quadratic, "constant:0"), 8, 0.25);
  const double eps = 0.125;
  const double A = 0.8;
  const auto g = [&](const Pt& x) { return A * std::sin(kTau * x[0]) / kTau; };
  const auto g1 = [&](double y) { return A * std::sin(kTau * y) / kTau; };
  const auto u = oc_solve(M, eps, g, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 17; ++i) {
    const double x = i / 17.0;
    const double ref = oracles::hopf_lax_1d(g1, [](double q) { return 0.5 * q * q; }, x, 1.0, 2.0);
    worst = std::max(worst, std::abs(u.eval(1, pt(x)) - ref));
  }
  CHECK(worst <= 0.05);

  CHECK_THROWS_AS(oc_solve(M, 0.3, g, 1.0), DomainError);     // 1/eps not integral
  CHECK_THROWS_AS(oc_solve(M, 0.125, g, 0.01), DomainError);  // t not a step multiple
}

TEST_CASE("action metric constructor validation") {
  const auto m = model_1d(HamKind::Quadratic, "cos1d");
  CHECK_THROWS_AS(make_action_metric(m, 1, 0.25), DomainError);
  CHECK_THROWS_AS(make_action_metric(m, 8, 0.0), DomainError);
  ActionMetricOptions bad;
  bad.reach = 0;
  CHECK_THROWS_AS(make_action_metric(m, 8, 0.25, bad), DomainError);
  bad.reach = 8;
  CHECK_THROWS_AS(make_action_metric(m, 8, 0.25, bad), DomainError);
  ActionMetricOptions nopad;
  nopad.pad = 0;
  CHECK_THROWS_AS(make_action_metric(m, 8, 0.25, nopad), DomainError);
}

TEST_CASE("first-passage metric on constant speed fields") {
  const auto M1 = make_graph_metric(make_builtin_potential("constant:1", 2), 16);
  CHECK(graph_distance(M1, {0, 0}, {16, 0}) == 1.0);
  CHECK(std::abs(graph_distance(M1, {0, 0}, {16, 16}) - std::sqrt(2.0)) <= 1e-12);
  CHECK(graph_distance(M1, {3, 5}, {3, 5}) == 0.0);

  const auto M2 = make_graph_metric(make_builtin_potential("constant:2", 2), 16);
  for (int l = 1; l <= 3; ++l)
    CHECK(std::abs(graph_distance(M2, {0, 0}, {16 * l, 0}) - 0.5 * l) <= 1e-12);

  oracles::Golden g(0.37);
  for (int trial = 0; trial < 12; ++trial) {
    const Node a = {std::lround(g.range(-8, 8)), std::lround(g.range(-8, 8))};
    const Node b = {std::lround(g.range(-8, 8)), std::lround(g.range(-8, 8))};
    const Node c = {std::lround(g.range(-8, 8)), std::lround(g.range(-8, 8))};
    const auto& M = trial % 2 ? M2 : M1;
    CHECK(graph_distance(M, a, c) <=
          graph_distance(M, a, b) + graph_distance(M, b, c) + 1e-12);
    const Node aE = {a[0] + 16, a[1] - 32};
    const Node bE = {b[0] + 16, b[1] - 32};
    CHECK(std::abs(graph_distance(M, aE, bE) - graph_distance(M, a, b)) <= 1e-12);
  }

  CHECK_THROWS_AS(make_graph_metric(make_builtin_potential("cos2d", 2), 16), DomainError);
  CHECK_THROWS_AS(make_graph_metric(make_builtin_potential("constant:1", 2), 1), DomainError);
}

TEST_CASE("oscillatory speed field: refinement stability") {
  const auto a = make_builtin_potential("inv2mc2d", 2);
  const auto M16 = make_graph_metric(a, 16);
  const auto M32 = make_graph_metric(a, 32);
  const double d16 = graph_distance(M16, {0, 0}, {16, 0});
  const double d32 = graph_distance(M32, {0, 0}, {32, 0});
  CHECK(d16 >= 1.0);   // a <= 1 everywhere
  CHECK(d16 <= 2.01);  // straight path through the fast lane costs about 2
  CHECK(std::abs(d32 - d16) <= 0.02 * d16);
}

TEST_CASE("stable norm scan") {
  const auto M1 = make_graph_metric(make_builtin_potential("constant:1", 2), 16);
  const auto s1 = stable_norm_scan(M1, {1, 0}, 4);
  REQUIRE(s1.dist.size() == 4);
  for (int l = 1; l <= 4; ++l) CHECK(std::abs(s1.dist[l - 1] - l) <= 1e-12);
  CHECK(std::abs(s1.norm_est - 1.0) <= 1e-12);
  for (double d : s1.deviation) CHECK(std::abs(d) <= 1e-12);

  const auto sd = stable_norm_scan(M1, {1, 1}, 3);
  CHECK(std::abs(sd.norm_est - std::sqrt(2.0)) <= 1e-12);

  const auto M2 = make_graph_metric(make_builtin_potential("constant:2", 2), 16);
  CHECK(std::abs(stable_norm_scan(M2, {1, 0}, 4).norm_est - 0.5) <= 1e-12);

  const auto Mo = make_graph_metric(make_builtin_potential("inv2mc2d", 2), 16);
  const auto so = stable_norm_scan(Mo, {1, 0}, 6);
  CHECK(so.norm_est >= 1.5);
  CHECK(so.norm_est <= 2.05);
  // d(0, l P) is subadditive in l, so every deviation is nonnegative.
  for (double d : so.deviation) {
    CHECK(d >= -1e-9);
    CHECK(d <= 0.2);
  }
  const auto so2 = stable_norm_scan(Mo, {1, 0}, 6);
  CHECK(so2.dist == so.dist);  // deterministic

  CHECK_THROWS_AS(stable_norm_scan(M1, {1, 0}, 0), DomainError);
  CHECK_THROWS_AS(stable_norm_scan(M1, {0, 0}, 3), DomainError);
}
