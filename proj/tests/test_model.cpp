#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <vector>

#include "hjlab/hamiltonian.hpp"
#include "hjlab/potential.hpp"
#include "oracles.hpp"

using namespace hjlab;

namespace {

HamiltonianModel model_1d(HamKind kind, const std::string& field) {
  return make_model(kind, make_builtin_potential(field, 1));
}

}  // namespace

TEST_CASE("closed-form Hamiltonian values") {
  const auto quad0 = model_1d(HamKind::Quadratic, "constant:0");
  CHECK(quad0.eval(pt(0.0), pt(1.0)) == 0.5);
  CHECK(quad0.eval(pt(0.37), pt(-2.0)) == 2.0);

  const auto dw0 = model_1d(HamKind::DoubleWell, "constant:0");
  CHECK(dw0.eval(pt(0.0), pt(0.0)) == 1.0);
  CHECK(dw0.eval(pt(0.2), pt(1.0)) == 0.0);
  CHECK(dw0.eval(pt(0.2), pt(3.0)) == 2.0);

  const auto eik = model_1d(HamKind::Eikonal, "cos1d*-1+2");  // a(y) = 2 - cos 2*pi*y
  CHECK(eik.eval(pt(0.0), pt(3.0)) == 3.0);
  CHECK(eik.eval(pt(0.5), pt(-1.0)) == 3.0);

  const auto ap = model_1d(HamKind::AbsPlus, "cos1d");
  CHECK(ap.eval(pt(0.0), pt(-2.0)) == 3.0);
  CHECK(ap.eval(pt(0.5), pt(2.0)) == 1.0);

  const auto te = model_1d(HamKind::TruncEikonal, "cos1d");
  CHECK(te.eval(pt(0.0), pt(0.5)) == 1.0);
  CHECK(te.eval(pt(0.0), pt(2.5)) == 2.5);

  const auto quad2 = make_model(HamKind::Quadratic, make_builtin_potential("cos2d", 2));
  CHECK(quad2.eval(pt(0.0, 0.5), pt(3.0, 4.0)) == 11.5);
}

TEST_CASE("radial evaluator agrees with full evaluator") {
  const std::vector<HamiltonianModel> models = {
      model_1d(HamKind::Quadratic, "cos1d"), model_1d(HamKind::Eikonal, "inv2mc1d"),
      model_1d(HamKind::DoubleWell, "cos1d*0.5"), model_1d(HamKind::TruncEikonal, "bump"),
      model_1d(HamKind::AbsPlus, "cos1d-1")};
  oracles::Golden g(0.23);
  for (const auto& m : models) {
    for (int i = 0; i < 40; ++i) {
      const double y = g.next();
      const double p = g.range(-4.0, 4.0);
      const double fv = m.field.eval(pt(y));
      CHECK(m.eval(pt(y), pt(p)) == m.eval_radial(fv, std::abs(p)));
    }
  }
}

TEST_CASE("exact periodicity in y") {
  const std::vector<HamiltonianModel> models = {
      model_1d(HamKind::Quadratic, "cos1d"), model_1d(HamKind::Eikonal, "inv2mc1d"),
      model_1d(HamKind::AbsPlus, "bump*2-1"), model_1d(HamKind::DoubleWell, "cos1d")};
  for (const auto& m : models) {
    for (int iy = 0; iy < 16; ++iy) {
      const double y = iy / 16.0;  // dyadic, so y + w is exact in binary
      for (int w = -2; w <= 3; ++w) {
        CHECK(m.eval(pt(y + w), pt(1.3)) == m.eval(pt(y), pt(1.3)));
      }
    }
  }
  const auto m2 = make_model(HamKind::Quadratic, make_builtin_potential("cos2d", 2));
  for (int iy = 0; iy < 8; ++iy) {
    const Pt y = pt(iy / 8.0, (iy * 3 % 8) / 8.0);
    CHECK(m2.eval(pt(y[0] + 2.0, y[1] - 1.0), pt(0.7, -0.4)) == m2.eval(y, pt(0.7, -0.4)));
  }
}

TEST_CASE("Legendre transform: closed-form values") {
  const auto quad0 = model_1d(HamKind::Quadratic, "constant:0");
  const auto r1 = legendre(quad0, pt(0.0), pt(1.0), 4.0, 512);
  CHECK(std::abs(r1.value - 0.5) <= 1e-9);
  CHECK(std::abs(r1.argmax[0] - 1.0) <= 1e-6);

  // L(y, 0) = -V(y) for the quadratic family: sup_p(-0.5|p|^2) - V = -V.
  const auto quadc = model_1d(HamKind::Quadratic, "cos1d");
  const auto r2 = legendre(quadc, pt(0.0), pt(0.0), 4.0, 512);
  CHECK(std::abs(r2.value - (-1.0)) <= 1e-12);
  CHECK(std::abs(r2.argmax[0]) <= 1e-9);

  // a == 1 eikonal: L(q) = 0 on |q| <= 1, +infinity outside (boundary blowup).
  const auto eik1 = model_1d(HamKind::Eikonal, "constant:1");
  const auto r3 = legendre(eik1, pt(0.1), pt(0.5), 4.0, 512);
  CHECK(std::abs(r3.value) <= 1e-9);
  CHECK(std::abs(r3.argmax[0]) <= 1e-6);  // ties resolved toward smaller |p|
  CHECK_THROWS_AS(legendre(eik1, pt(0.1), pt(1.5), 4.0, 512), BoundaryAttainmentError);

  CHECK_THROWS_AS(legendre(quad0, pt(0.0), pt(1.0), -1.0, 512), DomainError);
  CHECK_THROWS_AS(legendre(quad0, pt(0.0), pt(1.0), 4.0, 4), DomainError);
}

TEST_CASE("Fenchel-Young inequality on samples") {
  const std::vector<HamiltonianModel> models = {model_1d(HamKind::Quadratic, "cos1d"),
                                                model_1d(HamKind::AbsPlus, "bump")};
  oracles::Golden g(0.71);
  for (const auto& m : models) {
    for (int i = 0; i < 30; ++i) {
      const double y = g.next();
      const double q = g.range(-0.9, 0.9);  // stay inside every admissible-speed set
      const double p = g.range(-3.0, 3.0);
      const auto L = legendre(m, pt(y), pt(q), 6.0, 512);
      CHECK(p * q <= m.eval(pt(y), pt(p)) + L.value + 1e-9);
    }
  }
}

TEST_CASE("double Legendre conjugation recovers a convex Hamiltonian") {
  const auto m = model_1d(HamKind::Quadratic, "cos1d");
  const double y = 0.3;
  const int nq = 241;
  std::vector<double> qs(nq), Ls(nq);
  for (int i = 0; i < nq; ++i) {
    qs[i] = -3.0 + 6.0 * i / (nq - 1);
    Ls[i] = legendre(m, pt(y), pt(qs[i]), 8.0, 512).value;
  }
  for (const double p : {0.0, 0.5, -1.25}) {
    double rec = -1e300;
    for (int i = 0; i < nq; ++i) rec = std::max(rec, p * qs[i] - Ls[i]);
    CHECK(std::abs(rec - m.eval(pt(y), pt(p))) <= 1e-3);
  }
}

TEST_CASE("quadratic growth envelope with the stored constant") {
  const auto m = model_1d(HamKind::Quadratic, "cos1d");
  CHECK(m.k0 == 2.0);  // max|V| + 1
  oracles::Golden g(0.4);
  for (int i = 0; i < 200; ++i) {
    const double y = g.next();
    const double p = g.range(-6.0, 6.0);
    const double h = m.eval(pt(y), pt(p));
    CHECK(h >= 0.5 * p * p - m.k0);
    CHECK(h <= 0.5 * p * p + m.k0);
  }
}

TEST_CASE("gradient bound and coercivity radius") {
  const auto quad = model_1d(HamKind::Quadratic, "cos1d");
  CHECK(std::abs(gradient_bound(quad, 3.0) - 3.0) <= 0.05);

  const auto eik = model_1d(HamKind::Eikonal, "cos1d*-1+2");  // a in [1, 3]
  CHECK(std::abs(gradient_bound(eik, 5.0) - 3.0) <= 0.05);

  const auto ap = model_1d(HamKind::AbsPlus, "cos1d");  // min_y H(y, R) = R - 1
  CHECK(std::abs(coercivity_radius(ap, 5.0) - 6.0) <= 0.2);
  CHECK_THROWS_AS(coercivity_radius(ap, 100.0, 8.0), DomainError);
}

TEST_CASE("midpoint convexity check separates the families") {
  CHECK(convexity_violation(model_1d(HamKind::Quadratic, "cos1d"), 4.0) <= 1e-12);
  CHECK(convexity_violation(model_1d(HamKind::Eikonal, "inv2mc1d"), 4.0) <= 1e-12);
  CHECK(convexity_violation(model_1d(HamKind::AbsPlus, "bump"), 4.0) <= 1e-12);
  CHECK(convexity_violation(model_1d(HamKind::DoubleWell, "cos1d"), 4.0) >= 0.5);
}

TEST_CASE("quadratic truncation") {
  const auto quad = model_1d(HamKind::Quadratic, "cos1d");
  const auto same = quadratic_truncate(quad, 1.0);
  CHECK(same.id == quad.id);
  CHECK(same.eval(pt(0.2), pt(1.7)) == quad.eval(pt(0.2), pt(1.7)));

  const auto eik = model_1d(HamKind::Eikonal, "constant:1");  // H = |p|
  const double c0 = 1.0;
  const auto t = quadratic_truncate(eik, c0);
  CHECK(t.kind == HamKind::Custom);
  // Unchanged inside |p| <= 2 c0 + 1.
  for (const double p : {0.0, 0.5, -1.0, 2.0, -3.0}) {
    CHECK(t.eval(pt(0.3), pt(p)) == eik.eval(pt(0.3), pt(p)));
  }
  // Pure 0.5 p^2 - K tail outside the crossover annulus (common constant K).
  const double k5 = 0.5 * 25.0 - t.eval(pt(0.1), pt(5.0));
  const double k6 = 0.5 * 36.0 - t.eval(pt(0.1), pt(-6.0));
  CHECK(std::abs(k5 - k6) <= 1e-12);
  // Never falls below the original model, and the recomputed growth constant
  // really bounds |H~ - 0.5|p|^2| on a wide sample.
  oracles::Golden g(0.9);
  for (int i = 0; i < 400; ++i) {
    const double y = g.next();
    const double p = g.range(-8.0, 8.0);
    const double h = t.eval(pt(y), pt(p));
    CHECK(h >= eik.eval(pt(y), pt(p)) - 1e-9);
    CHECK(std::abs(h - 0.5 * p * p) <= t.k0 + 1e-9);
  }
  CHECK(convexity_violation(t, 8.0) <= 1e-9);

  CHECK_THROWS_AS(quadratic_truncate(eik, 0.0), DomainError);
  auto liar = make_custom_model(
      1, [](const Pt&, const Pt& p, int) { return std::max(std::abs(p[0]) - 1.0, 1.0 - std::abs(p[0])); },
      /*convex=*/true, /*radial=*/true, "liar");
  CHECK_THROWS_AS(quadratic_truncate(liar, 1.0), ConvexityError);
}

TEST_CASE("potential parsing and closed forms") {
  const auto f = make_builtin_potential("cos1d*2-2", 1);
  CHECK(f.eval(pt(0.0)) == 0.0);
  CHECK(f.eval(pt(0.5)) == -4.0);
  CHECK(f.vmax == 0.0);
  CHECK(f.vmin == -4.0);
  CHECK(f.osc() == 4.0);

  const auto c = make_builtin_potential("constant:2", 1);
  CHECK(c.eval(pt(0.123)) == 2.0);
  CHECK(c.osc() == 0.0);

  const auto inv = make_builtin_potential("inv2mc1d", 1);
  CHECK(inv.eval(pt(0.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(inv.eval(pt(0.5)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const auto b = make_builtin_potential("bump", 1);
  CHECK(b.osc() > 0.0);
  CHECK(b.eval(pt(0.25 + 1.0)) == b.eval(pt(0.25)));

  CHECK_THROWS_AS(make_builtin_potential("nosuch", 1), DomainError);
  CHECK_THROWS_AS(make_builtin_potential("cos2d", 1), DomainError);
  CHECK_THROWS_AS(make_builtin_potential("inv2mc2d", 1), DomainError);
}

TEST_CASE("potential normalization shifts the max to zero") {
  auto c = make_builtin_potential("constant:3", 1);
  const double s1 = normalize_potential(c);
  CHECK(s1 == 3.0);
  CHECK(c.eval(pt(0.77)) == 0.0);
  CHECK(c.vmax == 0.0);

  auto f = make_builtin_potential("cos1d*2", 1);
  const double osc_before = f.osc();
  const double s2 = normalize_potential(f);
  CHECK(s2 == 2.0);
  CHECK(f.eval(pt(0.0)) == 0.0);
  CHECK(f.eval(pt(0.5)) == -4.0);
  CHECK(f.vmax == 0.0);
  CHECK(f.osc() == osc_before);
}

TEST_CASE("sampled potentials and CSV round trip") {
  const int res = 32;
  std::vector<double> samples(res);
  for (int i = 0; i < res; ++i) samples[i] = std::sin(kTau * i / res) + 0.25;
  const auto f = make_sampled_potential(1, res, samples, /*trig=*/false, "wave");
  for (int i = 0; i < res; ++i) CHECK(f.eval(pt(double(i) / res)) == doctest::Approx(samples[i]).epsilon(1e-12));
  // Multilinear interpolation: midpoints average the neighbouring nodes.
  for (int i = 0; i + 1 < res; ++i) {
    const double mid = (i + 0.5) / res;
    CHECK(f.eval(pt(mid)) == doctest::Approx(0.5 * (samples[i] + samples[i + 1])).epsilon(1e-12));
  }

  const auto ft = make_sampled_potential(1, res, samples, /*trig=*/true, "wave-trig");
  for (int i = 0; i < res; ++i) CHECK(std::abs(ft.eval(pt(double(i) / res)) - samples[i]) <= 1e-9);
  // Trigonometric interpolation of a pure harmonic is exact off the grid too.
  CHECK(std::abs(ft.eval(pt(0.01)) - (std::sin(kTau * 0.01) + 0.25)) <= 1e-9);

  const std::string path = "model_potential_roundtrip.csv";
  save_potential_csv(path, f);
  const auto g = load_potential_csv(path, /*trig=*/false);
  CHECK(g.dim == 1);
  CHECK(g.resolution == res);
  // Writers round to 12 significant digits, so the round trip is not bitwise.
  for (int i = 0; i < res; ++i) CHECK(std::abs(g.samples[i] - samples[i]) <= 1e-11);
  CHECK(std::abs(g.vmin - f.vmin) <= 1e-11);
  CHECK(std::abs(g.vmax - f.vmax) <= 1e-11);
  std::remove(path.c_str());

  CHECK_THROWS_AS(make_sampled_potential(3, 8, std::vector<double>(8, 0.0), false, "x"), DomainError);
  CHECK_THROWS_AS(make_sampled_potential(1, 8, std::vector<double>(7, 0.0), false, "x"), DomainError);
}
