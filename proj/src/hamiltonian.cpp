#include "hjlab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace hjlab {

double HamiltonianModel::eval_radial(double v, double r) const {
  switch (kind) {
    case HamKind::Quadratic:
      return 0.5 * r * r + v;
    case HamKind::Eikonal:
      return v * r;
    case HamKind::DoubleWell:
      return std::max(r - 1.0, 1.0 - r) + v;
    case HamKind::TruncEikonal:
      return std::max(0.0, r - 1.0) + v;
    case HamKind::AbsPlus:
      return r + v;
    case HamKind::Custom:
      break;
  }
  throw DomainError("eval_radial: custom models have no radial profile");
}

double HamiltonianModel::eval(const Pt& y, const Pt& p) const {
  if (kind == HamKind::Custom) return custom(y, p, dim);
  return eval_radial(field.eval(y), norm2(p, dim));
}

HamiltonianModel make_model(HamKind kind, PotentialField field, const std::string& id) {
  if (kind == HamKind::Custom) throw DomainError("make_model: use make_custom_model");
  HamiltonianModel m;
  m.dim = field.dim;
  m.kind = kind;
  if (kind == HamKind::Eikonal && field.vmin <= 0.0)
    throw DomainError("eikonal coefficient must be positive");
  m.convex = kind != HamKind::DoubleWell;
  m.radial = true;
  if (kind == HamKind::Quadratic) m.k0 = std::max(std::abs(field.vmin), std::abs(field.vmax)) + 1.0;
  m.field = std::move(field);
  m.id = id.empty() ? ("H[" + m.field.id + "]") : id;
  return m;
}

HamiltonianModel make_custom_model(int dim, std::function<double(const Pt&, const Pt&, int)> fn,
                                   bool convex, bool radial, const std::string& id) {
  HamiltonianModel m;
  m.dim = dim;
  m.kind = HamKind::Custom;
  m.convex = convex;
  m.radial = radial;
  m.custom = std::move(fn);
  m.id = id;
  return m;
}

static std::vector<Pt> direction_set(int dim) {
  if (dim == 1) return {pt(1.0)};
  std::vector<Pt> dirs;
  for (int k = 0; k < 16; ++k) {
    double a = kTau * k / 16.0;
    dirs.push_back(pt(std::cos(a), std::sin(a)));
  }
  return dirs;
}

static std::vector<Pt> y_sample_set(const HamiltonianModel& m, int per_axis = 33) {
  std::vector<Pt> ys;
  if (m.dim == 1) {
    for (int i = 0; i < per_axis; ++i) ys.push_back(pt(static_cast<double>(i) / per_axis));
  } else {
    for (int i = 0; i < per_axis; ++i)
      for (int j = 0; j < per_axis; ++j)
        ys.push_back(pt(static_cast<double>(i) / per_axis, static_cast<double>(j) / per_axis));
  }
  return ys;
}

double gradient_bound(const HamiltonianModel& m, double p_radius) {
  const double h = 1e-5;
  double best = 0.0;
  auto ys = y_sample_set(m, m.dim == 1 ? 65 : 17);
  auto dirs = direction_set(m.dim);
  const int nr = 65;
  for (const auto& y : ys)
    for (const auto& d : dirs)
      for (int ir = 0; ir <= nr; ++ir) {
        double r = p_radius * ir / nr;
        Pt p = {r * d[0], r * d[1]};
        for (int ax = 0; ax < m.dim; ++ax) {
          Pt pp = p, pm = p;
          pp[ax] += h;
          pm[ax] -= h;
          double g = std::abs(m.eval(y, pp) - m.eval(y, pm)) / (2 * h);
          best = std::max(best, g);
        }
      }
  return best;
}

double coercivity_radius(const HamiltonianModel& m, double level, double r_max) {
  auto ys = y_sample_set(m, m.dim == 1 ? 65 : 17);
  auto dirs = direction_set(m.dim);
  auto min_at = [&](double r) {
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& y : ys)
      for (const auto& d : dirs) mn = std::min(mn, m.eval(y, pt(r * d[0], r * d[1])));
    return mn;
  };
  double lo = 0.0, hi = 1.0;
  while (min_at(hi) < level) {
    lo = hi;
    hi *= 2.0;
    if (hi > r_max) throw DomainError("coercivity_radius: level not reached within range");
  }
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (min_at(mid) < level)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double convexity_violation(const HamiltonianModel& m, double p_radius, int n_samples) {
  // deterministic low-discrepancy sweep of (y, p1, p2) triples
  double worst = 0.0;
  double s1 = 0.5, s2 = 0.5, s3 = 0.5, s4 = 0.5, s5 = 0.5, s6 = 0.5;
  const double g1 = 0.6180339887498949, g2 = 0.7548776662466927, g3 = 0.5698402909980532,
               g4 = 0.8191725133961645, g5 = 0.6823278038280193, g6 = 0.4656613428918097;
  for (int i = 0; i < n_samples; ++i) {
    s1 = wrap01(s1 + g1);
    s2 = wrap01(s2 + g2);
    s3 = wrap01(s3 + g3);
    s4 = wrap01(s4 + g4);
    s5 = wrap01(s5 + g5);
    s6 = wrap01(s6 + g6);
    Pt y = pt(s1, s2);
    Pt p1 = {(2 * s3 - 1) * p_radius, m.dim == 2 ? (2 * s4 - 1) * p_radius : 0.0};
    Pt p2 = {(2 * s5 - 1) * p_radius, m.dim == 2 ? (2 * s6 - 1) * p_radius : 0.0};
    Pt mid = {0.5 * (p1[0] + p2[0]), 0.5 * (p1[1] + p2[1])};
    double v = m.eval(y, mid) - 0.5 * (m.eval(y, p1) + m.eval(y, p2));
    worst = std::max(worst, v);
  }
  return worst;
}

int default_p_steps(int dim) { return dim == 1 ? 512 : 256; }

namespace {

// golden-section maximization of f on [a,b]
template <class F>
double golden_max(F&& f, double a, double b, int iters, double* xbest) {
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  double xm = 0.5 * (a + b);
  double fm = f(xm);
  if (f1 > fm) {
    fm = f1;
    xm = x1;
  }
  if (f2 > fm) {
    fm = f2;
    xm = x2;
  }
  if (xbest) *xbest = xm;
  return fm;
}

}  // namespace

LegendreResult legendre(const HamiltonianModel& m, const Pt& y, const Pt& q, double p_radius,
                        int p_steps) {
  if (p_radius <= 0 || p_steps < 8) throw DomainError("legendre: bad search box");
  const double tie = 1e-12;
  LegendreResult res;

  if (m.radial) {
    // H = Phi(y,|p|): sup over p reduces to sup over r >= 0 of r|q| - Phi(y,r),
    // still a grid sup plus polish, just on the radial grid.
    double qn = norm2(q, m.dim);
    Pt dir = qn > 0 ? Pt{q[0] / qn, q[1] / qn} : Pt{1.0, 0.0};
    auto g = [&](double r) { return r * qn - m.eval(y, pt(r * dir[0], r * dir[1])); };
    double best = g(0.0);
    double rbest = 0.0;
    int ibest = 0;
    for (int i = 1; i <= p_steps; ++i) {
      double r = p_radius * i / p_steps;
      double v = g(r);
      if (v > best + tie * (1.0 + std::abs(best))) {
        best = v;
        rbest = r;
        ibest = i;
      }
    }
    if (ibest >= p_steps - 1)
      throw BoundaryAttainmentError("legendre: sup attained at |p| = p_radius (enlarge box)");
    double step = p_radius / p_steps;
    double lo = std::max(0.0, rbest - step), hi = std::min(p_radius, rbest + step);
    double rb = rbest;
    double vb = golden_max(g, lo, hi, 60, &rb);
    if (vb < best) {
      vb = best;
      rb = rbest;
    }
    res.value = vb;
    res.argmax = pt(rb * dir[0], rb * dir[1]);
    return res;
  }

  // generic full-box grid sup
  double step = 2.0 * p_radius / p_steps;
  double best = 0.0;
  Pt pb = {0, 0};
  bool have = false;
  bool on_edge = false;
  auto consider = [&](const Pt& p, bool edge) {
    double v = dot(p, q, m.dim) - m.eval(y, p);
    if (!have || v > best + tie * (1.0 + std::abs(best)) ||
        (std::abs(v - best) <= tie * (1.0 + std::abs(best)) &&
         norm2(p, m.dim) < norm2(pb, m.dim))) {
      have = true;
      best = v;
      pb = p;
      on_edge = edge;
    }
  };
  if (m.dim == 1) {
    for (int i = 0; i <= p_steps; ++i) {
      double p0 = -p_radius + step * i;
      consider(pt(p0), i <= 1 || i >= p_steps - 1);
    }
  } else {
    for (int i = 0; i <= p_steps; ++i)
      for (int j = 0; j <= p_steps; ++j) {
        double p0 = -p_radius + step * i, p1 = -p_radius + step * j;
        bool edge = i <= 1 || i >= p_steps - 1 || j <= 1 || j >= p_steps - 1;
        consider(pt(p0, p1), edge);
      }
  }
  if (on_edge)
    throw BoundaryAttainmentError("legendre: sup attained at the p-box edge (enlarge box)");
  // coordinate-wise polish
  Pt p = pb;
  for (int sweep = 0; sweep < 2; ++sweep)
    for (int ax = 0; ax < m.dim; ++ax) {
      auto g = [&](double t) {
        Pt pp = p;
        pp[ax] = t;
        return dot(pp, q, m.dim) - m.eval(y, pp);
      };
      double t = p[ax];
      double v = golden_max(g, p[ax] - step, p[ax] + step, 50, &t);
      if (v >= best) {
        best = v;
        p[ax] = t;
      }
    }
  res.value = best;
  res.argmax = p;
  return res;
}

HamiltonianModel quadratic_truncate(const HamiltonianModel& m, double c0) {
  if (c0 <= 0) throw DomainError("quadratic_truncate: c0 must be positive");
  if (m.kind == HamKind::Quadratic) return m;
  if (m.convex) {
    double viol = convexity_violation(m, 2 * c0 + 1);
    if (viol > 1e-9)
      throw ConvexityError("quadratic_truncate: model flagged convex but violates midpoint convexity");
  }
  const double r1 = 2 * c0 + 1;
  double r2 = 3 * c0 + 2;

  auto ys = y_sample_set(m, m.dim == 1 ? 129 : 33);
  auto dirs = direction_set(m.dim);
  auto kmin_of = [&](double R) {
    // max over |p| <= R of 0.5|p|^2 - H  (ensures parabola - K <= H there)
    double k = -std::numeric_limits<double>::infinity();
    const int nr = 96;
    for (const auto& y : ys)
      for (const auto& d : dirs)
        for (int i = 0; i <= nr; ++i) {
          double r = R * i / nr;
          k = std::max(k, 0.5 * r * r - m.eval(y, pt(r * d[0], r * d[1])));
        }
    return k;
  };
  auto kmax_of = [&](double R) {
    // min over |p| = R of 0.5|p|^2 - H (ensures parabola - K >= H at the crossover shell)
    double k = std::numeric_limits<double>::infinity();
    for (const auto& y : ys)
      for (const auto& d : dirs)
        k = std::min(k, 0.5 * R * R - m.eval(y, pt(R * d[0], R * d[1])));
    return k;
  };

  double kmin = kmin_of(r1);
  double kmax = kmax_of(r2);
  int widen = 0;
  while (kmax < kmin && widen < 5) {
    r2 += (c0 + 1);
    kmax = kmax_of(r2);
    ++widen;
  }
  if (kmax < kmin)
    throw DomainError("quadratic_truncate: no feasible blend constant (H grows too fast)");
  const double K = 0.5 * (kmin + kmax);

  // capture by value; the blended model is self-contained
  auto base = std::make_shared<HamiltonianModel>(m);
  double r2c = r2;
  int dim = m.dim;
  auto fn = [base, r1, r2c, K, dim](const Pt& y, const Pt& p, int) {
    double r = norm2(p, dim);
    double quad = 0.5 * r * r - K;
    if (r <= r1) return base->eval(y, p);
    if (r >= r2c) return quad;
    return std::max(base->eval(y, p), quad);
  };
  HamiltonianModel out = make_custom_model(m.dim, fn, m.convex, m.radial, m.id + "|qtrunc");
  out.field = m.field;
  // recomputed quadratic-growth constant: sample |H~ - 0.5|p|^2| inside the
  // crossover; beyond it the deviation is exactly K
  double k0 = K;
  const int nr = 96;
  for (const auto& y : ys)
    for (const auto& d : dirs)
      for (int i = 0; i <= nr; ++i) {
        double r = r2c * i / nr;
        Pt p = pt(r * d[0], r * d[1]);
        k0 = std::max(k0, std::abs(out.eval(y, p) - 0.5 * r * r));
      }
  out.k0 = k0 * (1.0 + 1e-6) + 1e-9;
  return out;
}

}  // namespace hjlab
