#include "hjlab/lagrangian.hpp"

#include <cmath>
#include <limits>

#include "hjlab/par.hpp"

namespace hjlab {

static const double kInf = std::numeric_limits<double>::infinity();

LagrangianTable build_lagrangian_table(const HamiltonianModel& m, int y_res, double q_radius,
                                       int q_steps, double p_radius, int p_steps) {
  if (y_res < 1 || q_steps < 2 || q_radius <= 0) throw DomainError("lagrangian table: bad grid");
  LagrangianTable t;
  t.model = m;
  t.y_res = y_res;
  t.q_radius = q_radius;
  t.q_steps = q_steps;
  if (p_steps <= 0) p_steps = default_p_steps(m.dim);
  if (p_radius <= 0.0) {
    double osc = std::max(std::abs(m.field.vmin), std::abs(m.field.vmax));
    p_radius = q_radius + osc + 4.0;
  }
  t.p_radius = p_radius;
  t.p_steps = p_steps;

  const int ny = t.y_nodes();
  const int nq = t.q_nodes();
  const int nqa = t.q_nodes_axis();
  t.values.assign(static_cast<std::size_t>(ny) * nq, 0.0);

  parallel_for(ny, [&](std::size_t iy) {
    Pt y;
    if (m.dim == 1)
      y = pt(static_cast<double>(iy) / y_res);
    else
      y = pt(static_cast<double>(iy / y_res) / y_res, static_cast<double>(iy % y_res) / y_res);
    for (int iq = 0; iq < nq; ++iq) {
      Pt q;
      if (m.dim == 1)
        q = pt(t.q_at(iq));
      else
        q = pt(t.q_at(iq / nqa), t.q_at(iq % nqa));
      double v;
      try {
        v = legendre(m, y, q, p_radius, p_steps).value;
      } catch (const BoundaryAttainmentError&) {
        v = kInf;
      }
      t.values[iy * static_cast<std::size_t>(nq) + iq] = v;
    }
  });
  return t;
}

double LagrangianTable::eval(const Pt& y, const Pt& q) const {
  const int dim = model.dim;
  for (int i = 0; i < dim; ++i)
    if (std::abs(q[i]) > q_radius * (1.0 + 1e-12) + 1e-12)
      throw SpeedRangeError("lagrangian table: |q| exceeds table range (enlarge q_radius)");

  // y weights (periodic)
  int iy0[2] = {0, 0}, iy1[2] = {0, 0};
  double wy[2] = {0.0, 0.0};
  for (int i = 0; i < dim; ++i) {
    double u = wrap01(y[i]) * y_res;
    int k = static_cast<int>(u);
    if (k >= y_res) k = y_res - 1;
    iy0[i] = k;
    iy1[i] = (k + 1) % y_res;
    wy[i] = u - k;
  }
  // q weights (clamped to the box)
  int iq0[2] = {0, 0}, iq1[2] = {0, 0};
  double wq[2] = {0.0, 0.0};
  for (int i = 0; i < dim; ++i) {
    double u = (q[i] + q_radius) / (2.0 * q_radius) * q_steps;
    if (u < 0) u = 0;
    if (u > q_steps) u = q_steps;
    int k = static_cast<int>(u);
    if (k >= q_steps) k = q_steps - 1;
    iq0[i] = k;
    iq1[i] = k + 1;
    wq[i] = u - k;
  }

  const int nqa = q_nodes_axis();
  auto yindex = [&](int a, int b) { return dim == 1 ? a : a * y_res + b; };
  auto qindex = [&](int a, int b) { return dim == 1 ? a : a * nqa + b; };

  double acc = 0.0;
  int ycorners = dim == 1 ? 2 : 4;
  int qcorners = dim == 1 ? 2 : 4;
  for (int cy = 0; cy < ycorners; ++cy) {
    int ai = (cy & 1) ? iy1[0] : iy0[0];
    double wa = (cy & 1) ? wy[0] : 1.0 - wy[0];
    int bi = dim == 2 ? ((cy & 2) ? iy1[1] : iy0[1]) : 0;
    double wb = dim == 2 ? ((cy & 2) ? wy[1] : 1.0 - wy[1]) : 1.0;
    double wyc = wa * wb;
    if (wyc == 0.0) continue;
    for (int cq = 0; cq < qcorners; ++cq) {
      int ci = (cq & 1) ? iq1[0] : iq0[0];
      double wc = (cq & 1) ? wq[0] : 1.0 - wq[0];
      int di = dim == 2 ? ((cq & 2) ? iq1[1] : iq0[1]) : 0;
      double wd = dim == 2 ? ((cq & 2) ? wq[1] : 1.0 - wq[1]) : 1.0;
      double w = wyc * wc * wd;
      if (w == 0.0) continue;
      double v = value_at(yindex(ai, bi), qindex(ci, di));
      if (std::isinf(v)) return kInf;
      acc += w * v;
    }
  }
  return acc;
}

double lagrangian_convexity_violation(const LagrangianTable& t) {
  double worst = 0.0;
  const int nqa = t.q_nodes_axis();
  const int ny = t.y_nodes();
  auto check_line = [&](int iy, auto index_of) {
    for (int i = 1; i + 1 < nqa; ++i) {
      double a = t.value_at(iy, index_of(i - 1));
      double b = t.value_at(iy, index_of(i));
      double c = t.value_at(iy, index_of(i + 1));
      if (std::isinf(a) || std::isinf(b) || std::isinf(c)) continue;
      worst = std::max(worst, b - 0.5 * (a + c));
    }
  };
  for (int iy = 0; iy < ny; ++iy) {
    if (t.model.dim == 1) {
      check_line(iy, [&](int i) { return i; });
    } else {
      for (int row = 0; row < nqa; ++row)
        check_line(iy, [&, row](int i) { return row * nqa + i; });
      for (int col = 0; col < nqa; ++col)
        check_line(iy, [&, col](int i) { return i * nqa + col; });
    }
  }
  return worst;
}

}  // namespace hjlab
