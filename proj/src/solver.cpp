#include "hjlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hjlab {

double SpaceTimeField::eval(int k, const Pt& x) const {
  const auto& u = data.at(static_cast<std::size_t>(k));
  if (dim == 1) {
    double s = wrap01(x[0]) * nx;
    int i = static_cast<int>(s);
    if (i >= nx) i = nx - 1;
    double w = s - i;
    int ip = (i + 1 == nx) ? 0 : i + 1;
    return u[i] * (1.0 - w) + u[ip] * w;
  }
  double s0 = wrap01(x[0]) * nx, s1 = wrap01(x[1]) * nx;
  int i = static_cast<int>(s0), j = static_cast<int>(s1);
  if (i >= nx) i = nx - 1;
  if (j >= nx) j = nx - 1;
  double a = s0 - i, b = s1 - j;
  int ip = (i + 1 == nx) ? 0 : i + 1, jp = (j + 1 == nx) ? 0 : j + 1;
  return (1 - a) * ((1 - b) * u[i * nx + j] + b * u[i * nx + jp]) +
         a * ((1 - b) * u[ip * nx + j] + b * u[ip * nx + jp]);
}

namespace {

template <HamKind K>
struct HF1 {
  const double* v;
  double p0;
  double operator()(int i, double dp) const {
    double r = std::abs(p0 + dp);
    if constexpr (K == HamKind::Quadratic)
      return 0.5 * r * r + v[i];
    else if constexpr (K == HamKind::Eikonal)
      return v[i] * r;
    else if constexpr (K == HamKind::DoubleWell)
      return std::max(r - 1.0, 1.0 - r) + v[i];
    else if constexpr (K == HamKind::TruncEikonal)
      return std::max(0.0, r - 1.0) + v[i];
    else
      return r + v[i];
  }
};

template <HamKind K>
struct HF2 {
  const double* v;
  double p0x, p0y;
  double operator()(int i, double dpx, double dpy) const {
    double a = p0x + dpx, b = p0y + dpy;
    double r = std::sqrt(a * a + b * b);
    if constexpr (K == HamKind::Quadratic)
      return 0.5 * r * r + v[i];
    else if constexpr (K == HamKind::Eikonal)
      return v[i] * r;
    else if constexpr (K == HamKind::DoubleWell)
      return std::max(r - 1.0, 1.0 - r) + v[i];
    else if constexpr (K == HamKind::TruncEikonal)
      return std::max(0.0, r - 1.0) + v[i];
    else
      return r + v[i];
  }
};

struct TableHF1 {
  const double* h;
  int n;  // nodes
  double pmin, inv_dp, p0;
  double operator()(int, double dp) const {
    double x = (p0 + dp - pmin) * inv_dp;
    if (x < 0.0) x = 0.0;
    double xm = static_cast<double>(n - 1);
    if (x > xm) x = xm;
    int i = static_cast<int>(x);
    if (i > n - 2) i = n - 2;
    double w = x - i;
    return h[i] + w * (h[i + 1] - h[i]);
  }
};

struct TableHF2 {
  const double* h;
  int n;
  double pmin, inv_dp, p0x, p0y;
  double operator()(int, double dpx, double dpy) const {
    double x = (p0x + dpx - pmin) * inv_dp, y = (p0y + dpy - pmin) * inv_dp;
    double xm = static_cast<double>(n - 1);
    if (x < 0.0) x = 0.0;
    if (x > xm) x = xm;
    if (y < 0.0) y = 0.0;
    if (y > xm) y = xm;
    int i = static_cast<int>(x), j = static_cast<int>(y);
    if (i > n - 2) i = n - 2;
    if (j > n - 2) j = n - 2;
    double a = x - i, b = y - j;
    return (1 - a) * ((1 - b) * h[i * n + j] + b * h[i * n + j + 1]) +
           a * ((1 - b) * h[(i + 1) * n + j] + b * h[(i + 1) * n + j + 1]);
  }
};

struct CustomHF1 {
  const HamiltonianModel* m;
  const Pt* ys;
  double p0;
  double operator()(int i, double dp) const { return m->eval(ys[i], pt(p0 + dp)); }
};

struct CustomHF2 {
  const HamiltonianModel* m;
  const Pt* ys;
  double p0x, p0y;
  double operator()(int i, double dpx, double dpy) const {
    return m->eval(ys[i], pt(p0x + dpx, p0y + dpy));
  }
};

template <class HF>
void march_1d(const std::vector<double>& u, std::vector<double>& un, int nx, double dt,
              double inv2dx, const HF& hf) {
  un[0] = 0.5 * (u[nx - 1] + u[1]) - dt * hf(0, (u[1] - u[nx - 1]) * inv2dx);
  for (int i = 1; i < nx - 1; ++i)
    un[i] = 0.5 * (u[i - 1] + u[i + 1]) - dt * hf(i, (u[i + 1] - u[i - 1]) * inv2dx);
  un[nx - 1] = 0.5 * (u[nx - 2] + u[0]) - dt * hf(nx - 1, (u[0] - u[nx - 2]) * inv2dx);
}

template <class HF>
void march_2d(const std::vector<double>& u, std::vector<double>& un, int nx, double dt,
              double inv2dx, const HF& hf) {
  for (int i0 = 0; i0 < nx; ++i0) {
    const double* rm = &u[static_cast<std::size_t>(i0 == 0 ? nx - 1 : i0 - 1) * nx];
    const double* rp = &u[static_cast<std::size_t>(i0 + 1 == nx ? 0 : i0 + 1) * nx];
    const double* rc = &u[static_cast<std::size_t>(i0) * nx];
    double* out = &un[static_cast<std::size_t>(i0) * nx];
    const int base = i0 * nx;
    out[0] = 0.25 * (rm[0] + rp[0] + rc[nx - 1] + rc[1]) -
             dt * hf(base, (rp[0] - rm[0]) * inv2dx, (rc[1] - rc[nx - 1]) * inv2dx);
    for (int j = 1; j < nx - 1; ++j)
      out[j] = 0.25 * (rm[j] + rp[j] + rc[j - 1] + rc[j + 1]) -
               dt * hf(base + j, (rp[j] - rm[j]) * inv2dx, (rc[j + 1] - rc[j - 1]) * inv2dx);
    out[nx - 1] = 0.25 * (rm[nx - 1] + rp[nx - 1] + rc[nx - 2] + rc[0]) -
                  dt * hf(base + nx - 1, (rp[nx - 1] - rm[nx - 1]) * inv2dx,
                          (rc[0] - rc[nx - 2]) * inv2dx);
  }
}

template <int DIM, class HF>
void drive(SpaceTimeField& f, const std::vector<double>& snaps, double dt_nom, const HF& hf) {
  const int nx = f.nx;
  std::vector<double> u = f.data[0], un(u.size());
  const double inv2dx = 0.5 / f.dx;
  double t = 0.0;
  long step = 0;
  for (double s : snaps) {
    while (t < s - 1e-12 * (1.0 + s)) {
      double dtt = std::min(dt_nom, s - t);
      if constexpr (DIM == 1)
        march_1d(u, un, nx, dtt, inv2dx, hf);
      else
        march_2d(u, un, nx, dtt, inv2dx, hf);
      u.swap(un);
      t += dtt;
      ++step;
    }
    t = s;
    for (double x : u)
      if (!std::isfinite(x)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "solve_cauchy: non-finite value after step %ld (t=%g)",
                      step, t);
        throw DomainError(buf);
      }
    f.data.push_back(u);
    f.times.push_back(s);
  }
}

double measure_lip(const std::vector<double>& u, int dim, int nx, double dx) {
  double best = 0.0;
  if (dim == 1) {
    for (int i = 0; i < nx; ++i) {
      int ip = (i + 1 == nx) ? 0 : i + 1;
      best = std::max(best, std::abs(u[ip] - u[i]));
    }
  } else {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nx; ++j) {
        int ip = (i + 1 == nx) ? 0 : i + 1, jp = (j + 1 == nx) ? 0 : j + 1;
        best = std::max(best, std::abs(u[ip * nx + j] - u[i * nx + j]));
        best = std::max(best, std::abs(u[i * nx + jp] - u[i * nx + j]));
      }
  }
  return best / dx;
}

SpaceTimeField solve_common(const HamiltonianModel* m, const EffectiveTable* tbl,
                            const std::function<double(const Pt&)>& g, const SolveOptions& opt) {
  const int dim = m ? m->dim : tbl->dim;
  if (dim != 1 && dim != 2) throw DomainError("solve_cauchy: dim must be 1 or 2");
  const int nx = opt.nx;
  if (nx < 8) throw GridMismatchError("solve_cauchy: nx too small");
  const double eps = tbl ? 1.0 : opt.eps;
  if (!(eps > 0.0)) throw DomainError("solve_cauchy: eps must be positive");
  const double kreal = 1.0 / eps;
  const long k = std::lround(kreal);
  if (k < 1 || std::abs(kreal - k) > 1e-9 * k)
    throw GridMismatchError("solve_cauchy: 1/eps must be an integer");
  if (nx % k != 0) throw GridMismatchError("solve_cauchy: nx must be a multiple of 1/eps");
  const long cells_per_period = nx / k;
  if (cells_per_period < 32 && !opt.allow_coarse)
    throw GridMismatchError("solve_cauchy: fewer than 32 cells per period (set allow_coarse)");

  std::vector<double> snaps = opt.snapshots;
  if (snaps.empty()) snaps.push_back(opt.T);
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    if (!(snaps[i] > 0.0)) throw DomainError("solve_cauchy: snapshot times must be positive");
    if (i > 0 && !(snaps[i] > snaps[i - 1]))
      throw DomainError("solve_cauchy: snapshot times must be ascending");
  }

  SpaceTimeField f;
  f.dim = dim;
  f.nx = nx;
  f.dx = 1.0 / nx;
  f.eps = eps;
  f.model_id = m ? m->id : ("table[" + tbl->model_id + "]");
  f.times.push_back(0.0);
  f.data.emplace_back();
  auto& u0 = f.data[0];
  u0.resize(dim == 1 ? static_cast<std::size_t>(nx) : static_cast<std::size_t>(nx) * nx);
  if (dim == 1) {
    for (int i = 0; i < nx; ++i) u0[i] = g(pt(i * f.dx));
  } else {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nx; ++j) u0[static_cast<std::size_t>(i) * nx + j] = g(pt(i * f.dx, j * f.dx));
  }

  double lg = measure_lip(u0, dim, nx, f.dx);
  if (opt.lip_hint >= 0.0) lg = std::max(lg, opt.lip_hint);
  const double shift = norm2(opt.p_shift, dim);

  double theta;
  double range;
  if (tbl) {
    range = shift + std::sqrt(static_cast<double>(dim)) * lg;
    if (range > tbl->p_radius + 1e-12)
      throw DomainError("solve_cauchy: effective table box smaller than the data gradient range");
    theta = tbl->max_slope();
  } else {
    range = shift + std::sqrt(static_cast<double>(dim)) * lipschitz_radius(*m, lg) + 1.0;
    if (m->kind == HamKind::Custom) range += opt.bound_pad;
    theta = theta_for(*m, range);
  }
  theta = std::max(theta, 0.5);
  if (opt.theta_override > 0.0) {
    if (opt.theta_override < theta * (1.0 - 1e-9))
      throw CflError("solve_cauchy: shared theta below the stability requirement");
    theta = opt.theta_override;
  }
  const double dt_max = f.dx / (2.0 * dim * theta);
  double dtn = opt.cfl * dt_max;
  if (opt.dt_override > 0.0) {
    if (opt.dt_override > dt_max * (1.0 + 1e-12))
      throw CflError("solve_cauchy: dt override violates the CFL bound");
    dtn = opt.dt_override;
  }
  f.theta = theta;
  f.dt = dtn;

  const std::size_t nnode = u0.size();
  std::vector<double> vc;
  std::vector<Pt> ys;
  const bool need_v = m && m->kind != HamKind::Custom;
  const bool need_y = m && m->kind == HamKind::Custom;
  if (need_v || need_y) {
    const double invc = 1.0 / static_cast<double>(cells_per_period);
    if (need_v) vc.resize(nnode);
    if (need_y) ys.resize(nnode);
    if (dim == 1) {
      for (int i = 0; i < nx; ++i) {
        Pt y = pt((i % cells_per_period) * invc);
        if (need_v)
          vc[i] = m->field.eval(y);
        else
          ys[i] = y;
      }
    } else {
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) {
          Pt y = pt((i % cells_per_period) * invc, (j % cells_per_period) * invc);
          std::size_t idx = static_cast<std::size_t>(i) * nx + j;
          if (need_v)
            vc[idx] = m->field.eval(y);
          else
            ys[idx] = y;
        }
    }
  }

  const double p0x = opt.p_shift[0], p0y = opt.p_shift[1];
  if (tbl) {
    const int n = tbl->nodes_axis();
    const double inv_dp = tbl->p_steps / (2.0 * tbl->p_radius);
    if (dim == 1)
      drive<1>(f, snaps, dtn, TableHF1{tbl->hbar.data(), n, -tbl->p_radius, inv_dp, p0x});
    else
      drive<2>(f, snaps, dtn, TableHF2{tbl->hbar.data(), n, -tbl->p_radius, inv_dp, p0x, p0y});
  } else if (m->kind == HamKind::Custom) {
    if (dim == 1)
      drive<1>(f, snaps, dtn, CustomHF1{m, ys.data(), p0x});
    else
      drive<2>(f, snaps, dtn, CustomHF2{m, ys.data(), p0x, p0y});
  } else if (dim == 1) {
    const double* v = vc.data();
    switch (m->kind) {
      case HamKind::Quadratic:
        drive<1>(f, snaps, dtn, HF1<HamKind::Quadratic>{v, p0x});
        break;
      case HamKind::Eikonal:
        drive<1>(f, snaps, dtn, HF1<HamKind::Eikonal>{v, p0x});
        break;
      case HamKind::DoubleWell:
        drive<1>(f, snaps, dtn, HF1<HamKind::DoubleWell>{v, p0x});
        break;
      case HamKind::TruncEikonal:
        drive<1>(f, snaps, dtn, HF1<HamKind::TruncEikonal>{v, p0x});
        break;
      case HamKind::AbsPlus:
        drive<1>(f, snaps, dtn, HF1<HamKind::AbsPlus>{v, p0x});
        break;
      case HamKind::Custom:
        break;
    }
  } else {
    const double* v = vc.data();
    switch (m->kind) {
      case HamKind::Quadratic:
        drive<2>(f, snaps, dtn, HF2<HamKind::Quadratic>{v, p0x, p0y});
        break;
      case HamKind::Eikonal:
        drive<2>(f, snaps, dtn, HF2<HamKind::Eikonal>{v, p0x, p0y});
        break;
      case HamKind::DoubleWell:
        drive<2>(f, snaps, dtn, HF2<HamKind::DoubleWell>{v, p0x, p0y});
        break;
      case HamKind::TruncEikonal:
        drive<2>(f, snaps, dtn, HF2<HamKind::TruncEikonal>{v, p0x, p0y});
        break;
      case HamKind::AbsPlus:
        drive<2>(f, snaps, dtn, HF2<HamKind::AbsPlus>{v, p0x, p0y});
        break;
      case HamKind::Custom:
        break;
    }
  }

  double lb = 0.0;
  for (const auto& u : f.data) lb = std::max(lb, measure_lip(u, dim, nx, f.dx));
  f.lip_bound = lb;
  return f;
}

}  // namespace

SpaceTimeField solve_cauchy(const HamiltonianModel& m, const std::function<double(const Pt&)>& g,
                            const SolveOptions& opt) {
  return solve_common(&m, nullptr, g, opt);
}

SpaceTimeField solve_cauchy_table(const EffectiveTable& tbl,
                                  const std::function<double(const Pt&)>& g,
                                  const SolveOptions& opt) {
  return solve_common(nullptr, &tbl, g, opt);
}

double sup_error(const SpaceTimeField& a, const SpaceTimeField& b) {
  if (a.dim != b.dim || a.nx != b.nx) throw GridMismatchError("sup_error: grids differ");
  if (a.times.size() != b.times.size()) throw GridMismatchError("sup_error: snapshot sets differ");
  for (std::size_t k = 0; k < a.times.size(); ++k)
    if (std::abs(a.times[k] - b.times[k]) > 1e-9 * (1.0 + std::abs(a.times[k])))
      throw GridMismatchError("sup_error: snapshot times differ");
  double best = 0.0;
  for (std::size_t k = 0; k < a.data.size(); ++k)
    for (std::size_t i = 0; i < a.data[k].size(); ++i)
      best = std::max(best, std::abs(a.data[k][i] - b.data[k][i]));
  return best;
}

double restriction_sup_error(const SpaceTimeField& coarse, const SpaceTimeField& fine) {
  if (coarse.dim != fine.dim || fine.nx % coarse.nx != 0)
    throw GridMismatchError("restriction_sup_error: fine grid must refine the coarse one");
  if (coarse.times.size() != fine.times.size())
    throw GridMismatchError("restriction_sup_error: snapshot sets differ");
  for (std::size_t k = 0; k < coarse.times.size(); ++k)
    if (std::abs(coarse.times[k] - fine.times[k]) > 1e-9 * (1.0 + std::abs(coarse.times[k])))
      throw GridMismatchError("restriction_sup_error: snapshot times differ");
  const int r = fine.nx / coarse.nx;
  double best = 0.0;
  for (std::size_t k = 0; k < coarse.data.size(); ++k) {
    if (coarse.dim == 1) {
      for (int i = 0; i < coarse.nx; ++i)
        best = std::max(best, std::abs(coarse.data[k][i] - fine.data[k][static_cast<std::size_t>(i) * r]));
    } else {
      for (int i = 0; i < coarse.nx; ++i)
        for (int j = 0; j < coarse.nx; ++j)
          best = std::max(best,
                          std::abs(coarse.data[k][static_cast<std::size_t>(i) * coarse.nx + j] -
                                   fine.data[k][static_cast<std::size_t>(i) * r * fine.nx +
                                                static_cast<std::size_t>(j) * r]));
    }
  }
  return best;
}

double grid_lipschitz(const std::function<double(const Pt&)>& g, int dim, int nx) {
  const double dx = 1.0 / nx;
  std::vector<double> u(dim == 1 ? static_cast<std::size_t>(nx) : static_cast<std::size_t>(nx) * nx);
  if (dim == 1)
    for (int i = 0; i < nx; ++i) u[i] = g(pt(i * dx));
  else
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nx; ++j) u[static_cast<std::size_t>(i) * nx + j] = g(pt(i * dx, j * dx));
  return measure_lip(u, dim, nx, dx);
}

double lipschitz_radius(const HamiltonianModel& m, double lip_g) {
  const double lg = std::max(0.0, lip_g);
  const double osc = m.kind == HamKind::Custom ? 0.0 : m.field.osc();
  switch (m.kind) {
    case HamKind::Quadratic:
      return std::sqrt(lg * lg + 2.0 * osc);
    case HamKind::Eikonal:
      return lg * (m.field.vmax / m.field.vmin);
    case HamKind::AbsPlus:
      return lg + osc;
    case HamKind::TruncEikonal:
      return std::max(0.0, lg - 1.0) + osc + 1.0;
    case HamKind::DoubleWell:
      return 1.0 + std::max(lg - 1.0, 1.0 - lg) + osc;
    case HamKind::Custom:
      break;
  }
  // level-set argument on the sampled model
  double level = -std::numeric_limits<double>::infinity();
  const int ny = m.dim == 1 ? 65 : 17;
  const int ndir = m.dim == 1 ? 2 : 16;
  for (int iy = 0; iy < ny; ++iy)
    for (int jy = 0; jy < (m.dim == 1 ? 1 : ny); ++jy) {
      Pt y = pt(static_cast<double>(iy) / ny, static_cast<double>(jy) / ny);
      for (int d = 0; d < ndir; ++d) {
        double a = m.dim == 1 ? (d == 0 ? 1.0 : -1.0) : std::cos(kTau * d / ndir);
        double b = m.dim == 1 ? 0.0 : std::sin(kTau * d / ndir);
        level = std::max(level, m.eval(y, pt(lg * a, lg * b)));
      }
    }
  return coercivity_radius(m, level + 1e-9, 256.0);
}

double theta_for(const HamiltonianModel& m, double p_range) {
  switch (m.kind) {
    case HamKind::Quadratic:
      return p_range;
    case HamKind::Eikonal:
      return m.field.vmax;
    case HamKind::DoubleWell:
    case HamKind::TruncEikonal:
    case HamKind::AbsPlus:
      return 1.0;
    case HamKind::Custom:
      break;
  }
  return gradient_bound(m, p_range);
}

}  // namespace hjlab
