#include "hjlab/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjlab/csv.hpp"
#include "hjlab/par.hpp"
#include "hjlab/solver.hpp"

namespace hjlab {

double EffectiveTable::eval(const Pt& p) const {
  const int n = nodes_axis();
  const double inv_dp = p_steps / (2.0 * p_radius);
  auto coord = [&](double x) {
    if (x < -p_radius - 1e-9 * (1.0 + p_radius) || x > p_radius + 1e-9 * (1.0 + p_radius))
      throw DomainError("EffectiveTable::eval: p outside the tabulated box");
    double s = (x + p_radius) * inv_dp;
    if (s < 0.0) s = 0.0;
    if (s > n - 1) s = n - 1;
    return s;
  };
  if (dim == 1) {
    double s = coord(p[0]);
    int i = static_cast<int>(s);
    if (i > p_steps - 1) i = p_steps - 1;
    double w = s - i;
    return hbar[i] + w * (hbar[i + 1] - hbar[i]);
  }
  double s0 = coord(p[0]), s1 = coord(p[1]);
  int i = static_cast<int>(s0), j = static_cast<int>(s1);
  if (i > p_steps - 1) i = p_steps - 1;
  if (j > p_steps - 1) j = p_steps - 1;
  double a = s0 - i, b = s1 - j;
  return (1 - a) * ((1 - b) * hbar[i * n + j] + b * hbar[i * n + j + 1]) +
         a * ((1 - b) * hbar[(i + 1) * n + j] + b * hbar[(i + 1) * n + j + 1]);
}

double EffectiveTable::max_slope() const {
  const int n = nodes_axis();
  const double inv_dp = p_steps / (2.0 * p_radius);
  double best = 0.0;
  if (dim == 1) {
    for (int i = 0; i + 1 < n; ++i) best = std::max(best, std::abs(hbar[i + 1] - hbar[i]));
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i + 1 < n) best = std::max(best, std::abs(hbar[(i + 1) * n + j] - hbar[i * n + j]));
        if (j + 1 < n) best = std::max(best, std::abs(hbar[i * n + j + 1] - hbar[i * n + j]));
      }
  }
  return best * inv_dp;
}

bool EffectiveTable::any_flagged() const {
  for (auto f : flagged)
    if (f) return true;
  return false;
}

namespace {

double mean_of(const std::vector<double>& u) {
  KahanSum s;
  for (double x : u) s.add(x);
  return s.value() / static_cast<double>(u.size());
}

double osc_of(const std::vector<double>& u) {
  auto [mn, mx] = std::minmax_element(u.begin(), u.end());
  return *mx - *mn;
}

struct CellRun {
  double value = 0.0, err = 0.0, osc_term = 0.0;
};

CellRun cell_run(const HamiltonianModel& m, const Pt& p, const CellOptions& opt, int nx) {
  SolveOptions so;
  so.nx = nx;
  so.eps = 1.0;
  so.p_shift = p;
  so.cfl = opt.cfl;
  so.allow_coarse = nx < 32;
  if (opt.t_extrapolate)
    so.snapshots = {opt.T, 2.0 * opt.T};
  else
    so.snapshots = {opt.T};
  auto zero = [](const Pt&) { return 0.0; };
  SpaceTimeField f = solve_cauchy(m, zero, so);
  CellRun r;
  double vT = -mean_of(f.data[1]) / opt.T;
  if (opt.t_extrapolate) {
    double v2T = -mean_of(f.data[2]) / (2.0 * opt.T);
    r.value = 2.0 * v2T - vT;
    r.err = std::abs(v2T - vT);
    r.osc_term = osc_of(f.data[2]) / (2.0 * opt.T);
  } else {
    r.value = vT;
    r.osc_term = osc_of(f.data[1]) / opt.T;
    r.err = r.osc_term;
  }
  return r;
}

}  // namespace

CellResult effective_h_at(const HamiltonianModel& m, const Pt& p, const CellOptions& opt) {
  const int nx = opt.nx > 0 ? opt.nx : (m.dim == 1 ? 512 : 48);
  CellRun r = cell_run(m, p, opt, nx);
  CellResult out;
  out.value = r.value;
  out.osc_term = r.osc_term;
  out.error_estimate = r.err;
  if (opt.dx_halving && nx >= 16) {
    CellRun rh = cell_run(m, p, opt, nx / 2);
    out.error_estimate += std::abs(r.value - rh.value);
  }
  out.converged = out.error_estimate <= opt.tol;
  return out;
}

EffectiveTable build_effective_table(const HamiltonianModel& m, double p_radius, int p_steps,
                                     const CellOptions& opt) {
  if (p_radius <= 0 || p_steps < 2 || p_steps % 2 != 0)
    throw DomainError("build_effective_table: need p_radius > 0 and even p_steps >= 2");
  EffectiveTable t;
  t.dim = m.dim;
  t.p_radius = p_radius;
  t.p_steps = p_steps;
  t.model_id = m.id;
  t.T = opt.T;
  t.nx = opt.nx > 0 ? opt.nx : (m.dim == 1 ? 512 : 48);
  t.extrapolated = opt.t_extrapolate;
  const int total = t.nodes();
  t.hbar.assign(total, 0.0);
  t.err.assign(total, 0.0);
  t.flagged.assign(total, 0);
  const int n = t.nodes_axis();
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t idx) {
    Pt p;
    if (m.dim == 1)
      p = pt(t.p_at(static_cast<int>(idx)));
    else
      p = pt(t.p_at(static_cast<int>(idx) / n), t.p_at(static_cast<int>(idx) % n));
    CellResult r = effective_h_at(m, p, opt);
    t.hbar[idx] = r.value;
    t.err[idx] = r.error_estimate;
    t.flagged[idx] = r.converged ? 0 : 1;
  });
  return t;
}

double effective_lagrangian(const EffectiveTable& t, const Pt& q) {
  // the interpolated table is piecewise (bi)linear, so the conjugate sup is
  // attained at a node; scan them all
  const int n = t.nodes_axis();
  double best = -std::numeric_limits<double>::infinity();
  int bi = 0, bj = 0;
  if (t.dim == 1) {
    for (int i = 0; i < n; ++i) {
      double v = t.p_at(i) * q[0] - t.hbar[i];
      if (v > best) {
        best = v;
        bi = i;
      }
    }
    if (bi == 0 || bi == n - 1)
      throw BoundaryAttainmentError("effective_lagrangian: sup attained at the table edge");
    return best;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = t.p_at(i) * q[0] + t.p_at(j) * q[1] - t.hbar[i * n + j];
      if (v > best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  if (bi == 0 || bi == n - 1 || bj == 0 || bj == n - 1)
    throw BoundaryAttainmentError("effective_lagrangian: sup attained at the table edge");
  return best;
}

double homogenized_metric(const EffectiveTable& t, double time, const Pt& x, const Pt& y) {
  if (!(time > 0)) throw DomainError("homogenized_metric: time must be positive");
  Pt q = pt((y[0] - x[0]) / time, t.dim == 2 ? (y[1] - x[1]) / time : 0.0);
  return time * effective_lagrangian(t, q);
}

void save_effective_csv(const std::string& path, const EffectiveTable& t) {
  CsvTable c;
  const bool flags = t.any_flagged();
  if (t.dim == 1)
    c.header = {"p1", "hbar", "err"};
  else
    c.header = {"p1", "p2", "hbar", "err"};
  if (flags) c.header.push_back("flag");
  const int n = t.nodes_axis();
  for (int idx = 0; idx < t.nodes(); ++idx) {
    std::vector<std::string> row;
    if (t.dim == 1)
      row.push_back(fmt_g(t.p_at(idx)));
    else {
      row.push_back(fmt_g(t.p_at(idx / n)));
      row.push_back(fmt_g(t.p_at(idx % n)));
    }
    row.push_back(fmt_g(t.hbar[idx]));
    row.push_back(fmt_g(t.err[idx]));
    if (flags) row.push_back(t.flagged[idx] ? "1" : "0");
    c.rows.push_back(std::move(row));
  }
  csv_write_file(path, c);
}

EffectiveTable load_effective_csv(const std::string& path) {
  CsvTable c = csv_read_file(path);
  if (c.header.size() < 3) throw DomainError("load_effective_csv: bad header");
  const bool two = c.header.size() >= 4 && c.header[1] == "p2";
  EffectiveTable t;
  t.dim = two ? 2 : 1;
  t.model_id = "csv:" + path;
  const std::size_t hcol = two ? 2 : 1;
  const bool flags = c.header.back() == "flag";
  double pmax = 0.0;
  for (const auto& row : c.rows) {
    if (row.size() < hcol + 2) throw DomainError("load_effective_csv: short row");
    pmax = std::max(pmax, std::abs(std::stod(row[0])));
    t.hbar.push_back(std::stod(row[hcol]));
    t.err.push_back(std::stod(row[hcol + 1]));
    t.flagged.push_back(flags && row.back() == "1" ? 1 : 0);
  }
  const std::size_t total = t.hbar.size();
  std::size_t n = two ? static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(total))))
                      : total;
  if (n < 3 || (two ? n * n : n) != total)
    throw DomainError("load_effective_csv: row count is not a full grid");
  t.p_steps = static_cast<int>(n) - 1;
  t.p_radius = pmax;
  return t;
}

}  // namespace hjlab
