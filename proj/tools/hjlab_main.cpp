#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hjlab/curvecut.hpp"
#include "hjlab/game.hpp"
#include "hjlab/graph_metric.hpp"
#include "hjlab/lab.hpp"

namespace {

using Cfg = std::map<std::string, std::string>;
using hjlab::Pt;

void merge_d(CLI::App* s, const std::string& flag, const Cfg& c, double& v) {
  if (s->count("--" + flag) == 0) v = hjlab::cfg_double(c, flag, v);
}
void merge_i(CLI::App* s, const std::string& flag, const Cfg& c, int& v) {
  if (s->count("--" + flag) == 0) v = hjlab::cfg_int(c, flag, v);
}
void merge_s(CLI::App* s, const std::string& flag, const Cfg& c, std::string& v) {
  if (s->count("--" + flag) == 0) v = hjlab::cfg_str(c, flag, v);
}
void merge_b(CLI::App* s, const std::string& flag, const Cfg& c, bool& v) {
  if (s->count("--" + flag) != 0) return;
  const std::string raw = hjlab::cfg_str(c, flag, v ? "1" : "0");
  if (raw == "1" || raw == "true" || raw == "yes")
    v = true;
  else if (raw == "0" || raw == "false" || raw == "no")
    v = false;
  else
    throw hjlab::DomainError("config: key '" + flag + "' is not a boolean: '" + raw + "'");
}

std::vector<double> split_list(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  auto flush = [&]() {
    if (cur.empty()) return;
    std::size_t pos = 0;
    out.push_back(std::stod(cur, &pos));
    if (pos != cur.size()) throw hjlab::DomainError("config: bad list entry '" + cur + "'");
    cur.clear();
  };
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t')
      flush();
    else
      cur += ch;
  }
  flush();
  return out;
}

void merge_list(CLI::App* s, const std::string& flag, const Cfg& c, std::vector<double>& v) {
  if (s->count("--" + flag) != 0) return;
  const auto it = c.find(flag);
  if (it != c.end()) v = split_list(it->second);
}

void emit_csv(const std::string& out, const hjlab::CsvTable& t) {
  if (out.empty()) {
    std::cout << hjlab::csv_line(t.header);
    for (const auto& r : t.rows) std::cout << hjlab::csv_line(r);
  } else {
    hjlab::csv_write_file(out, t);
    std::cout << "wrote " << out << "\n";
  }
}

hjlab::HamKind parse_kind(const std::string& s) {
  if (s == "quadratic") return hjlab::HamKind::Quadratic;
  if (s == "eikonal") return hjlab::HamKind::Eikonal;
  if (s == "doublewell") return hjlab::HamKind::DoubleWell;
  if (s == "trunceikonal") return hjlab::HamKind::TruncEikonal;
  if (s == "absplus") return hjlab::HamKind::AbsPlus;
  throw hjlab::DomainError("unknown hamiltonian kind '" + s +
                           "' (quadratic|eikonal|doublewell|trunceikonal|absplus)");
}

hjlab::HamiltonianModel model_from(const std::string& spec, int dim) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) {
    for (auto& m : hjlab::builtin_model_registry())
      if (m.id == spec) return m;
    throw hjlab::DomainError("unknown model '" + spec +
                             "': use kind:potential (e.g. quadratic:cos1d) or a registry id");
  }
  const hjlab::HamKind k = parse_kind(spec.substr(0, colon));
  hjlab::PotentialField f = hjlab::make_builtin_potential(spec.substr(colon + 1), dim);
  return make_model(k, f, spec);
}

Pt pt_from(const std::vector<double>& v, int dim, const char* what) {
  if (int(v.size()) != dim)
    throw hjlab::DomainError(std::string(what) + ": expected " + std::to_string(dim) +
                             " coordinate(s), got " + std::to_string(v.size()));
  Pt p = {0.0, 0.0};
  for (int d = 0; d < dim; ++d) p[d] = v[std::size_t(d)];
  return p;
}

hjlab::PolyPath load_path_csv(const std::string& path) {
  const hjlab::CsvTable t = hjlab::csv_read_file(path);
  if (t.header.size() < 2 || t.header[0] != "t")
    throw hjlab::DomainError("path csv: expected header t,x1[,x2]");
  hjlab::PolyPath p;
  p.dim = int(t.header.size()) - 1;
  if (p.dim > 2) throw hjlab::DomainError("path csv: at most two space columns");
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw hjlab::DomainError("path csv: ragged row");
    p.t.push_back(std::stod(row[0]));
    Pt x = {0.0, 0.0};
    for (int d = 0; d < p.dim; ++d) x[d] = std::stod(row[std::size_t(d) + 1]);
    p.x.push_back(x);
  }
  if (p.t.size() < 2) throw hjlab::DomainError("path csv: need at least two breakpoints");
  for (std::size_t i = 1; i < p.t.size(); ++i)
    if (!(p.t[i] > p.t[i - 1])) throw hjlab::DomainError("path csv: times must increase");
  return p;
}

hjlab::PolyPath demo_path(int dim, int segments, int variant) {
  if (dim < 1 || dim > 2) throw hjlab::DomainError("demo path: dim must be 1 or 2");
  if (segments < 2) throw hjlab::DomainError("demo path: need >= 2 segments");
  hjlab::PolyPath p;
  p.dim = dim;
  p.t.resize(std::size_t(segments) + 1);
  p.x.resize(std::size_t(segments) + 1);
  p.t[0] = 0.0;
  p.x[0] = {0.0, 0.0};
  double s1 = hjlab::wrap01(0.137 + 0.618033988749895 * variant);
  double s2 = hjlab::wrap01(0.271 + 0.414213562373095 * variant);
  for (int i = 0; i < segments; ++i) {
    p.t[std::size_t(i) + 1] = i + 1.0;
    Pt v = {2.0 * s1 - 1.0, dim == 2 ? 2.0 * s2 - 1.0 : 0.0};
    for (int d = 0; d < dim; ++d) p.x[std::size_t(i) + 1][d] = p.x[std::size_t(i)][d] + v[d];
    s1 = hjlab::wrap01(s1 + 0.618033988749895);
    s2 = hjlab::wrap01(s2 + 0.414213562373095);
  }
  return p;
}

hjlab::CsvTable path_csv(const hjlab::PolyPath& p) {
  hjlab::CsvTable t;
  t.header = {"t", "x1"};
  if (p.dim == 2) t.header.push_back("x2");
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    std::vector<double> vals = {p.t[i], p.x[i][0]};
    if (p.dim == 2) vals.push_back(p.x[i][1]);
    std::vector<std::string> row;
    for (double v : vals) row.push_back(hjlab::fmt_g(v));
    t.rows.push_back(row);
  }
  return t;
}

double path_max_speed(const hjlab::PolyPath& p) {
  double vmax = 0.0;
  for (std::size_t s = 0; s + 1 < p.t.size(); ++s)
    vmax = std::max(vmax, hjlab::norm2(p.velocity(s), p.dim));
  return vmax;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hjlab: a numerical laboratory for periodic homogenization of "
               "Hamilton-Jacobi equations"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "key = value config file; explicit flags override file values");
  auto load_cfg = [&]() { return config_path.empty() ? Cfg{} : hjlab::parse_config(config_path); };

  // ---------------------------------------------------------------- effh
  auto* effh = app.add_subcommand("effh", "effective Hamiltonian at a point or on a table");
  std::string eh_model = "quadratic:cos1d", eh_out;
  int eh_dim = 1, eh_psteps = 0, eh_nx = 0;
  std::vector<double> eh_p;
  double eh_pradius = 0.0, eh_T = 50.0, eh_tol = 1e-2;
  bool eh_noextrap = false, eh_halving = false;
  effh->add_option("--model", eh_model, "kind:potential or registry id");
  effh->add_option("--dim", eh_dim, "space dimension (1 or 2)");
  effh->add_option("--p", eh_p, "evaluation point (one value per dimension)")->expected(-1);
  effh->add_option("--p-radius,--P", eh_pradius, "table half-width (table mode)");
  effh->add_option("--p-steps,--steps", eh_psteps, "table intervals per axis; > 0 selects table mode");
  effh->add_option("--T", eh_T, "cell-problem horizon");
  effh->add_option("--nx", eh_nx, "cell grid points per axis (0 = default)");
  effh->add_option("--tol", eh_tol, "convergence tolerance for the error estimate");
  effh->add_flag("--no-extrapolate", eh_noextrap, "disable the large-time extrapolation");
  effh->add_flag("--dx-halving", eh_halving, "add a grid-halving term to the error estimate");
  effh->add_option("--out", eh_out, "output CSV path (required in table mode)");
  effh->callback([&]() {
    const Cfg cfg = load_cfg();
    merge_s(effh, "model", cfg, eh_model);
    merge_i(effh, "dim", cfg, eh_dim);
    merge_list(effh, "p", cfg, eh_p);
    merge_d(effh, "p-radius", cfg, eh_pradius);
    merge_i(effh, "p-steps", cfg, eh_psteps);
    merge_d(effh, "T", cfg, eh_T);
    merge_i(effh, "nx", cfg, eh_nx);
    merge_d(effh, "tol", cfg, eh_tol);
    merge_b(effh, "no-extrapolate", cfg, eh_noextrap);
    merge_b(effh, "dx-halving", cfg, eh_halving);
    merge_s(effh, "out", cfg, eh_out);

    const hjlab::HamiltonianModel m = model_from(eh_model, eh_dim);
    hjlab::CellOptions copt;
    copt.T = eh_T;
    copt.nx = eh_nx;
    copt.tol = eh_tol;
    copt.t_extrapolate = !eh_noextrap;
    copt.dx_halving = eh_halving;
    if (eh_psteps > 0) {
      if (eh_pradius <= 0.0) throw hjlab::DomainError("effh: table mode needs --p-radius > 0");
      if (eh_out.empty()) throw hjlab::DomainError("effh: table mode needs --out");
      const hjlab::EffectiveTable tbl =
          hjlab::build_effective_table(m, eh_pradius, eh_psteps, copt);
      hjlab::save_effective_csv(eh_out, tbl);
      const auto [lo, hi] = std::minmax_element(tbl.hbar.begin(), tbl.hbar.end());
      const double maxerr = *std::max_element(tbl.err.begin(), tbl.err.end());
      int flagged = 0;
      for (auto f : tbl.flagged) flagged += f != 0;
      std::cout << "wrote " << eh_out << ": " << tbl.nodes() << " nodes, hbar in ["
                << hjlab::fmt_g(*lo) << ", " << hjlab::fmt_g(*hi)
                << "], max err " << hjlab::fmt_g(maxerr) << ", flagged " << flagged << "\n";
      return;
    }
    const Pt p = pt_from(eh_p, m.dim, "effh --p");
    const hjlab::CellResult r = hjlab::effective_h_at(m, p, copt);
    hjlab::CsvTable t;
    t.header = {"p1"};
    if (m.dim == 2) t.header.push_back("p2");
    t.header.insert(t.header.end(), {"hbar", "err", "converged"});
    std::vector<std::string> row = {hjlab::fmt_g(p[0])};
    if (m.dim == 2) row.push_back(hjlab::fmt_g(p[1]));
    row.push_back(hjlab::fmt_g(r.value));
    row.push_back(hjlab::fmt_g(r.error_estimate));
    row.push_back(r.converged ? "1" : "0");
    t.rows.push_back(row);
    emit_csv(eh_out, t);
  });

  // ---------------------------------------------------------------- solve
  auto* solve = app.add_subcommand("solve", "periodic Cauchy solve (oscillatory or effective)");
  std::string sv_model = "quadratic:cos1d", sv_g = "sin", sv_eff, sv_out;
  int sv_dim = 1, sv_nx = 128;
  double sv_eps = 1.0, sv_T = 1.0, sv_cfl = 0.9;
  std::vector<double> sv_snap;
  solve->add_option("--model", sv_model, "kind:potential or registry id");
  solve->add_option("--dim", sv_dim, "space dimension (1 or 2)");
  solve->add_option("--g", sv_g, "initial data: zero|sin|cos|tent with optional *amp");
  solve->add_option("--eps", sv_eps, "oscillation scale; 1/eps must be an integer");
  solve->add_option("--nx", sv_nx, "grid points per axis");
  solve->add_option("--T", sv_T, "final time");
  solve->add_option("--snap", sv_snap, "snapshot times (default: T)")->expected(-1);
  solve->add_option("--cfl", sv_cfl, "CFL fraction in (0,1]");
  solve->add_option("--effective", sv_eff, "effective-table CSV: solve the homogenized equation");
  solve->add_option("--out", sv_out, "output CSV path (default: stdout)");
  solve->callback([&]() {
    const Cfg cfg = load_cfg();
    merge_s(solve, "model", cfg, sv_model);
    merge_i(solve, "dim", cfg, sv_dim);
    merge_s(solve, "g", cfg, sv_g);
    merge_d(solve, "eps", cfg, sv_eps);
    merge_i(solve, "nx", cfg, sv_nx);
    merge_d(solve, "T", cfg, sv_T);
    merge_list(solve, "snap", cfg, sv_snap);
    merge_d(solve, "cfl", cfg, sv_cfl);
    merge_s(solve, "effective", cfg, sv_eff);
    merge_s(solve, "out", cfg, sv_out);

    hjlab::SolveOptions so;
    so.nx = sv_nx;
    so.T = sv_T;
    so.snapshots = sv_snap;
    so.eps = sv_eps;
    so.cfl = sv_cfl;
    hjlab::SpaceTimeField u;
    int dim = sv_dim;
    if (!sv_eff.empty()) {
      const hjlab::EffectiveTable tbl = hjlab::load_effective_csv(sv_eff);
      dim = tbl.dim;
      u = hjlab::solve_cauchy_table(tbl, hjlab::make_initial_data(sv_g, dim), so);
    } else {
      const hjlab::HamiltonianModel m = model_from(sv_model, sv_dim);
      dim = m.dim;
      u = hjlab::solve_cauchy(m, hjlab::make_initial_data(sv_g, dim), so);
    }
    hjlab::CsvTable t;
    t.header = {"t", "x1"};
    if (dim == 2) t.header.push_back("x2");
    t.header.push_back("u");
    for (std::size_t k = 0; k < u.times.size(); ++k) {
      const std::string ts = hjlab::fmt_g(u.times[k]);
      if (dim == 1) {
        for (int i = 0; i < u.nx; ++i)
          t.rows.push_back({ts, hjlab::fmt_g(i * u.dx), hjlab::fmt_g(u.data[k][std::size_t(i)])});
      } else {
        for (int i0 = 0; i0 < u.nx; ++i0)
          for (int i1 = 0; i1 < u.nx; ++i1)
            t.rows.push_back({ts, hjlab::fmt_g(i0 * u.dx), hjlab::fmt_g(i1 * u.dx),
                              hjlab::fmt_g(u.data[k][std::size_t(i0) * u.nx + i1])});
      }
    }
    emit_csv(sv_out, t);
    std::cout << "theta " << hjlab::fmt_g(u.theta) << ", dt " << hjlab::fmt_g(u.dt)
              << ", lip " << hjlab::fmt_g(u.lip_bound) << "\n";
  });

  // ---------------------------------------------------------------- rate
  auto* rate = app.add_subcommand("rate", "homogenization error vs eps with a log-log slope fit");
  std::string rt_model = "quadratic:cos1d", rt_g = "sin*0.8", rt_out, rt_svg;
  int rt_dim = 1, rt_cells0 = 32, rt_cellsmax = 256, rt_tps = 32, rt_tnx = 0;
  double rt_T = 1.0, rt_budget = 0.1, rt_tT = 50.0, rt_tpr = 0.0;
  std::vector<double> rt_eps = {0.25, 0.125, 0.0625, 0.03125, 0.015625};
  std::vector<double> rt_snap = {0.25, 0.5, 1.0};
  rate->add_option("--model", rt_model, "kind:potential or registry id");
  rate->add_option("--dim", rt_dim, "space dimension (1 or 2)");
  rate->add_option("--g", rt_g, "initial data spec");
  rate->add_option("--eps", rt_eps, "eps values (reciprocal integers)")->expected(-1);
  rate->add_option("--T", rt_T, "final time");
  rate->add_option("--snap", rt_snap, "snapshot times to compare at")->expected(-1);
  rate->add_option("--cells0", rt_cells0, "initial cells per period");
  rate->add_option("--cells-max", rt_cellsmax, "cells-per-period cap");
  rate->add_option("--budget", rt_budget, "scheme-error budget as a fraction of the error");
  rate->add_option("--table-p-steps", rt_tps, "effective-table intervals per axis");
  rate->add_option("--table-p-radius", rt_tpr, "effective-table half-width (0 = auto)");
  rate->add_option("--table-T", rt_tT, "cell horizon for the effective table");
  rate->add_option("--table-nx", rt_tnx, "cell grid for the effective table (0 = default)");
  rate->add_option("--out", rt_out, "output CSV path (default: stdout)");
  rate->add_option("--svg", rt_svg, "optional log-log plot");
  rate->callback([&]() {
    const Cfg cfg = load_cfg();
    merge_s(rate, "model", cfg, rt_model);
    merge_i(rate, "dim", cfg, rt_dim);
    merge_s(rate, "g", cfg, rt_g);
    merge_list(rate, "eps", cfg, rt_eps);
    merge_d(rate, "T", cfg, rt_T);
    merge_list(rate, "snap", cfg, rt_snap);
    merge_i(rate, "cells0", cfg, rt_cells0);
    merge_i(rate, "cells-max", cfg, rt_cellsmax);
    merge_d(rate, "budget", cfg, rt_budget);
    merge_i(rate, "table-p-steps", cfg, rt_tps);
    merge_d(rate, "table-p-radius", cfg, rt_tpr);
    merge_d(rate, "table-T", cfg, rt_tT);
    merge_i(rate, "table-nx", cfg, rt_tnx);
    merge_s(rate, "out", cfg, rt_out);
    merge_s(rate, "svg", cfg, rt_svg);

    const hjlab::HamiltonianModel m = model_from(rt_model, rt_dim);
    hjlab::RateOptions ro;
    ro.eps_list = rt_eps;
    ro.T = rt_T;
    ro.snapshots = rt_snap;
    ro.cells0 = rt_cells0;
    ro.cells_max = rt_cellsmax;
    ro.budget_factor = rt_budget;
    ro.table_p_steps = rt_tps;
    ro.table_p_radius = rt_tpr;
    ro.cell.T = rt_tT;
    ro.cell.nx = rt_tnx;
    const hjlab::RateReport rep =
        hjlab::run_rate_experiment(m, hjlab::make_initial_data(rt_g, m.dim), ro);
    emit_csv(rt_out, rate_report_csv(rep));
    std::cout << "slope " << hjlab::fmt_g(rep.fit.slope) << " (intercept "
              << hjlab::fmt_g(rep.fit.intercept) << ", residual " << hjlab::fmt_g(rep.fit.residual)
              << ") over " << rep.n_ok << " budget-passing rows; "
              << (rep.conclusive ? "conclusive" : "INCONCLUSIVE (needs >= 4 rows)") << "\n";
    if (!rt_svg.empty()) {
      std::vector<double> xs, ys;
      for (const auto& r : rep.rows)
        if (r.err > 0.0) {
          xs.push_back(r.eps);
          ys.push_back(r.err);
        }
      hjlab::write_svg_loglog(rt_svg, xs, ys, rep.fit, "sup error vs eps (" + rep.model_id + ")");
      std::cout << "wrote " << rt_svg << "\n";
    }
  });

  // ---------------------------------------------------------------- metric-report
  auto* mrep = app.add_subcommand("metric-report",
                                  "subadditivity/periodicity audit of the action metric");
  std::string mr_model = "quadratic:cos2d", mr_out;
  int mr_dim = 2, mr_res = 8, mr_reach = 3, mr_steps = 8, mr_trials = 64, mr_ladder = 0,
      mr_t0 = 8;
  double mr_tau = 0.25;
  mrep->add_option("--model", mr_model, "kind:potential or registry id");
  mrep->add_option("--dim", mr_dim, "space dimension (1 or 2)");
  mrep->add_option("--res", mr_res, "lattice cells per period");
  mrep->add_option("--tau", mr_tau, "time step of one lattice move");
  mrep->add_option("--reach", mr_reach, "max cells per axis per step");
  mrep->add_option("--max-steps", mr_steps, "largest step count exercised");
  mrep->add_option("--trials", mr_trials, "random triples audited");
  mrep->add_option("--ladder", mr_ladder, "doubling-ladder rungs (0 = off)");
  mrep->add_option("--t0-steps", mr_t0, "steps at the first ladder rung");
  mrep->add_option("--out", mr_out, "output CSV path (default: stdout)");
  mrep->callback([&]() {
    const Cfg cfg = load_cfg();
    merge_s(mrep, "model", cfg, mr_model);
    merge_i(mrep, "dim", cfg, mr_dim);
    merge_i(mrep, "res", cfg, mr_res);
    merge_d(mrep, "tau", cfg, mr_tau);
    merge_i(mrep, "reach", cfg, mr_reach);
    merge_i(mrep, "max-steps", cfg, mr_steps);
    merge_i(mrep, "trials", cfg, mr_trials);
    merge_i(mrep, "ladder", cfg, mr_ladder);
    merge_i(mrep, "t0-steps", cfg, mr_t0);
    merge_s(mrep, "out", cfg, mr_out);

    const hjlab::HamiltonianModel m = model_from(mr_model, mr_dim);
    hjlab::ActionMetricOptions ao;
    ao.reach = mr_reach;
    const hjlab::DiscreteActionMetric M = hjlab::make_action_metric(m, mr_res, mr_tau, ao);
    const hjlab::MetricReport r =
        hjlab::metric_inequality_report(M, mr_steps, mr_trials, mr_ladder, mr_t0);
    hjlab::CsvTable t;
    t.header = {"trials", "worst_subadd", "worst_periodicity", "scale"};
    std::vector<std::string> base = {std::to_string(r.trials), hjlab::fmt_g(r.worst_subadd),
                                     hjlab::fmt_g(r.worst_periodicity), hjlab::fmt_g(r.scale)};
    if (r.doubling_c.empty()) {
      t.rows.push_back(base);
    } else {
      t.header.insert(t.header.end(), {"t", "doubling_c", "superadd_c", "ladder_pass"});
      for (std::size_t i = 0; i < r.doubling_c.size(); ++i) {
        auto row = base;
        row.push_back(hjlab::fmt_g(r.ladder_steps[i] * M.tau));
        row.push_back(hjlab::fmt_g(r.doubling_c[i]));
        row.push_back(hjlab::fmt_g(r.superadd_c[i]));
        row.push_back(r.ladder_pass ? "1" : "0");
        t.rows.push_back(std::move(row));
      }
    }
    emit_csv(mr_out, t);
  });

  // ---------------------------------------------------------------- stable-norm
  auto* snorm = app.add_subcommand("stable-norm",
                                   "per-period distance growth of a first-passage metric");
  std::string sn_a = "inv2mc2d", sn_out;
  int sn_dim = 2, sn_res = 16, sn_lmax = 32, sn_pad = 2;
  std::vector<int> sn_dir = {1, 0};
  snorm->add_option("--a", sn_a, "positive speed field spec (e.g. inv2mc2d, cos2d*0.25+1)");
  snorm->add_option("--dim", sn_dim, "space dimension (1 or 2)");
  snorm->add_option("--res", sn_res, "lattice cells per period");
  snorm->add_option("--dir", sn_dir, "integer direction")->expected(-1);
  snorm->add_option("--lambda-max,--lmax", sn_lmax, "number of periods scanned");
  snorm->add_option("--pad", sn_pad, "window padding in periods");
  snorm->add_option("--out", sn_out, "output CSV path (default: stdout)");
  snorm->callback([&]() {
    const Cfg cfg = load_cfg();
    merge_s(snorm, "a", cfg, sn_a);
    merge_i(snorm, "dim", cfg, sn_dim);
    merge_i(snorm, "res", cfg, sn_res);
    if (snorm->count("--dir") == 0) {
      const auto it = cfg.find("dir");
      if (it != cfg.end()) {
        sn_dir.clear();
        for (double v : split_list(it->second)) sn_dir.push_back(int(std::lround(v)));
      }
    }
    merge_i(snorm, "lambda-max", cfg, sn_lmax);
    merge_i(snorm, "pad", cfg, sn_pad);
    merge_s(snorm, "out", cfg, sn_out);

    const hjlab::PotentialField a = hjlab::make_builtin_potential(sn_a, sn_dim);
    const hjlab::PeriodicGraphMetric M = hjlab::make_graph_metric(a, sn_res);
    if (int(sn_dir.size()) != sn_dim)
      throw hjlab::DomainError("stable-norm: --dir needs one integer per dimension");
    std::array<long, 2> dir = {0, 0};
    for (int d = 0; d < sn_dim; ++d) dir[std::size_t(d)] = sn_dir[std::size_t(d)];
    const hjlab::StableNormScan scan = hjlab::stable_norm_scan(M, dir, sn_lmax, sn_pad);
    hjlab::CsvTable t;
    t.header = {"lambda", "distance", "deviation"};
    for (std::size_t l = 0; l < scan.dist.size(); ++l)
      t.rows.push_back({std::to_string(l + 1), hjlab::fmt_g(scan.dist[l]),
                        hjlab::fmt_g(scan.deviation[l])});
    emit_csv(sn_out, t);
    std::cout << "stable norm estimate " << hjlab::fmt_g(scan.norm_est) << "\n";
  });

  // ---------------------------------------------------------------- curvecut
  auto* cut = app.add_subcommand("curvecut",
                                 "split a path into two sign classes with equal half-increments");
  std::string cc_path, cc_out;
  int cc_dim = 2, cc_segments = 12, cc_variant = 0;
  cut->add_option("--path", cc_path, "input path CSV with header t,x1[,x2]");
  cut->add_option("--dim", cc_dim, "demo path dimension (ignored with --path)");
  cut->add_option("--segments", cc_segments, "demo path segment count");
  cut->add_option("--variant", cc_variant, "demo path seed");
  cut->add_option("--out", cc_out, "intervals CSV (default: stdout)");
  cut->callback([&]() {
    const Cfg cfg = load_cfg();
    merge_s(cut, "path", cfg, cc_path);
    merge_i(cut, "dim", cfg, cc_dim);
    merge_i(cut, "segments", cfg, cc_segments);
    merge_i(cut, "variant", cfg, cc_variant);
    merge_s(cut, "out", cfg, cc_out);

    const hjlab::PolyPath gamma =
        cc_path.empty() ? demo_path(cc_dim, cc_segments, cc_variant) : load_path_csv(cc_path);
    const int vd = gamma.dim + 1;
    auto xi = [&](double s) {
      hjlab::MapVal v = {0.0, 0.0, 0.0};
      const Pt x = gamma.eval(s);
      for (int d = 0; d < gamma.dim; ++d) v[std::size_t(d)] = x[d];
      v[std::size_t(gamma.dim)] = s;
      return v;
    };
    const hjlab::IntervalDecomposition dec =
        hjlab::decompose_half(xi, vd, vd, gamma.t.front(), gamma.t.back());
    hjlab::CsvTable t;
    t.header = {"class", "start", "end"};
    for (const auto& [a, b] : dec.plus) t.rows.push_back({"+", hjlab::fmt_g(a), hjlab::fmt_g(b)});
    for (const auto& [a, b] : dec.minus) t.rows.push_back({"-", hjlab::fmt_g(a), hjlab::fmt_g(b)});
    emit_csv(cc_out, t);
    double plus_dur = 0.0;
    for (const auto& [a, b] : dec.plus) plus_dur += b - a;
    std::cout << "residual " << hjlab::fmt_g(dec.residual) << ", plus pieces " << dec.plus.size()
              << " (duration " << hjlab::fmt_g(plus_dur) << "), minus pieces " << dec.minus.size()
              << " (duration " << hjlab::fmt_g(gamma.duration() - plus_dur) << ")\n";
  });

  // ---------------------------------------------------------------- reassemble
  auto* reas = app.add_subcommand(
      "reassemble", "rebuild each sign class into a half-time path with the half displacement");
  std::string ra_path, ra_out, ra_model;
  int ra_dim = 2, ra_segments = 12, ra_variant = 0;
  std::string ra_class = "plus";
  reas->add_option("--path", ra_path, "input path CSV with header t,x1[,x2]");
  reas->add_option("--dim", ra_dim, "demo path dimension (ignored with --path)");
  reas->add_option("--segments", ra_segments, "demo path segment count");
  reas->add_option("--variant", ra_variant, "demo path seed");
  reas->add_option("--class", ra_class, "which class to emit: plus|minus");
  reas->add_option("--model", ra_model,
                   "optional model for an action surplus report (quadratic recommended)");
  reas->add_option("--out", ra_out, "reassembled path CSV (default: stdout)");
  reas->callback([&]() {
    const Cfg cfg = load_cfg();
    merge_s(reas, "path", cfg, ra_path);
    merge_i(reas, "dim", cfg, ra_dim);
    merge_i(reas, "segments", cfg, ra_segments);
    merge_i(reas, "variant", cfg, ra_variant);
    merge_s(reas, "class", cfg, ra_class);
    merge_s(reas, "model", cfg, ra_model);
    merge_s(reas, "out", cfg, ra_out);

    const hjlab::PolyPath gamma =
        ra_path.empty() ? demo_path(ra_dim, ra_segments, ra_variant) : load_path_csv(ra_path);
    const int vd = gamma.dim + 1;
    auto xi = [&](double s) {
      hjlab::MapVal v = {0.0, 0.0, 0.0};
      const Pt x = gamma.eval(s);
      for (int d = 0; d < gamma.dim; ++d) v[std::size_t(d)] = x[d];
      v[std::size_t(gamma.dim)] = s;
      return v;
    };
    const hjlab::IntervalDecomposition dec =
        hjlab::decompose_half(xi, vd, vd, gamma.t.front(), gamma.t.back());
    if (ra_class != "plus" && ra_class != "minus")
      throw hjlab::DomainError("reassemble: --class must be plus or minus");
    const hjlab::PolyPath eta_plus = hjlab::reassemble_half_time(gamma, dec.plus);
    const hjlab::PolyPath eta_minus = hjlab::reassemble_half_time(gamma, dec.minus);
    const hjlab::PolyPath& eta = ra_class == "plus" ? eta_plus : eta_minus;
    emit_csv(ra_out, path_csv(eta));

    Pt disp = {0.0, 0.0}, target = {0.0, 0.0};
    for (int d = 0; d < gamma.dim; ++d) {
      disp[d] = gamma.x.back()[d] - gamma.x.front()[d];
      target[d] = gamma.x.front()[d] + 0.5 * disp[d];
    }
    auto endpoint_res = [&](const hjlab::PolyPath& p) {
      double r = 0.0;
      for (int d = 0; d < gamma.dim; ++d) r = std::max(r, std::fabs(p.x.back()[d] - target[d]));
      return r;
    };
    std::cout << "gamma duration " << hjlab::fmt_g(gamma.duration()) << ", class durations "
              << hjlab::fmt_g(eta_plus.duration()) << " / " << hjlab::fmt_g(eta_minus.duration())
              << ", endpoint residuals " << hjlab::fmt_g(endpoint_res(eta_plus)) << " / "
              << hjlab::fmt_g(endpoint_res(eta_minus)) << ", cut residual "
              << hjlab::fmt_g(dec.residual) << "\n";

    if (!ra_model.empty()) {
      const hjlab::HamiltonianModel m = model_from(ra_model, gamma.dim);
      const double vmax =
          2.0 * std::max({path_max_speed(gamma), path_max_speed(eta_plus),
                          path_max_speed(eta_minus)}) + 3.0;
      const int ps = hjlab::default_p_steps(gamma.dim);
      auto L = [&](const Pt& y, const Pt& q) { return hjlab::legendre(m, y, q, vmax, ps).value; };
      const double ag = hjlab::path_action(gamma, L);
      const double ap = hjlab::path_action(eta_plus, L);
      const double am = hjlab::path_action(eta_minus, L);
      std::cout << "action(gamma) " << hjlab::fmt_g(ag) << ", action halves "
                << hjlab::fmt_g(ap) << " + " << hjlab::fmt_g(am) << ", surplus "
                << hjlab::fmt_g(ap + am - ag) << "\n";
    }
  });

  // ---------------------------------------------------------------- game-demo
  auto* game = app.add_subcommand("game-demo",
                                  "mirror-strategy transcript reduction for the nonconvex model");
  std::string gd_V = "cos1d-1", gd_g = "sin", gd_out;
  int gd_dim = 1, gd_rounds = 200, gd_variant = 0;
  double gd_eps = 0.125, gd_delta = 0.0;
  std::vector<double> gd_ystar;
  game->add_option("--V", gd_V, "potential spec (needs max V <= 0 and min V <= -1)");
  game->add_option("--g", gd_g, "terminal data spec");
  game->add_option("--dim", gd_dim, "space dimension (1 or 2)");
  game->add_option("--eps", gd_eps, "oscillation scale (power of two)");
  game->add_option("--delta", gd_delta, "round duration (power of two; 0 = eps/32)");
  game->add_option("--rounds", gd_rounds, "transcript length");
  game->add_option("--variant", gd_variant, "adversary seed");
  game->add_option("--ystar", gd_ystar, "anchor cell point (default: argmin of V)")->expected(-1);
  game->add_option("--out", gd_out, "removal items CSV (default: stdout)");
  game->callback([&]() {
    const Cfg cfg = load_cfg();
    merge_s(game, "V", cfg, gd_V);
    merge_s(game, "g", cfg, gd_g);
    merge_i(game, "dim", cfg, gd_dim);
    merge_d(game, "eps", cfg, gd_eps);
    merge_d(game, "delta", cfg, gd_delta);
    merge_i(game, "rounds", cfg, gd_rounds);
    merge_i(game, "variant", cfg, gd_variant);
    merge_list(game, "ystar", cfg, gd_ystar);
    merge_s(game, "out", cfg, gd_out);

    hjlab::PotentialField V = hjlab::make_builtin_potential(gd_V, gd_dim);
    if (V.vmax > 0.0) hjlab::normalize_potential(V);
    const Pt ystar =
        gd_ystar.empty() ? hjlab::potential_argmin(V) : pt_from(gd_ystar, gd_dim, "game-demo --ystar");
    const double delta = gd_delta > 0.0 ? gd_delta : gd_eps / 32.0;
    const hjlab::GameTranscript tr = hjlab::make_conforming_transcript(
        gd_dim, gd_eps, ystar, delta, gd_rounds, gd_variant, V);
    const auto g = hjlab::make_initial_data(gd_g, gd_dim);
    const hjlab::GameCost before = hjlab::transcript_cost(tr, g);
    const hjlab::ReduceResult red = hjlab::trace_reduce(tr);
    const hjlab::GameCost after = hjlab::transcript_cost(red.reduced, g);

    hjlab::CsvTable t;
    t.header = {"event", "item"};
    for (std::size_t i = 0; i < red.removed_items.size(); ++i)
      t.rows.push_back({std::to_string(i), hjlab::fmt_g(red.removed_items[i])});
    emit_csv(gd_out, t);
    std::cout << "rounds " << tr.rounds.size() << " -> " << red.reduced.rounds.size()
              << ", cost " << hjlab::fmt_g(before.total) << " -> " << hjlab::fmt_g(after.total)
              << ", removed sum " << hjlab::fmt_g(red.removed_sum) << ", min item "
              << hjlab::fmt_g(red.min_removed_item) << ", positions "
              << (red.positions_exact ? "exact" : "DRIFTED") << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
