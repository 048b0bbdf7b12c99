#include "hjlab/action_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Win {
  long lo0 = 0, hi0 = 0, lo1 = 0, hi1 = 0;
  long n0 = 1, n1 = 1;
  std::size_t size = 0;

  std::size_t idx(const Node& z) const {
    return static_cast<std::size_t>(z[0] - lo0) * static_cast<std::size_t>(n1) +
           static_cast<std::size_t>(z[1] - lo1);
  }
  bool on_edge(const Node& z, int dim) const {
    if (z[0] == lo0 || z[0] == hi0) return true;
    if (dim == 2 && (z[1] == lo1 || z[1] == hi1)) return true;
    return false;
  }
};

Win make_win(int dim, long a0, long b0, long a1, long b1, long pad_cells) {
  Win w;
  w.lo0 = std::min(a0, b0) - pad_cells;
  w.hi0 = std::max(a0, b0) + pad_cells;
  w.n0 = w.hi0 - w.lo0 + 1;
  if (dim == 2) {
    w.lo1 = std::min(a1, b1) - pad_cells;
    w.hi1 = std::max(a1, b1) + pad_cells;
    w.n1 = w.hi1 - w.lo1 + 1;
  }
  w.size = static_cast<std::size_t>(w.n0) * static_cast<std::size_t>(w.n1);
  return w;
}

std::vector<int> window_cells(const DiscreteActionMetric& M, const Win& w) {
  std::vector<int> cells(w.size);
  auto wrap = [&](long z) { return static_cast<int>(((z % M.res) + M.res) % M.res); };
  if (M.dim == 1) {
    for (long z0 = w.lo0; z0 <= w.hi0; ++z0) cells[static_cast<std::size_t>(z0 - w.lo0)] = wrap(z0);
  } else {
    for (long z0 = w.lo0; z0 <= w.hi0; ++z0)
      for (long z1 = w.lo1; z1 <= w.hi1; ++z1)
        cells[w.idx({z0, z1})] = wrap(z0) * M.res + wrap(z1);
  }
  return cells;
}

// One forward value-iteration pass; bt (when given) records the arriving
// displacement per (step, node) for backtracking.
void dp_forward(const DiscreteActionMetric& M, int steps, const Win& w,
                const std::vector<int>& cells, std::vector<double>& D,
                std::vector<std::uint8_t>* bt) {
  const int nd = M.ndisp;
  const double* lv = M.lv.data();
  std::vector<double> Dn(w.size);
  std::vector<long> doff(nd);
  for (int d = 0; d < nd; ++d)
    doff[d] = static_cast<long>(M.disp[d][0]) * w.n1 + M.disp[d][1];
  for (int k = 0; k < steps; ++k) {
    std::uint8_t* btk = bt ? bt->data() + static_cast<std::size_t>(k) * w.size : nullptr;
    std::size_t idx = 0;
    for (long z0 = w.lo0; z0 <= w.hi0; ++z0)
      for (long z1 = w.lo1; z1 <= w.hi1; ++z1, ++idx) {
        double best = kInf;
        std::uint8_t bd = 0xFF;
        const int cp = cells[idx];
        for (int d = 0; d < nd; ++d) {
          const long s0 = z0 - M.disp[d][0];
          if (s0 < w.lo0 || s0 > w.hi0) continue;
          if (M.dim == 2) {
            const long s1 = z1 - M.disp[d][1];
            if (s1 < w.lo1 || s1 > w.hi1) continue;
          }
          const std::size_t sidx = idx - static_cast<std::size_t>(doff[d]);
          const double cand =
              D[sidx] + M.tau * 0.5 * (lv[static_cast<std::size_t>(cells[sidx]) * nd + d] +
                                       lv[static_cast<std::size_t>(cp) * nd + d]);
          if (cand < best) {
            best = cand;
            bd = static_cast<std::uint8_t>(d);
          }
        }
        Dn[idx] = best;
        if (btk) btk[idx] = bd;
      }
    D.swap(Dn);
  }
}

}  // namespace

int DiscreteActionMetric::cell_of(const Node& z) const {
  auto wrap = [&](long v) { return static_cast<int>(((v % res) + res) % res); };
  return dim == 1 ? wrap(z[0]) : wrap(z[0]) * res + wrap(z[1]);
}

DiscreteActionMetric make_action_metric(const HamiltonianModel& m, int res, double tau,
                                        const ActionMetricOptions& opt) {
  if (res < 2 || !(tau > 0)) throw DomainError("make_action_metric: need res >= 2 and tau > 0");
  if (opt.reach < 1 || opt.reach > 7)
    throw DomainError("make_action_metric: reach must be in [1,7]");
  if (opt.pad < 1 || opt.pad_limit < opt.pad)
    throw DomainError("make_action_metric: need pad >= 1 and pad_limit >= pad");
  DiscreteActionMetric M;
  M.model = m;
  M.dim = m.dim;
  M.res = res;
  M.reach = opt.reach;
  M.tau = tau;
  M.h = 1.0 / res;
  M.pad = opt.pad;
  M.pad_limit = opt.pad_limit;
  const double q_radius = opt.reach * M.h / tau;
  M.table = build_lagrangian_table(m, res, q_radius, 2 * opt.reach, opt.p_radius, opt.p_steps);
  const int side = 2 * opt.reach + 1;
  M.ndisp = M.dim == 1 ? side : side * side;
  M.disp.resize(M.ndisp);
  for (int d = 0; d < M.ndisp; ++d) {
    if (M.dim == 1)
      M.disp[d] = {d - opt.reach, 0};
    else
      M.disp[d] = {d / side - opt.reach, d % side - opt.reach};
  }
  // lattice-velocity Lagrangian values at exact table nodes: iq == d by layout
  const int ycells = M.table.y_nodes();
  M.lv.resize(static_cast<std::size_t>(ycells) * M.ndisp);
  for (int c = 0; c < ycells; ++c)
    for (int d = 0; d < M.ndisp; ++d)
      M.lv[static_cast<std::size_t>(c) * M.ndisp + d] = M.table.value_at(c, d);
  return M;
}

PathResult DiscreteActionMetric::shortest(int steps, const Node& a, const Node& b) const {
  if (steps == 0) {
    if (a == b) return {0.0, {a}};
    throw SpeedRangeError("shortest: zero steps between distinct nodes");
  }
  if (steps < 0) throw DomainError("shortest: negative step count");
  for (int ax = 0; ax < dim; ++ax)
    if (std::labs(b[ax] - a[ax]) > static_cast<long>(reach) * steps)
      throw SpeedRangeError("shortest: target outside the reachable cone");

  long pc = pad;
  for (;;) {
    const Win w = make_win(dim, a[0], b[0], a[1], b[1], pc * res);
    const auto cells = window_cells(*this, w);
    std::vector<double> D(w.size, kInf);
    D[w.idx(a)] = 0.0;
    std::vector<std::uint8_t> bt(static_cast<std::size_t>(steps) * w.size, 0xFF);
    dp_forward(*this, steps, w, cells, D, &bt);
    const double val = D[w.idx(b)];
    if (!std::isfinite(val))
      throw DomainError("shortest: no finite-cost path (Lagrangian holes at required speeds)");
    PathResult res_path;
    res_path.value = val;
    res_path.nodes.assign(static_cast<std::size_t>(steps) + 1, Node{0, 0});
    Node z = b;
    res_path.nodes[static_cast<std::size_t>(steps)] = z;
    bool touch = w.on_edge(z, dim);
    for (int k = steps - 1; k >= 0; --k) {
      const std::uint8_t d = bt[static_cast<std::size_t>(k) * w.size + w.idx(z)];
      if (d == 0xFF) throw DomainError("shortest: broken backtrack chain");
      z = {z[0] - disp[d][0], z[1] - disp[d][1]};
      res_path.nodes[static_cast<std::size_t>(k)] = z;
      touch = touch || w.on_edge(z, dim);
    }
    if (res_path.nodes[0] != a) throw DomainError("shortest: backtrack did not reach the source");
    if (!touch) return res_path;
    if (pc >= pad_limit)
      throw WindowOverflowError("shortest: optimal path keeps touching the window boundary");
    pc = std::min(pc * 2, pad_limit);
  }
}

double DiscreteActionMetric::value(int steps, const Node& a, const Node& b) const {
  return shortest(steps, a, b).value;
}

SpaceTimeField oc_solve(const DiscreteActionMetric& M, double eps,
                        const std::function<double(const Pt&)>& g, double t) {
  const double kreal = 1.0 / eps;
  const long k = std::lround(kreal);
  if (k < 1 || std::abs(kreal - k) > 1e-9 * k) throw DomainError("oc_solve: 1/eps must be an integer");
  const double nreal = t / (eps * M.tau);
  const long n = std::lround(nreal);
  if (n < 1 || std::abs(nreal - n) > 1e-9 * (1.0 + n))
    throw DomainError("oc_solve: t must be a positive multiple of eps*tau");

  const long nx = static_cast<long>(M.res) * k;
  const double dx = 1.0 / static_cast<double>(nx);
  const long spread = static_cast<long>(M.reach) * n + 1;
  Win w = make_win(M.dim, -spread, nx - 1 + spread, M.dim == 2 ? -spread : 0,
                   M.dim == 2 ? nx - 1 + spread : 0, 0);
  const auto cells = window_cells(M, w);

  std::vector<double> D(w.size);
  {
    std::size_t idx = 0;
    for (long z0 = w.lo0; z0 <= w.hi0; ++z0)
      for (long z1 = w.lo1; z1 <= w.hi1; ++z1, ++idx)
        D[idx] = g(pt(wrap01(z0 * dx), M.dim == 2 ? wrap01(z1 * dx) : 0.0)) / eps;
  }
  dp_forward(M, static_cast<int>(n), w, cells, D, nullptr);

  SpaceTimeField f;
  f.dim = M.dim;
  f.nx = static_cast<int>(nx);
  f.dx = dx;
  f.eps = eps;
  f.model_id = "oc[" + M.model.id + "]";
  f.theta = 0.0;
  f.dt = eps * M.tau;
  f.times = {0.0, t};
  f.data.resize(2);
  auto& u0 = f.data[0];
  auto& u1 = f.data[1];
  const std::size_t total =
      M.dim == 1 ? static_cast<std::size_t>(nx) : static_cast<std::size_t>(nx) * nx;
  u0.resize(total);
  u1.resize(total);
  if (M.dim == 1) {
    for (long i = 0; i < nx; ++i) {
      u0[static_cast<std::size_t>(i)] = g(pt(i * dx));
      u1[static_cast<std::size_t>(i)] = eps * D[w.idx({i, 0})];
    }
  } else {
    for (long i = 0; i < nx; ++i)
      for (long j = 0; j < nx; ++j) {
        u0[static_cast<std::size_t>(i) * nx + j] = g(pt(i * dx, j * dx));
        u1[static_cast<std::size_t>(i) * nx + j] = eps * D[w.idx({i, j})];
      }
  }
  double lb = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    // crude axis difference quotients for the metadata field
    std::size_t ip = (i + 1) % total;
    lb = std::max(lb, std::abs(u1[ip] - u1[i]) / dx);
  }
  f.lip_bound = lb;
  return f;
}

double oc_value(const DiscreteActionMetric& M, double eps, const std::function<double(const Pt&)>& g,
                const Pt& x, double t) {
  return oc_solve(M, eps, g, t).eval(1, x);
}

std::vector<std::vector<double>> metric_slices(const DiscreteActionMetric& M,
                                               const std::vector<int>& steps,
                                               const std::vector<std::vector<Node>>& targets) {
  if (steps.empty() || steps.size() != targets.size())
    throw DomainError("metric_slices: steps and targets must pair up");
  int smax = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] < 1) throw DomainError("metric_slices: step counts must be positive");
    if (i > 0 && steps[i] <= steps[i - 1])
      throw DomainError("metric_slices: step counts must be ascending");
    smax = steps[i];
  }
  const long spread = static_cast<long>(M.reach) * smax + 1;
  const Win w = make_win(M.dim, 0, 0, 0, 0, spread);
  const auto cells = window_cells(M, w);
  std::vector<double> D(w.size, kInf);
  D[w.idx({0, 0})] = 0.0;
  std::vector<std::vector<double>> out(steps.size());
  int done = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    dp_forward(M, steps[i] - done, w, cells, D, nullptr);
    done = steps[i];
    out[i].reserve(targets[i].size());
    for (const Node& z : targets[i]) {
      for (int ax = 0; ax < M.dim; ++ax)
        if (std::labs(z[ax]) > static_cast<long>(M.reach) * done)
          throw SpeedRangeError("metric_slices: target outside the reachable cone");
      const double v = D[w.idx(z)];
      if (!std::isfinite(v)) throw DomainError("metric_slices: no finite-cost path to a target");
      out[i].push_back(v);
    }
  }
  return out;
}

MetricReport metric_inequality_report(const DiscreteActionMetric& M, int max_steps, int trials,
                                      int ladder_rungs, int t0_steps) {
  if (max_steps < 1 || trials < 1) throw DomainError("metric_inequality_report: bad arguments");
  MetricReport rep;
  rep.trials = trials;
  double s1 = 0.5, s2 = 0.5, s3 = 0.5, s4 = 0.5, s5 = 0.5, s6 = 0.5, s7 = 0.5, s8 = 0.5;
  const double g1 = 0.6180339887498949, g2 = 0.7548776662466927, g3 = 0.5698402909980532,
               g4 = 0.8191725133961645, g5 = 0.6823278038280193, g6 = 0.4656613428918097,
               g7 = 0.9314790612563934, g8 = 0.3247179572447458;
  for (int it = 0; it < trials; ++it) {
    s1 = wrap01(s1 + g1);
    s2 = wrap01(s2 + g2);
    s3 = wrap01(s3 + g3);
    s4 = wrap01(s4 + g4);
    s5 = wrap01(s5 + g5);
    s6 = wrap01(s6 + g6);
    s7 = wrap01(s7 + g7);
    s8 = wrap01(s8 + g8);
    const int n1 = 1 + static_cast<int>(s1 * max_steps);
    const int n2 = 1 + static_cast<int>(s2 * max_steps);
    Node a = {static_cast<long>(s3 * M.res), M.dim == 2 ? static_cast<long>(s4 * M.res) : 0};
    auto offset = [&](double u, int nsteps) {
      return static_cast<long>((2.0 * u - 1.0) * (M.reach * nsteps));
    };
    Node b = {a[0] + offset(s5, n1), M.dim == 2 ? a[1] + offset(s6, n1) : 0};
    Node c = {b[0] + offset(s7, n2), M.dim == 2 ? b[1] + offset(s8, n2) : 0};
    const double mab = M.value(n1, a, b);
    const double mbc = M.value(n2, b, c);
    const double mac = M.value(n1 + n2, a, c);
    rep.worst_subadd = std::max(rep.worst_subadd, mac - mab - mbc);
    rep.scale = std::max({rep.scale, std::abs(mab), std::abs(mbc), std::abs(mac)});
    const Node e = {M.res, M.dim == 2 ? M.res : 0};
    const double shifted = M.value(n1, {a[0] + e[0], a[1] + e[1]}, {b[0] + e[0], b[1] + e[1]});
    rep.worst_periodicity = std::max(rep.worst_periodicity, std::abs(shifted - mab));
  }

  if (ladder_rungs >= 2) {
    if (t0_steps < 1) throw DomainError("metric_inequality_report: t0_steps must be positive");
    std::vector<Node> dirs = M.dim == 1 ? std::vector<Node>{{1, 0}, {2, 0}}
                                        : std::vector<Node>{{1, 0}, {2, 0}, {1, 1}, {2, 1}};
    // keep directions whose velocity box (per-step displacement within 1 cell
    // of the nominal direction) has finite Lagrangian values in every cell
    const int side = 2 * M.reach + 1;
    const int ycells = M.dim == 1 ? M.res : M.res * M.res;
    std::vector<Node> ok;
    for (const Node& u : dirs) {
      bool fin = true;
      for (long d0 = u[0] - 1; d0 <= u[0] + 1 && fin; ++d0)
        for (long d1 = (M.dim == 2 ? u[1] - 1 : 0); d1 <= (M.dim == 2 ? u[1] + 1 : 0) && fin;
             ++d1) {
          if (std::labs(d0) > M.reach || std::labs(d1) > M.reach) continue;
          const int d = M.dim == 1 ? static_cast<int>(d0) + M.reach
                                   : (static_cast<int>(d0) + M.reach) * side +
                                         (static_cast<int>(d1) + M.reach);
          for (int c = 0; c < ycells && fin; ++c)
            fin = std::isfinite(M.lv[static_cast<std::size_t>(c) * M.ndisp + d]);
        }
      if (fin) ok.push_back(u);
    }
    if (ok.empty()) throw DomainError("metric_inequality_report: no admissible ladder direction");
    // a fixed half-period offset keeps the targets off the period lattice,
    // where the doubling inequalities are exactly tight and say nothing
    const Node off = {M.res / 2, M.dim == 2 ? M.res / 4 : 0};
    std::vector<int> steps(ladder_rungs);
    std::vector<std::vector<Node>> targets(ladder_rungs);
    for (int i = 0; i < ladder_rungs; ++i) {
      steps[i] = t0_steps << i;
      for (const Node& u : ok) {
        targets[i].push_back({u[0] * steps[i] + off[0], u[1] * steps[i] + off[1]});
        if (i > 0)
          targets[i].push_back(
              {2 * (u[0] * steps[i - 1] + off[0]), 2 * (u[1] * steps[i - 1] + off[1])});
      }
    }
    const auto vals = metric_slices(M, steps, targets);
    rep.ladder_steps = steps;
    const std::size_t nd = ok.size();
    for (int i = 0; i + 1 < ladder_rungs; ++i) {
      double cd = 0.0, cs = 0.0;
      for (std::size_t j = 0; j < nd; ++j) {
        // m(t, 0, y) at rung i versus m(2t, 0, 2y) at rung i+1
        const double mt = vals[i][i == 0 ? j : 2 * j];
        const double m2t = vals[i + 1][2 * j + 1];
        const double diff = m2t - 2.0 * mt;
        cd = std::max(cd, diff);
        cs = std::max(cs, -diff);
        rep.scale = std::max(rep.scale, std::abs(mt));
      }
      rep.doubling_c.push_back(cd);
      rep.superadd_c.push_back(cs);
    }
    // constants below this level are stencil/rounding noise, not growth
    const double floor_c = 0.01;
    for (std::size_t i = 1; i < rep.doubling_c.size(); ++i) {
      if (std::max(rep.doubling_c[i], floor_c) > 1.1 * std::max(rep.doubling_c[i - 1], floor_c))
        rep.ladder_pass = false;
      if (std::max(rep.superadd_c[i], floor_c) > 1.1 * std::max(rep.superadd_c[i - 1], floor_c))
        rep.ladder_pass = false;
    }
  }
  return rep;
}

}  // namespace hjlab
