#ifndef HJLAB_ACTION_METRIC_HPP
#define HJLAB_ACTION_METRIC_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "hjlab/lagrangian.hpp"
#include "hjlab/solver.hpp"

namespace hjlab {

// Lifted lattice node in Z^dim (index 1 unused in 1D).
using Node = std::array<long, 2>;

struct PathResult {
  double value = 0.0;
  std::vector<Node> nodes;  // steps+1 entries including both endpoints
};

struct ActionMetricOptions {
  int reach = 3;       // max cells moved per axis per step
  int pad = 2;         // initial window padding, in periods
  long pad_limit = 64; // escalation cap, in periods
  double p_radius = 0.0;  // forwarded to the Lagrangian table build (0 = auto)
  int p_steps = 0;
};

// Shortest-path action between lattice nodes: one step of duration tau moves
// by up to `reach` cells per axis and costs tau * (L(y,v) + L(y',v)) / 2 with
// v the displacement over tau. Costs are read at exact table nodes, so
// periodicity of the metric is bitwise and subadditivity is exact.
struct DiscreteActionMetric {
  HamiltonianModel model;
  LagrangianTable table;
  int dim = 1, res = 16, reach = 3;
  double tau = 0.25, h = 0.0625;
  int pad = 2;
  long pad_limit = 64;
  int ndisp = 0;
  std::vector<std::array<int, 2>> disp;
  std::vector<double> lv;  // [cell * ndisp + d] one-endpoint Lagrangian values

  int cell_of(const Node& z) const;
  double value(int steps, const Node& a, const Node& b) const;
  PathResult shortest(int steps, const Node& a, const Node& b) const;
};

DiscreteActionMetric make_action_metric(const HamiltonianModel& m, int res, double tau,
                                        const ActionMetricOptions& opt = {});

// Optimal-control solve of the scaled Cauchy problem on one period:
// u(t,x) = min_z [ g(eps h z) + eps * action(t/(eps tau), z -> x/(eps h)) ],
// computed by one multi-source DP sweep. Returns snapshots {0, t}.
SpaceTimeField oc_solve(const DiscreteActionMetric& M, double eps,
                        const std::function<double(const Pt&)>& g, double t);

// Point query of the optimal-control solution (interpolated from oc_solve).
double oc_value(const DiscreteActionMetric& M, double eps,
                const std::function<double(const Pt&)>& g, const Pt& x, double t);

// m(steps[i]*tau, 0, targets[i][j]) for ascending step counts, all from one
// forward DP sweep. Every admissible path from the origin stays inside the
// cone |z| <= reach*steps, so a window of that spread is loss-free and the
// returned values are the exact lattice optima.
std::vector<std::vector<double>> metric_slices(const DiscreteActionMetric& M,
                                               const std::vector<int>& steps,
                                               const std::vector<std::vector<Node>>& targets);

struct MetricReport {
  int trials = 0;
  double worst_subadd = 0.0;       // max of m(n1+n2,a,c) - m(n1,a,b) - m(n2,b,c)
  double worst_periodicity = 0.0;  // max |m(n,a+E,b+E) - m(n,a,b)| over period shifts E
  double scale = 1.0;              // magnitude reference for tolerances
  // doubling ladder t_i = t0 * 2^i (in steps): per consecutive pair the worst
  // constants in m(2t,0,2y) <= 2 m(t,0,y) + C (doubling) and
  // 2 m(t,0,y) <= m(2t,0,2y) + C (superadditivity) over lattice directions
  std::vector<int> ladder_steps;
  std::vector<double> doubling_c, superadd_c;
  bool ladder_pass = true;  // both constants grow < 10% per doubling
};

// ladder_rungs >= 2 turns on the doubling ladder starting at t0_steps steps.
MetricReport metric_inequality_report(const DiscreteActionMetric& M, int max_steps, int trials,
                                      int ladder_rungs = 0, int t0_steps = 8);

}  // namespace hjlab

#endif
