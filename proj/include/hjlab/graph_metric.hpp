#ifndef HJLAB_GRAPH_METRIC_HPP
#define HJLAB_GRAPH_METRIC_HPP

#include <vector>

#include "hjlab/action_metric.hpp"
#include "hjlab/potential.hpp"

namespace hjlab {

// First-passage metric d(x,y) = inf over paths of the line element |dx|/a
// with a > 0 (so a is a speed field), discretized on a periodic lattice with
// axis and diagonal edges. Edge weight = Euclidean edge length / a(midpoint).
struct PeriodicGraphMetric {
  PotentialField field;  // positive speed coefficient a(y)
  int dim = 2;
  int res = 16;
  double h = 0.0625;
  int n_stencil = 0;
  std::vector<double> edge_w;  // [cell * n_stencil + step] precomputed weights
  int cell_of(const Node& z) const;
};

PeriodicGraphMetric make_graph_metric(const PotentialField& a, int res);

// Dijkstra over the lifted lattice restricted to a padded window around the
// segment [a,b]; deterministic tie-break on (distance, node index).
double graph_distance(const PeriodicGraphMetric& M, const Node& a, const Node& b,
                      int pad_periods = 2);

struct StableNormScan {
  std::array<long, 2> dir = {1, 0};
  std::vector<double> dist;  // dist[l-1] = d(0, l*res*dir) for l = 1..lambda_max
  double norm_est = 0.0;     // dist.back() / lambda_max (per period step)
  std::vector<double> deviation;  // dist[l-1] - l * norm_est
};

// One multi-target Dijkstra gives d(0, l*res*dir) for all l <= lambda_max.
// The run is repeated with doubled padding; any discrepancy beyond 1e-9
// throws WindowOverflowError.
StableNormScan stable_norm_scan(const PeriodicGraphMetric& M, const std::array<long, 2>& dir,
                                int lambda_max, int pad_periods = 2);

}  // namespace hjlab

#endif
