#include "hjlab/graph_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace hjlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Box {
  long lo0, hi0, lo1, hi1;
  long n0, n1;
  std::size_t size() const { return static_cast<std::size_t>(n0) * static_cast<std::size_t>(n1); }
  std::size_t idx(long z0, long z1) const {
    return static_cast<std::size_t>(z0 - lo0) * static_cast<std::size_t>(n1) +
           static_cast<std::size_t>(z1 - lo1);
  }
};

// axis + diagonal stencil with Euclidean lengths
struct Step {
  int d0, d1;
  double len;
};

std::vector<Step> stencil(int dim) {
  if (dim == 1) return {{1, 0, 1.0}, {-1, 0, 1.0}};
  const double s2 = std::sqrt(2.0);
  return {{1, 0, 1.0},  {-1, 0, 1.0}, {0, 1, 1.0},  {0, -1, 1.0},
          {1, 1, s2},   {1, -1, s2},  {-1, 1, s2},  {-1, -1, s2}};
}

std::vector<double> dijkstra(const PeriodicGraphMetric& M, const Box& box, const Node& src) {
  std::vector<double> dist(box.size(), kInf);
  std::vector<int> cells(box.size());
  auto wrap = [&](long z) { return static_cast<int>(((z % M.res) + M.res) % M.res); };
  {
    std::size_t i = 0;
    for (long z0 = box.lo0; z0 <= box.hi0; ++z0)
      for (long z1 = box.lo1; z1 <= box.hi1; ++z1, ++i)
        cells[i] = M.dim == 1 ? wrap(z0) : wrap(z0) * M.res + wrap(z1);
  }
  const auto steps = stencil(M.dim);
  using QE = std::pair<double, std::size_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> q;
  const std::size_t s = box.idx(src[0], src[1]);
  dist[s] = 0.0;
  q.push({0.0, s});
  std::vector<char> done(box.size(), 0);
  while (!q.empty()) {
    auto [d, u] = q.top();
    q.pop();
    if (done[u]) continue;
    done[u] = 1;
    const long z0 = box.lo0 + static_cast<long>(u / static_cast<std::size_t>(box.n1));
    const long z1 = box.lo1 + static_cast<long>(u % static_cast<std::size_t>(box.n1));
    const std::size_t wbase = static_cast<std::size_t>(cells[u]) * steps.size();
    for (std::size_t si = 0; si < steps.size(); ++si) {
      const auto& st = steps[si];
      const long n0 = z0 + st.d0, n1 = z1 + st.d1;
      if (n0 < box.lo0 || n0 > box.hi0 || n1 < box.lo1 || n1 > box.hi1) continue;
      const std::size_t v = box.idx(n0, n1);
      if (done[v]) continue;
      const double cand = d + M.edge_w[wbase + si];
      if (cand < dist[v]) {
        dist[v] = cand;
        q.push({cand, v});
      }
    }
  }
  return dist;
}

Box segment_box(const PeriodicGraphMetric& M, const Node& a, const Node& b, long pad_cells) {
  Box box;
  box.lo0 = std::min(a[0], b[0]) - pad_cells;
  box.hi0 = std::max(a[0], b[0]) + pad_cells;
  box.n0 = box.hi0 - box.lo0 + 1;
  if (M.dim == 2) {
    box.lo1 = std::min(a[1], b[1]) - pad_cells;
    box.hi1 = std::max(a[1], b[1]) + pad_cells;
  } else {
    box.lo1 = box.hi1 = 0;
  }
  box.n1 = box.hi1 - box.lo1 + 1;
  return box;
}

}  // namespace

int PeriodicGraphMetric::cell_of(const Node& z) const {
  auto wrap = [&](long v) { return static_cast<int>(((v % res) + res) % res); };
  return dim == 1 ? wrap(z[0]) : wrap(z[0]) * res + wrap(z[1]);
}

PeriodicGraphMetric make_graph_metric(const PotentialField& a, int res) {
  if (res < 2) throw DomainError("make_graph_metric: res too small");
  if (!(a.vmin > 0)) throw DomainError("make_graph_metric: coefficient must be positive");
  PeriodicGraphMetric M;
  M.field = a;
  M.dim = a.dim;
  M.res = res;
  M.h = 1.0 / res;
  const auto steps = stencil(M.dim);
  M.n_stencil = static_cast<int>(steps.size());
  const int cells = M.dim == 1 ? res : res * res;
  M.edge_w.resize(static_cast<std::size_t>(cells) * steps.size());
  for (int i = 0; i < cells; ++i) {
    const double y0 = M.dim == 1 ? static_cast<double>(i) / res : static_cast<double>(i / res) / res;
    const double y1 = M.dim == 1 ? 0.0 : static_cast<double>(i % res) / res;
    for (std::size_t si = 0; si < steps.size(); ++si) {
      const Pt mid = pt(wrap01(y0 + 0.5 * steps[si].d0 * M.h),
                        M.dim == 2 ? wrap01(y1 + 0.5 * steps[si].d1 * M.h) : 0.0);
      const double am = M.field.eval(mid);
      if (!(am > 0)) throw DomainError("make_graph_metric: coefficient must be positive");
      M.edge_w[static_cast<std::size_t>(i) * steps.size() + si] = M.h * steps[si].len / am;
    }
  }
  return M;
}

double graph_distance(const PeriodicGraphMetric& M, const Node& a, const Node& b,
                      int pad_periods) {
  const Box box = segment_box(M, a, b, static_cast<long>(pad_periods) * M.res);
  const auto dist = dijkstra(M, box, a);
  const double v = dist[box.idx(b[0], M.dim == 2 ? b[1] : 0)];
  if (!std::isfinite(v)) throw WindowOverflowError("graph_distance: target unreachable in window");
  return v;
}

StableNormScan stable_norm_scan(const PeriodicGraphMetric& M, const std::array<long, 2>& dir,
                                int lambda_max, int pad_periods) {
  if (lambda_max < 1) throw DomainError("stable_norm_scan: lambda_max must be >= 1");
  if (dir[0] == 0 && (M.dim == 1 || dir[1] == 0))
    throw DomainError("stable_norm_scan: direction must be nonzero");
  StableNormScan out;
  out.dir = dir;
  const Node a = {0, 0};
  const Node far = {dir[0] * M.res * lambda_max, M.dim == 2 ? dir[1] * M.res * lambda_max : 0};
  auto run = [&](int padp) {
    const Box box = segment_box(M, a, far, static_cast<long>(padp) * M.res);
    const auto dist = dijkstra(M, box, a);
    std::vector<double> vals(lambda_max);
    for (int l = 1; l <= lambda_max; ++l) {
      const long z0 = dir[0] * M.res * l;
      const long z1 = M.dim == 2 ? dir[1] * M.res * l : 0;
      vals[l - 1] = dist[box.idx(z0, z1)];
      if (!std::isfinite(vals[l - 1]))
        throw WindowOverflowError("stable_norm_scan: target unreachable in window");
    }
    return vals;
  };
  out.dist = run(pad_periods);
  const auto check = run(2 * pad_periods);
  for (int l = 0; l < lambda_max; ++l)
    if (std::abs(out.dist[l] - check[l]) > 1e-9 * (1.0 + std::abs(out.dist[l])))
      throw WindowOverflowError("stable_norm_scan: window padding too small for a geodesic");
  out.norm_est = out.dist.back() / lambda_max;
  out.deviation.resize(out.dist.size());
  for (int l = 0; l < lambda_max; ++l) out.deviation[l] = out.dist[l] - (l + 1) * out.norm_est;
  return out;
}

}  // namespace hjlab
