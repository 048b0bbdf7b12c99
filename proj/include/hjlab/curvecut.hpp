#ifndef HJLAB_CURVECUT_HPP
#define HJLAB_CURVECUT_HPP

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "hjlab/common.hpp"

namespace hjlab {

// Piecewise-linear path s -> x(s) with breakpoints t[0] < ... < t[N].
struct PolyPath {
  int dim = 1;
  std::vector<double> t;
  std::vector<Pt> x;

  double duration() const { return t.empty() ? 0.0 : t.back() - t.front(); }
  Pt eval(double s) const;           // clamped linear interpolation
  Pt velocity(std::size_t seg) const;  // constant velocity on [t[seg], t[seg+1]]
  // subpath on [a,b] with interpolated endpoints
  PolyPath slice(double a, double b) const;
};

// Composite-Simpson action integral of L(x(s), x'(s)) with at least
// `samples_per_unit` panels per unit time on every segment.
double path_action(const PolyPath& p, const std::function<double(const Pt&, const Pt&)>& L,
                   int samples_per_unit = 16);

using SpherePt = std::array<double, 4>;  // points of S^m, m <= 3
using MapVal = std::array<double, 3>;    // odd-map values, val_dim <= 3

struct OddZeroOptions {
  int starts = 150;     // deterministic multi-start count
  int iters = 240;      // compass-search iterations per start
  double step0 = 0.5;   // initial compass step
  double step_min = 1e-10;
};

struct OddZeroResult {
  SpherePt x = {0, 0, 0, 0};
  double residual = 0.0;  // |f(x)|
};

// Finds a near-zero of an odd continuous map f: S^m -> R^val_dim (val_dim <=
// m) by deterministic multi-start projected compass search. Such a zero
// always exists; the residual reports how close the search got.
OddZeroResult odd_map_zero(int m, int val_dim,
                           const std::function<MapVal(const SpherePt&)>& f,
                           const OddZeroOptions& opt = {});

struct IntervalDecomposition {
  // merged, ascending sign-class intervals in original path time
  std::vector<std::pair<double, double>> plus, minus;
  double residual = 0.0;  // |f| at the found partition
  SpherePt x = {0, 0, 0, 0};
};

// Cuts [t0,t1] into m+1 subintervals (lengths proportional to the squares of
// sphere coordinates) so that the signed sums of xi-increments vanish: each
// sign class then carries exactly half the total increment of xi. The smaller
// class has at most floor((m+1)/2) merged intervals.
IntervalDecomposition decompose_half(const std::function<MapVal(double)>& xi, int m, int val_dim,
                                     double t0, double t1, const OddZeroOptions& opt = {});

// Complement of `kept` inside [t0,t1], merged and ascending.
std::vector<std::pair<double, double>> complement_intervals(
    const std::vector<std::pair<double, double>>& kept, double t0, double t1);

// Reassembles the kept pieces of gamma (total duration T/2, total displacement
// half of gamma's) into a single continuous path of duration exactly T/2 from
// gamma(0) to gamma(0) + displacement/2: pieces are shifted by integer vectors
// so junction jumps lie in [0,1)^dim, a cheapest unit subinterval is run at
// double speed to free time 1/2, and k+1 straight connectors of duration
// 1/(2k+2) bridge the jumps.
PolyPath reassemble_half_time(const PolyPath& gamma,
                              const std::vector<std::pair<double, double>>& kept);

}  // namespace hjlab

#endif
