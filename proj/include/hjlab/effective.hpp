#ifndef HJLAB_EFFECTIVE_HPP
#define HJLAB_EFFECTIVE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hjlab/hamiltonian.hpp"

namespace hjlab {

// Tabulated effective Hamiltonian Hbar(p) on [-p_radius, p_radius]^dim with
// per-node error estimates and non-convergence flags.
struct EffectiveTable {
  int dim = 1;
  double p_radius = 0.0;
  int p_steps = 0;  // intervals per axis; nodes per axis = p_steps + 1
  std::vector<double> hbar, err;
  std::vector<std::uint8_t> flagged;
  std::string model_id;
  double T = 0.0;
  int nx = 0;
  bool extrapolated = false;

  int nodes_axis() const { return p_steps + 1; }
  int nodes() const { return dim == 1 ? nodes_axis() : nodes_axis() * nodes_axis(); }
  double p_at(int i) const { return -p_radius + 2.0 * p_radius * i / p_steps; }
  // piecewise-(bi)linear interpolation; throws DomainError outside the box
  double eval(const Pt& p) const;
  double max_slope() const;
  bool any_flagged() const;
};

struct CellOptions {
  double T = 50.0;
  int nx = 0;  // 0: 512 in 1D, 48 in 2D
  double tol = 1e-2;
  bool t_extrapolate = true;   // combine values at T and 2T to cancel the 1/T bias
  bool dx_halving = false;     // add |value(nx) - value(nx/2)| to the error estimate
  double cfl = 0.9;
};

struct CellResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  double osc_term = 0.0;
};

// Large-time cell-problem approximation: solve w_t + H(y, p + Dw) = 0 on the
// torus from w = 0 and return -mean_y w(.,T)/T with an error estimate
// osc_y(w(.,T))/T plus consistency terms.
CellResult effective_h_at(const HamiltonianModel& m, const Pt& p, const CellOptions& opt = {});

EffectiveTable build_effective_table(const HamiltonianModel& m, double p_radius, int p_steps,
                                     const CellOptions& opt = {});

// Discrete conjugate sup over table nodes of p.q - Hbar(p) (the sup of a
// piecewise-linear concave-in-cells function is attained at nodes). Throws
// BoundaryAttainmentError when attained on the box edge.
double effective_lagrangian(const EffectiveTable& t, const Pt& q);

// t * Lbar((y-x)/t); exactly 1-homogeneous in (t, y-x) by construction.
double homogenized_metric(const EffectiveTable& t, double time, const Pt& x, const Pt& y);

EffectiveTable load_effective_csv(const std::string& path);
void save_effective_csv(const std::string& path, const EffectiveTable& t);

}  // namespace hjlab

#endif
