#ifndef HJLAB_SOLVER_HPP
#define HJLAB_SOLVER_HPP

#include <functional>
#include <string>
#include <vector>

#include "hjlab/effective.hpp"
#include "hjlab/hamiltonian.hpp"

namespace hjlab {

// Periodic Cauchy solutions on [0,1)^dim sampled at snapshot times.
// data[k] is the flattened grid at times[k]; 2D layout idx = i0*nx + i1.
struct SpaceTimeField {
  int dim = 1;
  int nx = 0;
  double dx = 0.0;
  double eps = 1.0;
  std::vector<double> times;
  std::vector<std::vector<double>> data;
  std::string model_id;
  double theta = 0.0;
  double dt = 0.0;
  double lip_bound = 0.0;  // max grid difference quotient over all snapshots

  // periodic multilinear interpolation of snapshot k
  double eval(int k, const Pt& x) const;
};

struct SolveOptions {
  int nx = 0;                 // required; must resolve eps (>= 32 cells per period)
  double T = 1.0;
  std::vector<double> snapshots;  // ascending, defaults to {T}; 0 is always stored first
  double eps = 1.0;           // oscillation scale; 1/eps must be an integer
  Pt p_shift = {0.0, 0.0};    // solve for H(y, p_shift + Du) (cell problems)
  double cfl = 0.9;
  double theta_override = 0.0;  // shared viscosity for paired comparison runs
  double dt_override = 0.0;     // shared step; must satisfy the CFL bound
  double lip_hint = -1.0;       // Lip(g); measured on the grid when negative
  double bound_pad = 4.0;       // extra p-range margin for custom models
  bool allow_coarse = false;    // lift the >= 32 cells-per-period floor
};

// Lax-Friedrichs marching of u_t + H((x/eps) mod 1, p_shift + Du) = 0.
SpaceTimeField solve_cauchy(const HamiltonianModel& m, const std::function<double(const Pt&)>& g,
                            const SolveOptions& opt);

// Same scheme driven by a tabulated p-only Hamiltonian (effective equation).
SpaceTimeField solve_cauchy_table(const EffectiveTable& tbl,
                                  const std::function<double(const Pt&)>& g,
                                  const SolveOptions& opt);

// max |a-b| over all stored snapshots; throws GridMismatchError unless both
// fields share dim, nx and snapshot times.
double sup_error(const SpaceTimeField& a, const SpaceTimeField& b);

// max |coarse - fine| over coarse nodes/times; fine.nx must be a multiple of
// coarse.nx and snapshot times must match.
double restriction_sup_error(const SpaceTimeField& coarse, const SpaceTimeField& fine);

// max grid difference quotient of g sampled at nx^dim nodes
double grid_lipschitz(const std::function<double(const Pt&)>& g, int dim, int nx);

// a-priori bound on |p_shift + Du| along the evolution, from the level-set
// coercivity argument (closed forms for built-in kinds)
double lipschitz_radius(const HamiltonianModel& m, double lip_g);

// max |dH/dp| over the torus and |p| <= p_range (closed forms for built-ins)
double theta_for(const HamiltonianModel& m, double p_range);

}  // namespace hjlab

#endif
