#ifndef HJLAB_LAGRANGIAN_HPP
#define HJLAB_LAGRANGIAN_HPP

#include <vector>

#include "hjlab/hamiltonian.hpp"

namespace hjlab {

// Tabulated L(y,q) = sup_p (p.q - H(y,p)) on a torus y-grid times a velocity
// box [-q_radius, q_radius]^dim. Entries where the sup escapes the p search
// box are stored as +infinity (outside the effective domain of L).
struct LagrangianTable {
  HamiltonianModel model;
  int y_res = 0;      // nodes per axis on the torus
  double q_radius = 0;
  int q_steps = 0;    // intervals per axis; nodes per axis = q_steps + 1
  double p_radius = 0;
  int p_steps = 0;
  std::vector<double> values;

  int y_nodes() const { return model.dim == 1 ? y_res : y_res * y_res; }
  int q_nodes_axis() const { return q_steps + 1; }
  int q_nodes() const {
    return model.dim == 1 ? q_nodes_axis() : q_nodes_axis() * q_nodes_axis();
  }
  double q_at(int i) const { return -q_radius + 2.0 * q_radius * i / q_steps; }

  double value_at(int iy, int iq) const { return values[static_cast<std::size_t>(iy) * q_nodes() + iq]; }

  // Multilinear in y (periodic) and in q. Throws SpeedRangeError when q is
  // outside the box. Returns +infinity near out-of-domain nodes.
  double eval(const Pt& y, const Pt& q) const;
};

LagrangianTable build_lagrangian_table(const HamiltonianModel& m, int y_res, double q_radius,
                                       int q_steps, double p_radius = 0.0, int p_steps = 0);

// Largest midpoint-convexity violation in q along grid segments (finite
// entries only); convex models should stay within grid tolerance.
double lagrangian_convexity_violation(const LagrangianTable& t);

}  // namespace hjlab

#endif
