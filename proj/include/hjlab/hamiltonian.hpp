#ifndef HJLAB_HAMILTONIAN_HPP
#define HJLAB_HAMILTONIAN_HPP

#include <functional>
#include <string>

#include "hjlab/potential.hpp"

namespace hjlab {

// H(y,p) families on the torus. All built-in kinds are radial in p:
//   Quadratic     0.5|p|^2 + V(y)
//   Eikonal       a(y)|p|            (a from `field`, must be positive)
//   DoubleWell    max(|p|-1, 1-|p|) + V(y)      (nonconvex)
//   TruncEikonal  max(0, |p|-1) + V(y)
//   AbsPlus       |p| + V(y)
//   Custom        arbitrary evaluator
enum class HamKind { Quadratic, Eikonal, DoubleWell, TruncEikonal, AbsPlus, Custom };

struct HamiltonianModel {
  int dim = 1;
  HamKind kind = HamKind::Quadratic;
  PotentialField field;
  bool convex = true;
  bool radial = true;  // H(y,p) depends on p through |p| only
  double k0 = 0.0;     // quadratic growth constant when meaningful
  std::string id;
  std::function<double(const Pt&, const Pt&, int)> custom;

  double eval(const Pt& y, const Pt& p) const;
  // Built-in kinds: H given the precomputed field value at y and |p|.
  double eval_radial(double field_value, double r) const;
};

HamiltonianModel make_model(HamKind kind, PotentialField field, const std::string& id = "");
HamiltonianModel make_custom_model(int dim, std::function<double(const Pt&, const Pt&, int)> fn,
                                   bool convex, bool radial, const std::string& id);

// max |dH/dp| over sampled y and |p| <= p_radius (finite differences).
double gradient_bound(const HamiltonianModel& m, double p_radius);

// Smallest radius R (within [0, r_max]) such that min over sampled y and
// directions of H(y, R*dir) >= level; throws if coercivity fails in range.
double coercivity_radius(const HamiltonianModel& m, double level, double r_max = 64.0);

// Midpoint-convexity check in p on a deterministic sample; returns the largest
// violation max(H((p1+p2)/2) - (H(p1)+H(p2))/2, 0).
double convexity_violation(const HamiltonianModel& m, double p_radius, int n_samples = 2000);

struct LegendreResult {
  double value = 0.0;
  Pt argmax = {0.0, 0.0};
};

// L(y,q) = sup_p (p.q - H(y,p)) by grid sup over [-p_radius, p_radius]^dim plus
// golden-section polish. Ties broken toward smaller |p|. Throws
// BoundaryAttainmentError when the sup is attained at the box edge.
LegendreResult legendre(const HamiltonianModel& m, const Pt& y, const Pt& q, double p_radius,
                        int p_steps);

// Default p_steps per the project conventions: 512 in 1D, 256 per axis in 2D.
int default_p_steps(int dim);

// Returns a model equal to the input for |p| <= 2 c0 + 1 and exactly
// 0.5|p|^2 - K beyond a crossover annulus, with a convexity-preserving max
// blend in between. Quadratic inputs are returned unchanged.
HamiltonianModel quadratic_truncate(const HamiltonianModel& m, double c0);

}  // namespace hjlab

#endif
