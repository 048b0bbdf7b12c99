#ifndef HJLAB_POTENTIAL_HPP
#define HJLAB_POTENTIAL_HPP

#include <string>
#include <vector>

#include "hjlab/common.hpp"

namespace hjlab {

// Periodic scalar field on the unit torus, dim 1 or 2. Built-ins carry a
// closed form (an affine transform of a named base function); user data is
// sampled on a uniform grid and interpolated (multilinear or trigonometric).
enum class PotKind { Samples, Cos1d, Cos2d, Bump, Constant, Inv2mc1d, Inv2mc2d };

struct PotentialField {
  int dim = 1;
  PotKind kind = PotKind::Constant;
  double scale = 1.0;   // built-ins evaluate scale * base(y) + offset
  double offset = 0.0;
  int resolution = 0;
  std::vector<double> samples;  // row-major, size resolution^dim
  bool trig_interp = false;
  std::vector<double> trig_re, trig_im;  // DFT coefficients (Samples + trig)
  std::string id;
  double vmin = 0.0, vmax = 0.0;  // over samples

  double eval(const Pt& y) const;
  double osc() const { return vmax - vmin; }
};

// Parses "cos1d", "cos2d*2-2", "constant:0.5", "bump", "inv2mc1d", ... with an
// optional "*<scale>" and trailing "+<c>"/"-<c>" affine transform.
PotentialField make_builtin_potential(const std::string& spec, int dim, int resolution = 256);

PotentialField make_sampled_potential(int dim, int resolution, std::vector<double> samples,
                                      bool trig, const std::string& id);

PotentialField load_potential_csv(const std::string& path, bool trig = false);
void save_potential_csv(const std::string& path, const PotentialField& f);

// Shifts the field so max = 0; returns the shift that was subtracted.
double normalize_potential(PotentialField& f);

}  // namespace hjlab

#endif
