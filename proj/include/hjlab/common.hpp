#ifndef HJLAB_COMMON_HPP
#define HJLAB_COMMON_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjlab {

// Spatial points for the grid modules (dim 1 or 2). Unused coordinates stay 0.
using Pt = std::array<double, 2>;

inline Pt pt(double x) { return {x, 0.0}; }
inline Pt pt(double x, double y) { return {x, y}; }

inline double dot(const Pt& a, const Pt& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Pt& a, int dim) { return std::sqrt(dot(a, a, dim)); }

// Wrap a coordinate into [0, 1).
inline double wrap01(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // guard against floor rounding at negative epsilons
  return f;
}

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& m) : std::runtime_error(m) {}
};
struct BoundaryAttainmentError : std::runtime_error {
  explicit BoundaryAttainmentError(const std::string& m) : std::runtime_error(m) {}
};
struct CflError : std::runtime_error {
  explicit CflError(const std::string& m) : std::runtime_error(m) {}
};
struct GridMismatchError : std::runtime_error {
  explicit GridMismatchError(const std::string& m) : std::runtime_error(m) {}
};
struct WindowOverflowError : std::runtime_error {
  explicit WindowOverflowError(const std::string& m) : std::runtime_error(m) {}
};
struct SpeedRangeError : std::runtime_error {
  explicit SpeedRangeError(const std::string& m) : std::runtime_error(m) {}
};
struct PatternError : std::runtime_error {
  explicit PatternError(const std::string& m) : std::runtime_error(m) {}
};
struct ConvexityError : std::runtime_error {
  explicit ConvexityError(const std::string& m) : std::runtime_error(m) {}
};

struct KahanSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

// Deterministic scalar formatting used by every CSV/SVG writer.
std::string fmt_g(double v);

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

constexpr double kPi = 3.14159265358979323846;
constexpr double kTau = 2.0 * kPi;

}  // namespace hjlab

#endif
