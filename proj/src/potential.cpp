#include "hjlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "hjlab/csv.hpp"

namespace hjlab {

static double wrapped_radius(const Pt& y, int dim) {
  // distance to the cell center (0.5,...,0.5) in the flat torus, scaled by 2
  double r2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    double d = std::abs(wrap01(y[i]) - 0.5);
    r2 += 4.0 * d * d;
  }
  return std::sqrt(r2);
}

static double base_eval(PotKind kind, const Pt& y, int dim) {
  switch (kind) {
    case PotKind::Cos1d:
      return std::cos(kTau * y[0]);
    case PotKind::Cos2d:
      return std::cos(kTau * y[0]) * std::cos(kTau * y[1]);
    case PotKind::Bump: {
      double r = wrapped_radius(y, dim);
      if (r >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - r * r));
    }
    case PotKind::Constant:
      return 1.0;
    case PotKind::Inv2mc1d:
      return 1.0 / (2.0 - std::cos(kTau * y[0]));
    case PotKind::Inv2mc2d:
      return 1.0 / (2.0 - std::cos(kTau * y[0]) * std::cos(kTau * y[1]));
    case PotKind::Samples:
      break;
  }
  throw DomainError("base_eval: sampled field has no closed form");
}

static double interp_multilinear(const PotentialField& f, const Pt& y) {
  int n = f.resolution;
  if (f.dim == 1) {
    double u = wrap01(y[0]) * n;
    int i = static_cast<int>(u);
    if (i >= n) i = n - 1;
    double s = u - i;
    int j = (i + 1) % n;
    return (1.0 - s) * f.samples[i] + s * f.samples[j];
  }
  double u = wrap01(y[0]) * n;
  double v = wrap01(y[1]) * n;
  int i = static_cast<int>(u);
  int j = static_cast<int>(v);
  if (i >= n) i = n - 1;
  if (j >= n) j = n - 1;
  double s = u - i, t = v - j;
  int i1 = (i + 1) % n, j1 = (j + 1) % n;
  const auto& a = f.samples;
  double f00 = a[i * n + j], f01 = a[i * n + j1];
  double f10 = a[i1 * n + j], f11 = a[i1 * n + j1];
  return (1 - s) * ((1 - t) * f00 + t * f01) + s * ((1 - t) * f10 + t * f11);
}

static void build_trig_coeffs(PotentialField& f) {
  int n = f.resolution;
  if (f.dim == 1) {
    f.trig_re.assign(n, 0.0);
    f.trig_im.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
      double re = 0, im = 0;
      for (int j = 0; j < n; ++j) {
        double a = -kTau * k * j / n;
        re += f.samples[j] * std::cos(a);
        im += f.samples[j] * std::sin(a);
      }
      f.trig_re[k] = re / n;
      f.trig_im[k] = im / n;
    }
  } else {
    f.trig_re.assign(static_cast<std::size_t>(n) * n, 0.0);
    f.trig_im.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int k1 = 0; k1 < n; ++k1)
      for (int k2 = 0; k2 < n; ++k2) {
        double re = 0, im = 0;
        for (int j1 = 0; j1 < n; ++j1)
          for (int j2 = 0; j2 < n; ++j2) {
            double a = -kTau * (static_cast<double>(k1) * j1 + static_cast<double>(k2) * j2) / n;
            re += f.samples[j1 * n + j2] * std::cos(a);
            im += f.samples[j1 * n + j2] * std::sin(a);
          }
        f.trig_re[k1 * n + k2] = re / n / n;
        f.trig_im[k1 * n + k2] = im / n / n;
      }
  }
}

static double signed_freq(int k, int n) { return k <= n / 2 ? k : k - n; }

static double interp_trig(const PotentialField& f, const Pt& y) {
  int n = f.resolution;
  if (f.dim == 1) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      double a = kTau * signed_freq(k, n) * y[0];
      s += f.trig_re[k] * std::cos(a) - f.trig_im[k] * std::sin(a);
    }
    return s;
  }
  double s = 0.0;
  for (int k1 = 0; k1 < n; ++k1)
    for (int k2 = 0; k2 < n; ++k2) {
      double a = kTau * (signed_freq(k1, n) * y[0] + signed_freq(k2, n) * y[1]);
      s += f.trig_re[k1 * n + k2] * std::cos(a) - f.trig_im[k1 * n + k2] * std::sin(a);
    }
  return s;
}

double PotentialField::eval(const Pt& y) const {
  // Wrap first so periodicity is exact (not just up to rounding in cos etc).
  Pt yw = pt(wrap01(y[0]), dim == 2 ? wrap01(y[1]) : 0.0);
  if (kind != PotKind::Samples) return scale * base_eval(kind, yw, dim) + offset;
  if (trig_interp) return interp_trig(*this, yw);
  return interp_multilinear(*this, yw);
}

static void fill_samples(PotentialField& f) {
  int n = f.resolution;
  if (f.dim == 1) {
    f.samples.resize(n);
    for (int i = 0; i < n; ++i) {
      Pt y = pt(static_cast<double>(i) / n);
      f.samples[i] = f.scale * base_eval(f.kind, y, f.dim) + f.offset;
    }
  } else {
    f.samples.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Pt y = pt(static_cast<double>(i) / n, static_cast<double>(j) / n);
        f.samples[i * n + j] = f.scale * base_eval(f.kind, y, f.dim) + f.offset;
      }
  }
  auto [mn, mx] = std::minmax_element(f.samples.begin(), f.samples.end());
  f.vmin = *mn;
  f.vmax = *mx;
}

PotentialField make_builtin_potential(const std::string& spec, int dim, int resolution) {
  PotentialField f;
  f.dim = dim;
  f.resolution = resolution;
  f.id = spec;

  std::string name = spec;
  double scale = 1.0, offset = 0.0;
  // strip trailing +c / -c (but not the one in "constant:<c>")
  auto colon = name.find(':');
  std::string tail = colon == std::string::npos ? name : name.substr(0, colon);
  auto star = tail.find('*');
  // start past a possible sign right after '*' so "f*-1+2" parses
  std::size_t aff = tail.find_first_of("+-", star == std::string::npos ? 1 : star + 2);
  if (colon == std::string::npos) {
    if (aff != std::string::npos) {
      offset = std::strtod(name.c_str() + aff, nullptr);
      name = name.substr(0, aff);
    }
    star = name.find('*');
    if (star != std::string::npos) {
      scale = std::strtod(name.c_str() + star + 1, nullptr);
      name = name.substr(0, star);
    }
  }

  if (name == "cos1d") f.kind = PotKind::Cos1d;
  else if (name == "cos2d") f.kind = PotKind::Cos2d;
  else if (name == "bump") f.kind = PotKind::Bump;
  else if (name == "inv2mc1d") f.kind = PotKind::Inv2mc1d;
  else if (name == "inv2mc2d") f.kind = PotKind::Inv2mc2d;
  else if (name.rfind("constant", 0) == 0) {
    f.kind = PotKind::Constant;
    auto c = name.find(':');
    scale = c == std::string::npos ? 1.0 : std::strtod(name.c_str() + c + 1, nullptr);
    offset = 0.0;
  } else {
    throw DomainError("unknown potential spec: " + spec);
  }
  if ((f.kind == PotKind::Cos2d || f.kind == PotKind::Inv2mc2d) && dim != 2)
    throw DomainError("potential " + name + " needs dim 2");
  f.scale = scale;
  f.offset = offset;
  fill_samples(f);
  return f;
}

PotentialField make_sampled_potential(int dim, int resolution, std::vector<double> samples,
                                      bool trig, const std::string& id) {
  if (dim != 1 && dim != 2) throw DomainError("potential dim must be 1 or 2");
  std::size_t expect = dim == 1 ? resolution : static_cast<std::size_t>(resolution) * resolution;
  if (samples.size() != expect) throw DomainError("potential sample count mismatch");
  PotentialField f;
  f.dim = dim;
  f.kind = PotKind::Samples;
  f.resolution = resolution;
  f.samples = std::move(samples);
  f.trig_interp = trig;
  f.id = id;
  auto [mn, mx] = std::minmax_element(f.samples.begin(), f.samples.end());
  f.vmin = *mn;
  f.vmax = *mx;
  if (trig) build_trig_coeffs(f);
  return f;
}

PotentialField load_potential_csv(const std::string& path, bool trig) {
  CsvTable t = csv_read_file(path);
  if (t.header.size() < 2) throw DomainError("potential csv: header must be dim,resolution");
  int dim = std::atoi(t.header[0].c_str());
  int res = std::atoi(t.header[1].c_str());
  std::vector<double> samples;
  samples.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    if (r.empty()) continue;
    samples.push_back(std::strtod(r[0].c_str(), nullptr));
  }
  return make_sampled_potential(dim, res, std::move(samples), trig, path);
}

void save_potential_csv(const std::string& path, const PotentialField& f) {
  CsvTable t;
  t.header = {std::to_string(f.dim), std::to_string(f.resolution)};
  for (double v : f.samples) t.rows.push_back({fmt_g(v)});
  csv_write_file(path, t);
}

double normalize_potential(PotentialField& f) {
  double shift = f.vmax;
  if (f.kind == PotKind::Samples) {
    for (double& v : f.samples) v -= shift;
    if (f.trig_interp) build_trig_coeffs(f);
  } else {
    f.offset -= shift;
    for (double& v : f.samples) v -= shift;
  }
  f.vmin -= shift;
  f.vmax = 0.0;
  f.id += "|max0";
  return shift;
}

}  // namespace hjlab
