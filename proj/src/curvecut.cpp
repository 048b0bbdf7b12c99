#include "hjlab/curvecut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjlab {

Pt PolyPath::eval(double s) const {
  if (t.empty()) throw DomainError("PolyPath::eval: empty path");
  if (s <= t.front()) return x.front();
  if (s >= t.back()) return x.back();
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const std::size_t seg = static_cast<std::size_t>(it - t.begin()) - 1;
  const double dt = t[seg + 1] - t[seg];
  if (dt <= 0) return x[seg];
  const double w = (s - t[seg]) / dt;
  Pt out = {0, 0};
  for (int ax = 0; ax < dim; ++ax) out[ax] = x[seg][ax] + w * (x[seg + 1][ax] - x[seg][ax]);
  return out;
}

Pt PolyPath::velocity(std::size_t seg) const {
  const double dt = t[seg + 1] - t[seg];
  Pt v = {0, 0};
  if (dt <= 0) return v;
  for (int ax = 0; ax < dim; ++ax) v[ax] = (x[seg + 1][ax] - x[seg][ax]) / dt;
  return v;
}

PolyPath PolyPath::slice(double a, double b) const {
  if (t.empty() || !(a < b)) throw DomainError("PolyPath::slice: bad interval");
  a = std::max(a, t.front());
  b = std::min(b, t.back());
  if (!(a < b)) throw DomainError("PolyPath::slice: empty overlap");
  PolyPath out;
  out.dim = dim;
  out.t.push_back(a);
  out.x.push_back(eval(a));
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] > a && t[i] < b) {
      out.t.push_back(t[i]);
      out.x.push_back(x[i]);
    }
  out.t.push_back(b);
  out.x.push_back(eval(b));
  return out;
}

double path_action(const PolyPath& p, const std::function<double(const Pt&, const Pt&)>& L,
                   int samples_per_unit) {
  if (p.t.size() < 2) return 0.0;
  KahanSum total;
  for (std::size_t seg = 0; seg + 1 < p.t.size(); ++seg) {
    const double dt = p.t[seg + 1] - p.t[seg];
    if (dt <= 0) continue;
    const Pt v = p.velocity(seg);
    const int panels = std::max(1, static_cast<int>(std::ceil(dt * samples_per_unit)));
    const double h = dt / panels;
    auto at = [&](double s) {
      Pt pos = {0, 0};
      for (int ax = 0; ax < p.dim; ++ax) pos[ax] = p.x[seg][ax] + s * v[ax];
      return L(pos, v);
    };
    for (int k = 0; k < panels; ++k) {
      const double a = k * h, b = a + h;
      total.add(h / 6.0 * (at(a) + 4.0 * at(0.5 * (a + b)) + at(b)));
    }
  }
  return total.value();
}

namespace {

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

double sphere_norm(const SpherePt& x, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

void normalize(SpherePt& x, int n) {
  const double s = sphere_norm(x, n);
  if (s < 1e-300) {
    x = {1, 0, 0, 0};
    return;
  }
  for (int i = 0; i < n; ++i) x[i] /= s;
}

}  // namespace

OddZeroResult odd_map_zero(int m, int val_dim, const std::function<MapVal(const SpherePt&)>& f,
                           const OddZeroOptions& opt) {
  if (m < 1 || m > 3 || val_dim < 1 || val_dim > m)
    throw DomainError("odd_map_zero: need 1 <= val_dim <= m <= 3");
  const int n = m + 1;
  auto phi = [&](const SpherePt& x) {
    const MapVal v = f(x);
    double s = 0;
    for (int i = 0; i < val_dim; ++i) s += v[i] * v[i];
    return s;
  };

  std::vector<SpherePt> seeds;
  for (int i = 0; i < n; ++i) {
    SpherePt e = {0, 0, 0, 0};
    e[i] = 1.0;
    seeds.push_back(e);
    e[i] = -1.0;
    seeds.push_back(e);
  }
  const int bases[4] = {2, 3, 5, 7};
  for (int s = 1; seeds.size() < static_cast<std::size_t>(opt.starts); ++s) {
    double u[4];
    for (int i = 0; i < 4; ++i) u[i] = halton(s, bases[i]);
    SpherePt x = {0, 0, 0, 0};
    // Box-Muller pairs give rotation-invariant seeds after normalization
    const double r1 = std::sqrt(-2.0 * std::log(std::max(u[0], 1e-12)));
    const double r2 = std::sqrt(-2.0 * std::log(std::max(u[2], 1e-12)));
    const double g[4] = {r1 * std::cos(kTau * u[1]), r1 * std::sin(kTau * u[1]),
                         r2 * std::cos(kTau * u[3]), r2 * std::sin(kTau * u[3])};
    for (int i = 0; i < n; ++i) x[i] = g[i];
    if (sphere_norm(x, n) < 1e-8) continue;
    normalize(x, n);
    seeds.push_back(x);
  }

  OddZeroResult best;
  double best_phi = std::numeric_limits<double>::infinity();
  for (const auto& seed : seeds) {
    SpherePt x = seed;
    double fx = phi(x);
    double step = opt.step0;
    for (int it = 0; it < opt.iters && step >= opt.step_min; ++it) {
      bool improved = false;
      for (int i = 0; i < n; ++i) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          SpherePt cand = x;
          cand[i] += sgn * step;
          normalize(cand, n);
          const double fc = phi(cand);
          if (fc < fx) {
            x = cand;
            fx = fc;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (fx < best_phi) {
      best_phi = fx;
      best.x = x;
    }
  }
  best.residual = std::sqrt(best_phi);
  return best;
}

IntervalDecomposition decompose_half(const std::function<MapVal(double)>& xi, int m, int val_dim,
                                     double t0, double t1, const OddZeroOptions& opt) {
  if (!(t1 > t0)) throw DomainError("decompose_half: empty time interval");
  const double span = t1 - t0;
  const int n = m + 1;
  auto partition = [&](const SpherePt& x, double* T) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += x[i] * x[i];
    if (s <= 0) s = 1;
    T[0] = t0;
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      acc += x[i] * x[i];
      T[i + 1] = t0 + span * (acc / s);
    }
    T[n] = t1;
  };
  auto F = [&](const SpherePt& x) {
    double T[5];
    partition(x, T);
    MapVal out = {0, 0, 0};
    MapVal prev = xi(T[0]);
    for (int i = 0; i < n; ++i) {
      const MapVal cur = xi(T[i + 1]);
      const double sgn = x[i] > 0 ? 1.0 : (x[i] < 0 ? -1.0 : 0.0);
      for (int d = 0; d < val_dim; ++d) out[d] += sgn * (cur[d] - prev[d]);
      prev = cur;
    }
    return out;
  };

  const OddZeroResult z = odd_map_zero(m, val_dim, F, opt);
  IntervalDecomposition dec;
  dec.x = z.x;
  dec.residual = z.residual;
  double T[5];
  partition(z.x, T);
  const double drop = 1e-14 * (1.0 + span);
  auto push_merged = [&](std::vector<std::pair<double, double>>& dst, double a, double b) {
    if (b - a <= drop) return;
    if (!dst.empty() && a <= dst.back().second + drop)
      dst.back().second = b;
    else
      dst.emplace_back(a, b);
  };
  for (int i = 0; i < n; ++i) {
    if (z.x[i] > 0)
      push_merged(dec.plus, T[i], T[i + 1]);
    else if (z.x[i] < 0)
      push_merged(dec.minus, T[i], T[i + 1]);
  }
  return dec;
}

std::vector<std::pair<double, double>> complement_intervals(
    const std::vector<std::pair<double, double>>& kept, double t0, double t1) {
  std::vector<std::pair<double, double>> out;
  const double tol = 1e-14 * (1.0 + std::abs(t1 - t0));
  double cur = t0;
  for (const auto& [a, b] : kept) {
    if (a > cur + tol) out.emplace_back(cur, a);
    cur = std::max(cur, b);
  }
  if (t1 > cur + tol) out.emplace_back(cur, t1);
  return out;
}

PolyPath reassemble_half_time(const PolyPath& gamma,
                              const std::vector<std::pair<double, double>>& kept) {
  if (gamma.t.size() < 2) throw DomainError("reassemble_half_time: degenerate path");
  if (kept.empty()) throw DomainError("reassemble_half_time: no intervals kept");
  const int dim = gamma.dim;
  const double full = gamma.duration();
  const double thalf = 0.5 * full;
  const Pt start = gamma.x.front();
  Pt target = {0, 0};
  for (int ax = 0; ax < dim; ++ax)
    target[ax] = start[ax] + 0.5 * (gamma.x.back()[ax] - start[ax]);

  // drop degenerate slivers, then stretch the final interval so the kept
  // durations sum to exactly half (absorbs the Borsuk-Ulam residual)
  std::vector<std::pair<double, double>> iv;
  for (const auto& [a, b] : kept)
    if (b - a > 1e-12 * (1.0 + full)) iv.emplace_back(a, b);
  if (iv.empty()) throw DomainError("reassemble_half_time: all kept intervals degenerate");
  double total = 0;
  for (const auto& [a, b] : iv) total += b - a;
  const double delta = thalf - total;
  if (std::abs(delta) > 1e-3 * (1.0 + thalf))
    throw DomainError("reassemble_half_time: kept intervals do not cover half the duration");
  iv.back().second += delta;
  if (!(iv.back().second > iv.back().first) || iv.back().second > gamma.t.back() + 1e-9)
    throw DomainError("reassemble_half_time: duration adjustment left no room");
  iv.back().second = std::min(iv.back().second, gamma.t.back());

  // fallback for short horizons: a single straight connector
  std::vector<PolyPath> pieces;
  for (const auto& [a, b] : iv) pieces.push_back(gamma.slice(a, b));
  const std::size_t k = pieces.size();
  double longest = 0;
  std::size_t longest_idx = 0;
  for (std::size_t j = 0; j < k; ++j)
    if (pieces[j].duration() > longest) {
      longest = pieces[j].duration();
      longest_idx = j;
    }
  if (thalf < 2.0 || longest < 1.0 + 1e-9) {
    PolyPath straight;
    straight.dim = dim;
    straight.t = {0.0, thalf};
    straight.x = {start, target};
    return straight;
  }

  // integer shifts: junction jumps land in [0,1)^dim
  Pt prev_end = start;
  for (auto& piece : pieces) {
    for (int ax = 0; ax < dim; ++ax) {
      const double w = -std::floor(piece.x.front()[ax] - prev_end[ax]);
      for (auto& px : piece.x) px[ax] += w;
    }
    prev_end = piece.x.back();
  }

  // cheapest unit subinterval of the longest piece by the energy proxy
  {
    PolyPath& pc = pieces[longest_idx];
    const double pa = pc.t.front(), pb = pc.t.back();
    auto energy = [&](double d) {
      double e = 0;
      for (std::size_t seg = 0; seg + 1 < pc.t.size(); ++seg) {
        const double lo = std::max(pc.t[seg], d), hi = std::min(pc.t[seg + 1], d + 1.0);
        if (hi <= lo) continue;
        const Pt v = pc.velocity(seg);
        e += (hi - lo) * dot(v, v, dim);
      }
      return e;
    };
    const int cand = 64;
    double best_d = pa, best_e = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= cand; ++i) {
      const double d = pa + (pb - 1.0 - pa) * i / cand;
      const double e = energy(d);
      if (e < best_e) {
        best_e = e;
        best_d = d;
      }
    }
    // rebuild the piece with [best_d, best_d+1] run at double speed
    PolyPath rebuilt;
    rebuilt.dim = dim;
    auto push = [&](double tt, const Pt& xx) {
      if (!rebuilt.t.empty() && tt <= rebuilt.t.back() + 1e-15) return;
      rebuilt.t.push_back(tt);
      rebuilt.x.push_back(xx);
    };
    rebuilt.t.push_back(pa);
    rebuilt.x.push_back(pc.x.front());
    for (std::size_t i = 1; i < pc.t.size(); ++i) {
      const double s = pc.t[i];
      auto remap = [&](double u) {
        if (u <= best_d) return u;
        if (u >= best_d + 1.0) return u - 0.5;
        return best_d + 0.5 * (u - best_d);
      };
      if (pc.t[i - 1] < best_d && s > best_d) push(remap(best_d), pc.eval(best_d));
      if (pc.t[i - 1] < best_d + 1.0 && s > best_d + 1.0)
        push(remap(best_d + 1.0), pc.eval(best_d + 1.0));
      push(remap(s), pc.x[i]);
    }
    pc = std::move(rebuilt);
  }

  // glue with k+1 straight connectors of duration 1/(2k+2)
  const double cd = 1.0 / (2.0 * static_cast<double>(k) + 2.0);
  PolyPath eta;
  eta.dim = dim;
  eta.t.push_back(0.0);
  eta.x.push_back(start);
  double cur = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    cur += cd;
    eta.t.push_back(cur);
    eta.x.push_back(pieces[j].x.front());
    for (std::size_t i = 1; i < pieces[j].t.size(); ++i) {
      cur += pieces[j].t[i] - pieces[j].t[i - 1];
      eta.t.push_back(cur);
      eta.x.push_back(pieces[j].x[i]);
    }
  }
  cur += cd;
  eta.t.push_back(cur);
  eta.x.push_back(target);
  return eta;
}

}  // namespace hjlab
