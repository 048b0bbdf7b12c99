#include "hjlab/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjlab/hamiltonian.hpp"

namespace hjlab {

namespace {

constexpr double kQuantum = 1.0 / 67108864.0;  // 2^-26

bool is_pow2(double x) {
  int e;
  return x > 0 && std::frexp(x, &e) == 0.5;
}

double quantize(double c) { return std::round(c * 67108864.0) * kQuantum; }

double h_of(int mode, const PotentialField& V, const Pt& x, double eps, int dim) {
  Pt y = pt(wrap01(x[0] / eps), dim == 2 ? wrap01(x[1] / eps) : 0.0);
  const double v = V.eval(y);
  return mode == 1 ? -1.0 - v : 1.0 - v;
}

}  // namespace

std::vector<Pt> GameTranscript::positions() const {
  std::vector<Pt> pos(rounds.size() + 1);
  pos[0] = anchor;
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    pos[k + 1] = pos[k];
    for (int ax = 0; ax < dim; ++ax) pos[k + 1][ax] += delta * rounds[k].move()[ax];
  }
  return pos;
}

Pt potential_argmin(const PotentialField& V) {
  const int res = V.resolution > 0 ? V.resolution : 256;
  Pt best = {0.0, 0.0};
  double vbest = std::numeric_limits<double>::infinity();
  if (V.dim == 1) {
    for (int i = 0; i < res; ++i) {
      const Pt y = pt(static_cast<double>(i) / res);
      const double v = V.eval(y);
      if (v < vbest) {
        vbest = v;
        best = y;
      }
    }
  } else {
    for (int i0 = 0; i0 < res; ++i0)
      for (int i1 = 0; i1 < res; ++i1) {
        const Pt y = pt(static_cast<double>(i0) / res, static_cast<double>(i1) / res);
        const double v = V.eval(y);
        if (v < vbest) {
          vbest = v;
          best = y;
        }
      }
  }
  return best;
}

GameTranscript make_conforming_transcript(int dim, double eps, const Pt& ystar, double delta,
                                          int n_rounds, int variant, const PotentialField& V) {
  if (dim != 1 && dim != 2) throw DomainError("make_conforming_transcript: dim must be 1 or 2");
  if (V.dim != dim) throw DomainError("make_conforming_transcript: potential dimension mismatch");
  if (!is_pow2(eps) || !is_pow2(delta))
    throw DomainError("make_conforming_transcript: eps and delta must be powers of two");
  GameTranscript tr;
  tr.dim = dim;
  tr.eps = eps;
  tr.delta = delta;
  tr.V = V;
  tr.anchor = pt(eps * quantize(ystar[0]), dim == 2 ? eps * quantize(ystar[1]) : 0.0);

  double s1 = wrap01(0.17 + 0.311 * variant), s2 = wrap01(0.43 + 0.577 * variant),
         s3 = wrap01(0.71 + 0.733 * variant);
  const double g1 = 0.6180339887498949, g2 = 0.7548776662466927, g3 = 0.5698402909980532;
  std::vector<Pt> stack;
  tr.rounds.reserve(n_rounds);
  for (int k = 0; k < n_rounds; ++k) {
    s1 = wrap01(s1 + g1);
    s2 = wrap01(s2 + g2);
    s3 = wrap01(s3 + g3);
    GameRound r;
    if (s1 < 0.45) {
      // adversary yields: responder mirrors the most recent outstanding move
      r.mode = 1;
      if (!stack.empty()) {
        r.a = pt(-stack.back()[0], -stack.back()[1]);
        stack.pop_back();
      } else {
        r.a = pt(0.0, 0.0);  // stay put at the anchor
      }
    } else {
      r.mode = 2;
      const double mag = 0.999 * s2;
      Pt m;
      if (dim == 1)
        m = pt(mag * (s3 < 0.5 ? 1.0 : -1.0));
      else
        m = pt(mag * std::cos(kTau * s3), mag * std::sin(kTau * s3));
      m = pt(quantize(m[0]), dim == 2 ? quantize(m[1]) : 0.0);
      r.b = m;
      stack.push_back(m);
    }
    tr.rounds.push_back(r);
  }
  return tr;
}

GameCost transcript_cost(const GameTranscript& tr, const std::function<double(const Pt&)>& g) {
  const PotentialField& V = tr.V;
  const auto pos = tr.positions();
  GameCost c;
  KahanSum run;
  for (std::size_t k = 0; k < tr.rounds.size(); ++k) {
    const int mode = tr.rounds[k].mode;
    run.add(tr.delta * 0.5 *
            (h_of(mode, V, pos[k], tr.eps, tr.dim) + h_of(mode, V, pos[k + 1], tr.eps, tr.dim)));
  }
  c.run_term = run.value();
  c.g_term = g(pos.back());
  c.total = c.g_term + c.run_term;
  return c;
}

ReduceResult trace_reduce(const GameTranscript& tr) {
  const PotentialField& V = tr.V;
  if (V.vmax > 1e-12)
    throw DomainError("trace_reduce: potential must be normalized to max V = 0");
  const auto pos = tr.positions();
  ReduceResult out;
  out.min_removed_item = std::numeric_limits<double>::infinity();
  // pending adversary rounds not yet undone: indices into tr.rounds
  std::vector<int> stack;
  std::vector<char> removed(tr.rounds.size(), 0);
  auto item_of = [&](std::size_t k) {
    const int mode = tr.rounds[k].mode;
    return tr.delta * 0.5 *
           (h_of(mode, V, pos[k], tr.eps, tr.dim) + h_of(mode, V, pos[k + 1], tr.eps, tr.dim));
  };
  for (std::size_t k = 0; k < tr.rounds.size(); ++k) {
    const GameRound& r = tr.rounds[k];
    if (r.mode == 2) {
      stack.push_back(static_cast<int>(k));
      continue;
    }
    if (stack.empty()) {
      // stay-put round: must sit at the anchor exactly
      if (r.a[0] != 0.0 || r.a[1] != 0.0)
        throw PatternError("trace_reduce: responder moved with an empty backlog");
      if (pos[k][0] != tr.anchor[0] || (tr.dim == 2 && pos[k][1] != tr.anchor[1]))
        out.positions_exact = false;
      removed[k] = 1;
      const double item = item_of(k);
      out.removed_items.push_back(item);
      continue;
    }
    const int j = stack.back();
    stack.pop_back();
    for (int ax = 0; ax < tr.dim; ++ax)
      if (r.a[ax] != -tr.rounds[j].b[ax])
        throw PatternError("trace_reduce: responder move is not an exact mirror");
    // mirror endpoints must revisit the adversary round's endpoints bitwise
    for (int ax = 0; ax < tr.dim; ++ax) {
      if (pos[k][ax] != pos[j + 1][ax] || pos[k + 1][ax] != pos[j][ax])
        out.positions_exact = false;
    }
    removed[k] = 1;
    removed[j] = 1;
    const double item = item_of(j) + item_of(k);
    out.removed_items.push_back(item);
  }
  KahanSum rsum;
  for (double v : out.removed_items) {
    rsum.add(v);
    out.min_removed_item = std::min(out.min_removed_item, v);
  }
  if (out.removed_items.empty()) out.min_removed_item = 0.0;
  out.removed_sum = rsum.value();

  out.reduced.dim = tr.dim;
  out.reduced.eps = tr.eps;
  out.reduced.delta = tr.delta;
  out.reduced.anchor = tr.anchor;
  out.reduced.V = tr.V;
  for (std::size_t k = 0; k < tr.rounds.size(); ++k)
    if (!removed[k]) {
      out.reduced.rounds.push_back(tr.rounds[k]);
      out.kept_indices.push_back(static_cast<int>(k));
    }
  for (const auto& r : out.reduced.rounds)
    if (r.mode != 2) throw PatternError("trace_reduce: a responder round survived reduction");
  return out;
}

QcCheck quasiconvexification_check(const PotentialField& V, double p_radius, int p_steps,
                                   const CellOptions& opt) {
  if (V.vmax - V.vmin < 1.0)
    throw DomainError("quasiconvexification_check: needs osc(V) >= 1");
  CellOptions o = opt;
  o.t_extrapolate = false;  // keep the scheme comparison one-sided
  const auto dw = make_model(HamKind::DoubleWell, V);
  const auto te = make_model(HamKind::TruncEikonal, V);
  const auto t1 = build_effective_table(dw, p_radius, p_steps, o);
  const auto t2 = build_effective_table(te, p_radius, p_steps, o);
  QcCheck c;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < t1.nodes(); ++i) {
    const double gap = std::abs(t1.hbar[i] - t2.hbar[i]);
    const double budget = t1.err[i] + t2.err[i];
    c.max_gap = std::max(c.max_gap, gap);
    c.max_budget = std::max(c.max_budget, budget);
    c.ordering_violation = std::max(c.ordering_violation, t2.hbar[i] - t1.hbar[i]);
    worst_excess = std::max(worst_excess, gap - 2.0 * budget);
  }
  // every node's gap must be explained by its own two error estimates with a
  // safety factor of 2
  c.gap_within_budget = worst_excess <= 1e-12;
  return c;
}

}  // namespace hjlab
