#ifndef HJLAB_GAME_HPP
#define HJLAB_GAME_HPP

#include <vector>

#include "hjlab/effective.hpp"
#include "hjlab/potential.hpp"

namespace hjlab {

// One round of the two-player repeated game behind the nonconvex model
// max(|p|-1, 1-|p|) + V. Each round records both players' choices: the
// selector mode in {1,2} and velocity b belong to the adversary, velocity a
// to the responder. Dynamics follow the selected player (a if mode 1, b if
// mode 2) with running payoff -1 - V(x/eps) in mode 1 and 1 - V(x/eps) in
// mode 2. Moves satisfy |.| <= 1 and are quantized to multiples of 2^-26 so
// every position along the transcript is an exact dyadic prefix sum.
struct GameRound {
  int mode = 2;
  Pt a = {0.0, 0.0};
  Pt b = {0.0, 0.0};
  const Pt& move() const { return mode == 1 ? a : b; }
};

struct GameTranscript {
  int dim = 1;
  double eps = 0.125;
  double delta = 0.0078125;  // round duration; must be a power of two
  Pt anchor = {0.0, 0.0};    // start position eps * ystar (dyadic)
  PotentialField V;          // potential driving the running payoff
  std::vector<GameRound> rounds;

  // exact prefix-sum positions, rounds.size()+1 entries
  std::vector<Pt> positions() const;
};

// Grid argmin of V, ties broken lexicographically.
Pt potential_argmin(const PotentialField& V);

// Deterministic transcript in which the responder follows the mirror
// strategy: it undoes the adversary's outstanding moves in LIFO order and
// stays put at the anchor once the backlog is empty. `variant` seeds the
// adversary's (deterministic) behavior.
GameTranscript make_conforming_transcript(int dim, double eps, const Pt& ystar, double delta,
                                          int n_rounds, int variant, const PotentialField& V);

struct GameCost {
  double total = 0.0;
  double g_term = 0.0;
  double run_term = 0.0;
};

// Terminal payoff g(final) plus per-round trapezoid items
// delta * (h(mode, x_k) + h(mode, x_{k+1})) / 2.
GameCost transcript_cost(const GameTranscript& tr, const std::function<double(const Pt&)>& g);

struct ReduceResult {
  GameTranscript reduced;          // the adversary moves that were never undone
  std::vector<double> removed_items;  // payoff removed per cancellation event
  double removed_sum = 0.0;
  double min_removed_item = 0.0;
  bool positions_exact = true;     // mirror round endpoints matched bitwise
  std::vector<int> kept_indices;
};

// Cancels mirror pairs (an adversary round and the responder round that
// exactly reverses it) and anchor stay-put rounds. Requires the transcript's
// V normalized to max V = 0; with min V <= -1 and a stay-put anchor at the
// argmin every removed item is nonnegative, so dropping them can only lower
// the payoff. Positions of kept rounds are unchanged exactly.
ReduceResult trace_reduce(const GameTranscript& tr);

struct QcCheck {
  double max_gap = 0.0;        // max |hbar_nonconvex - hbar_relaxed| over nodes
  double max_budget = 0.0;     // max of the two error estimates summed per node
  double ordering_violation = 0.0;  // max of (relaxed - nonconvex), expect ~0
  bool gap_within_budget = false;
};

// Numerical convexification check: for osc(V) >= 1 the effective Hamiltonian
// of max(|p|-1, 1-|p|) + V coincides with that of max(0, |p|-1) + V. Tables
// are built without time extrapolation so the scheme comparison is one-sided.
QcCheck quasiconvexification_check(const PotentialField& V, double p_radius, int p_steps,
                                   const CellOptions& opt);

}  // namespace hjlab

#endif
