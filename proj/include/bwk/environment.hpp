#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "bwk/instance.hpp"
#include "bwk/rng.hpp"

namespace bwk {

struct Outcome {
  double reward = 0.0;
  std::vector<double> consumption;  // length d
};

/// The knapsack process B^(t): remaining capacity after t completed rounds.
struct KnapsackState {
  std::vector<double> remaining;
  long long t = 0;
  long long T = 0;
  std::optional<long long> stopped;  // stopping time tau, once set the state is frozen
  double cumulative_reward = 0.0;
};

inline KnapsackState make_knapsack_state(const ProblemInstance& inst, long long T) {
  KnapsackState ks;
  ks.T = T;
  ks.remaining.assign(inst.d, static_cast<double>(T) * inst.b);
  return ks;
}

/// Draws one play of `arm`. The time resource (row 0) always consumes exactly
/// b; remaining entries are Bernoulli at their means unless the instance is
/// deterministic, in which case they are point masses.
inline Outcome sample_outcome(const ProblemInstance& inst, int arm, std::mt19937_64& rng) {
  if (arm < 0 || arm >= inst.m) throw std::out_of_range("sample_outcome: arm index");
  Outcome out;
  out.consumption.assign(inst.d, 0.0);
  out.consumption[0] = inst.b;
  if (inst.dist == DistKind::Deterministic) {
    out.reward = inst.mu[arm];
    for (int j = 1; j < inst.d; ++j) out.consumption[j] = inst.C[j][arm];
  } else {
    out.reward = uniform01(rng) < inst.mu[arm] ? 1.0 : 0.0;
    for (int j = 1; j < inst.d; ++j)
      out.consumption[j] = uniform01(rng) < inst.C[j][arm] ? 1.0 : 0.0;
  }
  return out;
}

/// Applies one round. A round that would drive any resource strictly negative
/// sets tau to the current t and is not credited; otherwise the consumption
/// and reward are booked and t advances (reaching T also stops the process).
inline void step(KnapsackState& state, const Outcome& outcome) {
  if (state.stopped) throw std::logic_error("step: state already stopped");
  if (static_cast<int>(outcome.consumption.size()) != static_cast<int>(state.remaining.size()))
    throw std::invalid_argument("step: consumption dimension mismatch");
  // Exact exhaustion (sum of consumptions equal to the budget) is feasible;
  // the epsilon absorbs accumulated floating-point drift at that boundary.
  for (size_t j = 0; j < state.remaining.size(); ++j) {
    if (state.remaining[j] - outcome.consumption[j] < -1e-9) {
      state.stopped = state.t;
      return;
    }
  }
  for (size_t j = 0; j < state.remaining.size(); ++j)
    state.remaining[j] -= outcome.consumption[j];
  state.cumulative_reward += outcome.reward;
  state.t += 1;
  if (state.t == state.T) state.stopped = state.T;
}

/// Average remaining resource per remaining round: b^(t) = B^(t) / (T - t).
inline std::vector<double> remaining_ratio(const KnapsackState& state) {
  if (state.t >= state.T) throw std::invalid_argument("remaining_ratio: undefined at t = T");
  std::vector<double> r(state.remaining.size());
  const double denom = static_cast<double>(state.T - state.t);
  for (size_t j = 0; j < r.size(); ++j) r[j] = state.remaining[j] / denom;
  return r;
}

}  // namespace bwk
