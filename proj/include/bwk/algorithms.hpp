#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bwk/estimators.hpp"
#include "bwk/instance.hpp"
#include "bwk/rng.hpp"

namespace bwk {

enum class PolicyKind { TwoPhase, OnePhase, StaticLP, UniformRandom };

inline const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::TwoPhase: return "two_phase";
    case PolicyKind::OnePhase: return "one_phase";
    case PolicyKind::StaticLP: return "static_lp";
    case PolicyKind::UniformRandom: return "uniform";
  }
  return "?";
}

inline PolicyKind policy_from_string(const std::string& s) {
  if (s == "two_phase") return PolicyKind::TwoPhase;
  if (s == "one_phase") return PolicyKind::OnePhase;
  if (s == "static_lp") return PolicyKind::StaticLP;
  if (s == "uniform") return PolicyKind::UniformRandom;
  throw std::invalid_argument("unknown policy: " + s);
}

enum class Phase { Identify, Exhaust };

struct PolicyState {
  PolicyKind kind = PolicyKind::TwoPhase;
  ConfidenceState conf;
  Phase phase = Phase::Identify;
  std::set<int> I_hat;  // identified optimal arms
  std::set<int> J_hat;  // identified non-binding resources
  int round_cursor = 0;
  double b = 0.0;
  long long T = 0;
};

/// Monotone interval tightening defaults off for the two-phase algorithm and
/// on for the one-phase algorithm; callers may override.
inline PolicyState make_policy_state(PolicyKind kind, const ProblemInstance& inst, long long T,
                                     std::optional<bool> monotone = std::nullopt) {
  PolicyState ps;
  ps.kind = kind;
  const bool mono = monotone.value_or(kind == PolicyKind::OnePhase);
  ps.conf = ConfidenceState(inst.m, inst.d, T, mono);
  ps.b = inst.b;
  ps.T = T;
  return ps;
}

/// Phase I round-robin over all arms.
inline int phase1_select(PolicyState& ps) {
  if (ps.phase != Phase::Identify)
    throw std::logic_error("phase1_select: not in identification phase");
  const int arm = ps.round_cursor;
  ps.round_cursor = (ps.round_cursor + 1) % ps.conf.m;
  return arm;
}

/// Elimination pass, run once per completed round-robin sweep. Adds arms and
/// resources whose UCB values are strictly below the LCB on OPT_LP, and
/// transitions to Phase II once |I_hat| + |J_hat| >= d.
inline void phase1_update(PolicyState& ps) {
  const double lcb = lcb_lp_value(ps.conf, ps.b, ps.T);
  // Strict comparison with rounding headroom: exact ties (OPT values equal up
  // to solver noise) must never eliminate.
  const double eps = 1e-7 * (1.0 + std::abs(lcb));
  for (int i = 0; i < ps.conf.m; ++i) {
    if (ps.I_hat.count(i)) continue;
    if (lcb > arm_removal_ucb(ps.conf, ps.b, ps.T, i) + eps) ps.I_hat.insert(i);
  }
  for (int j = 0; j < ps.conf.d; ++j) {
    if (ps.J_hat.count(j)) continue;
    if (lcb > constraint_ucb(ps.conf, ps.b, ps.T, j) + eps) ps.J_hat.insert(j);
  }
  if (static_cast<int>(ps.I_hat.size() + ps.J_hat.size()) >= ps.conf.d)
    ps.phase = Phase::Exhaust;
}

namespace alg_detail {

/// Solves max mu^U . x s.t. C^L x <= remaining with the stated arms fixed to
/// zero. The implicit time cap 1.x <= remaining_time (a consequence of the
/// deterministic time row) keeps the LP bounded while C^L is still vacuous.
inline std::vector<double> adaptive_lp_solution(const ConfidenceState& conf, double b,
                                                const std::vector<double>& remaining,
                                                const std::vector<int>& fixed) {
  LinearProgram lp;
  lp.objective = conf.mu_hi;
  lp.constraint_matrix = conf.C_lo;
  lp.rhs = remaining;
  for (double& v : lp.rhs) v = std::max(0.0, v);
  lp.constraint_matrix.push_back(std::vector<double>(conf.m, 1.0));
  lp.rhs.push_back(std::max(0.0, remaining[0] / b));
  lp.fixed_to_zero = fixed;
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error("adaptive LP not optimal: " + std::string(to_string(sol.status)));
  return sol.primal;
}

inline int sample_mix_or_null(const std::vector<double>& x, int null_arm,
                              std::mt19937_64& rng) {
  double norm = 0.0;
  for (double v : x) norm += std::max(0.0, v);
  if (norm <= 1e-9) return null_arm;
  std::vector<double> w(x.size());
  for (size_t i = 0; i < x.size(); ++i) w[i] = std::max(0.0, x[i]);
  return sample_categorical(w, rng);
}

/// Certificate that the UCB LP without the time cap is unbounded: some arm has
/// positive UCB reward and an all-zero LCB consumption column.
inline bool has_vacuous_column(const ConfidenceState& conf) {
  for (int i = 0; i < conf.m; ++i) {
    if (conf.mu_hi[i] <= 0.0) continue;
    bool zero_col = true;
    for (int j = 0; j < conf.d && zero_col; ++j)
      if (conf.C_lo[j][i] > 1e-12) zero_col = false;
    if (zero_col) return true;
  }
  return false;
}

inline int uniform_over_positive_ucb(const ConfidenceState& conf, std::mt19937_64& rng) {
  std::vector<double> w(conf.m, 0.0);
  bool any = false;
  for (int i = 0; i < conf.m; ++i)
    if (conf.mu_hi[i] > 0.0) {
      w[i] = 1.0;
      any = true;
    }
  if (!any) return conf.m - 1;
  return sample_categorical(w, rng);
}

}  // namespace alg_detail

/// Phase II step: adaptive LP on the remaining budget, restricted to the
/// identified arms, solution normalized into a sampling distribution. A zero
/// solution falls back to the null arm.
inline int phase2_select(const PolicyState& ps, const std::vector<double>& remaining,
                         std::mt19937_64& rng) {
  if (ps.phase != Phase::Exhaust) throw std::logic_error("phase2_select: not in Phase II");
  std::vector<int> fixed;
  for (int i = 0; i < ps.conf.m; ++i)
    if (!ps.I_hat.count(i)) fixed.push_back(i);
  const std::vector<double> x =
      alg_detail::adaptive_lp_solution(ps.conf, ps.b, remaining, fixed);
  return alg_detail::sample_mix_or_null(x, ps.conf.m - 1, rng);
}

/// One-phase step: the same adaptive LP with no arm restrictions, active from
/// t = 1. While some LCB consumption column is still all-zero the LP carries
/// no information beyond the time cap, and the step samples uniformly over
/// arms with positive UCB reward.
inline int one_phase_select(const PolicyState& ps, const std::vector<double>& remaining,
                            std::mt19937_64& rng) {
  if (alg_detail::has_vacuous_column(ps.conf))
    return alg_detail::uniform_over_positive_ucb(ps.conf, rng);
  const std::vector<double> x = alg_detail::adaptive_lp_solution(ps.conf, ps.b, remaining, {});
  return alg_detail::sample_mix_or_null(x, ps.conf.m - 1, rng);
}

/// Static-rhs baseline: solves the UCB primal LP with the full budget T b every
/// step and normalizes by T; the mass not placed on factual arms goes to the
/// null arm. Exhibits the sqrt(T) leftover fluctuation of non-adaptive designs.
inline int baseline_static_select(const PolicyState& ps, std::mt19937_64& rng) {
  if (alg_detail::has_vacuous_column(ps.conf))
    return alg_detail::uniform_over_positive_ucb(ps.conf, rng);
  const double Td = static_cast<double>(ps.T);
  const std::vector<double> budget(ps.conf.d, Td * ps.b);
  std::vector<double> x = alg_detail::adaptive_lp_solution(ps.conf, ps.b, budget, {});
  std::vector<double> w(ps.conf.m, 0.0);
  double mass = 0.0;
  for (int i = 0; i < ps.conf.m; ++i) {
    w[i] = std::max(0.0, x[i]) / Td;
    mass += w[i];
  }
  w[ps.conf.m - 1] += std::max(0.0, 1.0 - mass);
  return sample_categorical(w, rng);
}

inline int uniform_select(int m, std::mt19937_64& rng) { return uniform_index(rng, m); }

}  // namespace bwk
