#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bwk/environment.hpp"
#include "bwk/instance.hpp"
#include "bwk/lp.hpp"

namespace bwk {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bounds {
  std::vector<double> mu_L, mu_U;
  std::vector<std::vector<double>> C_L, C_U;  // d x m
};

/// Running empirical means plus projected confidence intervals with radius
/// sqrt(2 log T / n_i). With `monotone` set, reported intervals are the
/// running intersection, so UCBs never increase and LCBs never decrease.
struct ConfidenceState {
  long long T = 1;
  bool monotone = false;
  bool exact = false;  // test surrogate: radius forced to zero
  int m = 0, d = 0;
  std::vector<long long> n;
  std::vector<double> mean_reward;
  std::vector<std::vector<double>> mean_C;
  std::vector<double> mu_lo, mu_hi;
  std::vector<std::vector<double>> C_lo, C_hi;

  ConfidenceState() = default;
  ConfidenceState(int m_, int d_, long long T_, bool monotone_ = false)
      : T(T_), monotone(monotone_), m(m_), d(d_) {
    n.assign(m, 0);
    mean_reward.assign(m, 0.0);
    mean_C.assign(d, std::vector<double>(m, 0.0));
    mu_lo.assign(m, 0.0);
    mu_hi.assign(m, 1.0);
    C_lo.assign(d, std::vector<double>(m, 0.0));
    C_hi.assign(d, std::vector<double>(m, 1.0));
  }

  /// Test-only surrogate that reports the true means with zero radius.
  static ConfidenceState exact_surrogate(const ProblemInstance& inst, long long T_) {
    ConfidenceState cs(inst.m, inst.d, T_);
    cs.exact = true;
    cs.mean_reward = inst.mu;
    cs.mean_C = inst.C;
    for (int i = 0; i < inst.m; ++i) cs.n[i] = 1;
    for (int i = 0; i < inst.m; ++i) cs.refresh_intervals(i);
    return cs;
  }

  double radius(int arm) const {
    if (exact) return 0.0;
    if (n[arm] == 0) return kInf;
    return std::sqrt(2.0 * std::log(static_cast<double>(T)) / static_cast<double>(n[arm]));
  }

  void refresh_intervals(int arm) {
    const double r = radius(arm);
    auto proj = [](double v) { return std::min(1.0, std::max(0.0, v)); };
    auto apply = [&](double mean, double& lo, double& hi) {
      double nlo = std::isinf(r) ? 0.0 : proj(mean - r);
      double nhi = std::isinf(r) ? 1.0 : proj(mean + r);
      if (monotone) {
        nlo = std::max(nlo, lo);
        nhi = std::min(nhi, hi);
        if (nlo > nhi) nlo = nhi = 0.5 * (nlo + nhi);
      }
      lo = nlo;
      hi = nhi;
    };
    apply(mean_reward[arm], mu_lo[arm], mu_hi[arm]);
    for (int j = 0; j < d; ++j) apply(mean_C[j][arm], C_lo[j][arm], C_hi[j][arm]);
  }
};

inline void update(ConfidenceState& conf, int arm, const Outcome& outcome) {
  if (arm < 0 || arm >= conf.m) throw std::out_of_range("update: arm index");
  conf.n[arm] += 1;
  const double w = 1.0 / static_cast<double>(conf.n[arm]);
  conf.mean_reward[arm] += w * (outcome.reward - conf.mean_reward[arm]);
  for (int j = 0; j < conf.d; ++j)
    conf.mean_C[j][arm] += w * (outcome.consumption[j] - conf.mean_C[j][arm]);
  conf.refresh_intervals(arm);
}

inline Bounds bounds(const ConfidenceState& conf) {
  return Bounds{conf.mu_lo, conf.mu_hi, conf.C_lo, conf.C_hi};
}

namespace est_detail {

inline double max_form_value(const std::vector<double>& obj,
                             const std::vector<std::vector<double>>& rows,
                             const std::vector<double>& rhs,
                             const std::vector<int>& fixed = {}) {
  LinearProgram lp;
  lp.objective = obj;
  lp.constraint_matrix = rows;
  lp.rhs = rhs;
  lp.fixed_to_zero = fixed;
  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Unbounded) return kInf;
  if (sol.status == LpStatus::Infeasible)
    throw std::runtime_error("confidence LP infeasible (x = 0 should be feasible)");
  return sol.objective_value;
}

}  // namespace est_detail

/// LCB on OPT_LP: max mu^L . x subject to C^U x <= T b.
inline double lcb_lp_value(const ConfidenceState& conf, double b, long long T) {
  const std::vector<double> rhs(conf.d, static_cast<double>(T) * b);
  return est_detail::max_form_value(conf.mu_lo, conf.C_hi, rhs);
}

/// UCB on OPT_LP: max mu^U . x subject to C^L x <= T b; +inf when unbounded.
inline double ucb_lp_value(const ConfidenceState& conf, double b, long long T) {
  const std::vector<double> rhs(conf.d, static_cast<double>(T) * b);
  return est_detail::max_form_value(conf.mu_hi, conf.C_lo, rhs);
}

/// UCB on OPT_i (arm-removal LP); +inf when unbounded.
inline double arm_removal_ucb(const ConfidenceState& conf, double b, long long T, int arm) {
  if (arm < 0 || arm >= conf.m) throw std::out_of_range("arm_removal_ucb: arm index");
  const std::vector<double> rhs(conf.d, static_cast<double>(T) * b);
  return est_detail::max_form_value(conf.mu_hi, conf.C_lo, rhs, {arm});
}

/// UCB on OPT_j: min B.y - B subject to (C^L)^T y >= mu^U + C^U_{j,.}, y >= 0.
/// An empty feasible set maps to +inf, which can never win an elimination
/// comparison against a finite LCB.
inline double constraint_ucb(const ConfidenceState& conf, double b, long long T, int res) {
  if (res < 0 || res >= conf.d) throw std::out_of_range("constraint_ucb: resource index");
  const double B = static_cast<double>(T) * b;
  LinearProgram lp;  // negated min-form: max -B.y s.t. -(C^L)^T y <= -(mu^U + C^U_j)
  lp.objective.assign(conf.d, -B);
  lp.constraint_matrix.assign(conf.m, std::vector<double>(conf.d));
  lp.rhs.resize(conf.m);
  for (int i = 0; i < conf.m; ++i) {
    for (int j = 0; j < conf.d; ++j) lp.constraint_matrix[i][j] = -conf.C_lo[j][i];
    lp.rhs[i] = -(conf.mu_hi[i] + conf.C_hi[res][i]);
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Infeasible) return kInf;
  if (sol.status == LpStatus::Unbounded)
    throw std::runtime_error("constraint_ucb: unexpected unbounded dual-form LP");
  return -sol.objective_value - B;
}

}  // namespace bwk
