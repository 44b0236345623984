#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bwk/lp.hpp"
#include "bwk/rng.hpp"

namespace bwk {

enum class DistKind { Bernoulli, Deterministic };

inline const char* to_string(DistKind d) {
  return d == DistKind::Bernoulli ? "bernoulli" : "deterministic";
}

inline DistKind dist_from_string(const std::string& s) {
  if (s == "bernoulli") return DistKind::Bernoulli;
  if (s == "deterministic") return DistKind::Deterministic;
  throw std::invalid_argument("unknown distribution kind: " + s);
}

/// A BwK instance with the model conventions already applied: the last arm is
/// the null arm (zero reward, consumes only time) and row 0 of C is the time
/// resource, equal to b for every arm.
struct ProblemInstance {
  int m = 0;  // arm count, including the null arm
  int d = 0;  // resource count, including the time resource
  std::vector<double> mu;                // length m, mu[m-1] = 0
  std::vector<std::vector<double>> C;    // d x m consumption means
  double b = 0.0;                        // budget rate, B = T*b per resource
  DistKind dist = DistKind::Bernoulli;
  std::string label;

  void validate() const {
    if (m < 1 || d < 1) throw std::invalid_argument("instance: m and d must be >= 1");
    if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("instance: b must be in (0,1]");
    if (static_cast<int>(mu.size()) != m) throw std::invalid_argument("instance: mu size");
    if (static_cast<int>(C.size()) != d) throw std::invalid_argument("instance: C rows");
    for (const auto& row : C)
      if (static_cast<int>(row.size()) != m) throw std::invalid_argument("instance: C cols");
    for (double v : mu)
      if (v < 0.0 || v > 1.0) throw std::invalid_argument("instance: mu out of [0,1]");
    for (const auto& row : C)
      for (double v : row)
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("instance: C out of [0,1]");
    const double eps = 1e-12;
    if (std::abs(mu[m - 1]) > eps) throw std::invalid_argument("instance: null arm reward != 0");
    for (int i = 0; i < m; ++i)
      if (std::abs(C[0][i] - b) > eps)
        throw std::invalid_argument("instance: time row must equal b");
    for (int j = 1; j < d; ++j)
      if (std::abs(C[j][m - 1]) > eps)
        throw std::invalid_argument("instance: null arm must consume only time");
  }
};

/// Prepends the time-resource row and appends the null arm to raw data.
inline ProblemInstance augment_with_null_arm(const std::vector<double>& raw_mu,
                                             const std::vector<std::vector<double>>& raw_C,
                                             double b, DistKind dist = DistKind::Bernoulli,
                                             std::string label = "") {
  if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("augment: b must be in (0,1]");
  const int m_raw = static_cast<int>(raw_mu.size());
  const int d_raw = static_cast<int>(raw_C.size());
  for (double v : raw_mu)
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("augment: mean reward out of [0,1]");
  for (const auto& row : raw_C) {
    if (static_cast<int>(row.size()) != m_raw)
      throw std::invalid_argument("augment: raw_C column count mismatch");
    for (double v : row)
      if (v < 0.0 || v > 1.0) throw std::invalid_argument("augment: consumption out of [0,1]");
  }
  ProblemInstance inst;
  inst.m = m_raw + 1;
  inst.d = d_raw + 1;
  inst.b = b;
  inst.dist = dist;
  inst.label = std::move(label);
  inst.mu = raw_mu;
  inst.mu.push_back(0.0);
  inst.C.assign(inst.d, std::vector<double>(inst.m, 0.0));
  for (int i = 0; i < inst.m; ++i) inst.C[0][i] = b;
  for (int j = 0; j < d_raw; ++j)
    for (int i = 0; i < m_raw; ++i) inst.C[j + 1][i] = raw_C[j][i];
  inst.validate();
  return inst;
}

inline ProblemInstance fixture_f1(DistKind dist = DistKind::Bernoulli) {
  return augment_with_null_arm({0.8, 0.5}, {{0.8, 0.2}}, 0.5, dist, "F1");
}

inline ProblemInstance fixture_f2(DistKind dist = DistKind::Bernoulli) {
  return augment_with_null_arm({0.8, 0.5}, {{0.8, 0.2}, {0.1, 0.1}}, 0.5, dist, "F2");
}

inline LinearProgram build_primal_lp(const ProblemInstance& inst, long long T) {
  if (T < 1) throw std::invalid_argument("build_primal_lp: T must be >= 1");
  inst.validate();
  LinearProgram lp;
  lp.objective = inst.mu;
  lp.constraint_matrix = inst.C;
  lp.rhs.assign(inst.d, static_cast<double>(T) * inst.b);
  return lp;
}

inline LinearProgram build_arm_removal_lp(const ProblemInstance& inst, long long T, int arm) {
  if (arm < 0 || arm >= inst.m) throw std::out_of_range("build_arm_removal_lp: arm index");
  LinearProgram lp = build_primal_lp(inst, T);
  lp.fixed_to_zero = {arm};
  return lp;
}

/// Primal form of the binding-penalty LP: the objective carries row j of C,
/// and `offset` (-B) makes lp value + offset equal mu.x - (B - C_j . x).
struct PenaltyLp {
  LinearProgram lp;
  double offset = 0.0;
};

inline PenaltyLp build_binding_penalty_lp(const ProblemInstance& inst, long long T, int res) {
  if (res < 0 || res >= inst.d) throw std::out_of_range("build_binding_penalty_lp: index");
  PenaltyLp p;
  p.lp = build_primal_lp(inst, T);
  for (int i = 0; i < inst.m; ++i) p.lp.objective[i] += inst.C[res][i];
  p.offset = -static_cast<double>(T) * inst.b;
  return p;
}

struct SetPartition {
  std::vector<int> I_star, I_prime;  // optimal / sub-optimal arms
  std::vector<int> J_star, J_prime;  // binding / non-binding resources
};

/// Splits arms by x* support and resources by slack, with thresholds scaled by
/// T so the classification is invariant to the homogeneous scaling of the LP.
inline SetPartition classify_sets(const LpSolution& sol, double tol, long long T) {
  if (sol.status != LpStatus::Optimal)
    throw std::invalid_argument("classify_sets: solution must be optimal");
  SetPartition p;
  const double xthr = tol * static_cast<double>(T);
  for (int i = 0; i < static_cast<int>(sol.primal.size()); ++i)
    (sol.primal[i] > xthr ? p.I_star : p.I_prime).push_back(i);
  for (int j = 0; j < static_cast<int>(sol.slacks.size()); ++j)
    (sol.slacks[j] < xthr ? p.J_star : p.J_prime).push_back(j);
  return p;
}

struct InstanceDiagnostics {
  double opt_lp_per_t = 0.0;
  std::vector<double> x_star_per_t;
  std::vector<double> y_star;
  std::vector<int> I_star, I_prime, J_star, J_prime;
  std::vector<double> delta_i;       // reduced costs
  double delta = std::numeric_limits<double>::quiet_NaN();
  double sigma = 0.0;                // min singular value of C restricted to (J*, I*)
  double chi = 0.0;                  // smallest positive x*_i / T
  double theta = std::numeric_limits<double>::quiet_NaN();
  bool nondegenerate = false;
  std::vector<double> opt_i_per_t;
  std::vector<double> opt_j_per_t;
  std::vector<std::string> warnings;
};

inline InstanceDiagnostics diagnostics(const ProblemInstance& inst, long long T,
                                       double tol = 1e-6) {
  if (T < 1) throw std::invalid_argument("diagnostics: T must be >= 1");
  const double Td = static_cast<double>(T);
  InstanceDiagnostics diag;

  const LpSolution sol = solve_lp(build_primal_lp(inst, T));
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error("diagnostics: primal LP not optimal");
  diag.opt_lp_per_t = sol.objective_value / Td;
  diag.x_star_per_t.resize(inst.m);
  for (int i = 0; i < inst.m; ++i) diag.x_star_per_t[i] = sol.primal[i] / Td;
  diag.y_star = sol.dual;

  const SetPartition sets = classify_sets(sol, tol, T);
  diag.I_star = sets.I_star;
  diag.I_prime = sets.I_prime;
  diag.J_star = sets.J_star;
  diag.J_prime = sets.J_prime;

  diag.delta_i.resize(inst.m);
  for (int i = 0; i < inst.m; ++i) {
    double cy = 0.0;
    for (int j = 0; j < inst.d; ++j) cy += inst.C[j][i] * sol.dual[j];
    diag.delta_i[i] = cy - inst.mu[i];
  }

  diag.opt_i_per_t.resize(inst.m);
  for (int i = 0; i < inst.m; ++i) {
    const LpSolution s = solve_lp(build_arm_removal_lp(inst, T, i));
    diag.opt_i_per_t[i] = s.objective_value / Td;
  }
  diag.opt_j_per_t.resize(inst.d);
  for (int j = 0; j < inst.d; ++j) {
    const PenaltyLp p = build_binding_penalty_lp(inst, T, j);
    const LpSolution s = solve_lp(p.lp);
    diag.opt_j_per_t[j] = (s.objective_value + p.offset) / Td;
  }

  // delta: gap to the closest of the removal/penalty families; an empty
  // family contributes -inf, and if both are empty delta stays undefined.
  double best = -std::numeric_limits<double>::infinity();
  for (int i : diag.I_star) best = std::max(best, diag.opt_i_per_t[i]);
  for (int j : diag.J_prime) best = std::max(best, diag.opt_j_per_t[j]);
  if (std::isfinite(best)) {
    diag.delta = diag.opt_lp_per_t - best;
  } else {
    diag.warnings.push_back("delta undefined: both I* and J' are empty");
  }

  if (!diag.I_star.empty() && !diag.J_star.empty()) {
    Eigen::MatrixXd sub(diag.J_star.size(), diag.I_star.size());
    for (size_t r = 0; r < diag.J_star.size(); ++r)
      for (size_t c = 0; c < diag.I_star.size(); ++c)
        sub(r, c) = inst.C[diag.J_star[r]][diag.I_star[c]];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
    diag.sigma = svd.singularValues().tail(1)(0);
  } else {
    diag.warnings.push_back("sigma undefined: empty binding/optimal set");
  }

  double chi = std::numeric_limits<double>::infinity();
  for (int i : diag.I_star) chi = std::min(chi, diag.x_star_per_t[i]);
  if (std::isfinite(chi)) {
    diag.chi = chi;
  } else {
    diag.warnings.push_back("chi undefined: I* is empty");
  }

  if (std::isfinite(diag.delta)) {
    const double md2 = static_cast<double>(std::min(inst.m * inst.m, inst.d * inst.d));
    const double branch1 = std::min(1.0, diag.sigma * diag.sigma) *
                           std::min(diag.chi, diag.delta) / (12.0 * md2);
    const double branch2 =
        std::pow(2.0 + 1.0 / inst.b, -2.0) * diag.delta / 5.0;
    diag.theta = std::min(branch1, branch2);
  }

  // Non-degeneracy: |I*| = |J*| plus a conservative uniqueness heuristic that
  // requires strict margins on the reduced costs of every non-basic variable
  // (arms via delta_i, slacks via y*).
  bool nondeg = diag.I_star.size() == diag.J_star.size();
  if (!nondeg) diag.warnings.push_back("degenerate: |I*| != |J*|");
  for (int i : diag.I_prime)
    if (diag.delta_i[i] < tol) {
      nondeg = false;
      diag.warnings.push_back("possible alternate optimum: arm " + std::to_string(i) +
                              " has near-zero reduced cost");
      break;
    }
  for (int j : diag.J_star)
    if (sol.dual[j] < tol) {
      nondeg = false;
      diag.warnings.push_back("possible primal degeneracy: binding resource " +
                              std::to_string(j) + " has near-zero dual");
      break;
    }
  if (static_cast<int>(diag.I_star.size() + diag.J_prime.size()) != inst.d && nondeg) {
    nondeg = false;
    diag.warnings.push_back("complementarity counts violated");
  }
  diag.nondegenerate = nondeg;
  return diag;
}

/// Rejection-samples a non-degenerate instance with delta >= 0.02.
inline ProblemInstance generate_random_instance(int m_raw, int d_raw, double b,
                                                uint64_t seed) {
  if (m_raw < 1 || d_raw < 1)
    throw std::invalid_argument("generate_random_instance: m_raw, d_raw must be >= 1");
  std::mt19937_64 gen(stream_seed(seed, 0x9c0ffee));
  std::vector<std::string> last_warnings;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> raw_mu(m_raw);
    for (double& v : raw_mu) v = uniform_in(gen, 0.05, 0.95);
    std::vector<std::vector<double>> raw_C(d_raw, std::vector<double>(m_raw));
    for (auto& row : raw_C)
      for (double& v : row) v = uniform_in(gen, 0.05, 0.95);
    std::ostringstream lbl;
    lbl << "rand_m" << m_raw << "_d" << d_raw << "_b" << b << "_s" << seed;
    ProblemInstance inst =
        augment_with_null_arm(raw_mu, raw_C, b, DistKind::Bernoulli, lbl.str());
    const InstanceDiagnostics diag = diagnostics(inst, 1000);
    if (diag.nondegenerate && std::isfinite(diag.delta) && diag.delta >= 0.02) return inst;
    last_warnings = diag.warnings;
    if (!(std::isfinite(diag.delta) && diag.delta >= 0.02))
      last_warnings.push_back("delta below 0.02");
  }
  std::string msg = "generate_random_instance: 100 rejections;";
  for (const auto& w : last_warnings) msg += " " + w + ";";
  throw std::runtime_error(msg);
}

}  // namespace bwk
