#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bwk/algorithms.hpp"
#include "bwk/environment.hpp"
#include "bwk/estimators.hpp"
#include "bwk/instance.hpp"
#include "bwk/rng.hpp"

namespace bwk {

struct StepRecord {
  long long t = 0;  // time index of the round, 1-based after completion
  int arm = -1;
  double reward = 0.0;
  std::vector<double> consumption;
  std::vector<double> remaining;
};

struct RunTrace {
  std::string policy;
  long long T = 0;
  uint64_t master_seed = 0;
  uint64_t rep = 0;
  long long tau = 0;
  double total_reward = 0.0;
  std::vector<long long> final_counts;        // per-arm plays, summing to tau
  std::vector<double> remaining_final;        // B^(tau)
  std::optional<long long> phase1_end;        // two_phase only
  std::set<int> I_hat, J_hat;
  bool exhausted_in_phase1 = false;
  std::vector<std::pair<long long, std::vector<double>>> b_ratio_samples;
  std::vector<StepRecord> steps;              // populated only when record_steps
};

struct EpisodeConfig {
  PolicyKind kind = PolicyKind::TwoPhase;
  long long T = 0;
  uint64_t master_seed = 0;
  uint64_t rep = 0;
  std::optional<bool> monotone;
  bool record_steps = false;
};

/// Runs one seeded episode to its stopping time. Deterministic in
/// (instance, policy, T, master_seed, rep): every random draw comes from a
/// counter-based substream keyed by (master_seed, rep, t, purpose).
inline RunTrace run_episode(const ProblemInstance& inst, const EpisodeConfig& cfg) {
  inst.validate();
  if (cfg.T < inst.m) throw std::invalid_argument("run_episode: need T >= m");
  PolicyState ps = make_policy_state(cfg.kind, inst, cfg.T, cfg.monotone);
  KnapsackState ks = make_knapsack_state(inst, cfg.T);

  RunTrace tr;
  tr.policy = to_string(cfg.kind);
  tr.T = cfg.T;
  tr.master_seed = cfg.master_seed;
  tr.rep = cfg.rep;
  tr.final_counts.assign(inst.m, 0);
  const long long sample_every = std::max<long long>(1, (cfg.T + 199) / 200);

  while (!ks.stopped) {
    const long long t0 = ks.t;
    if (t0 % sample_every == 0 && t0 < cfg.T)
      tr.b_ratio_samples.emplace_back(t0, remaining_ratio(ks));

    std::mt19937_64 pol_rng(stream_seed(cfg.master_seed, cfg.rep, static_cast<uint64_t>(t0), 0));
    int arm = -1;
    switch (cfg.kind) {
      case PolicyKind::TwoPhase:
        arm = ps.phase == Phase::Identify ? phase1_select(ps)
                                          : phase2_select(ps, ks.remaining, pol_rng);
        break;
      case PolicyKind::OnePhase:
        arm = one_phase_select(ps, ks.remaining, pol_rng);
        break;
      case PolicyKind::StaticLP:
        arm = baseline_static_select(ps, pol_rng);
        break;
      case PolicyKind::UniformRandom:
        arm = uniform_select(inst.m, pol_rng);
        break;
    }

    std::mt19937_64 env_rng(stream_seed(cfg.master_seed, cfg.rep, static_cast<uint64_t>(t0), 1));
    const Outcome out = sample_outcome(inst, arm, env_rng);
    step(ks, out);
    if (ks.stopped && ks.t == t0) break;  // violating round: rolled back, not observed

    update(ps.conf, arm, out);
    tr.final_counts[arm] += 1;
    if (cfg.record_steps) {
      StepRecord rec;
      rec.t = ks.t;
      rec.arm = arm;
      rec.reward = out.reward;
      rec.consumption = out.consumption;
      rec.remaining = ks.remaining;
      tr.steps.push_back(std::move(rec));
    }
    if (cfg.kind == PolicyKind::TwoPhase && ps.phase == Phase::Identify &&
        ps.round_cursor == 0) {
      phase1_update(ps);
      if (ps.phase == Phase::Exhaust) tr.phase1_end = ks.t;
    }
  }

  tr.tau = *ks.stopped;
  tr.total_reward = ks.cumulative_reward;
  tr.remaining_final = ks.remaining;
  tr.I_hat = ps.I_hat;
  tr.J_hat = ps.J_hat;
  tr.exhausted_in_phase1 =
      cfg.kind == PolicyKind::TwoPhase && ps.phase == Phase::Identify && tr.tau < cfg.T;
  return tr;
}

inline RunTrace run_episode(const ProblemInstance& inst, PolicyKind kind, long long T,
                            uint64_t seed) {
  EpisodeConfig cfg;
  cfg.kind = kind;
  cfg.T = T;
  cfg.master_seed = seed;
  return run_episode(inst, cfg);
}

struct RegretReport {
  std::string policy;
  long long T = 0;
  int reps = 0;
  double mean_regret = 0.0;
  double regret_stderr = std::numeric_limits<double>::quiet_NaN();
  double mean_subopt_term = 0.0;    // E[sum_{i in I'} n_i(tau) Delta_i]
  double mean_leftover_term = 0.0;  // E[(B^(tau))^T y*]
  double mean_bound = 0.0;          // decomposition upper bound
  double bound_stderr = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> mean_leftover;        // per resource j
  std::vector<int> binding_resources;       // J*
  double identification_accuracy = std::numeric_limits<double>::quiet_NaN();
  double phase1_mean_length = std::numeric_limits<double>::quiet_NaN();
  bool stderr_defined = true;
};

/// Aggregates episodes of one (policy, T) cell into regret statistics and the
/// reduced-cost / leftover decomposition against OPT_LP.
inline RegretReport regret_report(const std::vector<RunTrace>& traces,
                                  const InstanceDiagnostics& diag, long long T) {
  if (traces.empty()) throw std::invalid_argument("regret_report: no traces");
  RegretReport rep;
  rep.policy = traces.front().policy;
  rep.T = T;
  rep.reps = static_cast<int>(traces.size());
  for (const auto& tr : traces)
    if (tr.policy != rep.policy || tr.T != T)
      throw std::invalid_argument("regret_report: mixed-configuration traces");

  const double opt = diag.opt_lp_per_t * static_cast<double>(T);
  const int d = static_cast<int>(diag.y_star.size());
  std::vector<double> regrets, bounds_;
  double sum_sub = 0.0, sum_left = 0.0;
  std::vector<double> leftover_sum(d, 0.0);
  int ident_ok = 0, phase1_known = 0;
  double phase1_sum = 0.0;
  const std::set<int> I_true(diag.I_star.begin(), diag.I_star.end());
  const std::set<int> J_true(diag.J_prime.begin(), diag.J_prime.end());

  for (const auto& tr : traces) {
    regrets.push_back(opt - tr.total_reward);
    double sub = 0.0;
    for (int i : diag.I_prime) sub += static_cast<double>(tr.final_counts[i]) * diag.delta_i[i];
    double left = 0.0;
    for (int j = 0; j < d; ++j) {
      left += tr.remaining_final[j] * diag.y_star[j];
      leftover_sum[j] += tr.remaining_final[j];
    }
    sum_sub += sub;
    sum_left += left;
    bounds_.push_back(sub + left);
    if (tr.policy == "two_phase") {
      if (tr.I_hat == I_true && tr.J_hat == J_true) ++ident_ok;
      phase1_sum += static_cast<double>(tr.phase1_end.value_or(tr.tau));
      ++phase1_known;
    }
  }

  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto stderr_of = [&](const std::vector<double>& v, double mean) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  };

  rep.mean_regret = mean_of(regrets);
  rep.regret_stderr = stderr_of(regrets, rep.mean_regret);
  rep.mean_subopt_term = sum_sub / rep.reps;
  rep.mean_leftover_term = sum_left / rep.reps;
  rep.mean_bound = mean_of(bounds_);
  rep.bound_stderr = stderr_of(bounds_, rep.mean_bound);
  rep.stderr_defined = rep.reps >= 2;
  rep.mean_leftover.resize(d);
  for (int j = 0; j < d; ++j) rep.mean_leftover[j] = leftover_sum[j] / rep.reps;
  rep.binding_resources = diag.J_star;
  if (phase1_known > 0) {
    rep.identification_accuracy = static_cast<double>(ident_ok) / phase1_known;
    rep.phase1_mean_length = phase1_sum / phase1_known;
  }
  return rep;
}

struct FitResult {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

struct ScalingReport {
  std::vector<RegretReport> cells;
  FitResult log_fit, sqrt_fit;
  double regret_ratio = std::numeric_limits<double>::quiet_NaN();
  bool stderr_defined = true;
};

namespace harness_detail {

inline FitResult least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  FitResult f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ssr += e * e;
  }
  f.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

}  // namespace harness_detail

/// Runs `reps` independent episodes; episodes fan out over hardware threads
/// and are aggregated in replication order, so results are deterministic.
inline std::vector<RunTrace> run_replications(const ProblemInstance& inst, PolicyKind kind,
                                              long long T, int reps, uint64_t master_seed,
                                              std::optional<bool> monotone = std::nullopt) {
  std::vector<RunTrace> traces(reps);
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), reps));
  std::vector<std::future<void>> futs;
  for (unsigned w = 0; w < workers; ++w) {
    futs.push_back(std::async(std::launch::async, [&, w]() {
      for (int r = static_cast<int>(w); r < reps; r += static_cast<int>(workers)) {
        EpisodeConfig cfg;
        cfg.kind = kind;
        cfg.T = T;
        cfg.master_seed = master_seed;
        cfg.rep = static_cast<uint64_t>(r);
        cfg.monotone = monotone;
        traces[r] = run_episode(inst, cfg);
      }
    }));
  }
  for (auto& f : futs) f.get();
  return traces;
}

/// Sweeps a horizon grid, fits mean regret against log T and sqrt T, and
/// reports the end-to-end regret growth ratio.
inline ScalingReport sweep_and_fit(const ProblemInstance& inst, PolicyKind kind,
                                   const std::vector<long long>& T_grid, int reps,
                                   uint64_t master_seed,
                                   std::optional<bool> monotone = std::nullopt) {
  if (T_grid.empty()) throw std::invalid_argument("sweep_and_fit: empty T grid");
  for (size_t i = 1; i < T_grid.size(); ++i)
    if (T_grid[i] <= T_grid[i - 1])
      throw std::invalid_argument("sweep_and_fit: T grid must be ascending");

  ScalingReport sr;
  std::vector<double> xs_log, xs_sqrt, ys;
  for (long long T : T_grid) {
    const uint64_t cell_seed = stream_seed(master_seed, hash_string(to_string(kind)),
                                           static_cast<uint64_t>(T));
    const auto traces = run_replications(inst, kind, T, reps, cell_seed, monotone);
    const InstanceDiagnostics diag = diagnostics(inst, T);
    RegretReport rep = regret_report(traces, diag, T);
    sr.stderr_defined = sr.stderr_defined && rep.stderr_defined;
    xs_log.push_back(std::log(static_cast<double>(T)));
    xs_sqrt.push_back(std::sqrt(static_cast<double>(T)));
    ys.push_back(rep.mean_regret);
    sr.cells.push_back(std::move(rep));
  }
  if (T_grid.size() >= 2) {
    sr.log_fit = harness_detail::least_squares(xs_log, ys);
    sr.sqrt_fit = harness_detail::least_squares(xs_sqrt, ys);
    sr.regret_ratio = ys.back() / ys.front();
  }
  return sr;
}

}  // namespace bwk
