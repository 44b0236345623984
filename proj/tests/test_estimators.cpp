#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bwk/estimators.hpp"
#include "bwk/instance.hpp"
#include "bwk/rng.hpp"

using namespace bwk;
using Catch::Matchers::WithinAbs;

namespace {

Outcome make_outcome(double reward, std::vector<double> cons) {
  Outcome o;
  o.reward = reward;
  o.consumption = std::move(cons);
  return o;
}

}  // namespace

TEST_CASE("incremental means", "[estimators]") {
  ConfidenceState cs(3, 2, 1000);
  update(cs, 0, make_outcome(0.8, {0.5, 1.0}));
  CHECK(cs.n[0] == 1);
  CHECK_THAT(cs.mean_reward[0], WithinAbs(0.8, 1e-12));
  CHECK_THAT(cs.mean_C[1][0], WithinAbs(1.0, 1e-12));

  update(cs, 1, make_outcome(1.0, {0.5, 0.0}));
  update(cs, 1, make_outcome(0.0, {0.5, 1.0}));
  CHECK(cs.n[1] == 2);
  CHECK_THAT(cs.mean_reward[1], WithinAbs(0.5, 1e-12));
  CHECK_THAT(cs.mean_C[1][1], WithinAbs(0.5, 1e-12));
  CHECK(cs.n[2] == 0);  // other arms untouched
  CHECK_THROWS_AS(update(cs, 3, make_outcome(0.0, {0.5, 0.0})), std::out_of_range);
}

TEST_CASE("estimator concentration", "[estimators]") {
  ConfidenceState cs(1, 1, 100);
  std::mt19937_64 rng(stream_seed(13, 0));
  const int N = 10000;
  for (int k = 0; k < N; ++k)
    update(cs, 0, make_outcome(uniform01(rng) < 0.3 ? 1.0 : 0.0, {0.5}));
  CHECK_THAT(cs.mean_reward[0], WithinAbs(0.3, 3.0 * std::sqrt(0.21 / N)));
}

TEST_CASE("interval radius and projection", "[estimators]") {
  const long long T = 2000;
  ConfidenceState cs(2, 1, T);
  // n = 8: radius sqrt(2 log T / 8) > 1, so the projected interval is (0, 1).
  for (int k = 0; k < 8; ++k) update(cs, 0, make_outcome(k % 2 ? 1.0 : 0.0, {0.5}));
  CHECK_THAT(cs.radius(0), WithinAbs(std::sqrt(2.0 * std::log(2000.0) / 8.0), 1e-12));
  CHECK(cs.mu_lo[0] == 0.0);
  CHECK(cs.mu_hi[0] == 1.0);

  // n = 800: radius ~0.138, interval (mean - r, mean + r).
  for (int k = 0; k < 792; ++k) update(cs, 0, make_outcome(k % 2 ? 1.0 : 0.0, {0.5}));
  const double r = std::sqrt(2.0 * std::log(2000.0) / 800.0);
  CHECK_THAT(cs.mu_lo[0], WithinAbs(cs.mean_reward[0] - r, 1e-12));
  CHECK_THAT(cs.mu_hi[0], WithinAbs(cs.mean_reward[0] + r, 1e-12));

  // n = 0: maximal uncertainty.
  CHECK(cs.mu_lo[1] == 0.0);
  CHECK(cs.mu_hi[1] == 1.0);
  CHECK(cs.radius(1) == kInf);

  const Bounds b = bounds(cs);
  CHECK(b.mu_L == cs.mu_lo);
  CHECK(b.C_U == cs.C_hi);
}

TEST_CASE("monotone intervals are nested", "[estimators]") {
  ConfidenceState cs(2, 2, 500, /*monotone=*/true);
  std::mt19937_64 rng(stream_seed(21, 0));
  std::vector<double> prev_lo = cs.mu_lo, prev_hi = cs.mu_hi;
  auto prev_clo = cs.C_lo;
  auto prev_chi = cs.C_hi;
  for (int k = 0; k < 400; ++k) {
    const int arm = uniform_index(rng, 2);
    update(cs, arm,
           make_outcome(uniform01(rng) < 0.6 ? 1.0 : 0.0,
                        {0.5, uniform01(rng) < 0.3 ? 1.0 : 0.0}));
    for (int i = 0; i < 2; ++i) {
      CHECK(cs.mu_lo[i] >= prev_lo[i] - 1e-12);
      CHECK(cs.mu_hi[i] <= prev_hi[i] + 1e-12);
      for (int j = 0; j < 2; ++j) {
        CHECK(cs.C_lo[j][i] >= prev_clo[j][i] - 1e-12);
        CHECK(cs.C_hi[j][i] <= prev_chi[j][i] + 1e-12);
      }
    }
    prev_lo = cs.mu_lo;
    prev_hi = cs.mu_hi;
    prev_clo = cs.C_lo;
    prev_chi = cs.C_hi;
  }
}

TEST_CASE("exact surrogate collapses all LP values", "[estimators]") {
  const ProblemInstance f1 = fixture_f1();
  const long long T = 100;
  const ConfidenceState cs = ConfidenceState::exact_surrogate(f1, T);
  CHECK_THAT(lcb_lp_value(cs, f1.b, T), WithinAbs(65.0, 1e-6));
  CHECK_THAT(ucb_lp_value(cs, f1.b, T), WithinAbs(65.0, 1e-6));
  CHECK_THAT(arm_removal_ucb(cs, f1.b, T, 0), WithinAbs(50.0, 1e-6));
  CHECK_THAT(arm_removal_ucb(cs, f1.b, T, 2), WithinAbs(65.0, 1e-6));
  CHECK_THAT(constraint_ucb(cs, f1.b, T, 0), WithinAbs(65.0, 1e-6));
  CHECK_THAT(constraint_ucb(cs, f1.b, T, 1), WithinAbs(65.0, 1e-6));

  const ProblemInstance f2 = fixture_f2();
  const ConfidenceState cs2 = ConfidenceState::exact_surrogate(f2, T);
  CHECK_THAT(constraint_ucb(cs2, f2.b, T, 2), WithinAbs(25.0, 1e-6));
}

TEST_CASE("exact surrogate matches diagnostics on generated instances",
          "[estimators][property]") {
  for (uint64_t seed : {1u, 4u, 8u}) {
    const ProblemInstance inst = generate_random_instance(3, 2, 0.5, seed);
    const long long T = 500;
    const InstanceDiagnostics d = diagnostics(inst, T);
    const ConfidenceState cs = ConfidenceState::exact_surrogate(inst, T);
    const double Td = static_cast<double>(T);
    CHECK_THAT(lcb_lp_value(cs, inst.b, T) / Td, WithinAbs(d.opt_lp_per_t, 1e-6));
    CHECK_THAT(ucb_lp_value(cs, inst.b, T) / Td, WithinAbs(d.opt_lp_per_t, 1e-6));
    for (int i = 0; i < inst.m; ++i)
      CHECK_THAT(arm_removal_ucb(cs, inst.b, T, i) / Td, WithinAbs(d.opt_i_per_t[i], 1e-6));
    for (int j = 0; j < inst.d; ++j)
      CHECK_THAT(constraint_ucb(cs, inst.b, T, j) / Td, WithinAbs(d.opt_j_per_t[j], 1e-6));
  }
}

TEST_CASE("all-uncertain state maps to +inf UCBs", "[estimators]") {
  const ProblemInstance f1 = fixture_f1();
  ConfidenceState cs(f1.m, f1.d, 100);
  CHECK(ucb_lp_value(cs, f1.b, 100) == kInf);         // C^L = 0, unbounded
  CHECK(arm_removal_ucb(cs, f1.b, 100, 0) == kInf);
  CHECK(constraint_ucb(cs, f1.b, 100, 0) == kInf);    // zero columns, infeasible dual form
  CHECK_THAT(lcb_lp_value(cs, f1.b, 100), WithinAbs(0.0, 1e-12));  // mu^L = 0
  CHECK_THROWS_AS(arm_removal_ucb(cs, f1.b, 100, 5), std::out_of_range);
  CHECK_THROWS_AS(constraint_ucb(cs, f1.b, 100, 5), std::out_of_range);
}

TEST_CASE("interval coverage on simulated histories", "[estimators][property]") {
  const ProblemInstance f1 = fixture_f1();
  const long long T = 400;
  int covered_runs = 0;
  const int runs = 50;
  for (int rep = 0; rep < runs; ++rep) {
    ConfidenceState cs(f1.m, f1.d, T);
    std::mt19937_64 rng(stream_seed(99, rep));
    bool ok = true;
    for (long long t = 0; t < T; ++t) {
      const int arm = static_cast<int>(t % f1.m);
      update(cs, arm, sample_outcome(f1, arm, rng));
      for (int i = 0; i < f1.m && ok; ++i) {
        if (f1.mu[i] < cs.mu_lo[i] - 1e-12 || f1.mu[i] > cs.mu_hi[i] + 1e-12) ok = false;
        for (int j = 0; j < f1.d && ok; ++j)
          if (f1.C[j][i] < cs.C_lo[j][i] - 1e-12 || f1.C[j][i] > cs.C_hi[j][i] + 1e-12)
            ok = false;
      }
      if (!ok) break;
    }
    if (ok) ++covered_runs;
  }
  CHECK(covered_runs == runs);  // expected failure rate ~ 4md/T^2 per run
}
