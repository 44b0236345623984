#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <map>

#include "bwk/algorithms.hpp"
#include "bwk/instance.hpp"
#include "bwk/rng.hpp"

using namespace bwk;
using Catch::Matchers::WithinAbs;

namespace {

PolicyState exact_state(PolicyKind kind, const ProblemInstance& inst, long long T) {
  PolicyState ps = make_policy_state(kind, inst, T);
  ps.conf = ConfidenceState::exact_surrogate(inst, T);
  return ps;
}

std::map<int, int> sample_histogram(const std::function<int(std::mt19937_64&)>& draw,
                                    int n, uint64_t seed) {
  std::map<int, int> h;
  for (int k = 0; k < n; ++k) {
    std::mt19937_64 rng(stream_seed(seed, k));
    ++h[draw(rng)];
  }
  return h;
}

}  // namespace

TEST_CASE("policy names round trip", "[algorithms]") {
  for (PolicyKind k : {PolicyKind::TwoPhase, PolicyKind::OnePhase, PolicyKind::StaticLP,
                       PolicyKind::UniformRandom})
    CHECK(policy_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(policy_from_string("greedy"), std::invalid_argument);
}

TEST_CASE("monotone defaults per policy", "[algorithms]") {
  const ProblemInstance f1 = fixture_f1();
  CHECK_FALSE(make_policy_state(PolicyKind::TwoPhase, f1, 100).conf.monotone);
  CHECK(make_policy_state(PolicyKind::OnePhase, f1, 100).conf.monotone);
  CHECK(make_policy_state(PolicyKind::TwoPhase, f1, 100, true).conf.monotone);
  CHECK_FALSE(make_policy_state(PolicyKind::OnePhase, f1, 100, false).conf.monotone);
}

TEST_CASE("phase 1 round-robin", "[algorithms]") {
  const ProblemInstance f1 = fixture_f1();
  PolicyState ps = make_policy_state(PolicyKind::TwoPhase, f1, 100);
  for (int k = 0; k < 7; ++k) CHECK(phase1_select(ps) == k % 3);
  ps.phase = Phase::Exhaust;
  CHECK_THROWS_AS(phase1_select(ps), std::logic_error);
}

TEST_CASE("phase 1 elimination with exact means on F1", "[algorithms]") {
  const ProblemInstance f1 = fixture_f1();
  PolicyState ps = exact_state(PolicyKind::TwoPhase, f1, 100);
  phase1_update(ps);
  CHECK(ps.I_hat == std::set<int>{0, 1});
  CHECK(ps.J_hat.empty());
  CHECK(ps.phase == Phase::Exhaust);
}

TEST_CASE("phase 1 elimination with exact means on F2", "[algorithms]") {
  const ProblemInstance f2 = fixture_f2();
  PolicyState ps = exact_state(PolicyKind::TwoPhase, f2, 100);
  phase1_update(ps);
  CHECK(ps.I_hat == std::set<int>{0, 1});
  CHECK(ps.J_hat == std::set<int>{2});
  CHECK(ps.phase == Phase::Exhaust);
}

TEST_CASE("all-uncertain state eliminates nothing", "[algorithms]") {
  const ProblemInstance f1 = fixture_f1();
  PolicyState ps = make_policy_state(PolicyKind::TwoPhase, f1, 100);
  phase1_update(ps);
  CHECK(ps.I_hat.empty());
  CHECK(ps.J_hat.empty());
  CHECK(ps.phase == Phase::Identify);
}

TEST_CASE("phase 2 sampling distribution at exact means", "[algorithms]") {
  const ProblemInstance f1 = fixture_f1();
  PolicyState ps = exact_state(PolicyKind::TwoPhase, f1, 100);
  phase1_update(ps);
  REQUIRE(ps.phase == Phase::Exhaust);

  const std::vector<double> x =
      alg_detail::adaptive_lp_solution(ps.conf, ps.b, {50.0, 50.0}, {2});
  CHECK_THAT(x[0], WithinAbs(50.0, 1e-9));
  CHECK_THAT(x[1], WithinAbs(50.0, 1e-9));
  CHECK_THAT(x[2], WithinAbs(0.0, 1e-9));

  const auto h = sample_histogram(
      [&](std::mt19937_64& rng) { return phase2_select(ps, {50.0, 50.0}, rng); }, 2000, 31);
  CHECK(h.count(2) == 0);
  CHECK(h.at(0) + h.at(1) == 2000);
  CHECK(std::abs(h.at(0) - 1000) < 120);  // ~3.6 sigma for Binomial(2000, 1/2)
}

TEST_CASE("phase 2 exhausted rhs falls back to null arm", "[algorithms]") {
  const ProblemInstance f1 = fixture_f1();
  PolicyState ps = exact_state(PolicyKind::TwoPhase, f1, 100);
  phase1_update(ps);
  std::mt19937_64 rng(7);
  CHECK(phase2_select(ps, {0.0, 0.0}, rng) == 2);
}

TEST_CASE("phase 2 shifts toward the cheap arm when a resource runs low", "[algorithms]") {
  const ProblemInstance f1 = fixture_f1();
  PolicyState ps = exact_state(PolicyKind::TwoPhase, f1, 100);
  phase1_update(ps);
  // 0.8 x1 + 0.2 x2 <= 10 with x1 + x2 <= 100 puts all mass on arm 2 (index 1).
  for (int k = 0; k < 20; ++k) {
    std::mt19937_64 rng(stream_seed(41, k));
    CHECK(phase2_select(ps, {50.0, 10.0}, rng) == 1);
  }
}

TEST_CASE("phase 2 only plays identified arms", "[algorithms]") {
  const ProblemInstance f2 = fixture_f2();
  PolicyState ps = exact_state(PolicyKind::TwoPhase, f2, 100);
  phase1_update(ps);
  for (int k = 0; k < 200; ++k) {
    std::mt19937_64 rng(stream_seed(43, k));
    const int arm = phase2_select(ps, {40.0, 35.0, 45.0}, rng);
    CHECK((ps.I_hat.count(arm) || arm == f2.m - 1));
  }
}

TEST_CASE("one-phase step at exact means", "[algorithms]") {
  const ProblemInstance f1 = fixture_f1();
  PolicyState ps = exact_state(PolicyKind::OnePhase, f1, 100);
  const auto h = sample_histogram(
      [&](std::mt19937_64& rng) { return one_phase_select(ps, {50.0, 50.0}, rng); }, 2000, 53);
  CHECK(h.count(2) == 0);
  CHECK(std::abs(h.at(0) - 1000) < 120);
}

TEST_CASE("one-phase cold start samples over positive-UCB arms", "[algorithms]") {
  const ProblemInstance f1 = fixture_f1();
  PolicyState ps = make_policy_state(PolicyKind::OnePhase, f1, 100);
  REQUIRE(alg_detail::has_vacuous_column(ps.conf));
  const auto h = sample_histogram(
      [&](std::mt19937_64& rng) { return one_phase_select(ps, {50.0, 50.0}, rng); }, 3000, 61);
  for (int arm = 0; arm < 3; ++arm) {
    REQUIRE(h.count(arm) == 1);
    CHECK(std::abs(h.at(arm) - 1000) < 110);  // uniform over all three arms
  }
}

TEST_CASE("zero rhs row forces zero mass on consuming arms", "[algorithms]") {
  const ProblemInstance f1 = fixture_f1();
  const ConfidenceState cs = ConfidenceState::exact_surrogate(f1, 100);
  const std::vector<double> x = alg_detail::adaptive_lp_solution(cs, f1.b, {50.0, 0.0}, {});
  CHECK_THAT(x[0], WithinAbs(0.0, 1e-9));
  CHECK_THAT(x[1], WithinAbs(0.0, 1e-9));
}

TEST_CASE("static baseline distribution at exact means", "[algorithms]") {
  const ProblemInstance f1 = fixture_f1();
  PolicyState ps = exact_state(PolicyKind::StaticLP, f1, 100);
  const auto h = sample_histogram(
      [&](std::mt19937_64& rng) { return baseline_static_select(ps, rng); }, 2000, 67);
  CHECK(h.count(2) == 0);
  CHECK(std::abs(h.at(0) - 1000) < 120);
}

TEST_CASE("uniform baseline", "[algorithms]") {
  const auto h = sample_histogram(
      [&](std::mt19937_64& rng) { return uniform_select(3, rng); }, 3000, 71);
  for (int arm = 0; arm < 3; ++arm) {
    REQUIRE(h.count(arm) == 1);
    CHECK(std::abs(h.at(arm) - 1000) < 110);
  }
}
