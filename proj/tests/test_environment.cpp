#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bwk/environment.hpp"
#include "bwk/instance.hpp"
#include "bwk/rng.hpp"

using namespace bwk;
using Catch::Matchers::WithinAbs;

TEST_CASE("point-mass outcomes", "[environment]") {
  const ProblemInstance f1 = fixture_f1(DistKind::Deterministic);
  std::mt19937_64 rng(1);
  const Outcome o = sample_outcome(f1, 0, rng);
  CHECK(o.reward == 0.8);
  CHECK(o.consumption == std::vector<double>{0.5, 0.8});
}

TEST_CASE("null arm consumes only time", "[environment]") {
  const ProblemInstance f1 = fixture_f1();
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const Outcome o = sample_outcome(f1, 2, rng);
    CHECK(o.reward == 0.0);
    CHECK(o.consumption == std::vector<double>{0.5, 0.0});
  }
}

TEST_CASE("Bernoulli outcomes match means statistically", "[environment]") {
  const ProblemInstance f1 = fixture_f1();
  std::mt19937_64 rng(stream_seed(77, 0));
  const int N = 100000;
  double sum_r = 0.0, sum_c = 0.0;
  for (int k = 0; k < N; ++k) {
    const Outcome o = sample_outcome(f1, 1, rng);
    CHECK((o.reward == 0.0 || o.reward == 1.0));
    sum_r += o.reward;
    sum_c += o.consumption[1];
  }
  const double three_sigma_r = 3.0 * std::sqrt(0.5 * 0.5 / N);
  const double three_sigma_c = 3.0 * std::sqrt(0.2 * 0.8 / N);
  CHECK_THAT(sum_r / N, WithinAbs(0.5, three_sigma_r));
  CHECK_THAT(sum_c / N, WithinAbs(0.2, three_sigma_c));
}

TEST_CASE("violating round stops without credit", "[environment]") {
  KnapsackState ks;
  ks.T = 100;
  ks.t = 6;
  ks.remaining = {1.0, 0.3};
  ks.cumulative_reward = 2.0;
  Outcome o;
  o.reward = 1.0;
  o.consumption = {0.5, 0.4};
  step(ks, o);
  REQUIRE(ks.stopped.has_value());
  CHECK(*ks.stopped == 6);
  CHECK(ks.cumulative_reward == 2.0);
  CHECK(ks.remaining == std::vector<double>{1.0, 0.3});
  CHECK_THROWS_AS(step(ks, o), std::logic_error);
}

TEST_CASE("exact exhaustion is feasible", "[environment]") {
  KnapsackState ks;
  ks.T = 100;
  ks.remaining = {0.5};
  Outcome o;
  o.reward = 1.0;
  o.consumption = {0.5};
  step(ks, o);
  CHECK_FALSE(ks.stopped.has_value());
  CHECK(ks.remaining[0] == 0.0);
  CHECK(ks.cumulative_reward == 1.0);
}

TEST_CASE("deterministic balanced F1 run exhausts exactly at T", "[environment]") {
  const ProblemInstance f1 = fixture_f1(DistKind::Deterministic);
  const long long T = 200;
  KnapsackState ks = make_knapsack_state(f1, T);
  std::mt19937_64 rng(3);
  while (!ks.stopped) {
    if (ks.t % 2 == 0) {  // the (1/2, 1/2) mix balances after each completed pair
      const std::vector<double> ratio = remaining_ratio(ks);
      CHECK_THAT(ratio[0], WithinAbs(0.5, 1e-9));
      CHECK_THAT(ratio[1], WithinAbs(0.5, 1e-9));
    }
    const int arm = ks.t % 2 == 0 ? 0 : 1;  // alternate the LP mix (1/2, 1/2)
    step(ks, sample_outcome(f1, arm, rng));
  }
  CHECK(*ks.stopped == T);
  CHECK_THAT(ks.remaining[0], WithinAbs(0.0, 1e-9));
  CHECK_THAT(ks.remaining[1], WithinAbs(0.0, 1e-9));
  CHECK_THAT(ks.cumulative_reward, WithinAbs(0.65 * T, 1e-9));
}

TEST_CASE("knapsack telescoping", "[environment]") {
  const ProblemInstance f1 = fixture_f1();
  const long long T = 500;
  KnapsackState ks = make_knapsack_state(f1, T);
  std::vector<double> consumed(f1.d, 0.0);
  std::mt19937_64 arm_rng(stream_seed(5, 1));
  std::mt19937_64 env_rng(stream_seed(5, 2));
  while (!ks.stopped) {
    const Outcome o = sample_outcome(f1, uniform_index(arm_rng, f1.m), env_rng);
    const long long t0 = ks.t;
    step(ks, o);
    if (ks.stopped && ks.t == t0) break;
    for (int j = 0; j < f1.d; ++j) consumed[j] += o.consumption[j];
  }
  for (int j = 0; j < f1.d; ++j) {
    CHECK_THAT(static_cast<double>(T) * f1.b - ks.remaining[j],
               WithinAbs(consumed[j], 1e-9 * static_cast<double>(ks.t)));
  }
  CHECK(*ks.stopped <= T);
}

TEST_CASE("remaining_ratio arithmetic and domain", "[environment]") {
  const ProblemInstance f1 = fixture_f1();
  KnapsackState ks = make_knapsack_state(f1, 100);
  CHECK(remaining_ratio(ks) == std::vector<double>{0.5, 0.5});

  ks.remaining = {30.0, 20.0};
  ks.t = 50;
  const std::vector<double> r = remaining_ratio(ks);
  CHECK_THAT(r[0], WithinAbs(0.6, 1e-12));
  CHECK_THAT(r[1], WithinAbs(0.4, 1e-12));

  ks.t = 100;
  CHECK_THROWS_AS(remaining_ratio(ks), std::invalid_argument);
}

TEST_CASE("arm index validated", "[environment]") {
  const ProblemInstance f1 = fixture_f1();
  std::mt19937_64 rng(4);
  CHECK_THROWS_AS(sample_outcome(f1, 3, rng), std::out_of_range);
  CHECK_THROWS_AS(sample_outcome(f1, -1, rng), std::out_of_range);
}
