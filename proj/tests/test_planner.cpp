// Copyright 2026 The vedit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "vedit/planner.hpp"

using namespace vedit;

namespace {

AgentState<double> random_agent_state(int d_s, Rng& rng) {
  AgentState<double> s;
  s.mat = Tensor<double>({kPositions, d_s});
  for (std::size_t i = 0; i < s.mat.size(); ++i)
    s.mat[i] = rng.uniform01() * 2.0 - 1.0;
  s.mask.fill(1);
  return s;
}

}  // namespace

TEST_CASE("degenerate planner: zero model and critic give a uniform policy") {
  Rng rng(41);
  const NetDims dims = NetDims::desk();
  DynModel<double> model(dims, rng);
  ActorCritic<double> critic(dims, rng);
  for (auto& e : model.store().entries()) e.value.zero();
  for (auto& e : critic.store().entries()) e.value.zero();

  const AgentState<double> s = random_agent_state(dims.d_s(), rng);
  const PlannerOutput<double> out = plan(s, model, critic, 0.9);
  REQUIRE(out.returns.size() == 15);
  REQUIRE(out.predictions.size() == 15);
  for (double g : out.returns) CHECK(g == 0.0);
  for (double p : out.policy)
    CHECK(p == doctest::Approx(1.0 / 15).epsilon(1e-12));
  CHECK(out.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two-action closed form") {
  const PlannerOutput<double> out = planner_from_returns<double>({-1.0, -2.0});
  const double z = std::exp(-1.0) + std::exp(-2.0);
  CHECK(out.policy[0] == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-12));
  CHECK(out.policy[1] == doctest::Approx(std::exp(-2.0) / z).epsilon(1e-12));
  CHECK(out.policy[0] == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(out.policy[1] == doctest::Approx(0.2689).epsilon(1e-4));
  CHECK(out.value ==
        doctest::Approx(-out.policy[0] - 2.0 * out.policy[1]).epsilon(1e-12));
  CHECK(out.value == doctest::Approx(-1.2689).epsilon(1e-4));
}

TEST_CASE("gamma zero reduces planning to reward prediction") {
  Rng rng(42);
  const NetDims dims = NetDims::desk();
  DynModel<double> model(dims, rng);
  ActorCritic<double> critic(dims, rng);
  const AgentState<double> s = random_agent_state(dims.d_s(), rng);
  const PlannerOutput<double> out = plan(s, model, critic, 0.0);
  for (int a = 1; a <= kNumActions; ++a) {
    const ModelPrediction<double> p = model.predict(s.mat, a, nullptr);
    CHECK(out.returns[static_cast<std::size_t>(a - 1)] == p.reward);
  }
}

TEST_CASE("planner identities hold on random states") {
  Rng rng(43);
  const NetDims dims = NetDims::desk();
  DynModel<double> model(dims, rng);
  ActorCritic<double> critic(dims, rng);
  for (int rep = 0; rep < 1000; ++rep) {
    const AgentState<double> s = random_agent_state(dims.d_s(), rng);
    const PlannerOutput<double> out = plan(s, model, critic, 0.9);

    double sum = 0.0;
    for (double p : out.policy) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-9);

    double expect = 0.0;
    for (std::size_t i = out.returns.size(); i-- > 0;)
      expect += out.returns[i] * out.policy[i];
    CHECK(std::abs(out.value - expect) <= 1e-9);

    double mn = out.returns[0], mx = out.returns[0];
    for (double g : out.returns) {
      mn = std::min(mn, g);
      mx = std::max(mx, g);
    }
    CHECK(out.value >= mn - 1e-12);
    CHECK(out.value <= mx + 1e-12);

    CHECK(greedy_action(std::span<const double>(out.policy)) ==
          greedy_action(std::span<const double>(out.returns)));
  }
}

TEST_CASE("shifting every return leaves the policy, shifts the value") {
  Rng rng(44);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> g(15);
    for (auto& v : g) v = rng.uniform01() * 10 - 5;
    const double c = rng.uniform01() * 6 - 3;
    std::vector<double> shifted = g;
    for (auto& v : shifted) v += c;
    const auto a = planner_from_returns(g);
    const auto b = planner_from_returns(shifted);
    for (std::size_t i = 0; i < 15; ++i)
      CHECK(b.policy[i] == doctest::Approx(a.policy[i]).epsilon(1e-9));
    CHECK(b.value == doctest::Approx(a.value + c).epsilon(1e-8));
  }
}

TEST_CASE("sample_action: one-hot, determinism, uniform frequencies") {
  Rng rng(45);
  std::vector<double> onehot(15, 0.0);
  onehot[6] = 1.0;
  for (int i = 0; i < 20; ++i)
    CHECK(sample_action(std::span<const double>(onehot), rng) == 7);

  Rng r1(99), r2(99);
  std::vector<double> uniform(15, 1.0 / 15);
  CHECK(sample_action(std::span<const double>(uniform), r1) ==
        sample_action(std::span<const double>(uniform), r2));

  std::vector<int> counts(16, 0);
  for (int i = 0; i < 15000; ++i)
    counts[static_cast<std::size_t>(
        sample_action(std::span<const double>(uniform), rng))]++;
  for (int a = 1; a <= 15; ++a) {
    CHECK(counts[static_cast<std::size_t>(a)] >= 800);
    CHECK(counts[static_cast<std::size_t>(a)] <= 1200);
  }
}

TEST_CASE("greedy_action: argmax, low-index ties, shift invariance") {
  const std::vector<double> v{-3.0, -1.0, -2.0};
  CHECK(greedy_action(std::span<const double>(v)) == 2);

  const std::vector<double> equal(5, 0.25);
  CHECK(greedy_action(std::span<const double>(equal)) == 1);

  Rng rng(46);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> r(15);
    for (auto& x : r) x = rng.uniform01();
    std::vector<double> shifted = r;
    const double c = rng.uniform01() * 10 - 5;
    for (auto& x : shifted) x += c;
    CHECK(greedy_action(std::span<const double>(r)) ==
          greedy_action(std::span<const double>(shifted)));
  }

  CHECK_THROWS(greedy_action(std::span<const double>{}));
}
