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

#include "vedit/gradcheck.hpp"
#include "vedit/policy_value.hpp"

using namespace vedit;

namespace {

struct Fixture {
  NetDims dims = NetDims::desk();
  Rng rng;
  StateUpdater<double> su;
  ActorCritic<double> ac;
  EmbeddingTable table = EmbeddingTable::deterministic(24);

  explicit Fixture(uint64_t seed)
      : rng(seed), su(NetDims::desk(), rng), ac(NetDims::desk(), rng) {}

  // A state with a valid state-updater context for backward passes.
  std::pair<AgentState<double>, StateUpdateCtx<double>> make_state(
      std::initializer_list<const char*> words) {
    Observation obs;
    for (const char* w : words) obs.words.push_back(w);
    StateUpdateCtx<double> ctx;
    AgentState<double> prev = su.init_state();
    AgentState<double> s = su.forward(prev, 0, 0.0, obs, table, &ctx);
    return {std::move(s), std::move(ctx)};
  }
};

}  // namespace

TEST_CASE("forward emits a distribution and finite value") {
  Fixture f(51);
  auto [s, ctx] = f.make_state({"a", "b", "c"});
  for (int rep = 0; rep < 20; ++rep) {
    for (std::size_t i = 0; i < s.mat.size(); ++i)
      s.mat[i] = f.rng.uniform01() * 2 - 1;
    const ActorCriticOut<double> out = f.ac.forward(s.mat, nullptr);
    REQUIRE(out.pi.size() == 15);
    double sum = 0.0;
    for (double p : out.pi) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    CHECK(std::isfinite(out.value));
  }
}

TEST_CASE("zero heads: uniform policy, bias value") {
  Fixture f(52);
  f.ac.store().find("ac.policy.w")->value.zero();
  f.ac.store().find("ac.policy.b")->value.zero();
  f.ac.store().find("ac.value.w")->value.zero();
  f.ac.store().find("ac.value.b")->value[0] = -1.25;
  auto [s, ctx] = f.make_state({"x", "y"});
  const ActorCriticOut<double> out = f.ac.forward(s.mat, nullptr);
  for (double p : out.pi)
    CHECK(p == doctest::Approx(1.0 / 15).epsilon(1e-12));
  CHECK(out.value == -1.25);
}

TEST_CASE("value and log-policy gradients pass finite differences") {
  Fixture f(53);
  auto [s, ctx] = f.make_state({"g", "h", "i", "j"});

  SUBCASE("squared value") {
    ActorCriticCtx<double> acctx;
    auto loss = [&]() {
      const auto out = f.ac.forward(s.mat, &acctx);
      return out.value * out.value;
    };
    auto grads = [&]() {
      f.ac.store().zero_grads();
      const auto out = f.ac.forward(s.mat, &acctx);
      f.ac.backward(acctx, nullptr, 2.0 * out.value, nullptr);
    };
    Rng check_rng(54);
    const auto report =
        nn::finite_diff_check(f.ac.store(), loss, grads, check_rng, 120);
    CHECK(report.max_rel_err < 1e-4);
  }

  SUBCASE("log policy of one action") {
    const int action = 5;
    ActorCriticCtx<double> acctx;
    auto loss = [&]() {
      const auto out = f.ac.forward(s.mat, &acctx);
      return std::log(out.pi[action - 1]);
    };
    auto grads = [&]() {
      f.ac.store().zero_grads();
      const auto out = f.ac.forward(s.mat, &acctx);
      std::vector<double> dlogits(15);
      for (int i = 0; i < 15; ++i)
        dlogits[static_cast<std::size_t>(i)] =
            (i == action - 1 ? 1.0 : 0.0) - out.pi[static_cast<std::size_t>(i)];
      f.ac.backward(acctx, dlogits.data(), 0.0, nullptr);
    };
    Rng check_rng(55);
    const auto report =
        nn::finite_diff_check(f.ac.store(), loss, grads, check_rng, 120);
    CHECK(report.max_rel_err < 1e-4);
  }
}

TEST_CASE("mbac_update loss bookkeeping") {
  Fixture f(56);
  auto [s, ctx] = f.make_state({"p", "q"});

  UpdateOpts<double> opts;
  opts.beta = 0.5;
  opts.lr_actor = 0.0;  // measure losses without moving parameters
  opts.lr_critic = 0.0;

  const auto out = f.ac.forward(s.mat, nullptr);

  SUBCASE("matched targets: zero critic loss, pure entropy actor loss") {
    const auto rec = mbac_update(f.ac, f.su, ctx, s,
                                 std::span<const double>(out.pi), out.value,
                                 opts);
    CHECK(rec.critic == 0.0);
    CHECK(rec.kl == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rec.actor ==
          doctest::Approx(-0.5 * rec.entropy).epsilon(1e-12));
  }

  SUBCASE("unit value error costs exactly one") {
    const auto rec = mbac_update(f.ac, f.su, ctx, s,
                                 std::span<const double>(out.pi),
                                 out.value + 1.0, opts);
    CHECK(rec.critic == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("distillation drives KL to the planner policy below 0.01") {
  Fixture f(57);
  auto [s, ctx] = f.make_state({"u", "v", "w"});

  // A frozen, moderately peaked target.
  std::vector<double> target(15);
  double z = 0.0;
  for (int i = 0; i < 15; ++i) {
    target[static_cast<std::size_t>(i)] = std::exp(-0.3 * i);
    z += target[static_cast<std::size_t>(i)];
  }
  for (auto& t : target) t /= z;

  UpdateOpts<double> opts;
  opts.beta = 0.0;
  opts.lr_actor = 1e-3;
  opts.lr_critic = 1e-3;

  std::vector<double> kls;
  for (int i = 0; i < 2000; ++i) {
    const auto rec = mbac_update(f.ac, f.su, ctx, s,
                                 std::span<const double>(target), -1.0, opts);
    REQUIRE(!rec.skipped);
    kls.push_back(rec.kl);
  }
  CHECK(kls.back() < 0.01);

  // strictly decreasing over 100-step windows until the precision floor
  auto window = [&](std::size_t from) {
    double acc = 0.0;
    for (std::size_t i = from; i < from + 100; ++i) acc += kls[i];
    return acc / 100.0;
  };
  double prev = window(0);
  for (std::size_t wstart = 100; wstart + 100 <= kls.size(); wstart += 100) {
    const double cur = window(wstart);
    if (prev > 1e-8) CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("critic regression reaches a frozen planner value") {
  Fixture f(58);
  auto [s, ctx] = f.make_state({"m", "n"});
  const std::vector<double> target(15, 1.0 / 15);
  UpdateOpts<double> opts;
  opts.beta = 0.0;
  opts.lr_actor = 1e-3;
  opts.lr_critic = 1e-3;
  const double v_target = -3.0;
  double err = 1e9;
  for (int i = 0; i < 5000; ++i) {
    const auto rec = mbac_update(f.ac, f.su, ctx, s,
                                 std::span<const double>(target), v_target,
                                 opts);
    err = std::sqrt(rec.critic);
    if (err < 0.05 && i > 100) break;
  }
  CHECK(err < 0.05);
}

TEST_CASE("n-step returns match hand-computed values") {
  {
    const auto g = n_step_returns<double>({-1.0, -2.0}, 0.0, 0.9);
    REQUIRE(g.size() == 2);
    CHECK(g[1] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(g[0] == doctest::Approx(-2.8).epsilon(1e-12));
  }
  {
    const auto g = n_step_returns<double>({-1.0}, -2.0, 0.9);
    CHECK(g[0] == doctest::Approx(-2.8).epsilon(1e-12));
  }
  // brute-force reference over random short buffers
  Rng rng(59);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.below(5);
    std::vector<double> rewards(n);
    for (auto& r : rewards) r = rng.uniform01() * 10 - 5;
    const double bootstrap = rng.uniform01() * 10 - 5;
    const double gamma = rng.uniform01();
    const auto g = n_step_returns(rewards, bootstrap, gamma);
    for (std::size_t t = 0; t < n; ++t) {
      double ref = 0.0;
      double disc = 1.0;
      for (std::size_t i = t; i < n; ++i) {
        ref += disc * rewards[i];
        disc *= gamma;
      }
      ref += disc * bootstrap;
      CHECK(std::abs(g[t] - ref) <= 1e-12);
    }
  }
}

TEST_CASE("a2c update: zero advantage moves nothing at beta 0") {
  Fixture f(60);
  auto [s, ctx] = f.make_state({"k", "l"});
  ActorCriticCtx<double> acctx;
  const auto out = f.ac.forward(s.mat, &acctx);

  std::vector<A2cStep<double>> steps;
  A2cStep<double> st;
  st.su_ctx = ctx;
  st.ac_ctx = acctx;
  st.pi = out.pi;
  st.value = out.value;
  st.action = 4;
  st.reward = 0.0;
  steps.push_back(std::move(st));

  std::vector<Tensor<double>> snapshot;
  for (const auto& e : f.ac.store().entries()) snapshot.push_back(e.value);

  // gamma 1, bootstrap = value, reward 0 -> target == value exactly
  const auto rec = a2c_update(f.ac, f.su, steps, out.value, 1.0, 0.0, 1e-3,
                              0.9);
  CHECK(rec.value == 0.0);
  for (std::size_t i = 0; i < snapshot.size(); ++i)
    for (std::size_t j = 0; j < snapshot[i].size(); ++j)
      CHECK(f.ac.store().entry(static_cast<int>(i)).value[j] ==
            snapshot[i][j]);
}

TEST_CASE("a2c update: entropy bonus spreads the policy") {
  Fixture f(61);
  auto [s, ctx] = f.make_state({"k", "l"});

  auto run_with_beta = [&](double beta) {
    Fixture g(61);  // identical init
    auto [sg, ctxg] = g.make_state({"k", "l"});
    double h = 0.0;
    for (int i = 0; i < 1000; ++i) {
      ActorCriticCtx<double> acctx;
      const auto out = g.ac.forward(sg.mat, &acctx);
      std::vector<A2cStep<double>> steps;
      A2cStep<double> st;
      st.su_ctx = ctxg;
      st.ac_ctx = acctx;
      st.pi = out.pi;
      st.value = out.value;
      st.action = 3;
      st.reward = 0.0;
      steps.push_back(std::move(st));
      a2c_update(g.ac, g.su, steps, out.value, 1.0, beta, 1e-3, 0.9);
      h = nn::entropy(std::span<const double>(out.pi));
    }
    return h;
  };

  const double h0 = run_with_beta(0.0);
  const double h01 = run_with_beta(0.1);
  const double h1 = run_with_beta(1.0);
  CHECK(h0 <= h01 + 1e-6);
  CHECK(h01 <= h1 + 1e-6);
}
