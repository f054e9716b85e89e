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

#include "vedit/dyn_model.hpp"
#include "vedit/gradcheck.hpp"

using namespace vedit;

namespace {

Tensor<double> random_state(int d_s, Rng& rng) {
  Tensor<double> s({kPositions, d_s});
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = rng.uniform01() * 2.0 - 1.0;
  return s;
}

AgentState<double> wrap_state(Tensor<double> mat) {
  AgentState<double> s;
  s.mat = std::move(mat);
  s.mask.fill(1);
  return s;
}

}  // namespace

TEST_CASE("prediction shapes for both presets") {
  for (const NetDims& dims : {NetDims::desk(), NetDims::paper()}) {
    Rng rng(31);
    DynModel<double> model(dims, rng);
    const Tensor<double> s = random_state(dims.d_s(), rng);
    const ModelPrediction<double> p = model.predict(s, 7, nullptr);
    CHECK(p.next_state.shape() == std::vector<int>{kPositions, dims.d_s()});
    CHECK(std::isfinite(p.reward));
    CHECK(p.next_state.all_finite());
  }
}

TEST_CASE("zero decoder and head weights: zero state, bias reward") {
  Rng rng(32);
  DynModel<double> model(NetDims::desk(), rng);
  for (auto& e : model.store().entries()) {
    if (e.name.rfind("model.dec", 0) == 0 ||
        e.name.rfind("model.proj", 0) == 0 ||
        e.name.rfind("model.reward", 0) == 0)
      e.value.zero();
  }
  model.store().find("model.reward.b")->value[0] = 0.75;
  const Tensor<double> s = random_state(32, rng);
  const ModelPrediction<double> p = model.predict(s, 3, nullptr);
  for (std::size_t i = 0; i < p.next_state.size(); ++i)
    CHECK(p.next_state[i] == 0.0);
  CHECK(p.reward == 0.75);
}

TEST_CASE("predictions are action-sensitive for random parameters") {
  double mean_diff = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng(1000 + seed);
    DynModel<double> model(NetDims::desk(), rng);
    const Tensor<double> s = random_state(32, rng);
    const auto pa = model.predict(s, 3, nullptr);
    const auto pb = model.predict(s, 11, nullptr);
    double diff = std::abs(pa.reward - pb.reward);
    for (std::size_t i = 0; i < pa.next_state.size(); ++i)
      diff += std::abs(pa.next_state[i] - pb.next_state[i]);
    CHECK(diff > 0.0);
    mean_diff += diff;
  }
  CHECK(mean_diff / 100.0 > 0.0);
}

TEST_CASE("model_loss closed forms") {
  Rng rng(33);
  DynModel<double> model(NetDims::desk(), rng);

  ModelPrediction<double> pred;
  pred.next_state = Tensor<double>({kPositions, 32});
  pred.reward = 1.0;
  Tensor<double> target = pred.next_state;

  const ModelLoss<double> perfect = model.loss(pred, target, 1.0);
  CHECK(perfect.state == 0.0);
  CHECK(perfect.reward == 0.0);

  pred.next_state[0] = 3.0;
  pred.next_state[1] = 4.0;
  pred.reward = 3.0;
  const ModelLoss<double> l = model.loss(pred, target, 1.0);
  CHECK(l.state == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(l.reward == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(l.total() == doctest::Approx(9.0).epsilon(1e-12));

  // unsquared norm: doubling the error doubles L_state
  pred.next_state[0] = 6.0;
  pred.next_state[1] = 8.0;
  const ModelLoss<double> l2 = model.loss(pred, target, 1.0);
  CHECK(l2.state == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("overfitting one synthetic transition") {
  Rng rng(34);
  DynModel<double> model(NetDims::desk(), rng);
  const AgentState<double> s = wrap_state(random_state(32, rng));
  Tensor<double> s_next = random_state(32, rng);
  const double r = -2.0;

  ModelUpdateOpts<double> opts;
  opts.lr = 1e-3;
  double initial = 0.0;
  double last = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto rec = model_update(model, s, 5, r, &s_next, opts);
    REQUIRE(!rec.skipped);
    const double total = rec.state + rec.reward;
    if (i == 0) initial = total;
    last = total;
  }
  CHECK(last < 0.1 * initial);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  Rng rng(35);
  DynModel<double> model(NetDims::desk(), rng);
  std::vector<Tensor<double>> snapshot;
  for (const auto& e : model.store().entries()) snapshot.push_back(e.value);
  const AgentState<double> s = wrap_state(random_state(32, rng));
  Tensor<double> s_next = random_state(32, rng);
  ModelUpdateOpts<double> opts;
  opts.lr = 0.0;
  model_update(model, s, 5, -1.0, &s_next, opts);
  for (std::size_t i = 0; i < snapshot.size(); ++i)
    for (std::size_t j = 0; j < snapshot[i].size(); ++j)
      CHECK(model.store().entry(static_cast<int>(i)).value[j] ==
            snapshot[i][j]);
}

TEST_CASE("model gradients pass finite differences") {
  Rng rng(36);
  DynModel<double> model(NetDims::desk(), rng);
  const Tensor<double> s = random_state(32, rng);
  // Targets near the initial prediction keep the loss small; h=1e-5 central
  // differences lose ~|L|*eps/h to cancellation, which must stay well below
  // the 1e-4 gate even where gradients are ~1e-7.
  const ModelPrediction<double> p0 = model.predict(s, 4, nullptr);
  Tensor<double> s_next = p0.next_state;
  for (std::size_t i = 0; i < s_next.size(); ++i)
    s_next[i] += (rng.uniform01() * 2.0 - 1.0) * 0.05;
  const double r = p0.reward - 0.1;

  DynModelCtx<double> ctx;
  auto loss = [&]() {
    const ModelPrediction<double> p = model.predict(s, 4, &ctx);
    return model.loss(p, s_next, r).total();
  };
  auto grads = [&]() {
    model.store().zero_grads();
    const ModelPrediction<double> p = model.predict(s, 4, &ctx);
    const ModelLoss<double> l = model.loss(p, s_next, r);
    Tensor<double> d_state({kPositions, 32});
    for (std::size_t i = 0; i < d_state.size(); ++i)
      d_state[i] = (p.next_state[i] - s_next[i]) / l.state;
    model.backward(ctx, &d_state, 2.0 * (p.reward - r), nullptr);
  };
  Rng check_rng(37);
  const auto report =
      nn::finite_diff_check(model.store(), loss, grads, check_rng, 120);
  CHECK(report.max_rel_err < 1e-4);
}

TEST_CASE("online training tracks scripted toy dynamics") {
  Rng rng(38);
  DynModel<double> model(NetDims::desk(), rng);
  Rng actions(39);

  // Next state depends only on the action; reward is a fixed action scale.
  auto scripted_state = [](int a) {
    Tensor<double> s({kPositions, 32});
    for (int p = 0; p < kPositions; ++p)
      for (int j = 0; j < 32; ++j)
        s.at(p, j) = 0.1 * a * ((p + j) % 3 - 1);
    return s;
  };

  const AgentState<double> s = wrap_state([&] {
    Tensor<double> m({kPositions, 32});
    m.fill(1.0);
    return m;
  }());

  ModelUpdateOpts<double> opts;
  opts.lr = 2e-3;
  std::vector<double> losses;
  for (int i = 0; i < 1500; ++i) {
    const int a = static_cast<int>(actions.uniform_int(1, kNumActions));
    Tensor<double> target = scripted_state(a);
    const auto rec = model_update(model, s, a, -0.2 * a, &target, opts);
    losses.push_back(rec.state + rec.reward);
  }
  auto window = [&](std::size_t from) {
    double sum = 0.0;
    for (std::size_t i = from; i < from + 100; ++i) sum += losses[i];
    return sum / 100.0;
  };
  // Non-increasing up to the action-mix noise of the window estimator.
  double best = window(0);
  for (std::size_t w = 100; w + 100 <= losses.size(); w += 100) {
    const double cur = window(w);
    CHECK(cur <= best * 1.25);
    best = std::min(best, cur);
  }
  CHECK(window(1400) < 0.55 * window(0));
}
