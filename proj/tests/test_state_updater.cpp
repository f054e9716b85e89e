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
#include "vedit/state_updater.hpp"

using namespace vedit;

namespace {

Observation make_obs(std::initializer_list<const char*> words) {
  Observation o;
  for (const char* w : words) o.words.push_back(w);
  return o;
}

}  // namespace

TEST_CASE("init_state is all ones for both presets") {
  const AgentState<double> desk = AgentState<double>::ones(NetDims::desk().d_s());
  CHECK(desk.mat.shape() == std::vector<int>{16, 32});
  for (std::size_t i = 0; i < desk.mat.size(); ++i) CHECK(desk.mat[i] == 1.0);
  CHECK(desk.occupied() == 16);

  const AgentState<double> paper =
      AgentState<double>::ones(NetDims::paper().d_s());
  CHECK(paper.mat.shape() == std::vector<int>{16, 200});
  for (std::size_t i = 0; i < paper.mat.size(); ++i) CHECK(paper.mat[i] == 1.0);

  const AgentState<double> again = AgentState<double>::ones(32);
  for (std::size_t i = 0; i < again.mat.size(); ++i)
    CHECK(again.mat[i] == desk.mat[i]);
}

TEST_CASE("build_omega: zero action embedding makes chi the bias exactly") {
  Rng rng(21);
  StateUpdater<double> su(NetDims::desk(), rng);
  const EmbeddingTable table = EmbeddingTable::deterministic(24);

  AgentState<double> s_prev;
  s_prev.mat = Tensor<double>({kPositions, 32});
  s_prev.mask.fill(1);

  const Observation obs = make_obs({"alpha", "beta"});
  const Tensor<double> omega = su.build_omega(s_prev, 0, 0.0, obs, table, nullptr);
  REQUIRE(omega.shape() == std::vector<int>{16, 32});  // d_e + d_chi = 24+8

  const auto& b = su.store().find("su.bilinear.b")->value;
  for (int p = 0; p < kPositions; ++p)
    for (int j = 0; j < 8; ++j)
      CHECK(omega.at(p, 24 + j) == b[static_cast<std::size_t>(j)]);

  // pad rows carry the zero embedding
  for (int j = 0; j < 24; ++j) CHECK(omega.at(5, j) == 0.0);
  // speech row holds the "no" embedding
  const auto no_vec = table.embed("no");
  for (int j = 0; j < 24; ++j)
    CHECK(omega.at(15, j) == doctest::Approx(no_vec[static_cast<std::size_t>(j)]));
}

TEST_CASE("build_omega is deterministic") {
  Rng rng(22);
  StateUpdater<double> su(NetDims::desk(), rng);
  const EmbeddingTable table = EmbeddingTable::deterministic(24);
  AgentState<double> s_prev = su.init_state();
  const Observation obs = make_obs({"one", "two", "three"});
  const Tensor<double> a = su.build_omega(s_prev, 3, -1.0, obs, table, nullptr);
  const Tensor<double> b = su.build_omega(s_prev, 3, -1.0, obs, table, nullptr);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("bilinear matches a triple-loop reference") {
  Rng rng(23);
  nn::ParameterStore<double> store;
  nn::Bilinear<double> bil(store, "bil", 5, 5, 5, rng);
  std::vector<double> s(5), a(5);
  for (auto& v : s) v = rng.uniform01() * 2 - 1;
  for (auto& v : a) v = rng.uniform01() * 2 - 1;
  std::vector<double> y(5);
  bil.forward(store, s, a, y.data(), nullptr);

  const auto& Z = store.find("bil.z")->value;
  const auto& b = store.find("bil.b")->value;
  for (int k = 0; k < 5; ++k) {
    double ref = b[static_cast<std::size_t>(k)];
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        ref += s[static_cast<std::size_t>(i)] * Z.at(k, i, j) *
               a[static_cast<std::size_t>(j)];
    CHECK(std::abs(y[static_cast<std::size_t>(k)] - ref) < 1e-12);
  }
}

TEST_CASE("update_state output shape and mask") {
  Rng rng(24);
  StateUpdater<double> su(NetDims::desk(), rng);
  const EmbeddingTable table = EmbeddingTable::deterministic(24);
  AgentState<double> s_prev = su.init_state();
  const Observation obs = make_obs({"w1", "w2", "w3", "w4"});
  const AgentState<double> s = su.forward(s_prev, 2, -1.0, obs, table, nullptr);
  CHECK(s.mat.shape() == std::vector<int>{16, 32});
  CHECK(s.mat.all_finite());
  CHECK(s.occupied() == 5);  // 4 display rows + speech
  CHECK(s.mask[0] == 1);
  CHECK(s.mask[3] == 1);
  CHECK(s.mask[4] == 0);
  CHECK(s.mask[15] == 1);
}

TEST_CASE("bidirectional flow: a late token perturbs early positions") {
  Rng rng(25);
  StateUpdater<double> su(NetDims::desk(), rng);
  const EmbeddingTable table = EmbeddingTable::deterministic(24);
  AgentState<double> s_prev = su.init_state();
  const Observation obs = make_obs({"a", "b", "c", "d", "e"});
  Observation obs2 = obs;
  obs2.words[4] = "changed";
  const AgentState<double> s1 = su.forward(s_prev, 1, 0.0, obs, table, nullptr);
  const AgentState<double> s2 = su.forward(s_prev, 1, 0.0, obs2, table, nullptr);
  double first_row_delta = 0.0;
  double last_row_delta = 0.0;
  for (int j = 0; j < 32; ++j) {
    first_row_delta += std::abs(s1.mat.at(0, j) - s2.mat.at(0, j));
    last_row_delta += std::abs(s1.mat.at(4, j) - s2.mat.at(4, j));
  }
  CHECK(first_row_delta > 0.0);
  CHECK(last_row_delta > 0.0);
}

TEST_CASE("state-updater gradients pass finite differences") {
  Rng rng(26);
  StateUpdater<double> su(NetDims::desk(), rng);
  const EmbeddingTable table = EmbeddingTable::deterministic(24);
  AgentState<double> s_prev = su.init_state();
  const Observation obs = make_obs({"tok1", "tok2", "tok3"});

  StateUpdateCtx<double> ctx;
  AgentState<double> out;
  auto loss = [&]() {
    out = su.forward(s_prev, 2, -1.0, obs, table, &ctx);
    return 0.5 * kern::sumsq(out.mat.data(), out.mat.size());
  };
  auto grads = [&]() {
    su.store().zero_grads();
    loss();
    Tensor<double> ds = out.mat;  // d(0.5*||S||^2)/dS = S
    su.backward(ctx, ds);
  };
  Rng check_rng(27);
  const auto report =
      nn::finite_diff_check(su.store(), loss, grads, check_rng, 120);
  CHECK(report.max_rel_err < 1e-4);
}
