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

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vedit/dyn_model.hpp"
#include "vedit/ops.hpp"
#include "vedit/policy_value.hpp"

namespace vedit {

// One-step planning: every action is pushed through the model, the critic
// values the predicted successor, and the soft policy is the softmax of the
// estimated returns.
template <typename T>
struct PlannerOutput {
  std::vector<T> returns;             // estimated return per action
  std::vector<T> policy;              // softmax(returns)
  T value = T(0);                     // sum_a returns[a] * policy[a]
  std::vector<ModelPrediction<T>> predictions;  // per action, diagnostics
};

// Softmax policy and expected value from a return vector. plan() uses the
// full 15-action set; tests drive this with arbitrary lengths.
template <typename T>
PlannerOutput<T> planner_from_returns(std::vector<T> returns) {
  PlannerOutput<T> out;
  out.policy = nn::softmax(std::span<const T>(returns));
  out.value = kern::dot(returns.data(), out.policy.data(), returns.size());
  out.returns = std::move(returns);
  return out;
}

template <typename T>
PlannerOutput<T> plan(const AgentState<T>& state, DynModel<T>& model,
                      ActorCritic<T>& critic, T gamma, T temperature = T(1)) {
  std::vector<T> returns(kNumActions);
  std::vector<ModelPrediction<T>> preds(kNumActions);
  for (int a = 1; a <= kNumActions; ++a) {
    ModelPrediction<T> p = model.predict(state.mat, a, nullptr);
    const T v = critic.forward_value(p.next_state);
    const T g = p.reward + gamma * v;
    if (!std::isfinite(static_cast<double>(g)))
      throw std::runtime_error("plan: non-finite estimated return for action " +
                               std::to_string(a));
    returns[static_cast<std::size_t>(a - 1)] = g;
    preds[static_cast<std::size_t>(a - 1)] = std::move(p);
  }
  std::vector<T> scaled = returns;
  if (temperature != T(1))
    for (auto& v : scaled) v /= temperature;
  PlannerOutput<T> out;
  out.policy = nn::softmax(std::span<const T>(scaled));
  out.value = kern::dot(returns.data(), out.policy.data(), returns.size());
  out.returns = std::move(returns);
  out.predictions = std::move(preds);
  return out;
}

// Inverse-CDF sampling with a single uniform draw. Returns a 1-based action.
template <typename T>
int sample_action(std::span<const T> policy, Rng& rng) {
  nn::check_distribution(policy, "sample_action");
  const double u = rng.uniform01();
  double cum = 0.0;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    cum += static_cast<double>(policy[i]);
    if (u < cum) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(policy.size());
}

// Argmax with ties broken toward the lowest action index. 1-based.
template <typename T>
int greedy_action(std::span<const T> values) {
  if (values.empty()) throw std::invalid_argument("greedy_action: empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return static_cast<int>(best) + 1;
}

}  // namespace vedit
