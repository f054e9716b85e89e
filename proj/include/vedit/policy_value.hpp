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
#include <optional>
#include <vector>

#include "vedit/layers.hpp"
#include "vedit/presets.hpp"
#include "vedit/state_updater.hpp"

namespace vedit {

template <typename T>
struct ActorCriticCtx {
  nn::Conv1dCtx<T> c1, c2, c3;
  Tensor<T> h1, h2, h3;       // tanh outputs
  std::vector<T> flat;        // flattened trunk output
  nn::LinearCtx<T> policy, value;
  std::vector<T> pi;          // cached softmax for backward helpers
};

template <typename T>
struct ActorCriticOut {
  std::vector<T> logits;  // 15
  std::vector<T> pi;      // softmax(logits)
  T value = T(0);
};

// Shared conv trunk over the state's position axis, split into a policy
// head (15 logits) and a value head (scalar). Heads read the full flattened
// trunk output; the action count depends on where along the positions the
// text stops looking right, so positional structure is kept.
template <typename T>
class ActorCritic {
 public:
  ActorCritic(const NetDims& dims, Rng& rng) : dims_(dims) {
    const int k = dims.conv_k;
    c1_ = nn::Conv1d<T>(store_, "ac.conv1", dims.d_s(), dims.trunk_f1, k, true, rng);
    c2_ = nn::Conv1d<T>(store_, "ac.conv2", dims.trunk_f1, dims.trunk_f2, k, true, rng);
    c3_ = nn::Conv1d<T>(store_, "ac.conv3", dims.trunk_f2, dims.trunk_f3, k, true, rng);
    flat_ = dims.trunk_f3 * kPositions;
    policy_ = nn::Linear<T>(store_, "ac.policy", flat_, kNumActions, rng);
    value_ = nn::Linear<T>(store_, "ac.value", flat_, 1, rng);
  }

  nn::ParameterStore<T>& store() { return store_; }

  static bool is_policy_head(const std::string& name) {
    return name.rfind("ac.policy", 0) == 0;
  }

  ActorCriticOut<T> forward(const Tensor<T>& state, ActorCriticCtx<T>* ctx) {
    ActorCriticCtx<T> local;
    ActorCriticCtx<T>& c = ctx ? *ctx : local;
    run_trunk(state, c);
    ActorCriticOut<T> out;
    out.logits.resize(kNumActions);
    policy_.forward(store_, c.flat, out.logits.data(), &c.policy);
    T v = T(0);
    value_.forward(store_, c.flat, &v, &c.value);
    out.value = v;
    out.pi = nn::softmax(std::span<const T>(out.logits));
    c.pi = out.pi;
    return out;
  }

  // Value-only pass for the planner's successor evaluations.
  T forward_value(const Tensor<T>& state) {
    ActorCriticCtx<T> c;
    run_trunk(state, c);
    T v = T(0);
    value_.forward(store_, c.flat, &v, nullptr);
    return v;
  }

  // Backward from head gradients down to the state. dlogits may be null
  // (value-only), dvalue may be zero. Accumulates parameter gradients;
  // returns the state gradient via ds (kPositions x d_s), accumulated.
  void backward(const ActorCriticCtx<T>& ctx, const T* dlogits, T dvalue,
                Tensor<T>* ds) {
    std::vector<T> dflat(static_cast<std::size_t>(flat_), T(0));
    if (dlogits) policy_.backward(store_, ctx.policy, dlogits, dflat.data());
    if (dvalue != T(0))
      value_.backward(store_, ctx.value, &dvalue, dflat.data());

    Tensor<T> dh3({dims_.trunk_f3, kPositions});
    for (std::size_t i = 0; i < dflat.size(); ++i) dh3[i] = dflat[i];
    Tensor<T> dh3_pre({dims_.trunk_f3, kPositions});
    nn::tanh_backward(ctx.h3.data(), dh3.data(), dh3_pre.data(), dh3.size());
    Tensor<T> dh2({dims_.trunk_f2, kPositions});
    c3_.backward(store_, ctx.c3, dh3_pre, &dh2);
    Tensor<T> dh2_pre({dims_.trunk_f2, kPositions});
    nn::tanh_backward(ctx.h2.data(), dh2.data(), dh2_pre.data(), dh2.size());
    Tensor<T> dh1({dims_.trunk_f1, kPositions});
    c2_.backward(store_, ctx.c2, dh2_pre, &dh1);
    Tensor<T> dh1_pre({dims_.trunk_f1, kPositions});
    nn::tanh_backward(ctx.h1.data(), dh1.data(), dh1_pre.data(), dh1.size());
    if (ds) {
      Tensor<T> dx({dims_.d_s(), kPositions});
      c1_.backward(store_, ctx.c1, dh1_pre, &dx);
      const Tensor<T> dpos = to_positions(dx);
      kern::add_inplace(ds->data(), dpos.data(), dpos.size());
    } else {
      c1_.backward(store_, ctx.c1, dh1_pre, nullptr);
    }
  }

 private:
  void run_trunk(const Tensor<T>& state, ActorCriticCtx<T>& c) {
    const Tensor<T> x = to_channels(state);
    c1_.forward(store_, x, c.h1, &c.c1);
    nn::tanh_inplace(c.h1.data(), c.h1.size());
    c2_.forward(store_, c.h1, c.h2, &c.c2);
    nn::tanh_inplace(c.h2.data(), c.h2.size());
    c3_.forward(store_, c.h2, c.h3, &c.c3);
    nn::tanh_inplace(c.h3.data(), c.h3.size());
    c.flat.assign(c.h3.data(), c.h3.data() + c.h3.size());
  }

  NetDims dims_;
  nn::ParameterStore<T> store_;
  nn::Conv1d<T> c1_, c2_, c3_;
  int flat_ = 0;
  nn::Linear<T> policy_, value_;
};

// ---- update rules ---------------------------------------------------------

template <typename T>
struct UpdateOpts {
  T beta = T(1);
  T lr_actor = static_cast<T>(1e-4);
  T lr_critic = static_cast<T>(1e-4);
  T clip_norm = static_cast<T>(0.9);
  nn::AdamConfig adam{};
};

template <typename T>
struct MbacLossRecord {
  T actor = T(0);   // KL - beta*H
  T critic = T(0);  // squared error to the planner value
  T kl = T(0);
  T entropy = T(0);
  bool skipped = false;
};

template <typename T>
struct A2cLossRecord {
  T policy = T(0);
  T value = T(0);
  bool skipped = false;
};

namespace detail {

constexpr double kLogFloor = 1e-12;

template <typename T>
T safe_log(T x) {
  return std::log(std::max(x, static_cast<T>(kLogFloor)));
}

}  // namespace detail

// One MBAC actor/critic step at state S against the planner's fixed targets.
// Gradients from both heads are summed into the shared trunk before a single
// Adam step; the state gradient is pushed one step into the state-updater.
// Policy-head arrays step at lr_actor, everything else at lr_critic.
template <typename T>
MbacLossRecord<T> mbac_update(ActorCritic<T>& ac, StateUpdater<T>& su,
                              const StateUpdateCtx<T>& su_ctx,
                              const AgentState<T>& state,
                              std::span<const T> planner_policy,
                              T planner_value, const UpdateOpts<T>& opts) {
  ActorCriticCtx<T> ctx;
  const ActorCriticOut<T> out = ac.forward(state.mat, &ctx);

  MbacLossRecord<T> rec;
  rec.kl = nn::kl_divergence(std::span<const T>(out.pi), planner_policy);
  rec.entropy = nn::entropy(std::span<const T>(out.pi));
  rec.actor = rec.kl - opts.beta * rec.entropy;
  const T verr = out.value - planner_value;
  rec.critic = verr * verr;

  if (!std::isfinite(static_cast<double>(rec.actor)) ||
      !std::isfinite(static_cast<double>(rec.critic))) {
    rec.skipped = true;
    return rec;
  }

  // d(actor loss)/d pi_i = ln(pi_i/q_i) + 1 + beta*(ln pi_i + 1)
  std::vector<T> dpi(out.pi.size());
  for (std::size_t i = 0; i < out.pi.size(); ++i) {
    const T lp = detail::safe_log(out.pi[i]);
    const T lq = detail::safe_log(planner_policy[i]);
    dpi[i] = (lp - lq) + T(1) + opts.beta * (lp + T(1));
  }
  const std::vector<T> dlogits =
      nn::softmax_backward(std::span<const T>(out.pi), std::span<const T>(dpi));
  const T dvalue = T(2) * verr;

  ac.store().zero_grads();
  su.store().zero_grads();
  Tensor<T> ds({kPositions, su.dims().d_s()});
  ac.backward(ctx, dlogits.data(), dvalue, &ds);
  su.backward(su_ctx, ds);

  if (!ac.store().grads_finite() || !su.store().grads_finite()) {
    rec.skipped = true;
    return rec;
  }
  ac.store().clip_grad_norm(opts.clip_norm);
  su.store().clip_grad_norm(opts.clip_norm);
  ac.store().adam_step(opts.lr_critic, opts.adam, [&](const std::string& n) {
    return ActorCritic<T>::is_policy_head(n) ? opts.lr_actor : opts.lr_critic;
  });
  su.store().adam_step(opts.lr_critic, opts.adam);
  return rec;
}

// Discounted returns for a reward sequence with a bootstrap value at the
// end: G_t = R_{t+1} + gamma * G_{t+1}, G_n = bootstrap.
template <typename T>
std::vector<T> n_step_returns(const std::vector<T>& rewards, T bootstrap,
                              T gamma) {
  std::vector<T> g(rewards.size());
  T acc = bootstrap;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    g[i] = acc;
  }
  return g;
}

// One step of an episode buffer for the n-step baseline.
template <typename T>
struct A2cStep {
  StateUpdateCtx<T> su_ctx;
  ActorCriticCtx<T> ac_ctx;
  std::vector<T> pi;
  T value = T(0);
  int action = 0;
  T reward = T(0);
};

// Full-episode n-step advantage update: G_t = sum_i gamma^i R_{t+i+1} +
// gamma^n * bootstrap. Advantages are treated as constants in the policy
// term. One Adam step per episode at a single learning rate.
template <typename T>
A2cLossRecord<T> a2c_update(ActorCritic<T>& ac, StateUpdater<T>& su,
                            std::vector<A2cStep<T>>& steps, T bootstrap,
                            T gamma, T beta, T lr, T clip_norm,
                            const nn::AdamConfig& adam = {}) {
  if (steps.empty()) throw std::invalid_argument("a2c_update: empty buffer");
  const std::size_t n = steps.size();
  std::vector<T> rewards(n);
  for (std::size_t i = 0; i < n; ++i) rewards[i] = steps[i].reward;
  const std::vector<T> targets = n_step_returns(rewards, bootstrap, gamma);

  A2cLossRecord<T> rec;
  std::vector<std::vector<T>> dlogits_all(n);
  std::vector<T> dvalues(n);
  for (std::size_t i = 0; i < n; ++i) {
    const A2cStep<T>& st = steps[i];
    const T adv = targets[i] - st.value;
    const std::size_t ai = static_cast<std::size_t>(st.action - 1);
    rec.policy += -adv * detail::safe_log(st.pi[ai]);
    rec.policy -= beta * nn::entropy(std::span<const T>(st.pi));
    const T verr = st.value - targets[i];
    rec.value += verr * verr;

    // policy-gradient term: dlogit_j = adv * (pi_j - [j == a])
    std::vector<T> dl(st.pi.size());
    for (std::size_t j = 0; j < st.pi.size(); ++j)
      dl[j] = adv * (st.pi[j] - (j == ai ? T(1) : T(0)));
    // entropy bonus: d(-beta*H)/d pi = beta * (ln pi + 1)
    std::vector<T> dpi(st.pi.size());
    for (std::size_t j = 0; j < st.pi.size(); ++j)
      dpi[j] = beta * (detail::safe_log(st.pi[j]) + T(1));
    const std::vector<T> dent = nn::softmax_backward(
        std::span<const T>(st.pi), std::span<const T>(dpi));
    for (std::size_t j = 0; j < dl.size(); ++j) dl[j] += dent[j];
    dlogits_all[i] = std::move(dl);
    dvalues[i] = T(2) * verr;
  }

  if (!std::isfinite(static_cast<double>(rec.policy)) ||
      !std::isfinite(static_cast<double>(rec.value))) {
    rec.skipped = true;
    return rec;
  }

  ac.store().zero_grads();
  su.store().zero_grads();
  for (std::size_t i = 0; i < n; ++i) {
    Tensor<T> ds({kPositions, su.dims().d_s()});
    ac.backward(steps[i].ac_ctx, dlogits_all[i].data(), dvalues[i], &ds);
    su.backward(steps[i].su_ctx, ds);
  }

  if (!ac.store().grads_finite() || !su.store().grads_finite()) {
    rec.skipped = true;
    return rec;
  }
  ac.store().clip_grad_norm(clip_norm);
  su.store().clip_grad_norm(clip_norm);
  ac.store().adam_step(lr, adam);
  su.store().adam_step(lr, adam);
  return rec;
}

}  // namespace vedit
