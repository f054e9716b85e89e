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
#include <type_traits>

#include "vedit/layers.hpp"
#include "vedit/presets.hpp"
#include "vedit/state_updater.hpp"

namespace vedit {

template <typename T>
struct ModelPrediction {
  Tensor<T> next_state;  // kPositions x d_s
  T reward = T(0);
};

template <typename T>
struct ModelLoss {
  T state = T(0);   // L2 norm of the flattened state error (unsquared)
  T reward = T(0);  // squared reward error
  T total() const { return state + reward; }
};

template <typename T>
struct DynModelCtx {
  nn::Conv1dCtx<T> e1, e2, e3;
  Tensor<T> h1, h2, h3;       // tanh outputs of the encoder stack
  Tensor<T> gated;            // h3 ⊙ action gate
  int action = 0;
  nn::Deconv1dCtx<T> d1, d2, d3;
  Tensor<T> u1, u2, u3;       // tanh outputs of the decoder stack
  nn::Conv1dCtx<T> proj;
  nn::LinearCtx<T> reward;
  std::vector<T> pooled;
};

// The environment model: encodes the state with a conv stack, gates the
// encoding with a learned per-action vector (Hadamard product), then decodes
// to the predicted next state and projects the gated encoding to a scalar
// reward through a mean-pool + linear head.
template <typename T>
class DynModel {
 public:
  DynModel(const NetDims& dims, Rng& rng) : dims_(dims) {
    const int k = dims.conv_k;
    e1_ = nn::Conv1d<T>(store_, "model.enc1", dims.d_s(), dims.enc_f1, k, true, rng);
    e2_ = nn::Conv1d<T>(store_, "model.enc2", dims.enc_f1, dims.enc_f2, k, true, rng);
    e3_ = nn::Conv1d<T>(store_, "model.enc3", dims.enc_f2, dims.enc_f3, k, true, rng);
    gate_ = nn::EmbeddingLookup<T>(store_, "model.gate", kNumActions, dims.enc_f3, rng);
    d1_ = nn::Deconv1d<T>(store_, "model.dec1", dims.enc_f3, dims.dec_f1, k, rng);
    d2_ = nn::Deconv1d<T>(store_, "model.dec2", dims.dec_f1, dims.dec_f2, k, rng);
    d3_ = nn::Deconv1d<T>(store_, "model.dec3", dims.dec_f2, dims.dec_f3, k, rng);
    // The decoder's final filter count is fixed by the architecture, not by
    // d_s; a 1x1 conv maps it onto the state feature width.
    proj_ = nn::Conv1d<T>(store_, "model.proj", dims.dec_f3, dims.d_s(), 1, true, rng);
    // The reward head reads the whole gated encoding, one weight per entry.
    reward_ = nn::Linear<T>(store_, "model.reward", dims.enc_f3 * kPositions, 1, rng);
  }

  nn::ParameterStore<T>& store() { return store_; }

  ModelPrediction<T> predict(const Tensor<T>& state, int action,
                             DynModelCtx<T>* ctx) {
    if (action < 1 || action > kNumActions)
      throw std::invalid_argument("predict: action out of [1,15]");
    DynModelCtx<T> local;
    DynModelCtx<T>& c = ctx ? *ctx : local;
    c.action = action;

    const Tensor<T> x = to_channels(state);
    e1_.forward(store_, x, c.h1, &c.e1);
    nn::tanh_inplace(c.h1.data(), c.h1.size());
    e2_.forward(store_, c.h1, c.h2, &c.e2);
    nn::tanh_inplace(c.h2.data(), c.h2.size());
    e3_.forward(store_, c.h2, c.h3, &c.e3);
    nn::tanh_inplace(c.h3.data(), c.h3.size());

    const T* g = gate_.forward(store_, action - 1);
    c.gated = c.h3;
    for (int ch = 0; ch < dims_.enc_f3; ++ch)
      kern::scale_inplace(c.gated.row(ch), g[ch],
                          static_cast<std::size_t>(kPositions));

    d1_.forward(store_, c.gated, c.u1, &c.d1);
    nn::tanh_inplace(c.u1.data(), c.u1.size());
    d2_.forward(store_, c.u1, c.u2, &c.d2);
    nn::tanh_inplace(c.u2.data(), c.u2.size());
    d3_.forward(store_, c.u2, c.u3, &c.d3);
    nn::tanh_inplace(c.u3.data(), c.u3.size());
    Tensor<T> projected;
    proj_.forward(store_, c.u3, projected, &c.proj);

    c.pooled.assign(c.gated.data(), c.gated.data() + c.gated.size());
    T r = T(0);
    reward_.forward(store_, c.pooled, &r, &c.reward);

    ModelPrediction<T> out;
    out.next_state = to_positions(projected);
    out.reward = r;
    return out;
  }

  ModelLoss<T> loss(const ModelPrediction<T>& pred, const Tensor<T>& s_next,
                    T reward) const {
    ModelLoss<T> l;
    T ss = T(0);
    for (std::size_t i = 0; i < pred.next_state.size(); ++i) {
      const T d = pred.next_state[i] - s_next[i];
      ss += d * d;
    }
    l.state = std::sqrt(ss);
    const T dr = pred.reward - reward;
    l.reward = dr * dr;
    return l;
  }

  // Accumulates model gradients for d_next_state / d_reward upstream grads.
  // ds_input, when non-null, receives the gradient w.r.t. the input state
  // (kPositions x d_s) for joint training of the state-updater.
  void backward(const DynModelCtx<T>& ctx, const Tensor<T>* d_next_state,
                T d_reward, Tensor<T>* ds_input) {
    Tensor<T> dgated({dims_.enc_f3, kPositions});

    if (d_next_state) {
      const Tensor<T> dproj = to_channels(*d_next_state);
      Tensor<T> du3({dims_.dec_f3, kPositions});
      proj_.backward(store_, ctx.proj, dproj, &du3);
      Tensor<T> du3_pre({dims_.dec_f3, kPositions});
      nn::tanh_backward(ctx.u3.data(), du3.data(), du3_pre.data(), du3.size());
      Tensor<T> du2({dims_.dec_f2, kPositions});
      d3_.backward(store_, ctx.d3, du3_pre, &du2);
      Tensor<T> du2_pre({dims_.dec_f2, kPositions});
      nn::tanh_backward(ctx.u2.data(), du2.data(), du2_pre.data(), du2.size());
      Tensor<T> du1({dims_.dec_f1, kPositions});
      d2_.backward(store_, ctx.d2, du2_pre, &du1);
      Tensor<T> du1_pre({dims_.dec_f1, kPositions});
      nn::tanh_backward(ctx.u1.data(), du1.data(), du1_pre.data(), du1.size());
      d1_.backward(store_, ctx.d1, du1_pre, &dgated);
    }

    if (d_reward != T(0)) {
      std::vector<T> dflat(static_cast<std::size_t>(dims_.enc_f3) * kPositions,
                           T(0));
      reward_.backward(store_, ctx.reward, &d_reward, dflat.data());
      kern::add_inplace(dgated.data(), dflat.data(), dgated.size());
    }

    // Hadamard gate: split dgated between the gate vector and the encoding.
    const T* g = gate_.forward(store_, ctx.action - 1);
    std::vector<T> dgate(static_cast<std::size_t>(dims_.enc_f3), T(0));
    Tensor<T> dh3({dims_.enc_f3, kPositions});
    for (int ch = 0; ch < dims_.enc_f3; ++ch) {
      dgate[static_cast<std::size_t>(ch)] =
          kern::dot(dgated.row(ch), ctx.h3.row(ch),
                    static_cast<std::size_t>(kPositions));
      for (int p = 0; p < kPositions; ++p)
        dh3.at(ch, p) = dgated.at(ch, p) * g[ch];
    }
    gate_.backward(store_, ctx.action - 1, dgate.data());

    Tensor<T> dh3_pre({dims_.enc_f3, kPositions});
    nn::tanh_backward(ctx.h3.data(), dh3.data(), dh3_pre.data(), dh3.size());
    Tensor<T> dh2({dims_.enc_f2, kPositions});
    e3_.backward(store_, ctx.e3, dh3_pre, &dh2);
    Tensor<T> dh2_pre({dims_.enc_f2, kPositions});
    nn::tanh_backward(ctx.h2.data(), dh2.data(), dh2_pre.data(), dh2.size());
    Tensor<T> dh1({dims_.enc_f1, kPositions});
    e2_.backward(store_, ctx.e2, dh2_pre, &dh1);
    Tensor<T> dh1_pre({dims_.enc_f1, kPositions});
    nn::tanh_backward(ctx.h1.data(), dh1.data(), dh1_pre.data(), dh1.size());
    if (ds_input) {
      Tensor<T> dx({dims_.d_s(), kPositions});
      e1_.backward(store_, ctx.e1, dh1_pre, &dx);
      const Tensor<T> dpos = to_positions(dx);
      kern::add_inplace(ds_input->data(), dpos.data(), dpos.size());
    } else {
      e1_.backward(store_, ctx.e1, dh1_pre, nullptr);
    }
  }

 private:
  NetDims dims_;
  nn::ParameterStore<T> store_;
  nn::Conv1d<T> e1_, e2_, e3_;
  nn::EmbeddingLookup<T> gate_;
  nn::Deconv1d<T> d1_, d2_, d3_;
  nn::Conv1d<T> proj_;
  nn::Linear<T> reward_;
};

template <typename T>
struct ModelUpdateOpts {
  T lr = static_cast<T>(1e-4);
  T clip_norm = static_cast<T>(0.9);
  bool train_state_updater = false;  // backprop L_state into u's parameters
  nn::AdamConfig adam{};
};

template <typename T>
struct ModelLossRecord {
  T state = T(0);
  T reward = T(0);
  bool has_state = false;  // false on terminal transitions (no next state)
  bool skipped = false;
};

// Online model update from one observed transition. s_next is null on
// terminal steps, where only the reward head has a target. States enter as
// fixed inputs/targets unless train_state_updater routes the input-state
// gradient back through the state-updater chain that produced it.
template <typename T>
ModelLossRecord<T> model_update(DynModel<T>& model, const AgentState<T>& state,
                                int action, T reward,
                                std::type_identity_t<const Tensor<T>*> s_next,
                                const ModelUpdateOpts<T>& opts,
                                std::type_identity_t<StateUpdater<T>*> su = nullptr,
                                std::type_identity_t<const StateUpdateCtx<T>*> su_ctx = nullptr) {
  DynModelCtx<T> ctx;
  const ModelPrediction<T> pred = model.predict(state.mat, action, &ctx);

  ModelLossRecord<T> rec;
  Tensor<T> d_state;
  if (s_next) {
    rec.has_state = true;
    T ss = T(0);
    d_state = Tensor<T>({kPositions, state.mat.dim(1)});
    for (std::size_t i = 0; i < pred.next_state.size(); ++i) {
      const T d = pred.next_state[i] - (*s_next)[i];
      d_state[i] = d;
      ss += d * d;
    }
    rec.state = std::sqrt(ss);
    if (rec.state > T(0))
      kern::scale_inplace(d_state.data(), T(1) / rec.state, d_state.size());
    else
      d_state.zero();
  }
  const T rerr = pred.reward - reward;
  rec.reward = rerr * rerr;

  if (!std::isfinite(static_cast<double>(rec.state)) ||
      !std::isfinite(static_cast<double>(rec.reward))) {
    rec.skipped = true;
    return rec;
  }

  const bool joint = opts.train_state_updater && su && su_ctx;
  model.store().zero_grads();
  if (joint) su->store().zero_grads();
  Tensor<T> ds_input({kPositions, state.mat.dim(1)});
  model.backward(ctx, s_next ? &d_state : nullptr, T(2) * rerr,
                 joint ? &ds_input : nullptr);
  if (joint) su->backward(*su_ctx, ds_input);

  if (!model.store().grads_finite() || (joint && !su->store().grads_finite())) {
    rec.skipped = true;
    return rec;
  }
  model.store().clip_grad_norm(opts.clip_norm);
  model.store().adam_step(opts.lr, opts.adam);
  if (joint) {
    su->store().clip_grad_norm(opts.clip_norm);
    su->store().adam_step(opts.lr, opts.adam);
  }
  return rec;
}

}  // namespace vedit
