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

#include <array>
#include <cstdint>
#include <span>

#include "vedit/corpus.hpp"
#include "vedit/edit_env.hpp"
#include "vedit/layers.hpp"
#include "vedit/presets.hpp"

namespace vedit {

// The agent's learned interaction summary: one row per position (15 display
// slots then the speech slot), plus a mask of occupied rows so padding does
// not leak into pooled statistics.
template <typename T>
struct AgentState {
  Tensor<T> mat;  // kPositions x d_s
  std::array<uint8_t, kPositions> mask{};

  static AgentState ones(int d_s) {
    AgentState s;
    s.mat = Tensor<T>({kPositions, d_s});
    s.mat.fill(T(1));
    s.mask.fill(1);
    return s;
  }

  int occupied() const {
    int n = 0;
    for (uint8_t b : mask) n += b;
    return n;
  }
};

template <typename T>
struct StateUpdateCtx {
  nn::BilinearCtx<T> bilinear;
  nn::GruCtx<T> gru;
  int a_prev = 0;  // 0 = none
};

// The state-update function u: builds the recurrent input from the previous
// state (pooled, with the previous reward appended), the previous action,
// and the new observation, then runs the bidirectional recurrent stack.
// Gradients from downstream losses flow back to this component's parameters
// through one step; the previous state enters as a constant.
template <typename T>
class StateUpdater {
 public:
  StateUpdater(const NetDims& dims, Rng& rng) : dims_(dims) {
    bilinear_ = nn::Bilinear<T>(store_, "su.bilinear", dims.d_s() + 1,
                                dims.d_a, dims.d_chi, rng);
    action_emb_ =
        nn::EmbeddingLookup<T>(store_, "su.action_emb", kNumActions, dims.d_a, rng);
    gru_ = nn::GruStack<T>(store_, "su.gru", dims.d_omega(), dims.hidden, 2, rng);
  }

  nn::ParameterStore<T>& store() { return store_; }
  const NetDims& dims() const { return dims_; }

  AgentState<T> init_state() const { return AgentState<T>::ones(dims_.d_s()); }

  // Pooled previous state (mean over occupied rows) extended with the
  // previous reward.
  std::vector<T> pooled_state(const AgentState<T>& s, T r_prev) const {
    const int d = dims_.d_s();
    std::vector<T> out(static_cast<std::size_t>(d + 1), T(0));
    const int occ = s.occupied();
    for (int p = 0; p < kPositions; ++p) {
      if (!s.mask[static_cast<std::size_t>(p)]) continue;
      kern::add_inplace(out.data(), s.mat.row(p), static_cast<std::size_t>(d));
    }
    if (occ > 0)
      kern::scale_inplace(out.data(), T(1) / static_cast<T>(occ),
                          static_cast<std::size_t>(d));
    out[static_cast<std::size_t>(d)] = r_prev;
    return out;
  }

  // The recurrent input: row p = [token embedding | chi], chi broadcast to
  // every row. Display tokens fill rows 0..14 (zero pad beyond the sentence),
  // the speech token holds row 15.
  Tensor<T> build_omega(const AgentState<T>& s_prev, int a_prev, T r_prev,
                        const Observation& obs, const EmbeddingTable& table,
                        StateUpdateCtx<T>* ctx) const {
    if (static_cast<int>(obs.words.size()) > kPositions - 1)
      throw std::invalid_argument("build_omega: display longer than 15");
    const int d_e = dims_.d_e;
    const int d_chi = dims_.d_chi;

    std::vector<T> pooled = pooled_state(s_prev, r_prev);
    std::vector<T> a_vec(static_cast<std::size_t>(dims_.d_a), T(0));
    if (a_prev > 0) {
      const T* row = action_emb_.forward(store_, a_prev - 1);
      a_vec.assign(row, row + dims_.d_a);
    }
    std::vector<T> chi(static_cast<std::size_t>(d_chi));
    bilinear_.forward(store_, pooled, a_vec, chi.data(),
                      ctx ? &ctx->bilinear : nullptr);
    if (ctx) ctx->a_prev = a_prev;

    Tensor<T> omega({kPositions, dims_.d_omega()});
    for (int p = 0; p < kPositions; ++p) {
      T* row = omega.row(p);
      const bool speech_row = p == kPositions - 1;
      const bool has_token =
          speech_row || p < static_cast<int>(obs.words.size());
      if (has_token) {
        const std::vector<float> e =
            table.embed(speech_row ? obs.speech
                                   : obs.words[static_cast<std::size_t>(p)]);
        for (int j = 0; j < d_e; ++j) row[j] = static_cast<T>(e[static_cast<std::size_t>(j)]);
      } else {
        for (int j = 0; j < d_e; ++j) row[j] = T(0);
      }
      for (int j = 0; j < d_chi; ++j) row[d_e + j] = chi[static_cast<std::size_t>(j)];
    }
    return omega;
  }

  AgentState<T> forward(const AgentState<T>& s_prev, int a_prev, T r_prev,
                        const Observation& obs, const EmbeddingTable& table,
                        StateUpdateCtx<T>* ctx) {
    Tensor<T> omega = build_omega(s_prev, a_prev, r_prev, obs, table, ctx);
    AgentState<T> out;
    out.mat = gru_.forward(store_, omega, ctx ? &ctx->gru : nullptr);
    out.mask.fill(0);
    for (std::size_t p = 0; p < obs.words.size(); ++p) out.mask[p] = 1;
    out.mask[kPositions - 1] = 1;  // speech slot
    return out;
  }

  // dS is (kPositions x d_s). Accumulates this component's gradients; the
  // previous state and the fixed token embeddings receive none.
  void backward(const StateUpdateCtx<T>& ctx, const Tensor<T>& dS) {
    Tensor<T> d_omega({kPositions, dims_.d_omega()});
    gru_.backward(store_, ctx.gru, dS, &d_omega);
    // chi was broadcast to every row; its gradient is the row sum.
    std::vector<T> d_chi(static_cast<std::size_t>(dims_.d_chi), T(0));
    for (int p = 0; p < kPositions; ++p)
      kern::add_inplace(d_chi.data(), d_omega.row(p) + dims_.d_e,
                        static_cast<std::size_t>(dims_.d_chi));
    std::vector<T> d_a(static_cast<std::size_t>(dims_.d_a), T(0));
    bilinear_.backward(store_, ctx.bilinear, d_chi.data(), nullptr,
                       ctx.a_prev > 0 ? d_a.data() : nullptr);
    if (ctx.a_prev > 0)
      action_emb_.backward(store_, ctx.a_prev - 1, d_a.data());
  }

 private:
  NetDims dims_;
  nn::ParameterStore<T> store_;
  nn::Bilinear<T> bilinear_;
  nn::EmbeddingLookup<T> action_emb_;
  nn::GruStack<T> gru_;
};

}  // namespace vedit
