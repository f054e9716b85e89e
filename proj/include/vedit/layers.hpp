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

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vedit/kernels.hpp"
#include "vedit/ops.hpp"
#include "vedit/params.hpp"
#include "vedit/tensor.hpp"

// Layer primitives with explicit forward/backward passes. Each layer binds
// to entries of a ParameterStore; forward fills a caller-owned context with
// whatever backward needs. Layers hold no mutable state of their own.

namespace vedit::nn {

// ---- small dense helpers ------------------------------------------------

// y (+)= W x, W is (rows x cols).
template <typename T>
void matvec(const Tensor<T>& W, const T* x, T* y, bool accumulate) {
  const int rows = W.dim(0), cols = W.dim(1);
  for (int r = 0; r < rows; ++r) {
    const T v = kern::dot(W.row(r), x, static_cast<std::size_t>(cols));
    y[r] = accumulate ? y[r] + v : v;
  }
}

// y += W^T d.
template <typename T>
void matvec_transpose_acc(const Tensor<T>& W, const T* d, T* y) {
  const int rows = W.dim(0), cols = W.dim(1);
  for (int r = 0; r < rows; ++r)
    kern::axpy(d[r], W.row(r), y, static_cast<std::size_t>(cols));
}

// dW += d x^T.
template <typename T>
void outer_acc(Tensor<T>& dW, const T* d, const T* x) {
  const int rows = dW.dim(0), cols = dW.dim(1);
  for (int r = 0; r < rows; ++r)
    kern::axpy(d[r], x, dW.row(r), static_cast<std::size_t>(cols));
}

template <typename T>
void tanh_inplace(T* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::tanh(x[i]);
}

// dx = dy * (1 - y^2), given y = tanh(pre).
template <typename T>
void tanh_backward(const T* y, const T* dy, T* dx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dx[i] = dy[i] * (T(1) - y[i] * y[i]);
}

// ---- linear ---------------------------------------------------------------

template <typename T>
struct LinearCtx {
  std::vector<T> x;
};

template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(ParameterStore<T>& store, const std::string& prefix, int in,
         int out, Rng& rng)
      : in_(in), out_(out) {
    w_ = store.add(prefix + ".w", {out, in}, in, rng);
    b_ = store.add(prefix + ".b", {out}, in, rng);
  }

  int in_features() const { return in_; }
  int out_features() const { return out_; }

  void forward(const ParameterStore<T>& store, std::span<const T> x, T* y,
               LinearCtx<T>* ctx) const {
    if (static_cast<int>(x.size()) != in_)
      throw std::invalid_argument("linear: input size " +
                                  std::to_string(x.size()) + " != in " +
                                  std::to_string(in_));
    const auto& W = store.entry(w_).value;
    const auto& b = store.entry(b_).value;
    matvec(W, x.data(), y, false);
    kern::add_inplace(y, b.data(), static_cast<std::size_t>(out_));
    if (ctx) ctx->x.assign(x.begin(), x.end());
  }

  // Accumulates parameter grads; adds input grad into dx when non-null.
  void backward(ParameterStore<T>& store, const LinearCtx<T>& ctx,
                const T* dy, T* dx) const {
    auto& We = store.entry(w_);
    auto& be = store.entry(b_);
    outer_acc(We.grad, dy, ctx.x.data());
    kern::add_inplace(be.grad.data(), dy, static_cast<std::size_t>(out_));
    if (dx) matvec_transpose_acc(We.value, dy, dx);
  }

 private:
  int in_ = 0, out_ = 0;
  int w_ = -1, b_ = -1;
};

// ---- bilinear ---------------------------------------------------------------
// chi_k = sum_i sum_j s_i * Z[k,i,j] * a_j + b_k

template <typename T>
struct BilinearCtx {
  std::vector<T> s, a;
};

template <typename T>
class Bilinear {
 public:
  Bilinear() = default;
  Bilinear(ParameterStore<T>& store, const std::string& prefix, int s_dim,
           int a_dim, int out, Rng& rng)
      : s_dim_(s_dim), a_dim_(a_dim), out_(out) {
    z_ = store.add(prefix + ".z", {out, s_dim, a_dim}, s_dim * a_dim, rng);
    b_ = store.add(prefix + ".b", {out}, s_dim * a_dim, rng);
  }

  void forward(const ParameterStore<T>& store, std::span<const T> s,
               std::span<const T> a, T* y, BilinearCtx<T>* ctx) const {
    if (static_cast<int>(s.size()) != s_dim_ ||
        static_cast<int>(a.size()) != a_dim_)
      throw std::invalid_argument("bilinear: input dims " +
                                  std::to_string(s.size()) + "," +
                                  std::to_string(a.size()) + " != spec " +
                                  std::to_string(s_dim_) + "," +
                                  std::to_string(a_dim_));
    const auto& Z = store.entry(z_).value;
    const auto& b = store.entry(b_).value;
    for (int k = 0; k < out_; ++k) {
      T acc = b[static_cast<std::size_t>(k)];
      for (int i = 0; i < s_dim_; ++i)
        acc += s[i] * kern::dot(&Z.at(k, i, 0), a.data(),
                                static_cast<std::size_t>(a_dim_));
      y[k] = acc;
    }
    if (ctx) {
      ctx->s.assign(s.begin(), s.end());
      ctx->a.assign(a.begin(), a.end());
    }
  }

  // ds/da may be null to stop the corresponding gradient.
  void backward(ParameterStore<T>& store, const BilinearCtx<T>& ctx,
                const T* dy, T* ds, T* da) const {
    auto& Ze = store.entry(z_);
    auto& be = store.entry(b_);
    kern::add_inplace(be.grad.data(), dy, static_cast<std::size_t>(out_));
    for (int k = 0; k < out_; ++k) {
      for (int i = 0; i < s_dim_; ++i) {
        // dZ[k,i,:] += dy_k * s_i * a
        kern::axpy(dy[k] * ctx.s[static_cast<std::size_t>(i)], ctx.a.data(),
                   &Ze.grad.at(k, i, 0), static_cast<std::size_t>(a_dim_));
        if (ds)
          ds[i] += dy[k] * kern::dot(&Ze.value.at(k, i, 0), ctx.a.data(),
                                     static_cast<std::size_t>(a_dim_));
        if (da)
          kern::axpy(dy[k] * ctx.s[static_cast<std::size_t>(i)],
                     &Ze.value.at(k, i, 0), da,
                     static_cast<std::size_t>(a_dim_));
      }
    }
  }

 private:
  int s_dim_ = 0, a_dim_ = 0, out_ = 0;
  int z_ = -1, b_ = -1;
};

// ---- conv1d -----------------------------------------------------------------
// Input (C_in x L) row-major, weight (C_out x C_in x K), stride 1.
// same_padding keeps the position axis length; otherwise valid.

template <typename T>
struct Conv1dCtx {
  Tensor<T> x;
};

template <typename T>
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(ParameterStore<T>& store, const std::string& prefix, int c_in,
         int c_out, int k, bool same_padding, Rng& rng)
      : c_in_(c_in), c_out_(c_out), k_(k), same_(same_padding) {
    w_ = store.add(prefix + ".w", {c_out, c_in, k}, c_in * k, rng);
    b_ = store.add(prefix + ".b", {c_out}, c_in * k, rng);
  }

  int out_channels() const { return c_out_; }
  int out_length(int in_length) const {
    return same_ ? in_length : in_length - k_ + 1;
  }

  void forward(const ParameterStore<T>& store, const Tensor<T>& x, Tensor<T>& y,
               Conv1dCtx<T>* ctx) const {
    validate_input(x);
    const int L = x.dim(1);
    const int Lo = out_length(L);
    if (Lo <= 0)
      throw std::invalid_argument("conv1d: kernel width " +
                                  std::to_string(k_) + " > input length " +
                                  std::to_string(L));
    y = Tensor<T>({c_out_, Lo});
    const auto& W = store.entry(w_).value;
    const auto& b = store.entry(b_).value;
    const int pad = same_ ? (k_ - 1) / 2 : 0;
    for (int o = 0; o < c_out_; ++o) {
      T* yrow = y.row(o);
      for (int i = 0; i < Lo; ++i) yrow[i] = b[static_cast<std::size_t>(o)];
      for (int c = 0; c < c_in_; ++c) {
        const T* xrow = x.row(c);
        for (int k = 0; k < k_; ++k) {
          const T w = W.at(o, c, k);
          // y[o,i] += w * x[c, i+k-pad] over valid i
          const int shift = k - pad;
          const int i0 = std::max(0, -shift);
          const int i1 = std::min(Lo, L - shift);
          if (i1 > i0)
            kern::axpy(w, xrow + i0 + shift, yrow + i0,
                       static_cast<std::size_t>(i1 - i0));
        }
      }
    }
    if (ctx) ctx->x = x;
  }

  void backward(ParameterStore<T>& store, const Conv1dCtx<T>& ctx,
                const Tensor<T>& dy, Tensor<T>* dx) const {
    auto& We = store.entry(w_);
    auto& be = store.entry(b_);
    const int L = ctx.x.dim(1);
    const int Lo = dy.dim(1);
    const int pad = same_ ? (k_ - 1) / 2 : 0;
    for (int o = 0; o < c_out_; ++o) {
      const T* dyrow = dy.row(o);
      be.grad[static_cast<std::size_t>(o)] +=
          kern::sum(dyrow, static_cast<std::size_t>(Lo));
      for (int c = 0; c < c_in_; ++c) {
        const T* xrow = ctx.x.row(c);
        T* dxrow = dx ? dx->row(c) : nullptr;
        for (int k = 0; k < k_; ++k) {
          const int shift = k - pad;
          const int i0 = std::max(0, -shift);
          const int i1 = std::min(Lo, L - shift);
          if (i1 <= i0) continue;
          const std::size_t n = static_cast<std::size_t>(i1 - i0);
          We.grad.at(o, c, k) += kern::dot(dyrow + i0, xrow + i0 + shift, n);
          if (dxrow)
            kern::axpy(We.value.at(o, c, k), dyrow + i0, dxrow + i0 + shift,
                       n);
        }
      }
    }
  }

 private:
  void validate_input(const Tensor<T>& x) const {
    if (x.rank() != 2 || x.dim(0) != c_in_)
      throw std::invalid_argument(
          "conv1d: input shape " + shape_str(x.shape()) +
          " does not match in_channels " + std::to_string(c_in_));
  }

  int c_in_ = 0, c_out_ = 0, k_ = 0;
  bool same_ = false;
  int w_ = -1, b_ = -1;
};

// ---- deconv1d ---------------------------------------------------------------
// Transposed conv, stride 1, length-preserving:
//   y[o,i] = b[o] + sum_c sum_k W[c,o,k] * x[c, i-k+pad]
// Weight layout (C_in x C_out x K); the adjoint of same-padding conv1d.

template <typename T>
struct Deconv1dCtx {
  Tensor<T> x;
};

template <typename T>
class Deconv1d {
 public:
  Deconv1d() = default;
  Deconv1d(ParameterStore<T>& store, const std::string& prefix, int c_in,
           int c_out, int k, Rng& rng)
      : c_in_(c_in), c_out_(c_out), k_(k) {
    w_ = store.add(prefix + ".w", {c_in, c_out, k}, c_in * k, rng);
    b_ = store.add(prefix + ".b", {c_out}, c_in * k, rng);
  }

  void forward(const ParameterStore<T>& store, const Tensor<T>& x, Tensor<T>& y,
               Deconv1dCtx<T>* ctx) const {
    if (x.rank() != 2 || x.dim(0) != c_in_)
      throw std::invalid_argument(
          "deconv1d: input shape " + shape_str(x.shape()) +
          " does not match in_channels " + std::to_string(c_in_));
    const int L = x.dim(1);
    const int pad = (k_ - 1) / 2;
    y = Tensor<T>({c_out_, L});
    const auto& W = store.entry(w_).value;
    const auto& b = store.entry(b_).value;
    for (int o = 0; o < c_out_; ++o) {
      T* yrow = y.row(o);
      for (int i = 0; i < L; ++i) yrow[i] = b[static_cast<std::size_t>(o)];
    }
    for (int c = 0; c < c_in_; ++c) {
      const T* xrow = x.row(c);
      for (int o = 0; o < c_out_; ++o) {
        T* yrow = y.row(o);
        for (int k = 0; k < k_; ++k) {
          // x index j = i - k + pad ranges over [0,L): i in [k-pad, L+k-pad)
          const int i0 = std::max(0, k - pad);
          const int i1 = std::min(L, L + k - pad);
          if (i1 > i0)
            kern::axpy(W.at(c, o, k), xrow + i0 - (k - pad), yrow + i0,
                       static_cast<std::size_t>(i1 - i0));
        }
      }
    }
    if (ctx) ctx->x = x;
  }

  void backward(ParameterStore<T>& store, const Deconv1dCtx<T>& ctx,
                const Tensor<T>& dy, Tensor<T>* dx) const {
    auto& We = store.entry(w_);
    auto& be = store.entry(b_);
    const int L = ctx.x.dim(1);
    const int pad = (k_ - 1) / 2;
    for (int o = 0; o < c_out_; ++o)
      be.grad[static_cast<std::size_t>(o)] +=
          kern::sum(dy.row(o), static_cast<std::size_t>(L));
    for (int c = 0; c < c_in_; ++c) {
      const T* xrow = ctx.x.row(c);
      T* dxrow = dx ? dx->row(c) : nullptr;
      for (int o = 0; o < c_out_; ++o) {
        const T* dyrow = dy.row(o);
        for (int k = 0; k < k_; ++k) {
          const int i0 = std::max(0, k - pad);
          const int i1 = std::min(L, L + k - pad);
          if (i1 <= i0) continue;
          const std::size_t n = static_cast<std::size_t>(i1 - i0);
          const int xoff = i0 - (k - pad);
          We.grad.at(c, o, k) += kern::dot(dyrow + i0, xrow + xoff, n);
          if (dxrow) kern::axpy(We.value.at(c, o, k), dyrow + i0, dxrow + xoff, n);
        }
      }
    }
  }

 private:
  int c_in_ = 0, c_out_ = 0, k_ = 0;
  int w_ = -1, b_ = -1;
};

// ---- embedding lookup -------------------------------------------------------

template <typename T>
class EmbeddingLookup {
 public:
  EmbeddingLookup() = default;
  EmbeddingLookup(ParameterStore<T>& store, const std::string& prefix,
                  int vocab, int dim, Rng& rng)
      : vocab_(vocab), dim_(dim) {
    t_ = store.add(prefix + ".table", {vocab, dim}, dim, rng);
  }

  int dim() const { return dim_; }

  const T* forward(const ParameterStore<T>& store, int index) const {
    if (index < 0 || index >= vocab_)
      throw std::invalid_argument("embedding: index " +
                                  std::to_string(index) + " out of [0," +
                                  std::to_string(vocab_) + ")");
    return store.entry(t_).value.row(index);
  }

  void backward(ParameterStore<T>& store, int index, const T* d) const {
    kern::add_inplace(store.entry(t_).grad.row(index), d,
                      static_cast<std::size_t>(dim_));
  }

 private:
  int vocab_ = 0, dim_ = 0;
  int t_ = -1;
};

// ---- bidirectional GRU stack --------------------------------------------
// Gate order in the stacked weights: r, z, n.
//   r = sig(Wr x + br_i + Ur h + br_h)
//   z = sig(Wz x + bz_i + Uz h + bz_h)
//   n = tanh(Wn x + bn_i + r ⊙ (Un h + bn_h))
//   h' = (1-z) ⊙ n + z ⊙ h
// Each layer runs both directions over all positions; outputs concatenated
// (forward then backward), so layer output width is 2H.

template <typename T>
struct GruDirCtx {
  Tensor<T> h;       // (L+1) x H, h[0] = initial (zero)
  Tensor<T> r, z, n; // L x H each
  Tensor<T> hn_lin;  // L x H: Un h + bn_h
};

template <typename T>
struct GruCtx {
  std::vector<Tensor<T>> layer_in;           // input matrix per layer
  std::vector<std::array<GruDirCtx<T>, 2>> dir;  // [layer][direction]
};

template <typename T>
class GruStack {
 public:
  GruStack() = default;
  GruStack(ParameterStore<T>& store, const std::string& prefix, int input,
           int hidden, int layers, Rng& rng)
      : input_(input), hidden_(hidden), layers_(layers) {
    for (int l = 0; l < layers; ++l) {
      const int d_in = l == 0 ? input : 2 * hidden;
      for (int d = 0; d < 2; ++d) {
        const std::string p =
            prefix + ".l" + std::to_string(l) + (d == 0 ? ".fwd" : ".bwd");
        Refs r;
        r.w_ih = store.add(p + ".w_ih", {3 * hidden, d_in}, d_in, rng);
        r.w_hh = store.add(p + ".w_hh", {3 * hidden, hidden}, hidden, rng);
        r.b_ih = store.add(p + ".b_ih", {3 * hidden}, d_in, rng);
        r.b_hh = store.add(p + ".b_hh", {3 * hidden}, hidden, rng);
        refs_[l][d] = r;
      }
    }
  }

  int input_size() const { return input_; }
  int output_size() const { return 2 * hidden_; }

  // X is (L x input). Returns (L x 2H).
  Tensor<T> forward(const ParameterStore<T>& store, const Tensor<T>& X,
                    GruCtx<T>* ctx) const {
    if (X.rank() != 2 || X.dim(1) != input_)
      throw std::invalid_argument(
          "gru: input shape " + shape_str(X.shape()) +
          " does not match input size " + std::to_string(input_));
    if (ctx) {
      ctx->layer_in.assign(static_cast<std::size_t>(layers_), Tensor<T>());
      ctx->dir.assign(static_cast<std::size_t>(layers_), {});
    }
    Tensor<T> cur = X;
    for (int l = 0; l < layers_; ++l) {
      if (ctx) ctx->layer_in[static_cast<std::size_t>(l)] = cur;
      const int L = cur.dim(0);
      Tensor<T> out({L, 2 * hidden_});
      for (int d = 0; d < 2; ++d) {
        GruDirCtx<T> dctx;
        run_direction(store, refs_[l][d], cur, d == 1, &dctx);
        for (int step = 0; step < L; ++step) {
          const int t = d == 1 ? L - 1 - step : step;
          for (int j = 0; j < hidden_; ++j)
            out.at(t, d * hidden_ + j) = dctx.h.at(step + 1, j);
        }
        if (ctx) ctx->dir[static_cast<std::size_t>(l)][static_cast<std::size_t>(d)] = std::move(dctx);
      }
      cur = std::move(out);
    }
    return cur;
  }

  // dY is (L x 2H); returns grad w.r.t. X unless dX null. Param grads accumulate.
  void backward(ParameterStore<T>& store, const GruCtx<T>& ctx,
                const Tensor<T>& dY, Tensor<T>* dX) const {
    Tensor<T> dcur = dY;
    for (int l = layers_ - 1; l >= 0; --l) {
      const Tensor<T>& X = ctx.layer_in[static_cast<std::size_t>(l)];
      const int L = X.dim(0);
      Tensor<T> dx_layer({L, X.dim(1)});
      for (int d = 0; d < 2; ++d)
        backward_direction(store, refs_[l][d],
                           ctx.dir[static_cast<std::size_t>(l)][static_cast<std::size_t>(d)],
                           X, dcur, d == 1, dx_layer);
      dcur = std::move(dx_layer);
    }
    if (dX) kern::add_inplace(dX->data(), dcur.data(), dcur.size());
  }

 private:
  struct Refs {
    int w_ih = -1, w_hh = -1, b_ih = -1, b_hh = -1;
  };

  // One direction over the whole sequence. `reversed` walks positions from
  // the end; ctx rows stay indexed by walk step, not position.
  void run_direction(const ParameterStore<T>& store, const Refs& rf,
                     const Tensor<T>& X, bool reversed,
                     GruDirCtx<T>* dctx) const {
    const int L = X.dim(0);
    const int H = hidden_;
    const auto& W_ih = store.entry(rf.w_ih).value;
    const auto& W_hh = store.entry(rf.w_hh).value;
    const auto& b_ih = store.entry(rf.b_ih).value;
    const auto& b_hh = store.entry(rf.b_hh).value;
    dctx->h = Tensor<T>({L + 1, H});
    dctx->r = Tensor<T>({L, H});
    dctx->z = Tensor<T>({L, H});
    dctx->n = Tensor<T>({L, H});
    dctx->hn_lin = Tensor<T>({L, H});
    std::vector<T> pre_ih(static_cast<std::size_t>(3 * H));
    std::vector<T> pre_hh(static_cast<std::size_t>(3 * H));
    for (int step = 0; step < L; ++step) {
      const int t = reversed ? L - 1 - step : step;
      const T* x = X.row(t);
      const T* h_prev = dctx->h.row(step);
      matvec(W_ih, x, pre_ih.data(), false);
      kern::add_inplace(pre_ih.data(), b_ih.data(), pre_ih.size());
      matvec(W_hh, h_prev, pre_hh.data(), false);
      kern::add_inplace(pre_hh.data(), b_hh.data(), pre_hh.size());
      T* r = dctx->r.row(step);
      T* z = dctx->z.row(step);
      T* n = dctx->n.row(step);
      T* hn = dctx->hn_lin.row(step);
      T* h = dctx->h.row(step + 1);
      for (int j = 0; j < H; ++j) {
        r[j] = sigmoid(pre_ih[static_cast<std::size_t>(j)] +
                       pre_hh[static_cast<std::size_t>(j)]);
        z[j] = sigmoid(pre_ih[static_cast<std::size_t>(H + j)] +
                       pre_hh[static_cast<std::size_t>(H + j)]);
        hn[j] = pre_hh[static_cast<std::size_t>(2 * H + j)];
        n[j] = std::tanh(pre_ih[static_cast<std::size_t>(2 * H + j)] +
                         r[j] * hn[j]);
        h[j] = (T(1) - z[j]) * n[j] + z[j] * h_prev[j];
      }
    }
  }

  void backward_direction(ParameterStore<T>& store, const Refs& rf,
                          const GruDirCtx<T>& dctx, const Tensor<T>& X,
                          const Tensor<T>& dY, bool reversed,
                          Tensor<T>& dX) const {
    const int L = X.dim(0);
    const int H = hidden_;
    auto& W_ih = store.entry(rf.w_ih);
    auto& W_hh = store.entry(rf.w_hh);
    auto& b_ih = store.entry(rf.b_ih);
    auto& b_hh = store.entry(rf.b_hh);
    const int col0 = reversed ? H : 0;  // this direction's slice of dY
    std::vector<T> dh(static_cast<std::size_t>(H), T(0));
    std::vector<T> dgates(static_cast<std::size_t>(3 * H));  // r, z, n rows
    std::vector<T> dhh(static_cast<std::size_t>(3 * H));     // r, z, hn rows
    for (int step = L - 1; step >= 0; --step) {
      const int t = reversed ? L - 1 - step : step;
      const T* h_prev = dctx.h.row(step);
      const T* r = dctx.r.row(step);
      const T* z = dctx.z.row(step);
      const T* n = dctx.n.row(step);
      const T* hn = dctx.hn_lin.row(step);
      for (int j = 0; j < H; ++j)
        dh[static_cast<std::size_t>(j)] += dY.at(t, col0 + j);
      for (int j = 0; j < H; ++j) {
        const T dhj = dh[static_cast<std::size_t>(j)];
        const T dn = dhj * (T(1) - z[j]);
        const T dz = dhj * (h_prev[j] - n[j]);
        const T dn_pre = dn * (T(1) - n[j] * n[j]);
        const T dr = dn_pre * hn[j];
        const T dhn = dn_pre * r[j];
        const T dz_pre = dz * z[j] * (T(1) - z[j]);
        const T dr_pre = dr * r[j] * (T(1) - r[j]);
        dgates[static_cast<std::size_t>(j)] = dr_pre;
        dgates[static_cast<std::size_t>(H + j)] = dz_pre;
        dgates[static_cast<std::size_t>(2 * H + j)] = dn_pre;
        dhh[static_cast<std::size_t>(j)] = dr_pre;
        dhh[static_cast<std::size_t>(H + j)] = dz_pre;
        dhh[static_cast<std::size_t>(2 * H + j)] = dhn;
        // carry to previous step via the convex update
        dh[static_cast<std::size_t>(j)] = dhj * z[j];
      }
      outer_acc(W_ih.grad, dgates.data(), X.row(t));
      kern::add_inplace(b_ih.grad.data(), dgates.data(), dgates.size());
      outer_acc(W_hh.grad, dhh.data(), h_prev);
      kern::add_inplace(b_hh.grad.data(), dhh.data(), dhh.size());
      matvec_transpose_acc(W_hh.value, dhh.data(), dh.data());
      matvec_transpose_acc(W_ih.value, dgates.data(), dX.row(t));
    }
  }

  int input_ = 0, hidden_ = 0, layers_ = 0;
  std::array<std::array<Refs, 2>, 8> refs_{};
};

}  // namespace vedit::nn
