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
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace vedit::nn {

template <typename T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// Max-subtracted softmax.
template <typename T>
std::vector<T> softmax(std::span<const T> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty input");
  T mx = logits[0];
  for (T v : logits) {
    if (!std::isfinite(static_cast<double>(v)))
      throw std::invalid_argument("softmax: non-finite logit");
    mx = std::max(mx, v);
  }
  std::vector<T> out(logits.size());
  T sum = T(0);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

// dL/dlogits from dL/dp where p = softmax(logits):
//   dz_i = p_i * (dp_i - sum_j p_j dp_j)
template <typename T>
std::vector<T> softmax_backward(std::span<const T> p, std::span<const T> dp) {
  std::vector<T> dz(p.size());
  T inner = T(0);
  for (std::size_t i = 0; i < p.size(); ++i) inner += p[i] * dp[i];
  for (std::size_t i = 0; i < p.size(); ++i) dz[i] = p[i] * (dp[i] - inner);
  return dz;
}

template <typename T>
void check_distribution(std::span<const T> p, const char* what) {
  if (p.empty()) throw std::invalid_argument(std::string(what) + ": empty");
  T sum = T(0);
  for (T v : p) {
    if (!(v >= T(0)))
      throw std::invalid_argument(std::string(what) + ": negative entry");
    sum += v;
  }
  if (std::abs(static_cast<double>(sum) - 1.0) > 1e-6)
    throw std::invalid_argument(std::string(what) + ": does not sum to 1");
}

// sum p ln(p/q), with 0 ln(0/q) = 0 and q clamped below at 1e-12.
template <typename T>
T kl_divergence(std::span<const T> p, std::span<const T> q) {
  if (p.size() != q.size())
    throw std::invalid_argument("kl_divergence: length mismatch");
  check_distribution(p, "kl_divergence p");
  check_distribution(q, "kl_divergence q");
  T acc = T(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= T(0)) continue;
    const T qi = std::max(q[i], static_cast<T>(1e-12));
    acc += p[i] * std::log(p[i] / qi);
  }
  return acc;
}

// -sum p ln p, with 0 ln 0 = 0.
template <typename T>
T entropy(std::span<const T> p) {
  check_distribution(p, "entropy");
  T acc = T(0);
  for (T v : p)
    if (v > T(0)) acc -= v * std::log(v);
  return acc;
}

}  // namespace vedit::nn
