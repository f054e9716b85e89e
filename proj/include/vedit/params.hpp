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
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vedit/kernels.hpp"
#include "vedit/rng.hpp"
#include "vedit/tensor.hpp"

namespace vedit::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Named parameter arrays of one component (state-updater, actor-critic,
// model), with gradients and Adam moments kept shape-congruent. Gradient
// clipping and the Adam step are applied jointly over the whole store.
template <typename T>
class ParameterStore {
 public:
  struct Entry {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;
    Tensor<T> m;
    Tensor<T> v;
  };

  // Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
  int add(const std::string& name, std::vector<int> shape, int fan_in,
          Rng& rng) {
    Entry e;
    e.name = name;
    e.value = Tensor<T>(shape);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < e.value.size(); ++i)
      e.value[i] = static_cast<T>((rng.uniform01() * 2.0 - 1.0) * bound);
    e.grad = Tensor<T>(shape);
    e.m = Tensor<T>(shape);
    e.v = Tensor<T>(shape);
    entries_.push_back(std::move(e));
    return static_cast<int>(entries_.size()) - 1;
  }

  int add_zeros(const std::string& name, std::vector<int> shape) {
    Entry e;
    e.name = name;
    e.value = Tensor<T>(shape);
    e.grad = Tensor<T>(shape);
    e.m = Tensor<T>(shape);
    e.v = Tensor<T>(shape);
    entries_.push_back(std::move(e));
    return static_cast<int>(entries_.size()) - 1;
  }

  Entry& entry(int idx) { return entries_.at(static_cast<std::size_t>(idx)); }
  const Entry& entry(int idx) const {
    return entries_.at(static_cast<std::size_t>(idx));
  }
  Entry* find(const std::string& name) {
    for (auto& e : entries_)
      if (e.name == name) return &e;
    return nullptr;
  }

  std::size_t count() const { return entries_.size(); }
  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::size_t total_values() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
  }

  void zero_grads() {
    for (auto& e : entries_) e.grad.zero();
  }

  T grad_norm() const {
    T ss = T(0);
    for (const auto& e : entries_) ss += kern::sumsq(e.grad.data(), e.grad.size());
    return std::sqrt(ss);
  }

  // Joint L2 clipping over every gradient array of the component.
  T clip_grad_norm(T max_norm) {
    const T n = grad_norm();
    if (n > max_norm) {
      const T s = max_norm / n;
      for (auto& e : entries_) kern::scale_inplace(e.grad.data(), s, e.grad.size());
    }
    return n;
  }

  bool grads_finite() const {
    for (const auto& e : entries_)
      if (!e.grad.all_finite()) return false;
    return true;
  }

  int64_t adam_step_count() const { return step_; }
  void set_adam_step_count(int64_t s) { step_ = s; }

  // One Adam descent step over all arrays, shared step counter.
  // lr_for(name) lets heads run at their own rate; pass {} for uniform lr.
  void adam_step(T lr, const AdamConfig& cfg = {},
                 const std::function<T(const std::string&)>& lr_for = {}) {
    ++step_;
    const T b1 = static_cast<T>(cfg.beta1);
    const T b2 = static_cast<T>(cfg.beta2);
    const T eps = static_cast<T>(cfg.epsilon);
    const T bc1 = T(1) - static_cast<T>(std::pow(cfg.beta1, static_cast<double>(step_)));
    const T bc2 = T(1) - static_cast<T>(std::pow(cfg.beta2, static_cast<double>(step_)));
    for (auto& e : entries_) {
      const T lr_e = lr_for ? lr_for(e.name) : lr;
      kern::adam_update(e.value.data(), e.grad.data(), e.m.data(), e.v.data(),
                        e.value.size(), lr_e, b1, b2, eps, bc1, bc2);
    }
  }

 private:
  std::vector<Entry> entries_;
  int64_t step_ = 0;
};

}  // namespace vedit::nn
