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
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace vedit {

// Dense row-major array with a dynamic shape. Rank is 1..3 in practice
// (vectors, position matrices, conv kernels, the bilinear tensor).
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    for (int d : shape_)
      if (d <= 0) throw std::invalid_argument("Tensor: non-positive dim");
    data_.assign(element_count(shape_), T(0));
  }
  Tensor(std::vector<int> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != element_count(shape_))
      throw std::invalid_argument("Tensor: data/shape size mismatch");
  }

  static std::size_t element_count(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
  }

  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_.at(static_cast<std::size_t>(i)); }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::size_t size() const { return data_.size(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  // Rank-2 access: (row, col).
  T& at(int r, int c) {
    return data_[static_cast<std::size_t>(r) * shape_[1] + c];
  }
  const T& at(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * shape_[1] + c];
  }

  // Rank-3 access.
  T& at(int i, int j, int k) {
    return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] +
                 k];
  }
  const T& at(int i, int j, int k) const {
    return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] +
                 k];
  }

  T* row(int r) { return data_.data() + static_cast<std::size_t>(r) * shape_[1]; }
  const T* row(int r) const {
    return data_.data() + static_cast<std::size_t>(r) * shape_[1];
  }

  void fill(T v) { data_.assign(data_.size(), v); }
  void zero() { fill(T(0)); }

  bool all_finite() const {
    for (const T& v : data_)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

inline std::string shape_str(const std::vector<int>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

// (positions x features) -> (channels x length) and back; conv stacks run
// over the position axis with features as channels.
template <typename T>
Tensor<T> to_channels(const Tensor<T>& pos_feat) {
  Tensor<T> out({pos_feat.dim(1), pos_feat.dim(0)});
  for (int p = 0; p < pos_feat.dim(0); ++p)
    for (int c = 0; c < pos_feat.dim(1); ++c) out.at(c, p) = pos_feat.at(p, c);
  return out;
}

template <typename T>
Tensor<T> to_positions(const Tensor<T>& chan_len) {
  Tensor<T> out({chan_len.dim(1), chan_len.dim(0)});
  for (int c = 0; c < chan_len.dim(0); ++c)
    for (int p = 0; p < chan_len.dim(1); ++p) out.at(p, c) = chan_len.at(c, p);
  return out;
}

}  // namespace vedit
