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

#include <cstddef>

namespace vedit::kern {

// Arithmetic inner loops, dispatched at runtime between the scalar reference
// path and the AVX2 path. Both paths perform the identical sequence of IEEE
// operations: reductions use a fixed block of independent accumulators
// (block<T>() lanes, combined sequentially at the end) and fused
// multiply-add is disabled, so results are bit-identical across backends.
// Transcendentals are deliberately not part of this interface.

enum class Backend { scalar, avx2 };

bool avx2_compiled();             // AVX2 translation unit linked in
bool avx2_supported();            // CPU reports AVX2
Backend active_backend();
void set_backend(Backend b);      // avx2 falls back to scalar if unavailable
void reset_backend();             // back to auto-detected default

template <typename T>
constexpr std::size_t block() {
  return sizeof(T) == 4 ? 8 : 4;  // one AVX2 register width
}

template <typename T>
T dot(const T* a, const T* b, std::size_t n);

template <typename T>
T sum(const T* x, std::size_t n);

template <typename T>
T sumsq(const T* x, std::size_t n);

// y += alpha * x
template <typename T>
void axpy(T alpha, const T* x, T* y, std::size_t n);

// y += x
template <typename T>
void add_inplace(T* y, const T* x, std::size_t n);

// y *= x  (elementwise)
template <typename T>
void mul_inplace(T* y, const T* x, std::size_t n);

// y *= alpha
template <typename T>
void scale_inplace(T* y, T alpha, std::size_t n);

// One Adam coordinate update over n entries:
//   m = b1*m + (1-b1)*g
//   v = b2*v + (1-b2)*g*g
//   p -= lr * (m/bc1) / (sqrt(v/bc2) + eps)
// bc1/bc2 are the bias corrections (1 - b^t), precomputed by the caller.
template <typename T>
void adam_update(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T b1,
                 T b2, T eps, T bc1, T bc2);

}  // namespace vedit::kern
