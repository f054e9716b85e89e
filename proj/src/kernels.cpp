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

// Scalar reference kernels plus the runtime backend switch. The loop
// structure (block-of-lanes partial accumulators, sequential combine,
// remainder folded into lane i % W) is the contract the AVX2 path matches
// bit for bit. This translation unit is compiled with -ffp-contract=off.

#include "vedit/kernels.hpp"

#include <atomic>
#include <cmath>

namespace vedit::kern {

namespace avx2 {
// Defined in kernels_avx2.cpp when that TU is part of the build.
float dot_f(const float*, const float*, std::size_t);
double dot_d(const double*, const double*, std::size_t);
float sum_f(const float*, std::size_t);
double sum_d(const double*, std::size_t);
float sumsq_f(const float*, std::size_t);
double sumsq_d(const double*, std::size_t);
void axpy_f(float, const float*, float*, std::size_t);
void axpy_d(double, const double*, double*, std::size_t);
void add_f(float*, const float*, std::size_t);
void add_d(double*, const double*, std::size_t);
void mul_f(float*, const float*, std::size_t);
void mul_d(double*, const double*, std::size_t);
void scale_f(float*, float, std::size_t);
void scale_d(double*, double, std::size_t);
void adam_f(float*, const float*, float*, float*, std::size_t, float, float,
            float, float, float, float);
void adam_d(double*, const double*, double*, double*, std::size_t, double,
            double, double, double, double, double);
}  // namespace avx2

#if defined(VEDIT_HAVE_AVX2)
bool avx2_compiled() { return true; }
#else
bool avx2_compiled() { return false; }
// Stubs keep the dispatcher linkable on builds without the AVX2 TU; the
// backend switch never routes here in that configuration.
namespace avx2 {
float dot_f(const float*, const float*, std::size_t) { return 0; }
double dot_d(const double*, const double*, std::size_t) { return 0; }
float sum_f(const float*, std::size_t) { return 0; }
double sum_d(const double*, std::size_t) { return 0; }
float sumsq_f(const float*, std::size_t) { return 0; }
double sumsq_d(const double*, std::size_t) { return 0; }
void axpy_f(float, const float*, float*, std::size_t) {}
void axpy_d(double, const double*, double*, std::size_t) {}
void add_f(float*, const float*, std::size_t) {}
void add_d(double*, const double*, std::size_t) {}
void mul_f(float*, const float*, std::size_t) {}
void mul_d(double*, const double*, std::size_t) {}
void scale_f(float*, float, std::size_t) {}
void scale_d(double*, double, std::size_t) {}
void adam_f(float*, const float*, float*, float*, std::size_t, float, float,
            float, float, float, float) {}
void adam_d(double*, const double*, double*, double*, std::size_t, double,
            double, double, double, double, double) {}
}  // namespace avx2
#endif

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

namespace {

Backend detect() {
  return (avx2_compiled() && avx2_supported()) ? Backend::avx2
                                               : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

Backend active_backend() { return backend_slot().load(); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !(avx2_compiled() && avx2_supported()))
    b = Backend::scalar;
  backend_slot().store(b);
}

void reset_backend() { backend_slot().store(detect()); }

namespace scalar {

template <typename T>
T dot_ref(const T* a, const T* b, std::size_t n) {
  constexpr std::size_t W = block<T>();
  T acc[W] = {};
  std::size_t i = 0;
  for (; i + W <= n; i += W)
    for (std::size_t j = 0; j < W; ++j) acc[j] += a[i + j] * b[i + j];
  for (std::size_t j = 0; i < n; ++i, ++j) acc[j] += a[i] * b[i];
  T total = 0;
  for (std::size_t j = 0; j < W; ++j) total += acc[j];
  return total;
}

template <typename T>
T sum_ref(const T* x, std::size_t n) {
  constexpr std::size_t W = block<T>();
  T acc[W] = {};
  std::size_t i = 0;
  for (; i + W <= n; i += W)
    for (std::size_t j = 0; j < W; ++j) acc[j] += x[i + j];
  for (std::size_t j = 0; i < n; ++i, ++j) acc[j] += x[i];
  T total = 0;
  for (std::size_t j = 0; j < W; ++j) total += acc[j];
  return total;
}

template <typename T>
T sumsq_ref(const T* x, std::size_t n) {
  return dot_ref(x, x, n);
}

template <typename T>
void axpy_ref(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void add_ref(T* y, const T* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

template <typename T>
void mul_ref(T* y, const T* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= x[i];
}

template <typename T>
void scale_ref(T* y, T alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= alpha;
}

template <typename T>
void adam_ref(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T b1, T b2,
              T eps, T bc1, T bc2) {
  const T one_minus_b1 = T(1) - b1;
  const T one_minus_b2 = T(1) - b2;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + one_minus_b1 * g[i];
    v[i] = b2 * v[i] + one_minus_b2 * (g[i] * g[i]);
    p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

}  // namespace scalar

template <>
float dot(const float* a, const float* b, std::size_t n) {
  return active_backend() == Backend::avx2 ? avx2::dot_f(a, b, n)
                                           : scalar::dot_ref(a, b, n);
}
template <>
double dot(const double* a, const double* b, std::size_t n) {
  return active_backend() == Backend::avx2 ? avx2::dot_d(a, b, n)
                                           : scalar::dot_ref(a, b, n);
}

template <>
float sum(const float* x, std::size_t n) {
  return active_backend() == Backend::avx2 ? avx2::sum_f(x, n)
                                           : scalar::sum_ref(x, n);
}
template <>
double sum(const double* x, std::size_t n) {
  return active_backend() == Backend::avx2 ? avx2::sum_d(x, n)
                                           : scalar::sum_ref(x, n);
}

template <>
float sumsq(const float* x, std::size_t n) {
  return active_backend() == Backend::avx2 ? avx2::sumsq_f(x, n)
                                           : scalar::sumsq_ref(x, n);
}
template <>
double sumsq(const double* x, std::size_t n) {
  return active_backend() == Backend::avx2 ? avx2::sumsq_d(x, n)
                                           : scalar::sumsq_ref(x, n);
}

template <>
void axpy(float alpha, const float* x, float* y, std::size_t n) {
  active_backend() == Backend::avx2 ? avx2::axpy_f(alpha, x, y, n)
                                    : scalar::axpy_ref(alpha, x, y, n);
}
template <>
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active_backend() == Backend::avx2 ? avx2::axpy_d(alpha, x, y, n)
                                    : scalar::axpy_ref(alpha, x, y, n);
}

template <>
void add_inplace(float* y, const float* x, std::size_t n) {
  active_backend() == Backend::avx2 ? avx2::add_f(y, x, n)
                                    : scalar::add_ref(y, x, n);
}
template <>
void add_inplace(double* y, const double* x, std::size_t n) {
  active_backend() == Backend::avx2 ? avx2::add_d(y, x, n)
                                    : scalar::add_ref(y, x, n);
}

template <>
void mul_inplace(float* y, const float* x, std::size_t n) {
  active_backend() == Backend::avx2 ? avx2::mul_f(y, x, n)
                                    : scalar::mul_ref(y, x, n);
}
template <>
void mul_inplace(double* y, const double* x, std::size_t n) {
  active_backend() == Backend::avx2 ? avx2::mul_d(y, x, n)
                                    : scalar::mul_ref(y, x, n);
}

template <>
void scale_inplace(float* y, float alpha, std::size_t n) {
  active_backend() == Backend::avx2 ? avx2::scale_f(y, alpha, n)
                                    : scalar::scale_ref(y, alpha, n);
}
template <>
void scale_inplace(double* y, double alpha, std::size_t n) {
  active_backend() == Backend::avx2 ? avx2::scale_d(y, alpha, n)
                                    : scalar::scale_ref(y, alpha, n);
}

template <>
void adam_update(float* p, const float* g, float* m, float* v, std::size_t n,
                 float lr, float b1, float b2, float eps, float bc1,
                 float bc2) {
  active_backend() == Backend::avx2
      ? avx2::adam_f(p, g, m, v, n, lr, b1, b2, eps, bc1, bc2)
      : scalar::adam_ref(p, g, m, v, n, lr, b1, b2, eps, bc1, bc2);
}
template <>
void adam_update(double* p, const double* g, double* m, double* v,
                 std::size_t n, double lr, double b1, double b2, double eps,
                 double bc1, double bc2) {
  active_backend() == Backend::avx2
      ? avx2::adam_d(p, g, m, v, n, lr, b1, b2, eps, bc1, bc2)
      : scalar::adam_ref(p, g, m, v, n, lr, b1, b2, eps, bc1, bc2);
}

}  // namespace vedit::kern
