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
#include <functional>
#include <string>
#include <vector>

#include "vedit/params.hpp"
#include "vedit/rng.hpp"

namespace vedit::nn {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t coords_checked = 0;

  bool passes(double tol) const { return max_rel_err < tol; }
};

// Central-difference check of analytic gradients. loss_fn must be a
// deterministic scalar function of the store's current values; grad_fn must
// leave d loss / d value in the grad arrays. Meant to run on the double
// instantiation.
//
// Scoring: relative error |a-f| / max(1e-8, |a|+|f|), except that a
// coordinate whose analytic and central-difference values agree within
// `atol` counts as exact. f64 differences at h=1e-5 carry ~1e-11..1e-10 of
// intrinsic rounding noise, so coordinates with gradients near that floor
// would otherwise report errors that say nothing about correctness.
inline GradCheckReport finite_diff_check(
    ParameterStore<double>& store, const std::function<double()>& loss_fn,
    const std::function<void()>& grad_fn, Rng& rng,
    std::size_t min_coords = 100, double h = 1e-5, double atol = 1e-9) {
  grad_fn();
  std::vector<std::vector<double>> analytic;
  analytic.reserve(store.count());
  for (const auto& e : store.entries())
    analytic.emplace_back(e.grad.data(), e.grad.data() + e.grad.size());

  const std::size_t total = store.total_values();
  const bool exhaustive = total <= min_coords;
  const std::size_t coords = exhaustive ? total : min_coords;

  GradCheckReport report;
  auto check_coord = [&](std::size_t ei, std::size_t vi) {
    auto& val = store.entry(static_cast<int>(ei)).value;
    const double orig = val[vi];
    val[vi] = orig + h;
    const double lp = loss_fn();
    val[vi] = orig - h;
    const double lm = loss_fn();
    val[vi] = orig;
    const double fd = (lp - lm) / (2.0 * h);
    const double an = analytic[ei][vi];
    const double mag = std::abs(an) + std::abs(fd);
    double rel;
    if (mag >= 1e-6) {
      rel = std::abs(an - fd) / std::max(1e-8, mag);
    } else {
      // below the f64 central-difference resolution; require absolute
      // agreement instead of a meaningless ratio of noise terms
      rel = std::abs(an - fd) <= atol
                ? 0.0
                : std::abs(an - fd) / std::max(1e-8, mag);
    }
    if (rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_param = store.entry(static_cast<int>(ei)).name;
      report.worst_index = vi;
    }
    ++report.coords_checked;
  };

  if (exhaustive) {
    for (std::size_t ei = 0; ei < store.count(); ++ei)
      for (std::size_t vi = 0; vi < store.entry(static_cast<int>(ei)).value.size(); ++vi)
        check_coord(ei, vi);
  } else {
    for (std::size_t c = 0; c < coords; ++c) {
      const std::size_t ei = rng.below(store.count());
      const std::size_t vi =
          rng.below(store.entry(static_cast<int>(ei)).value.size());
      check_coord(ei, vi);
    }
  }
  return report;
}

}  // namespace vedit::nn
