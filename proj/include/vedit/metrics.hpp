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
#include <deque>
#include <fstream>
#include <string>
#include <vector>

#include "vedit/edit_env.hpp"

namespace vedit {

// Trailing-window mean. Values are kept as f32 so the window can round-trip
// through checkpoints without changing resumed metrics.
class MovingWindow {
 public:
  explicit MovingWindow(std::size_t capacity) : capacity_(capacity) {}

  void push(float v) {
    values_.push_back(v);
    if (values_.size() > capacity_) values_.pop_front();
  }

  double mean() const {
    if (values_.empty()) return 0.0;
    double sum = 0.0;
    for (float v : values_) sum += v;
    return sum / static_cast<double>(values_.size());
  }

  std::size_t size() const { return values_.size(); }

  std::vector<float> snapshot() const {
    return std::vector<float>(values_.begin(), values_.end());
  }
  void restore(const std::vector<float>& vals) {
    values_.assign(vals.begin(), vals.end());
  }

 private:
  std::size_t capacity_;
  std::deque<float> values_;
};

struct InteractionRecord {
  long long interaction = 0;  // 1-based index
  double reward = 0.0;        // episode total
  int steps = 0;
  std::vector<int> actions;          // chosen actions, 1..15
  std::vector<double> abs_errors;    // |action - intent| per action
  // per-interaction mean losses; which set is meaningful depends on the
  // algorithm
  double loss_state = 0.0, loss_reward = 0.0, loss_actor = 0.0,
         loss_critic = 0.0;
  double loss_policy = 0.0, loss_value = 0.0;
};

// Delimiter-separated metrics stream: a header row, then one row per
// interaction. Action columns are cumulative counts.
class MetricsWriter {
 public:
  static constexpr std::size_t kRewardWindow = 1000;
  static constexpr std::size_t kAbsErrWindow = 300;

  MetricsWriter() : reward_window_(kRewardWindow), abs_err_window_(kAbsErrWindow) {}

  void open(const std::string& path, bool mbac_losses);
  void record(const InteractionRecord& rec);
  void close();

  double reward_ma() const { return reward_window_.mean(); }
  double abs_err_ma() const { return abs_err_window_.mean(); }
  const std::array<long long, kNumActions>& action_counts() const {
    return action_counts_;
  }
  long long total_steps() const { return total_steps_; }

  // entropy of the empirical training action distribution
  double action_entropy() const;

  MovingWindow& reward_window() { return reward_window_; }
  MovingWindow& abs_err_window() { return abs_err_window_; }
  void set_action_counts(const std::array<long long, kNumActions>& c) {
    action_counts_ = c;
  }
  void set_total_steps(long long s) { total_steps_ = s; }

 private:
  std::ofstream out_;
  bool mbac_losses_ = true;
  MovingWindow reward_window_;
  MovingWindow abs_err_window_;
  std::array<long long, kNumActions> action_counts_{};
  long long total_steps_ = 0;
};

struct MetricsRow {
  long long interaction;
  double reward;
  int steps;
  double abs_err_mean300;
  std::array<long long, kNumActions> action_counts;
  std::vector<double> losses;
  long long total_steps;
};

// Round-trip reader for the metrics format.
std::vector<MetricsRow> parse_metrics(const std::string& path);

// key=value summary file
struct RunSummary {
  std::string algorithm;
  long long interactions = 0;
  long long total_steps = 0;
  double final_reward_ma1000 = 0.0;
  double final_abs_err_ma300 = 0.0;
  double action_entropy = 0.0;
  long long numeric_incidents = 0;
  std::array<long long, kMaxIntent> intent_histogram{};
};

void write_summary(const std::string& path, const RunSummary& s);

}  // namespace vedit
