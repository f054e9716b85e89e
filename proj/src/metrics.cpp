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

#include "vedit/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace vedit {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void MetricsWriter::open(const std::string& path, bool mbac_losses) {
  mbac_losses_ = mbac_losses;
  out_.open(path);
  if (!out_) throw std::runtime_error("cannot write metrics file: " + path);
  out_ << "interaction,reward,steps,abs_err_mean300";
  for (int a = 1; a <= kNumActions; ++a) out_ << ",act" << a;
  if (mbac_losses_)
    out_ << ",loss_state,loss_reward,loss_actor,loss_critic";
  else
    out_ << ",loss_policy,loss_value";
  out_ << ",total_steps\n";
}

void MetricsWriter::record(const InteractionRecord& rec) {
  reward_window_.push(static_cast<float>(rec.reward));
  for (double e : rec.abs_errors)
    abs_err_window_.push(static_cast<float>(e));
  for (int a : rec.actions)
    ++action_counts_[static_cast<std::size_t>(a - 1)];
  total_steps_ += rec.steps;

  out_ << rec.interaction << "," << fmt(rec.reward) << "," << rec.steps << ","
       << fmt(abs_err_window_.mean());
  for (long long c : action_counts_) out_ << "," << c;
  if (mbac_losses_)
    out_ << "," << fmt(rec.loss_state) << "," << fmt(rec.loss_reward) << ","
         << fmt(rec.loss_actor) << "," << fmt(rec.loss_critic);
  else
    out_ << "," << fmt(rec.loss_policy) << "," << fmt(rec.loss_value);
  out_ << "," << total_steps_ << "\n";
  if (!out_) throw std::runtime_error("metrics write failure");
}

void MetricsWriter::close() {
  if (out_.is_open()) out_.close();
}

double MetricsWriter::action_entropy() const {
  long long total = 0;
  for (long long c : action_counts_) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (long long c : action_counts_) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h;
}

std::vector<MetricsRow> parse_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read metrics file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("metrics file is empty: " + path);
  std::size_t n_loss_cols = 0;
  {
    std::stringstream ss(line);
    std::string col;
    std::size_t cols = 0;
    while (std::getline(ss, col, ',')) ++cols;
    n_loss_cols = cols - 4 - kNumActions - 1;
  }
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    auto next = [&]() {
      if (!std::getline(ss, cell, ','))
        throw std::runtime_error("metrics row is short: " + line);
      return cell;
    };
    MetricsRow r;
    r.interaction = std::stoll(next());
    r.reward = std::stod(next());
    r.steps = std::stoi(next());
    r.abs_err_mean300 = std::stod(next());
    for (auto& c : r.action_counts) c = std::stoll(next());
    for (std::size_t i = 0; i < n_loss_cols; ++i)
      r.losses.push_back(std::stod(next()));
    r.total_steps = std::stoll(next());
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary(const std::string& path, const RunSummary& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary file: " + path);
  out << "algorithm=" << s.algorithm << "\n";
  out << "interactions=" << s.interactions << "\n";
  out << "total_steps=" << s.total_steps << "\n";
  out << "final_reward_ma1000=" << fmt(s.final_reward_ma1000) << "\n";
  out << "final_abs_err_ma300=" << fmt(s.final_abs_err_ma300) << "\n";
  out << "action_entropy=" << fmt(s.action_entropy) << "\n";
  out << "numeric_incidents=" << s.numeric_incidents << "\n";
  for (int k = 1; k <= kMaxIntent; ++k)
    out << "intent_hist_" << k << "="
        << s.intent_histogram[static_cast<std::size_t>(k - 1)] << "\n";
}

}  // namespace vedit
