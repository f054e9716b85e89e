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

#include <memory>
#include <ostream>
#include <string>

#include "vedit/checkpoint.hpp"
#include "vedit/config.hpp"
#include "vedit/dyn_model.hpp"
#include "vedit/metrics.hpp"
#include "vedit/planner.hpp"
#include "vedit/policy_value.hpp"

namespace vedit {

// The trainable components of one run, always in f32 (checkpoints store f32
// bit-exactly, which is what makes resume reproducible).
struct Agent {
  NetDims dims;
  EmbeddingTable table;
  StateUpdater<float> su;
  ActorCritic<float> ac;
  std::unique_ptr<DynModel<float>> model;  // absent for a2c and lite agents

  Agent(const NetDims& d, const EmbeddingTable& t, bool with_model, Rng& init);

  static Agent from_config(const RunConfig& cfg, Rng& init_rng);
  static Agent from_checkpoint(const Checkpoint& ck);
};

RunConfig config_from_checkpoint(const Checkpoint& ck);
void config_to_checkpoint(const RunConfig& cfg, Checkpoint& ck);

struct TrainResult {
  std::string checkpoint_path;
  std::string metrics_path;
  std::string summary_path;
  RunSummary summary;
};

// Runs cfg.algorithm up to cfg.budget total interactions on the train split.
// resume_path, when nonempty, continues from that checkpoint (the metrics
// file then holds only the newly trained interactions).
TrainResult train(const RunConfig& cfg, const std::string& resume_path = "");

struct EvalOptions {
  Split split = Split::test;
  std::string policy = "actor";  // actor | planner
  bool greedy = false;
  long long episodes = 2000;
  uint64_t seed = 1;
  std::string corpus_override;  // empty = corpus recorded in the checkpoint
};

struct EvalSummary {
  long long episodes = 0;
  double mean_reward = 0.0;
  double median_reward = 0.0;
  double q25_reward = 0.0;
  double q75_reward = 0.0;
  double mean_abs_err = 0.0;
};

EvalSummary evaluate(const Checkpoint& ck, const EvalOptions& opts);

// Finite-difference verification of every layer primitive plus the full
// MBAC and A2C loss sets, in f64. Prints one line per check; returns the
// worst relative error.
double run_gradcheck_suite(std::ostream& out);

}  // namespace vedit
