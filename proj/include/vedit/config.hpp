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

#include <cstdint>
#include <string>

namespace vedit {

// One run's knobs. Defaults are the reference configuration: gamma 0.9, beta 1,
// learning rates 1e-4, gradient clip 0.9.
struct RunConfig {
  std::string algorithm = "mbac";  // mbac | a2c
  std::string preset = "desk";     // desk | paper
  std::string corpus_path;
  std::size_t corpus_max = 0;  // 0 = use the whole file
  uint64_t seed = 1;
  long long budget = 20000;  // total interactions (resume trains up to this)
  double gamma = 0.9;
  double beta = 1.0;
  double lr_model = 1e-4;
  double lr_actor = 1e-4;
  double lr_critic = 1e-4;
  double clip_norm = 0.9;
  double planner_temperature = 1.0;  // scales the planner softmax; 1 = plain
  std::string embedding_mode = "hash";  // hash | file
  std::string embedding_file;
  bool model_trains_state_updater = false;
  std::string outdir = ".";
  std::string trace_path;

  // evaluation knobs
  std::string eval_split = "test";    // train | test
  std::string eval_policy = "actor";  // actor | planner
  bool eval_greedy = false;
  long long eval_episodes = 2000;
  uint64_t eval_seed = 1;

  void validate() const;

  // Flat key=value lines; later flags override these.
  static RunConfig from_file(const std::string& path);
  static RunConfig from_file(const std::string& path, RunConfig base);
  bool apply(const std::string& key, const std::string& value);
};

}  // namespace vedit
