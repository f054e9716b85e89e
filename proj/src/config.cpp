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

#include "vedit/config.hpp"

#include <fstream>
#include <stdexcept>

namespace vedit {

void RunConfig::validate() const {
  if (algorithm != "mbac" && algorithm != "a2c")
    throw std::invalid_argument("algorithm must be mbac or a2c, got " +
                                algorithm);
  if (preset != "desk" && preset != "paper")
    throw std::invalid_argument("preset must be desk or paper, got " + preset);
  if (corpus_path.empty())
    throw std::invalid_argument("a corpus file is required (--corpus)");
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("gamma must be in [0,1]");
  if (clip_norm <= 0.0)
    throw std::invalid_argument("clip_norm must be positive");
  if (planner_temperature <= 0.0)
    throw std::invalid_argument("planner_temperature must be positive");
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
  if (embedding_mode != "hash" && embedding_mode != "file")
    throw std::invalid_argument("embedding_mode must be hash or file");
  if (embedding_mode == "file" && embedding_file.empty())
    throw std::invalid_argument("embedding_mode=file needs embedding_file");
  if (eval_split != "train" && eval_split != "test")
    throw std::invalid_argument("eval_split must be train or test");
  if (eval_policy != "actor" && eval_policy != "planner")
    throw std::invalid_argument("eval_policy must be actor or planner");
  if (eval_episodes <= 0)
    throw std::invalid_argument("eval_episodes must be positive");
}

bool RunConfig::apply(const std::string& key, const std::string& value) {
  if (key == "algorithm") algorithm = value;
  else if (key == "preset") preset = value;
  else if (key == "corpus") corpus_path = value;
  else if (key == "corpus_max") corpus_max = std::stoull(value);
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "budget") budget = std::stoll(value);
  else if (key == "gamma") gamma = std::stod(value);
  else if (key == "beta") beta = std::stod(value);
  else if (key == "lr_model") lr_model = std::stod(value);
  else if (key == "lr_actor") lr_actor = std::stod(value);
  else if (key == "lr_critic") lr_critic = std::stod(value);
  else if (key == "clip_norm") clip_norm = std::stod(value);
  else if (key == "planner_temperature") planner_temperature = std::stod(value);
  else if (key == "embedding_mode") embedding_mode = value;
  else if (key == "embedding_file") embedding_file = value;
  else if (key == "model_trains_state_updater")
    model_trains_state_updater = value == "1" || value == "true";
  else if (key == "outdir") outdir = value;
  else if (key == "trace_path") trace_path = value;
  else if (key == "eval_split") eval_split = value;
  else if (key == "eval_policy") eval_policy = value;
  else if (key == "eval_greedy") eval_greedy = value == "1" || value == "true";
  else if (key == "eval_episodes") eval_episodes = std::stoll(value);
  else if (key == "eval_seed") eval_seed = std::stoull(value);
  else return false;
  return true;
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_file(path, RunConfig{});
}

RunConfig RunConfig::from_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (!base.apply(key, value))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown key " + key);
  }
  return base;
}

}  // namespace vedit
