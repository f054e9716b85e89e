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

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vedit/corpus.hpp"
#include "vedit/rng.hpp"

namespace vedit {

// Simulated voice editing session. A sampled sentence is corrupted with
// trailing noise tokens; the agent repeatedly deletes trailing words until
// it matches the intent exactly (reward 0, done), deletes too many
// (reward -overshoot, done), or too few (reward -m, user says "no" again).

constexpr int kNumActions = 15;  // delete 1..15 words
constexpr int kMaxIntent = 14;

struct Observation {
  TokenList words;                // what the screen shows, <= 15 tokens
  std::string speech = "no";      // the user's utterance
};

struct EpisodeState {
  TokenList displayed;
  int intent = 0;         // words remaining to delete
  int initial_intent = 0; // k at reset
  int m = 1;              // "no" count so far, 1 at the first decision
  TokenList clean_prefix;
  bool terminal = false;
};

struct StepDiagnostic {
  enum class Kind { exact, overshoot, undershoot } kind;
  int amount = 0;  // b_t for overshoot, m_t for undershoot, 0 for exact
};

struct StepResult {
  double reward = 0.0;
  bool terminal = false;
  std::optional<Observation> observation;  // absent when terminal
  StepDiagnostic diagnostic;
};

// Pure three-case reward rule, shared with tests as ground truth.
//   action == intent: 0, terminal
//   action  > intent: -(action - intent), terminal
//   action  < intent: -m, not terminal
std::pair<double, bool> reward_oracle(int intent, int action, int m);

// The best achievable episode total for any intent (delete exactly intent
// words on the first action).
double episode_upper_bound(int intent);

class EditEnv {
 public:
  explicit EditEnv(const SentenceStore& store) : store_(&store) {}

  // Sample a sentence, cut it at a uniform point, replace the tail with
  // vocabulary noise. intent = number of noise tokens.
  std::pair<EpisodeState, Observation> reset(Split split, Rng& rng);

  // Deterministic episode construction from a given sentence and cut,
  // exposed for replay and oracle tests.
  std::pair<EpisodeState, Observation> make_episode(const TokenList& sentence,
                                                    int cut, Rng& rng) const;

  StepResult step(EpisodeState& state, int action) const;

  void set_trace(std::ostream* sink) { trace_ = sink; }
  void set_episode_index(long long i) { episode_index_ = i; }

 private:
  const SentenceStore* store_;
  std::ostream* trace_ = nullptr;
  long long episode_index_ = 0;
  mutable int trace_step_ = 0;
};

}  // namespace vedit
