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

#include "vedit/edit_env.hpp"

#include <algorithm>
#include <stdexcept>

namespace vedit {

std::pair<double, bool> reward_oracle(int intent, int action, int m) {
  if (action == intent) return {0.0, true};
  if (action > intent) return {-static_cast<double>(action - intent), true};
  return {-static_cast<double>(m), false};
}

double episode_upper_bound(int intent) {
  (void)intent;
  return 0.0;
}

std::pair<EpisodeState, Observation> EditEnv::reset(Split split, Rng& rng) {
  const TokenList& sentence = store_->sample_sentence(split, rng);
  const int L = static_cast<int>(sentence.size());
  const int cut = static_cast<int>(rng.uniform_int(1, L - 1));
  return make_episode(sentence, cut, rng);
}

std::pair<EpisodeState, Observation> EditEnv::make_episode(
    const TokenList& sentence, int cut, Rng& rng) const {
  const int L = static_cast<int>(sentence.size());
  if (L < 2 || L > kMaxSentenceTokens)
    throw std::invalid_argument("make_episode: sentence length out of [2,15]");
  if (cut < 1 || cut >= L)
    throw std::invalid_argument("make_episode: cut out of [1, L-1]");
  EpisodeState st;
  st.clean_prefix.assign(sentence.begin(), sentence.begin() + cut);
  st.displayed = st.clean_prefix;
  for (int i = cut; i < L; ++i)
    st.displayed.push_back(store_->sample_vocab_token(rng));
  st.intent = L - cut;
  st.initial_intent = st.intent;
  st.m = 1;
  st.terminal = false;
  trace_step_ = 0;
  Observation obs;
  obs.words = st.displayed;
  return {st, obs};
}

StepResult EditEnv::step(EpisodeState& state, int action) const {
  if (state.terminal)
    throw std::logic_error("step: episode already terminal");
  if (action < 1 || action > kNumActions)
    throw std::invalid_argument("step: action " + std::to_string(action) +
                                " outside [1,15]");
  StepResult res;
  const auto [reward, terminal] = reward_oracle(state.intent, action, state.m);
  res.reward = reward;
  res.terminal = terminal;
  if (action == state.intent) {
    res.diagnostic = {StepDiagnostic::Kind::exact, 0};
  } else if (action > state.intent) {
    res.diagnostic = {StepDiagnostic::Kind::overshoot, action - state.intent};
  } else {
    res.diagnostic = {StepDiagnostic::Kind::undershoot, state.m};
  }

  if (trace_)
    *trace_ << "episode=" << episode_index_ << " step=" << trace_step_++
            << " intent=" << state.intent << " action=" << action
            << " reward=" << res.reward << " terminal=" << (terminal ? 1 : 0)
            << "\n";

  if (terminal) {
    state.terminal = true;
    return res;
  }

  // Undershoot: remove the trailing tokens, user says "no" again.
  const int removable =
      std::min(action, static_cast<int>(state.displayed.size()));
  state.displayed.resize(state.displayed.size() -
                         static_cast<std::size_t>(removable));
  state.intent -= action;
  state.m += 1;
  Observation obs;
  obs.words = state.displayed;
  res.observation = std::move(obs);
  return res;
}

}  // namespace vedit
