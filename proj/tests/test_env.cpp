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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "vedit/edit_env.hpp"

using namespace vedit;

namespace {

SentenceStore fixed_length_store(int length, int count) {
  const auto path = std::filesystem::temp_directory_path() /
                    ("vedit_env_" + std::to_string(length) + ".txt");
  std::ofstream out(path);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < length; ++j)
      out << "w" << i << "_" << j << (j + 1 == length ? "" : " ");
    out << "\n";
  }
  out.close();
  return load_corpus(path.string(), 99);
}

EpisodeState synthetic_state(int intent, int m) {
  EpisodeState st;
  st.intent = intent;
  st.initial_intent = intent;
  st.m = m;
  st.clean_prefix = {"clean"};
  for (int i = 0; i < 1 + intent && i < 15; ++i)
    st.displayed.push_back("tok" + std::to_string(i));
  return st;
}

// Exhaustive search over action sequences for the best achievable total.
double best_total(int intent, int m) {
  double best = -1e18;
  for (int a = 1; a <= kNumActions; ++a) {
    const auto [r, terminal] = reward_oracle(intent, a, m);
    const double total = terminal ? r : r + best_total(intent - a, m + 1);
    if (total > best) best = total;
  }
  return best;
}

}  // namespace

TEST_CASE("reward_oracle three-case rule") {
  for (int k = 1; k <= kMaxIntent; ++k) {
    const auto [r, t] = reward_oracle(k, k, 3);
    CHECK(r == 0.0);
    CHECK(t);
  }
  {
    const auto [r, t] = reward_oracle(2, 5, 1);
    CHECK(r == -3.0);
    CHECK(t);
  }
  {
    const auto [r, t] = reward_oracle(7, 3, 4);
    CHECK(r == -4.0);
    CHECK(!t);
  }
}

TEST_CASE("worked example: intent 2, undershoot then overshoot") {
  // First action 1 on intent 2 costs -1; then action 3 on intent 1 at m=2
  // costs -2 and terminates.
  const auto [r1, t1] = reward_oracle(2, 1, 1);
  CHECK(r1 == -1.0);
  CHECK(!t1);
  const auto [r2, t2] = reward_oracle(1, 3, 2);
  CHECK(r2 == -2.0);
  CHECK(t2);
}

TEST_CASE("step equals reward_oracle exhaustively") {
  SentenceStore store = fixed_length_store(10, 4);
  EditEnv env(store);
  for (int intent = 1; intent <= kMaxIntent; ++intent)
    for (int m = 1; m <= 14; ++m)
      for (int action = 1; action <= kNumActions; ++action) {
        EpisodeState st = synthetic_state(intent, m);
        const StepResult res = env.step(st, action);
        const auto [r, t] = reward_oracle(intent, action, m);
        CHECK(res.reward == r);
        CHECK(res.terminal == t);
        if (!t) {
          CHECK(st.intent == intent - action);
          CHECK(st.m == m + 1);
          CHECK(res.observation.has_value());
          CHECK(res.observation->speech == "no");
        } else {
          CHECK(!res.observation.has_value());
          CHECK(st.terminal);
        }
      }
}

TEST_CASE("hand-traced episode: intent 5, five single deletions") {
  SentenceStore store = fixed_length_store(10, 4);
  EditEnv env(store);
  EpisodeState st = synthetic_state(5, 1);
  const double expected[] = {-1, -2, -3, -4, 0};
  double total = 0.0;
  for (int i = 0; i < 5; ++i) {
    const StepResult res = env.step(st, 1);
    CHECK(res.reward == expected[i]);
    CHECK(res.terminal == (i == 4));
    total += res.reward;
  }
  CHECK(total == -10.0);
}

TEST_CASE("step rejects invalid actions and terminal states") {
  SentenceStore store = fixed_length_store(10, 4);
  EditEnv env(store);
  EpisodeState st = synthetic_state(2, 1);
  CHECK_THROWS(env.step(st, 0));
  CHECK_THROWS(env.step(st, 16));
  env.step(st, 2);  // exact -> terminal
  CHECK_THROWS(env.step(st, 1));
}

TEST_CASE("make_episode applies the cut rule") {
  SentenceStore store = fixed_length_store(8, 4);
  EditEnv env(store);
  Rng rng(5);
  const TokenList sentence = store.sentences(Split::train)[0];
  const auto [st, obs] = env.make_episode(sentence, 6, rng);
  CHECK(st.displayed.size() == 8);
  CHECK(st.intent == 2);
  CHECK(st.initial_intent == 2);
  CHECK(st.m == 1);
  for (int i = 0; i < 6; ++i) CHECK(st.displayed[i] == sentence[i]);
  CHECK(obs.words == st.displayed);
  CHECK(obs.speech == "no");
}

TEST_CASE("length-2 sentences always produce intent 1") {
  SentenceStore store = fixed_length_store(2, 6);
  EditEnv env(store);
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const auto [st, obs] = env.reset(Split::train, rng);
    CHECK(st.intent == 1);
    CHECK(st.displayed.size() == 2);
  }
}

TEST_CASE("intent distribution from uniform cuts is uniform") {
  SentenceStore store = fixed_length_store(10, 40);
  EditEnv env(store);
  Rng rng(7);
  std::map<int, int> hist;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto [st, obs] = env.reset(Split::train, rng);
    hist[st.intent]++;
  }
  REQUIRE(hist.size() == 9);  // intents 1..9 for length-10 sentences
  const double expected = n / 9.0;
  for (const auto& [intent, count] : hist) {
    CHECK(intent >= 1);
    CHECK(intent <= 9);
    CHECK(count >= expected * 0.85);
    CHECK(count <= expected * 1.15);
  }
}

TEST_CASE("episodes terminate within intent0 steps, rewards bounded") {
  SentenceStore store = fixed_length_store(15, 30);
  EditEnv env(store);
  Rng rng(8);
  Rng action_rng(9);
  for (int ep = 0; ep < 10000; ++ep) {
    auto [st, obs] = env.reset(Split::train, rng);
    const int k = st.initial_intent;
    double total = 0.0;
    int steps = 0;
    while (!st.terminal) {
      const int a = static_cast<int>(action_rng.uniform_int(1, kNumActions));
      const StepResult res = env.step(st, a);
      total += res.reward;
      ++steps;
      CHECK(st.displayed.size() <= 15);
      if (!st.terminal)
        CHECK(st.displayed.size() == st.clean_prefix.size() +
                                         static_cast<std::size_t>(st.intent));
      REQUIRE(steps <= k);
    }
    CHECK(total <= 0.0);
    // worst case: k-1 undershoots costing 1..k-1, then a final overshoot of
    // at most 14
    CHECK(total >= -(k * (k - 1)) / 2.0 - 14.0);
  }
}

namespace {

// Exact expected total reward of the uniform-random policy from (intent, m).
double uniform_policy_value(int intent, int m) {
  double acc = 0.0;
  for (int a = 1; a <= kNumActions; ++a) {
    const auto [r, terminal] = reward_oracle(intent, a, m);
    acc += terminal ? r : r + uniform_policy_value(intent - a, m + 1);
  }
  return acc / kNumActions;
}

}  // namespace

TEST_CASE("uniform-random policy matches the exhaustive expectation") {
  // length-10 sentences -> intents uniform on [1,9]
  SentenceStore store = fixed_length_store(10, 40);
  EditEnv env(store);
  double expected = 0.0;
  for (int k = 1; k <= 9; ++k) expected += uniform_policy_value(k, 1) / 9.0;

  Rng env_rng(71), act_rng(72);
  double total = 0.0;
  const int episodes = 20000;
  for (int ep = 0; ep < episodes; ++ep) {
    auto [st, obs] = env.reset(Split::train, env_rng);
    while (!st.terminal)
      total += env.step(st, static_cast<int>(act_rng.uniform_int(1, 15))).reward;
  }
  const double mean = total / episodes;
  CHECK(mean == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("optimal play always achieves zero (exhaustive, intent <= 6)") {
  for (int k = 1; k <= 6; ++k) {
    CHECK(best_total(k, 1) == 0.0);
    CHECK(episode_upper_bound(k) == 0.0);
  }
  CHECK(episode_upper_bound(14) == 0.0);
}

TEST_CASE("trace mode logs one parsable record per step") {
  SentenceStore store = fixed_length_store(10, 4);
  EditEnv env(store);
  std::ostringstream trace;
  env.set_trace(&trace);
  env.set_episode_index(3);
  Rng rng(10);
  EpisodeState st = synthetic_state(3, 1);
  env.step(st, 1);
  env.step(st, 2);
  std::istringstream in(trace.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    std::map<std::string, std::string> kv;
    std::istringstream ls(line);
    std::string field;
    while (ls >> field) {
      const auto eq = field.find('=');
      REQUIRE(eq != std::string::npos);
      kv[field.substr(0, eq)] = field.substr(eq + 1);
    }
    CHECK(kv.count("episode"));
    CHECK(kv.count("step"));
    CHECK(kv.count("intent"));
    CHECK(kv.count("action"));
    CHECK(kv.count("reward"));
    CHECK(kv.count("terminal"));
    CHECK(kv["episode"] == "3");
  }
  CHECK(lines == 2);
}
