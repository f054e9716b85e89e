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

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "vedit/harness.hpp"

namespace {

using namespace vedit;

struct TrainFlags {
  std::string config_file;
  std::string resume;
  RunConfig cfg;
};

void add_train_options(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--config", f.config_file, "key=value config file");
  cmd->add_option("--resume", f.resume, "checkpoint to continue from");
  cmd->add_option("--algorithm", f.cfg.algorithm, "mbac | a2c");
  cmd->add_option("--preset", f.cfg.preset, "desk | paper");
  cmd->add_option("--corpus", f.cfg.corpus_path, "sentence corpus file");
  cmd->add_option("--corpus-max", f.cfg.corpus_max,
                  "cap on usable sentences (0 = all)");
  cmd->add_option("--seed", f.cfg.seed, "master seed");
  cmd->add_option("--budget", f.cfg.budget, "total training interactions");
  cmd->add_option("--gamma", f.cfg.gamma, "discount rate");
  cmd->add_option("--beta", f.cfg.beta, "entropy weight");
  cmd->add_option("--lr-model", f.cfg.lr_model, "model learning rate");
  cmd->add_option("--lr-actor", f.cfg.lr_actor, "actor learning rate");
  cmd->add_option("--lr-critic", f.cfg.lr_critic, "critic learning rate");
  cmd->add_option("--clip-norm", f.cfg.clip_norm, "global gradient clip");
  cmd->add_option("--planner-temperature", f.cfg.planner_temperature,
                  "softmax temperature for the planner policy");
  cmd->add_option("--embedding-mode", f.cfg.embedding_mode, "hash | file");
  cmd->add_option("--embedding-file", f.cfg.embedding_file,
                  "token vector file for embedding-mode=file");
  cmd->add_flag("--joint-model-grads", f.cfg.model_trains_state_updater,
                "backprop the model state loss into the state updater");
  cmd->add_option("--out", f.cfg.outdir, "output directory");
  cmd->add_option("--trace", f.cfg.trace_path, "environment trace file");
}

// Flags win over the config file; the file wins over defaults.
RunConfig resolve_config(const CLI::App* cmd, const TrainFlags& f) {
  if (f.config_file.empty()) return f.cfg;
  RunConfig cfg = RunConfig::from_file(f.config_file);
  const RunConfig defaults;
  auto overridden = [&](const char* name) {
    return cmd->count(name) > 0;
  };
  if (overridden("--algorithm")) cfg.algorithm = f.cfg.algorithm;
  if (overridden("--preset")) cfg.preset = f.cfg.preset;
  if (overridden("--corpus")) cfg.corpus_path = f.cfg.corpus_path;
  if (overridden("--corpus-max")) cfg.corpus_max = f.cfg.corpus_max;
  if (overridden("--seed")) cfg.seed = f.cfg.seed;
  if (overridden("--budget")) cfg.budget = f.cfg.budget;
  if (overridden("--gamma")) cfg.gamma = f.cfg.gamma;
  if (overridden("--beta")) cfg.beta = f.cfg.beta;
  if (overridden("--lr-model")) cfg.lr_model = f.cfg.lr_model;
  if (overridden("--lr-actor")) cfg.lr_actor = f.cfg.lr_actor;
  if (overridden("--lr-critic")) cfg.lr_critic = f.cfg.lr_critic;
  if (overridden("--clip-norm")) cfg.clip_norm = f.cfg.clip_norm;
  if (overridden("--planner-temperature"))
    cfg.planner_temperature = f.cfg.planner_temperature;
  if (overridden("--embedding-mode")) cfg.embedding_mode = f.cfg.embedding_mode;
  if (overridden("--embedding-file")) cfg.embedding_file = f.cfg.embedding_file;
  if (overridden("--joint-model-grads"))
    cfg.model_trains_state_updater = f.cfg.model_trains_state_updater;
  if (overridden("--out")) cfg.outdir = f.cfg.outdir;
  if (overridden("--trace")) cfg.trace_path = f.cfg.trace_path;
  (void)defaults;
  return cfg;
}

int cmd_train(const CLI::App* cmd, const TrainFlags& f) {
  const RunConfig cfg = resolve_config(cmd, f);
  const TrainResult result = train(cfg, f.resume);
  std::cout << "trained " << result.summary.interactions
            << " interactions (" << result.summary.total_steps << " steps)\n"
            << "reward ma1000: " << result.summary.final_reward_ma1000 << "\n"
            << "abs err ma300: " << result.summary.final_abs_err_ma300 << "\n"
            << "checkpoint: " << result.checkpoint_path << "\n"
            << "metrics: " << result.metrics_path << "\n";
  return 0;
}

int cmd_eval(const std::string& ckpt, const EvalOptions& opts) {
  const Checkpoint ck = Checkpoint::load(ckpt);
  const EvalSummary s = evaluate(ck, opts);
  std::printf("episodes: %lld\n", s.episodes);
  std::printf("mean reward: %.6f\n", s.mean_reward);
  std::printf("median reward: %.6f\n", s.median_reward);
  std::printf("q25 reward: %.6f\n", s.q25_reward);
  std::printf("q75 reward: %.6f\n", s.q75_reward);
  std::printf("mean abs err: %.6f\n", s.mean_abs_err);
  return 0;
}

int cmd_distill(const std::string& in_path, const std::string& out_path) {
  bool warned = false;
  Checkpoint ck = detach_lite(Checkpoint::load(in_path), &warned);
  if (warned)
    std::cerr << "warning: checkpoint is already lite; copying unchanged\n";
  ck.save(out_path);
  std::cout << "wrote " << out_path << " (" << ck.arrays.size()
            << " arrays)\n";
  return 0;
}

int cmd_oracle(int max_intent, int m) {
  std::printf("%-7s", "intent");
  for (int a = 1; a <= kNumActions; ++a) std::printf("%7s%d", "a", a);
  std::printf("\n");
  for (int k = 1; k <= max_intent; ++k) {
    std::printf("%-7d", k);
    for (int a = 1; a <= kNumActions; ++a) {
      const auto [r, terminal] = reward_oracle(k, a, m);
      std::printf("%7.0f%s", r, terminal ? "T" : " ");
    }
    std::printf("\n");
  }
  return 0;
}

int cmd_gradcheck() {
  const double worst = run_gradcheck_suite(std::cout);
  return worst < 1e-4 ? 0 : 1;
}

int cmd_demo(const std::string& ckpt, const std::string& policy, bool greedy,
             uint64_t seed) {
  const Checkpoint ck = Checkpoint::load(ckpt);
  Agent agent = Agent::from_checkpoint(ck);
  const RunConfig cfg = config_from_checkpoint(ck);
  if (policy == "planner" && !agent.model) {
    std::cerr << "error: planner policy needs a full (non-lite) mbac "
                 "checkpoint\n";
    return 1;
  }
  Rng act_rng(SplitMix64(seed ^ 0x64656d6fULL).next());
  const float gamma = static_cast<float>(cfg.gamma);

  std::cout << "Interactive editing session. Type a sentence, then say 'no'\n"
               "to have trailing words deleted; answer 'no' again to delete\n"
               "more, or 'ok' to accept. Empty line or EOF quits.\n";
  std::string line;
  while (true) {
    std::cout << "\ndictate> " << std::flush;
    if (!std::getline(std::cin, line) || line.empty()) break;
    TokenList shown = tokenize(line);
    if (shown.size() < 2) {
      std::cout << "need at least 2 words\n";
      continue;
    }
    std::cout << "[screen] ";
    for (std::size_t i = 0; i < shown.size(); ++i)
      std::cout << (i ? " " : "") << shown[i];
    std::cout << "\n";

    AgentState<float> s_prev = agent.su.init_state();
    int a_prev = 0;
    float r_prev = 0.0f;
    int m = 1;
    while (true) {
      std::cout << "you (no = fix the tail, ok = accept)> " << std::flush;
      std::string answer;
      if (!std::getline(std::cin, answer) || answer == "ok" || answer.empty())
        break;
      if (answer != "no") {
        std::cout << "please answer ok or no\n";
        continue;
      }
      Observation obs;
      obs.words = shown;
      const AgentState<float> S =
          agent.su.forward(s_prev, a_prev, r_prev, obs, agent.table, nullptr);
      int action;
      if (policy == "planner") {
        const PlannerOutput<float> pout =
            plan(S, *agent.model, agent.ac, gamma,
                 static_cast<float>(cfg.planner_temperature));
        action = greedy
                     ? greedy_action(std::span<const float>(pout.returns))
                     : sample_action(std::span<const float>(pout.policy),
                                     act_rng);
      } else {
        const ActorCriticOut<float> fwd = agent.ac.forward(S.mat, nullptr);
        action = greedy
                     ? greedy_action(std::span<const float>(fwd.pi))
                     : sample_action(std::span<const float>(fwd.pi), act_rng);
      }
      const int removed =
          std::min<int>(action, static_cast<int>(shown.size()));
      shown.resize(shown.size() - static_cast<std::size_t>(removed));
      std::cout << "agent deletes " << action << " -> [";
      for (std::size_t i = 0; i < shown.size(); ++i)
        std::cout << (i ? " " : "") << shown[i];
      std::cout << "]\n";
      if (shown.empty()) {
        std::cout << "(everything deleted)\n";
        break;
      }
      s_prev = S;
      a_prev = action;
      r_prev = static_cast<float>(-m);  // the next "no" implies undershoot
      m += 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voice document-editing RL workbench"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  CLI::App* train_cmd =
      app.add_subcommand("train", "train an agent on a sentence corpus");
  add_train_options(train_cmd, train_flags);

  std::string eval_ckpt;
  EvalOptions eval_opts;
  std::string eval_split = "test";
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "evaluate a checkpoint, no learning");
  eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint file")
      ->required();
  eval_cmd->add_option("--split", eval_split, "train | test");
  eval_cmd->add_option("--policy", eval_opts.policy, "actor | planner");
  eval_cmd->add_flag("--greedy", eval_opts.greedy,
                     "argmax instead of sampling");
  eval_cmd->add_option("--episodes", eval_opts.episodes, "episode count");
  eval_cmd->add_option("--seed", eval_opts.seed, "evaluation seed");
  eval_cmd->add_option("--corpus", eval_opts.corpus_override,
                       "override the checkpoint's corpus path");

  std::string distill_in, distill_out;
  CLI::App* distill_cmd = app.add_subcommand(
      "distill", "detach model and planner, keep the model-free agent");
  distill_cmd->add_option("--checkpoint", distill_in, "input checkpoint")
      ->required();
  distill_cmd->add_option("--out", distill_out, "output checkpoint")
      ->required();

  CLI::App* gradcheck_cmd = app.add_subcommand(
      "gradcheck", "finite-difference check of every gradient path");

  int oracle_max_intent = 14;
  int oracle_m = 1;
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "print the exhaustive reward table");
  oracle_cmd->add_option("--max-intent", oracle_max_intent,
                         "rows to print (1..14)");
  oracle_cmd->add_option("--m", oracle_m, "step count within the interaction");

  std::string demo_ckpt;
  std::string demo_policy = "actor";
  bool demo_greedy = false;
  uint64_t demo_seed = 1;
  CLI::App* demo_cmd =
      app.add_subcommand("demo", "interactive terminal editing session");
  demo_cmd->add_option("--checkpoint", demo_ckpt, "checkpoint file")
      ->required();
  demo_cmd->add_option("--policy", demo_policy, "actor | planner");
  demo_cmd->add_flag("--greedy", demo_greedy, "argmax instead of sampling");
  demo_cmd->add_option("--seed", demo_seed, "sampling seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(train_cmd, train_flags);
    if (eval_cmd->parsed()) {
      eval_opts.split = eval_split == "train" ? Split::train : Split::test;
      if (eval_split != "train" && eval_split != "test")
        throw std::invalid_argument("--split must be train or test");
      return cmd_eval(eval_ckpt, eval_opts);
    }
    if (distill_cmd->parsed()) return cmd_distill(distill_in, distill_out);
    if (gradcheck_cmd->parsed()) return cmd_gradcheck();
    if (oracle_cmd->parsed()) {
      if (oracle_max_intent < 1 || oracle_max_intent > kMaxIntent)
        throw std::invalid_argument("--max-intent must be in [1,14]");
      if (oracle_m < 1) throw std::invalid_argument("--m must be >= 1");
      return cmd_oracle(oracle_max_intent, oracle_m);
    }
    if (demo_cmd->parsed())
      return cmd_demo(demo_ckpt, demo_policy, demo_greedy, demo_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
