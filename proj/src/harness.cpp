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

#include "vedit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace vedit {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Tensor<float> longs_to_tensor(const long long* data, int n) {
  Tensor<float> t({n});
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = static_cast<float>(data[i]);
  return t;
}

}  // namespace

Agent::Agent(const NetDims& d, const EmbeddingTable& t, bool with_model,
             Rng& init)
    : dims(d), table(t), su(d, init), ac(d, init) {
  if (with_model) model = std::make_unique<DynModel<float>>(d, init);
}

Agent Agent::from_config(const RunConfig& cfg, Rng& init_rng) {
  const NetDims dims = NetDims::from_name(cfg.preset);
  EmbeddingTable table =
      cfg.embedding_mode == "file"
          ? EmbeddingTable::from_file(cfg.embedding_file, dims.d_e)
          : EmbeddingTable::deterministic(dims.d_e);
  return Agent(dims, table, cfg.algorithm == "mbac", init_rng);
}

Agent Agent::from_checkpoint(const Checkpoint& ck) {
  const RunConfig cfg = config_from_checkpoint(ck);
  Rng throwaway(0);
  const bool with_model = cfg.algorithm == "mbac" && !ck.is_lite();
  const NetDims dims = NetDims::from_name(cfg.preset);
  EmbeddingTable table =
      cfg.embedding_mode == "file"
          ? EmbeddingTable::from_file(cfg.embedding_file, dims.d_e)
          : EmbeddingTable::deterministic(dims.d_e);
  Agent agent(dims, table, with_model, throwaway);
  store_from_checkpoint(agent.su.store(), "su", ck);
  store_from_checkpoint(agent.ac.store(), "ac", ck);
  if (with_model) store_from_checkpoint(agent.model->store(), "model", ck);
  return agent;
}

void config_to_checkpoint(const RunConfig& cfg, Checkpoint& ck) {
  ck.set("config.algorithm", cfg.algorithm);
  ck.set("config.preset", cfg.preset);
  ck.set("config.corpus", cfg.corpus_path);
  ck.set("config.corpus_max", std::to_string(cfg.corpus_max));
  ck.set("config.seed", std::to_string(cfg.seed));
  ck.set("config.budget", std::to_string(cfg.budget));
  ck.set("config.gamma", fmt_double(cfg.gamma));
  ck.set("config.beta", fmt_double(cfg.beta));
  ck.set("config.lr_model", fmt_double(cfg.lr_model));
  ck.set("config.lr_actor", fmt_double(cfg.lr_actor));
  ck.set("config.lr_critic", fmt_double(cfg.lr_critic));
  ck.set("config.clip_norm", fmt_double(cfg.clip_norm));
  ck.set("config.planner_temperature", fmt_double(cfg.planner_temperature));
  ck.set("config.embedding_mode", cfg.embedding_mode);
  ck.set("config.embedding_file", cfg.embedding_file);
  ck.set("config.model_trains_state_updater",
         cfg.model_trains_state_updater ? "1" : "0");
}

RunConfig config_from_checkpoint(const Checkpoint& ck) {
  RunConfig cfg;
  cfg.algorithm = ck.get("config.algorithm");
  cfg.preset = ck.get("config.preset");
  cfg.corpus_path = ck.get("config.corpus");
  cfg.corpus_max = std::stoull(ck.get("config.corpus_max"));
  cfg.seed = std::stoull(ck.get("config.seed"));
  cfg.budget = std::stoll(ck.get("config.budget"));
  cfg.gamma = std::stod(ck.get("config.gamma"));
  cfg.beta = std::stod(ck.get("config.beta"));
  cfg.lr_model = std::stod(ck.get("config.lr_model"));
  cfg.lr_actor = std::stod(ck.get("config.lr_actor"));
  cfg.lr_critic = std::stod(ck.get("config.lr_critic"));
  cfg.clip_norm = std::stod(ck.get("config.clip_norm"));
  cfg.planner_temperature =
      std::stod(ck.get_or("config.planner_temperature", "1"));
  cfg.embedding_mode = ck.get("config.embedding_mode");
  cfg.embedding_file = ck.get("config.embedding_file");
  cfg.model_trains_state_updater =
      ck.get("config.model_trains_state_updater") == "1";
  return cfg;
}

namespace {

struct EpisodeOutcome {
  InteractionRecord rec;
  int initial_intent = 0;
  long long incidents = 0;
};

EpisodeOutcome run_mbac_episode(Agent& agent, EditEnv& env, RngStreams& streams,
                                const RunConfig& cfg) {
  EpisodeOutcome out;
  auto [st, obs0] = env.reset(Split::train, streams.env);
  out.initial_intent = st.initial_intent;
  Observation obs = obs0;

  UpdateOpts<float> ac_opts;
  ac_opts.beta = static_cast<float>(cfg.beta);
  ac_opts.lr_actor = static_cast<float>(cfg.lr_actor);
  ac_opts.lr_critic = static_cast<float>(cfg.lr_critic);
  ac_opts.clip_norm = static_cast<float>(cfg.clip_norm);
  ModelUpdateOpts<float> m_opts;
  m_opts.lr = static_cast<float>(cfg.lr_model);
  m_opts.clip_norm = static_cast<float>(cfg.clip_norm);
  m_opts.train_state_updater = cfg.model_trains_state_updater;
  const float gamma = static_cast<float>(cfg.gamma);

  AgentState<float> s_prev = agent.su.init_state();
  int a_prev = 0;
  float r_prev = 0.0f;
  StateUpdateCtx<float> ctx;
  AgentState<float> S;
  bool have_state = false;

  double acc_state = 0.0, acc_reward = 0.0, acc_actor = 0.0, acc_critic = 0.0;
  int n_state_samples = 0;

  while (true) {
    if (!have_state)
      S = agent.su.forward(s_prev, a_prev, r_prev, obs, agent.table, &ctx);
    have_state = false;

    const PlannerOutput<float> pout =
        plan(S, *agent.model, agent.ac, gamma,
             static_cast<float>(cfg.planner_temperature));
    const int action = sample_action(std::span<const float>(pout.policy),
                                     streams.action);
    const int intent_now = st.intent;
    const StepResult res = env.step(st, action);
    out.rec.actions.push_back(action);
    out.rec.abs_errors.push_back(std::abs(action - intent_now));
    out.rec.reward += res.reward;
    out.rec.steps += 1;

    const auto ac_rec =
        mbac_update(agent.ac, agent.su, ctx, S,
                    std::span<const float>(pout.policy), pout.value, ac_opts);
    if (ac_rec.skipped) ++out.incidents;
    acc_actor += ac_rec.actor;
    acc_critic += ac_rec.critic;

    if (res.terminal) {
      const auto m_rec =
          model_update(*agent.model, S, action, static_cast<float>(res.reward),
                       nullptr, m_opts, &agent.su, &ctx);
      if (m_rec.skipped) ++out.incidents;
      acc_reward += m_rec.reward;
      break;
    }

    const Observation obs_next = *res.observation;
    StateUpdateCtx<float> ctx_next;
    AgentState<float> S_next = agent.su.forward(
        S, action, static_cast<float>(res.reward), obs_next, agent.table,
        &ctx_next);
    const auto m_rec =
        model_update(*agent.model, S, action, static_cast<float>(res.reward),
                     &S_next.mat, m_opts, &agent.su, &ctx);
    if (m_rec.skipped) ++out.incidents;
    acc_state += m_rec.state;
    acc_reward += m_rec.reward;
    ++n_state_samples;

    s_prev = S;
    a_prev = action;
    r_prev = static_cast<float>(res.reward);
    obs = obs_next;
    if (!cfg.model_trains_state_updater) {
      // nothing touched the state-updater since S_next was computed, so the
      // line-5 recomputation of the next loop would be bit-identical
      S = std::move(S_next);
      ctx = std::move(ctx_next);
      have_state = true;
    }
  }

  const int steps = out.rec.steps;
  out.rec.loss_state =
      n_state_samples > 0 ? acc_state / n_state_samples : 0.0;
  out.rec.loss_reward = steps > 0 ? acc_reward / steps : 0.0;
  out.rec.loss_actor = steps > 0 ? acc_actor / steps : 0.0;
  out.rec.loss_critic = steps > 0 ? acc_critic / steps : 0.0;
  return out;
}

EpisodeOutcome run_a2c_episode(Agent& agent, EditEnv& env, RngStreams& streams,
                               const RunConfig& cfg) {
  EpisodeOutcome out;
  auto [st, obs0] = env.reset(Split::train, streams.env);
  out.initial_intent = st.initial_intent;
  Observation obs = obs0;

  AgentState<float> s_prev = agent.su.init_state();
  int a_prev = 0;
  float r_prev = 0.0f;
  std::vector<A2cStep<float>> steps;

  while (true) {
    StateUpdateCtx<float> ctx;
    AgentState<float> S =
        agent.su.forward(s_prev, a_prev, r_prev, obs, agent.table, &ctx);
    ActorCriticCtx<float> acctx;
    const ActorCriticOut<float> fwd = agent.ac.forward(S.mat, &acctx);
    const int action =
        sample_action(std::span<const float>(fwd.pi), streams.action);
    const int intent_now = st.intent;
    const StepResult res = env.step(st, action);
    out.rec.actions.push_back(action);
    out.rec.abs_errors.push_back(std::abs(action - intent_now));
    out.rec.reward += res.reward;
    out.rec.steps += 1;

    A2cStep<float> step;
    step.su_ctx = std::move(ctx);
    step.ac_ctx = std::move(acctx);
    step.pi = fwd.pi;
    step.value = fwd.value;
    step.action = action;
    step.reward = static_cast<float>(res.reward);
    steps.push_back(std::move(step));

    if (res.terminal) break;
    s_prev = std::move(S);
    a_prev = action;
    r_prev = static_cast<float>(res.reward);
    obs = *res.observation;
  }

  const auto rec = a2c_update(agent.ac, agent.su, steps, 0.0f,
                              static_cast<float>(cfg.gamma),
                              static_cast<float>(cfg.beta),
                              static_cast<float>(cfg.lr_actor),
                              static_cast<float>(cfg.clip_norm));
  if (rec.skipped) ++out.incidents;
  out.rec.loss_policy = rec.policy;
  out.rec.loss_value = rec.value;
  return out;
}

void save_run_checkpoint(const std::string& path, const RunConfig& cfg,
                         Agent& agent, const RngStreams& streams,
                         MetricsWriter& metrics, long long interactions,
                         long long incidents,
                         const std::array<long long, kMaxIntent>& intent_hist) {
  Checkpoint ck;
  ck.set("format_version", "1");
  config_to_checkpoint(cfg, ck);
  ck.set("lite", "0");
  ck.set("interactions", std::to_string(interactions));
  ck.set("numeric_incidents", std::to_string(incidents));
  ck.set("rng_env", streams.env.state_hex());
  ck.set("rng_init", streams.init.state_hex());
  ck.set("rng_action", streams.action.state_hex());
  store_to_checkpoint(agent.su.store(), "su", ck);
  store_to_checkpoint(agent.ac.store(), "ac", ck);
  if (agent.model) store_to_checkpoint(agent.model->store(), "model", ck);

  const auto reward_win = metrics.reward_window().snapshot();
  const auto abs_win = metrics.abs_err_window().snapshot();
  if (!reward_win.empty())
    ck.add_array("metrics.reward_window",
                 Tensor<float>({static_cast<int>(reward_win.size())}, reward_win));
  if (!abs_win.empty())
    ck.add_array("metrics.abs_err_window",
                 Tensor<float>({static_cast<int>(abs_win.size())}, abs_win));
  ck.add_array("metrics.action_counts",
               longs_to_tensor(metrics.action_counts().data(), kNumActions));
  ck.add_array("metrics.intent_hist",
               longs_to_tensor(intent_hist.data(), kMaxIntent));
  const long long total_steps = metrics.total_steps();
  ck.add_array("metrics.total_steps", longs_to_tensor(&total_steps, 1));
  ck.save(path);
}

}  // namespace

TrainResult train(const RunConfig& cfg_in, const std::string& resume_path) {
  RunConfig cfg = cfg_in;
  long long start_interaction = 0;
  Checkpoint resumed;
  const bool resuming = !resume_path.empty();
  if (resuming) {
    resumed = Checkpoint::load(resume_path);
    if (resumed.is_lite())
      throw std::runtime_error("cannot resume training from a lite checkpoint");
    RunConfig from_ck = config_from_checkpoint(resumed);
    from_ck.budget = cfg_in.budget;
    from_ck.outdir = cfg_in.outdir;
    from_ck.trace_path = cfg_in.trace_path;
    cfg = from_ck;
    start_interaction = std::stoll(resumed.get("interactions"));
  }
  cfg.validate();

  std::filesystem::create_directories(cfg.outdir);
  const std::string metrics_path = cfg.outdir + "/metrics.csv";
  const std::string summary_path = cfg.outdir + "/summary.txt";
  const std::string ckpt_path = cfg.outdir + "/checkpoint.vck";

  const SentenceStore store =
      load_corpus(cfg.corpus_path, cfg.seed, cfg.corpus_max);
  EditEnv env(store);
  std::ofstream trace_file;
  if (!cfg.trace_path.empty()) {
    trace_file.open(cfg.trace_path);
    if (!trace_file)
      throw std::runtime_error("cannot write trace file: " + cfg.trace_path);
    env.set_trace(&trace_file);
  }

  RngStreams streams = RngStreams::from_seed(cfg.seed);
  Agent agent = Agent::from_config(cfg, streams.init);

  MetricsWriter metrics;
  metrics.open(metrics_path, cfg.algorithm == "mbac");
  long long incidents = 0;
  std::array<long long, kMaxIntent> intent_hist{};

  if (resuming) {
    store_from_checkpoint(agent.su.store(), "su", resumed);
    store_from_checkpoint(agent.ac.store(), "ac", resumed);
    if (agent.model)
      store_from_checkpoint(agent.model->store(), "model", resumed);
    streams.env = Rng::from_state_hex(resumed.get("rng_env"));
    streams.init = Rng::from_state_hex(resumed.get("rng_init"));
    streams.action = Rng::from_state_hex(resumed.get("rng_action"));
    incidents = std::stoll(resumed.get("numeric_incidents"));
    if (const auto* w = resumed.find_array("metrics.reward_window"))
      metrics.reward_window().restore(
          std::vector<float>(w->data(), w->data() + w->size()));
    if (const auto* w = resumed.find_array("metrics.abs_err_window"))
      metrics.abs_err_window().restore(
          std::vector<float>(w->data(), w->data() + w->size()));
    if (const auto* c = resumed.find_array("metrics.action_counts")) {
      std::array<long long, kNumActions> counts{};
      for (int i = 0; i < kNumActions; ++i)
        counts[static_cast<std::size_t>(i)] =
            static_cast<long long>((*c)[static_cast<std::size_t>(i)]);
      metrics.set_action_counts(counts);
    }
    if (const auto* h = resumed.find_array("metrics.intent_hist"))
      for (int i = 0; i < kMaxIntent; ++i)
        intent_hist[static_cast<std::size_t>(i)] =
            static_cast<long long>((*h)[static_cast<std::size_t>(i)]);
    if (const auto* t = resumed.find_array("metrics.total_steps"))
      metrics.set_total_steps(static_cast<long long>((*t)[0]));
  }

  for (long long i = start_interaction; i < cfg.budget; ++i) {
    env.set_episode_index(i);
    EpisodeOutcome out = cfg.algorithm == "mbac"
                             ? run_mbac_episode(agent, env, streams, cfg)
                             : run_a2c_episode(agent, env, streams, cfg);
    out.rec.interaction = i + 1;
    metrics.record(out.rec);
    incidents += out.incidents;
    ++intent_hist[static_cast<std::size_t>(out.initial_intent - 1)];
    if (out.incidents > 0)
      std::fprintf(stderr,
                   "numeric incident: update skipped at interaction %lld\n",
                   i + 1);
  }

  const long long completed = std::max(start_interaction, cfg.budget);
  TrainResult result;
  result.summary.algorithm = cfg.algorithm;
  result.summary.interactions = completed;
  result.summary.total_steps = metrics.total_steps();
  result.summary.final_reward_ma1000 = metrics.reward_ma();
  result.summary.final_abs_err_ma300 = metrics.abs_err_ma();
  result.summary.action_entropy = metrics.action_entropy();
  result.summary.numeric_incidents = incidents;
  result.summary.intent_histogram = intent_hist;
  write_summary(summary_path, result.summary);
  metrics.close();

  save_run_checkpoint(ckpt_path, cfg, agent, streams, metrics, completed,
                      incidents, intent_hist);
  result.checkpoint_path = ckpt_path;
  result.metrics_path = metrics_path;
  result.summary_path = summary_path;
  return result;
}

namespace {

double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

EvalSummary evaluate(const Checkpoint& ck, const EvalOptions& opts) {
  if (opts.policy != "actor" && opts.policy != "planner")
    throw std::invalid_argument("eval policy must be actor or planner");
  Agent agent = Agent::from_checkpoint(ck);
  const RunConfig cfg = config_from_checkpoint(ck);
  if (opts.policy == "planner" && !agent.model)
    throw std::runtime_error(
        "policy=planner needs model parameters, but this checkpoint has none "
        "(lite or a2c)");

  const std::string corpus_path =
      opts.corpus_override.empty() ? cfg.corpus_path : opts.corpus_override;
  const SentenceStore store = load_corpus(corpus_path, cfg.seed, cfg.corpus_max);
  EditEnv env(store);

  Rng env_rng(SplitMix64(opts.seed ^ 0x6576656e76ULL).next());
  Rng act_rng(SplitMix64(opts.seed ^ 0x65766163ULL).next());
  const float gamma = static_cast<float>(cfg.gamma);

  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(opts.episodes));
  double abs_err_sum = 0.0;
  long long abs_err_count = 0;

  for (long long ep = 0; ep < opts.episodes; ++ep) {
    auto [st, obs0] = env.reset(opts.split, env_rng);
    Observation obs = obs0;
    AgentState<float> s_prev = agent.su.init_state();
    int a_prev = 0;
    float r_prev = 0.0f;
    double total = 0.0;
    while (true) {
      const AgentState<float> S =
          agent.su.forward(s_prev, a_prev, r_prev, obs, agent.table, nullptr);
      int action;
      if (opts.policy == "actor") {
        const ActorCriticOut<float> fwd = agent.ac.forward(S.mat, nullptr);
        action = opts.greedy
                     ? greedy_action(std::span<const float>(fwd.pi))
                     : sample_action(std::span<const float>(fwd.pi), act_rng);
      } else {
        const PlannerOutput<float> pout =
            plan(S, *agent.model, agent.ac, gamma,
                 static_cast<float>(cfg.planner_temperature));
        action =
            opts.greedy
                ? greedy_action(std::span<const float>(pout.returns))
                : sample_action(std::span<const float>(pout.policy), act_rng);
      }
      const int intent_now = st.intent;
      const StepResult res = env.step(st, action);
      total += res.reward;
      abs_err_sum += std::abs(action - intent_now);
      ++abs_err_count;
      if (res.terminal) break;
      s_prev = S;
      a_prev = action;
      r_prev = static_cast<float>(res.reward);
      obs = *res.observation;
    }
    rewards.push_back(total);
  }

  std::sort(rewards.begin(), rewards.end());
  EvalSummary s;
  s.episodes = opts.episodes;
  double sum = 0.0;
  for (double r : rewards) sum += r;
  s.mean_reward = rewards.empty() ? 0.0 : sum / static_cast<double>(rewards.size());
  s.median_reward = quantile(rewards, 0.5);
  s.q25_reward = quantile(rewards, 0.25);
  s.q75_reward = quantile(rewards, 0.75);
  s.mean_abs_err =
      abs_err_count > 0 ? abs_err_sum / static_cast<double>(abs_err_count) : 0.0;
  return s;
}

}  // namespace vedit
