#include "pddlenv/bench.hpp"

#include <chrono>
#include <cstdio>
#include <thread>

#include "pddlenv/library.hpp"
#include "pddlenv/pddl.hpp"

namespace pddlenv::bench {

namespace {

using Clock = std::chrono::steady_clock;

EnvConfig rollout_config(const Env& env, const RolloutOptions& o) {
  EnvConfig cfg = env.config();
  cfg.dynamic_action_space = o.dynamic_actions;
  cfg.raise_error_on_invalid_action = o.raise_on_invalid;
  cfg.max_episode_length = o.horizon;
  cfg.seed = o.seed;
  return cfg;
}

EpisodeRecord run_episode(Env& env, Rng& policy, std::size_t horizon) {
  EpisodeRecord rec;
  rec.problem = env.reset().second.problem;
  for (std::size_t t = 0; t < horizon; ++t) {
    GroundAction action;
    try {
      action = env.sample_action(env.state(), policy);
    } catch (const DeadEndError&) {
      rec.dead_end = true;
      break;
    }
    std::optional<StepResult> r;
    try {
      r = env.step(action);
    } catch (const InvalidActionError&) {
      rec.steps.push_back({std::move(action), 0.0, false, std::nullopt, true});
      break;
    }
    rec.steps.push_back({std::move(action), r->reward, r->done, r->info.effect_index, false});
    if (r->done) {
      rec.reached_goal = r->reward == 1.0;
      break;
    }
  }
  return rec;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::uint64_t policy_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

Rollout run_random_rollouts(const Env& env, const std::string& name, const RolloutOptions& options) {
  if (options.episodes == 0 || options.horizon == 0) throw ContractError("episodes and horizon must be at least 1");
  EnvConfig cfg = rollout_config(env, options);
  if (options.warmup) {
    Env warm = env.with_config(cfg);
    Rng policy(policy_seed(options.seed));
    run_episode(warm, policy, options.horizon);
  }

  Env run = env.with_config(cfg);
  Rng policy(policy_seed(options.seed));
  Rollout out;
  out.options = options;
  out.episodes.reserve(options.episodes);
  auto t0 = Clock::now();
  for (std::size_t e = 0; e < options.episodes; ++e) out.episodes.push_back(run_episode(run, policy, options.horizon));
  double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  RolloutStats& s = out.stats;
  s.env = name;
  s.episodes = options.episodes;
  s.horizon = options.horizon;
  s.seed = options.seed;
  s.dynamic_actions = options.dynamic_actions;
  s.wall_seconds = wall;
  std::size_t reached = 0;
  for (const auto& ep : out.episodes) {
    s.total_steps += ep.steps.size();
    reached += ep.reached_goal ? 1 : 0;
    s.dead_ends += ep.dead_end ? 1 : 0;
    if (!ep.steps.empty() && ep.steps.back().invalid) ++s.invalid_actions;
  }
  s.fps = wall > 0.0 ? static_cast<double>(s.total_steps) / wall : 0.0;
  s.goal_rate = static_cast<double>(reached) / static_cast<double>(s.episodes);
  return out;
}

nlohmann::ordered_json export_trace(const Rollout& rollout) {
  nlohmann::ordered_json doc;
  doc["env"] = rollout.stats.env;
  doc["seed"] = rollout.options.seed;
  doc["horizon"] = rollout.options.horizon;
  doc["dynamic_actions"] = rollout.options.dynamic_actions;
  doc["raise_on_invalid"] = rollout.options.raise_on_invalid;
  doc["episodes"] = nlohmann::ordered_json::array();
  for (const auto& ep : rollout.episodes) {
    nlohmann::ordered_json e;
    e["problem"] = ep.problem;
    e["reached_goal"] = ep.reached_goal;
    e["dead_end"] = ep.dead_end;
    e["steps"] = nlohmann::ordered_json::array();
    for (const auto& st : ep.steps) {
      nlohmann::ordered_json j;
      j["action"] = to_string(st.action);
      j["reward"] = st.reward;
      j["done"] = st.done;
      if (st.effect_index)
        j["effect_index"] = *st.effect_index;
      else
        j["effect_index"] = nullptr;
      if (st.invalid) j["invalid"] = true;
      e["steps"].push_back(std::move(j));
    }
    doc["episodes"].push_back(std::move(e));
  }
  return doc;
}

ReplayReport replay_trace(const Env& env, const nlohmann::ordered_json& trace) {
  RolloutOptions o;
  o.seed = trace.at("seed").get<std::uint64_t>();
  o.horizon = trace.at("horizon").get<std::size_t>();
  o.raise_on_invalid = trace.at("raise_on_invalid").get<bool>();
  Env run = env.with_config(rollout_config(env, o));
  auto fail = [](std::string why) { return ReplayReport{false, std::move(why)}; };

  std::size_t ei = 0;
  for (const auto& ep : trace.at("episodes")) {
    std::string where = "episode " + std::to_string(ei++);
    auto info = run.reset().second;
    if (info.problem != ep.at("problem").get<std::string>())
      return fail(where + ": reset chose " + info.problem + ", trace has " + ep.at("problem").get<std::string>());
    std::size_t si = 0;
    for (const auto& st : ep.at("steps")) {
      std::string at = where + " step " + std::to_string(si++);
      auto actions = pddl::parse_ground_actions(st.at("action").get<std::string>());
      if (actions.size() != 1) return fail(at + ": malformed action");
      bool expect_invalid = st.contains("invalid") && st.at("invalid").get<bool>();
      std::optional<StepResult> r;
      try {
        r = run.step(actions[0]);
      } catch (const InvalidActionError&) {
        if (expect_invalid) break;
        return fail(at + ": action became invalid");
      }
      if (expect_invalid) return fail(at + ": expected an invalid action");
      if (r->reward != st.at("reward").get<double>()) return fail(at + ": reward differs");
      if (r->done != st.at("done").get<bool>()) return fail(at + ": done differs");
      std::optional<int> idx;
      if (!st.at("effect_index").is_null()) idx = st.at("effect_index").get<int>();
      if (r->info.effect_index != idx) return fail(at + ": effect index differs");
    }
  }
  return {};
}

std::string format_stats(const RolloutStats& s) {
  return "env=" + s.env + " mode=" + (s.dynamic_actions ? "valid-only" : "uniform") +
         " episodes=" + std::to_string(s.episodes) + " horizon=" + std::to_string(s.horizon) +
         " steps=" + std::to_string(s.total_steps) + " wall=" + fixed(s.wall_seconds, 4) + "s fps=" + fixed(s.fps, 1) +
         " goal_rate=" + fixed(s.goal_rate, 3) + " dead_ends=" + std::to_string(s.dead_ends) +
         " invalid=" + std::to_string(s.invalid_actions) + " seed=" + std::to_string(s.seed);
}

std::vector<BenchRow> run_benchmark(const std::vector<std::string>& names, std::size_t episodes, std::size_t horizon,
                                    std::uint64_t seed, bool parallel) {
  std::vector<BenchRow> rows(names.size());
  auto work = [&](std::size_t i) {
    BenchRow& row = rows[i];
    row.env = names[i];
    try {
      Env env = library::load_env(names[i]);
      RolloutOptions o;
      o.episodes = episodes;
      o.horizon = horizon;
      o.seed = seed;
      row.uniform = run_random_rollouts(env, names[i], o).stats;
      o.dynamic_actions = true;
      row.valid_only = run_random_rollouts(env, names[i], o).stats;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };
  if (parallel) {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < names.size(); ++i) threads.emplace_back(work, i);
    for (auto& t : threads) t.join();
  } else {
    for (std::size_t i = 0; i < names.size(); ++i) work(i);
  }
  return rows;
}

std::string csv_header() {
  return "env,episodes,horizon,fps,goal_rate,steps,fps_valid_only,goal_rate_valid_only,steps_valid_only,"
         "dead_ends_valid_only,error";
}

std::string csv_row(const BenchRow& row) {
  std::string error = row.error;
  for (char& c : error)
    if (c == ',' || c == '\n' || c == '"') c = ' ';
  return row.env + "," + std::to_string(row.uniform.episodes) + "," + std::to_string(row.uniform.horizon) + "," +
         fixed(row.uniform.fps, 1) + "," + fixed(row.uniform.goal_rate, 3) + "," +
         std::to_string(row.uniform.total_steps) + "," + fixed(row.valid_only.fps, 1) + "," +
         fixed(row.valid_only.goal_rate, 3) + "," + std::to_string(row.valid_only.total_steps) + "," +
         std::to_string(row.valid_only.dead_ends) + "," + error;
}

}  // namespace pddlenv::bench
