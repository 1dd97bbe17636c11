#ifndef PDDLENV_BENCH_HPP
#define PDDLENV_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"  // vendored nlohmann::json

#include "pddlenv/env.hpp"

namespace pddlenv::bench {

struct RolloutOptions {
  std::size_t episodes = 100;
  std::size_t horizon = 10;
  std::uint64_t seed = 0;
  /// Sample only valid actions.
  bool dynamic_actions = false;
  /// Invalid actions throw and end the episode instead of being no-ops.
  bool raise_on_invalid = false;
  /// Run one untimed episode on a separate env instance first.
  bool warmup = true;
};

struct StepRecord {
  GroundAction action;
  double reward = 0.0;
  bool done = false;
  std::optional<int> effect_index;
  /// Set when the step raised InvalidActionError.
  bool invalid = false;
};

struct EpisodeRecord {
  std::string problem;
  std::vector<StepRecord> steps;
  bool reached_goal = false;
  /// Set when the policy hit a state with no valid actions.
  bool dead_end = false;
};

struct RolloutStats {
  std::string env;
  std::size_t episodes = 0;
  std::size_t horizon = 0;
  std::size_t total_steps = 0;
  double wall_seconds = 0.0;
  double fps = 0.0;
  double goal_rate = 0.0;
  std::uint64_t seed = 0;
  bool dynamic_actions = false;
  std::size_t dead_ends = 0;
  std::size_t invalid_actions = 0;
};

struct Rollout {
  RolloutStats stats;
  RolloutOptions options;
  std::vector<EpisodeRecord> episodes;
};

/// The policy draws from its own stream, seeded from `options.seed`, so the
/// environment stream only serves problem selection and effect sampling.
Rollout run_random_rollouts(const Env& env, const std::string& name, const RolloutOptions& options = {});

/// Seed of the policy stream for a rollout seed.
std::uint64_t policy_seed(std::uint64_t seed);

/// {env, seed, horizon, dynamic_actions, raise_on_invalid,
///  episodes: [{problem, steps: [{action, reward, done, effect_index}]}]}.
/// Timing is left out so equal seeds give equal documents.
nlohmann::ordered_json export_trace(const Rollout& rollout);

struct ReplayReport {
  bool ok = true;
  std::string mismatch;
};

/// Re-executes a trace's actions on a copy of `env` seeded with the trace's
/// seed and compares problems, rewards, done flags and effect indices.
ReplayReport replay_trace(const Env& env, const nlohmann::ordered_json& trace);

std::string format_stats(const RolloutStats& s);

/// Both action-sampling modes for one environment.
struct BenchRow {
  std::string env;
  RolloutStats uniform;     // over all groundings
  RolloutStats valid_only;  // over valid actions
  std::string error;        // non-empty when the env failed to run
};

/// Runs the rollout protocol in both modes on each named registry entry.
/// With `parallel`, envs run on separate threads (one env per thread).
std::vector<BenchRow> run_benchmark(const std::vector<std::string>& names, std::size_t episodes,
                                    std::size_t horizon, std::uint64_t seed, bool parallel = false);

std::string csv_header();
std::string csv_row(const BenchRow& row);

}  // namespace pddlenv::bench

#endif  // PDDLENV_BENCH_HPP
