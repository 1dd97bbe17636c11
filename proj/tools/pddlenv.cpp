// pddlenv command-line frontend.
//
// Exit codes: 0 success, 1 parse/model/usage failure, 2 I/O failure,
// 3 planner timeout or unsolvable problem.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pddlenv/bench.hpp"
#include "pddlenv/env.hpp"
#include "pddlenv/library.hpp"
#include "pddlenv/pddl.hpp"
#include "pddlenv/planner.hpp"

namespace {

using namespace pddlenv;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kIoFailure = 2;
constexpr int kNoPlan = 3;

struct EnvSelection {
  std::string env;
  std::string domain;
  std::vector<std::string> problems;
  bool test = false;
  std::string asset_dir;

  void add_options(CLI::App* cmd) {
    auto* name = cmd->add_option("--env", env, "Registry name (suffix Test selects test problems)");
    auto* dom = cmd->add_option("--domain", domain, "Domain file")->excludes(name);
    cmd->add_option("--problems", problems, "Problem files")->needs(dom);
    cmd->add_flag("--test", test, "Use the registry entry's test problems");
    cmd->add_option("--asset-dir", asset_dir, "Directory searched before the bundled assets");
  }

  std::string label() const { return env.empty() ? domain : env; }

  Env load(std::optional<EnvConfig> cfg = std::nullopt) const {
    if (!asset_dir.empty()) library::set_asset_root(std::filesystem::path(asset_dir));
    if (!env.empty()) {
      auto [name, is_test] = library::split_env_id(env);
      return library::load_env(name, is_test || test, cfg);
    }
    if (domain.empty()) throw ContractError("either --env or --domain/--problems is required");
    if (problems.empty()) throw ContractError("--domain needs at least one --problems file");
    std::vector<PddlSource> sources;
    for (const auto& p : problems) sources.push_back(PddlSource::from_file(p));
    return Env::make(PddlSource::from_file(domain), sources, cfg.value_or(EnvConfig{}));
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

// Maps library exceptions onto exit codes.
template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int run_validate(const std::string& domain_path, const std::vector<std::string>& problem_paths) {
  int code = kOk;
  // An I/O failure outranks a parse failure.
  auto note = [&](int c) { code = std::max(code, c); };
  std::optional<Domain> domain;
  try {
    domain = pddl::parse_domain(pddl::read_file(domain_path), domain_path);
    std::cout << domain_path << ": OK\n";
  } catch (const IoError& e) {
    std::cout << domain_path << ": " << e.what() << "\n";
    return kIoFailure;
  } catch (const Error& e) {
    std::cout << e.what() << "\n";
    return kFailure;
  }
  for (const auto& p : problem_paths) {
    try {
      pddl::parse_problem(pddl::read_file(p), *domain, p);
      std::cout << p << ": OK\n";
    } catch (const IoError& e) {
      std::cout << p << ": " << e.what() << "\n";
      note(kIoFailure);
    } catch (const Error& e) {
      std::cout << e.what() << "\n";
      note(kFailure);
    }
  }
  return code;
}

struct RolloutArgs {
  EnvSelection sel;
  bench::RolloutOptions opts;
  std::string trace;
  std::string invalid = "noop";
};

int run_rollout(const RolloutArgs& a) {
  Env env = a.sel.load();
  bench::RolloutOptions o = a.opts;
  o.raise_on_invalid = a.invalid == "error";
  auto rollout = bench::run_random_rollouts(env, a.sel.label(), o);
  for (std::size_t e = 0; e < rollout.episodes.size(); ++e) {
    const auto& ep = rollout.episodes[e];
    if (!ep.steps.empty() && ep.steps.back().invalid)
      std::cout << "episode " << e << " step " << ep.steps.size() - 1
                << ": invalid action " << to_string(ep.steps.back().action) << "\n";
  }
  std::cout << bench::format_stats(rollout.stats) << "\n";
  if (!a.trace.empty()) write_text(a.trace, bench::export_trace(rollout).dump(1) + "\n");
  return kOk;
}

struct PlanArgs {
  EnvSelection sel;
  std::size_t problem_index = 0;
  double timeout = 30.0;
  std::string out;
};

int run_plan(const PlanArgs& a) {
  Env env = a.sel.load();
  if (a.problem_index >= env.problems().size())
    throw ContractError("problem index " + std::to_string(a.problem_index) + " out of range (" +
                        std::to_string(env.problems().size()) + " problems)");
  auto result = planner::plan_gbfs(env, a.problem_index, std::chrono::duration<double>(a.timeout));
  const auto& st = result.plan.stats;
  std::cout << "problem " << env.problem_labels()[a.problem_index] << ": " << planner::to_string(result.status)
            << " expansions=" << st.expansions << " generated=" << st.generated << " wall=" << st.wall_seconds
            << "s\n";
  if (!result.solved()) return kNoPlan;
  std::string text = planner::format_plan(result.plan.actions);
  std::cout << text;
  bool ok = planner::validate_plan(env, a.problem_index, result.plan.actions);
  std::cout << "length=" << result.plan.actions.size() << " valid=" << (ok ? "yes" : "no") << "\n";
  if (!a.out.empty()) write_text(a.out, text);
  return ok ? kOk : kFailure;
}

struct ExecArgs {
  EnvSelection sel;
  std::size_t problem_index = 0;
  std::string plan;
};

int run_exec(const ExecArgs& a) {
  Env env = a.sel.load();
  if (a.problem_index >= env.problems().size()) throw ContractError("problem index out of range");
  auto actions = planner::parse_plan(pddl::read_file(a.plan), a.plan);
  EnvConfig cfg = env.config();
  cfg.max_episode_length.reset();
  cfg.raise_error_on_invalid_action = true;
  Env run = env.with_config(cfg);
  run.set_state(run.initial_state(a.problem_index));
  double reward = run.goal_holds(run.state()) ? 1.0 : 0.0;
  bool done = reward == 1.0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    try {
      auto r = run.step(actions[i]);
      reward = r.reward;
      done = r.done;
    } catch (const InvalidActionError&) {
      std::cout << "step " << i << ": invalid action " << to_string(actions[i]) << "\n";
      return kFailure;
    }
  }
  std::cout << "steps=" << actions.size() << " reward=" << reward << " done=" << (done ? "true" : "false") << "\n";
  return reward == 1.0 ? kOk : kFailure;
}

struct BenchArgs {
  std::string envs = "all";
  std::uint64_t seed = 0;
  std::size_t episodes = 100;
  std::size_t horizon = 10;
  std::string csv;
  bool parallel = false;
};

int run_bench(const BenchArgs& a) {
  std::vector<std::string> names;
  if (a.envs == "all") {
    for (const auto& e : library::list_envs()) names.push_back(e.name);
  } else {
    std::stringstream ss(a.envs);
    for (std::string n; std::getline(ss, n, ',');)
      if (!n.empty()) names.push_back(n);
  }
  auto rows = bench::run_benchmark(names, a.episodes, a.horizon, a.seed, a.parallel);
  std::string csv = bench::csv_header() + "\n";
  bool failed = false;
  for (const auto& row : rows) {
    csv += bench::csv_row(row) + "\n";
    if (!row.error.empty()) {
      failed = true;
      std::cout << "env=" << row.env << " error: " << row.error << "\n";
      continue;
    }
    std::cout << bench::format_stats(row.uniform) << "\n" << bench::format_stats(row.valid_only) << "\n";
  }
  if (!a.csv.empty()) write_text(a.csv, csv);
  return failed ? kFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PDDL environments: parsing, random rollouts, planning and benchmarks"};
  app.require_subcommand(1);

  std::string v_domain;
  std::vector<std::string> v_problems;
  auto* validate = app.add_subcommand("validate", "Parse a domain and problems");
  validate->add_option("domain", v_domain)->required();
  validate->add_option("problems", v_problems);

  RolloutArgs ra;
  auto* rollout = app.add_subcommand("rollout", "Random-policy rollouts");
  ra.sel.add_options(rollout);
  rollout->add_option("--episodes", ra.opts.episodes)->capture_default_str();
  rollout->add_option("--horizon", ra.opts.horizon)->capture_default_str();
  rollout->add_option("--seed", ra.opts.seed)->capture_default_str();
  rollout->add_option("--trace", ra.trace, "Write the episode trace as JSON");
  rollout->add_option("--invalid", ra.invalid, "Invalid actions: noop or error")
      ->check(CLI::IsMember({"noop", "error"}))
      ->capture_default_str();
  rollout->add_flag("--dynamic-actions", ra.opts.dynamic_actions, "Sample only valid actions");

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Greedy best-first search with h_add");
  pa.sel.add_options(plan);
  plan->add_option("--problem-index", pa.problem_index)->capture_default_str();
  plan->add_option("--timeout", pa.timeout, "Seconds")->capture_default_str();
  plan->add_option("--out", pa.out, "Write the plan, one action per line");

  ExecArgs ea;
  auto* exec = app.add_subcommand("exec", "Execute a plan file and report the final reward");
  ea.sel.add_options(exec);
  exec->add_option("--problem-index", ea.problem_index)->capture_default_str();
  exec->add_option("--plan", ea.plan)->required();

  BenchArgs ba;
  auto* benchmark = app.add_subcommand("bench", "Rollout throughput on registry entries");
  benchmark->add_option("--envs", ba.envs, "all or a comma-separated list")->capture_default_str();
  benchmark->add_option("--seed", ba.seed)->capture_default_str();
  benchmark->add_option("--episodes", ba.episodes)->capture_default_str();
  benchmark->add_option("--horizon", ba.horizon)->capture_default_str();
  benchmark->add_option("--csv", ba.csv, "Write the summary as CSV");
  benchmark->add_flag("--parallel", ba.parallel, "One thread per environment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kFailure;
  }

  if (*validate) return guarded([&] { return run_validate(v_domain, v_problems); });
  if (*rollout) return guarded([&] { return run_rollout(ra); });
  if (*plan) return guarded([&] { return run_plan(pa); });
  if (*exec) return guarded([&] { return run_exec(ea); });
  if (*benchmark) return guarded([&] { return run_bench(ba); });
  return kFailure;
}
