#ifndef PDDLENV_ENV_HPP
#define PDDLENV_ENV_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pddlenv/errors.hpp"
#include "pddlenv/inference.hpp"
#include "pddlenv/model.hpp"
#include "pddlenv/rng.hpp"

namespace pddlenv {

struct EnvConfig {
  /// Treat each operator as an action over all of its parameters.
  bool operators_as_actions = false;
  /// Throw InvalidActionError instead of a no-op when no operator matches.
  bool raise_error_on_invalid_action = false;
  /// sample_action draws only from valid actions.
  bool dynamic_action_space = false;
  std::optional<std::size_t> max_episode_length;
  std::optional<std::uint64_t> seed;
  /// Reuse the model of the current state across queries. Results are the
  /// same either way.
  bool cache = true;
};

/// PDDL text plus the label reported in info maps.
struct PddlSource {
  std::string text;
  std::string label;
  std::optional<std::filesystem::path> path;

  /// Throws IoError.
  static PddlSource from_file(const std::filesystem::path& path);
  static PddlSource from_text(std::string text, std::string label);
};

struct ResetInfo {
  std::string domain;
  std::string problem;
  std::size_t problem_index = 0;
  std::optional<std::filesystem::path> domain_file;
  std::optional<std::filesystem::path> problem_file;
};

struct StepInfo {
  std::string problem;
  /// Empty when no operator matched.
  std::optional<std::string> operator_name;
  Substitution substitution;
  /// 0 for deterministic effects, the outcome index for probabilistic ones,
  /// -1 for the implicit trivial outcome, empty on a no-op.
  std::optional<int> effect_index;
  bool truncated = false;
};

struct StepResult {
  State observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

struct OperatorMatch {
  const Operator* op;
  Substitution substitution;
};

/// Deletes first, then adds. Probabilistic effects draw one number from
/// `rng`; the residual mass maps to index -1. Throws ContractError if `e` is
/// not ground.
std::pair<State, int> apply_effect(const State& s, const Effect& e, Rng& rng);

class Simulator;

/// An episodic environment over one domain and a list of problems.
/// Copies share the parsed domain and compiled tables; each copy has its
/// own state, step counter and random stream.
class Env {
 public:
  /// Throws ParseError for bad PDDL and ConfigurationError for a bad
  /// operator/action-predicate setup or an empty problem list.
  static Env make(const PddlSource& domain, const std::vector<PddlSource>& problems, EnvConfig cfg = {});
  static Env make(const std::string& domain_text, const std::vector<std::string>& problem_texts,
                  EnvConfig cfg = {});
  /// Reuses an already parsed domain (shared with other environments).
  static Env make(std::shared_ptr<const Domain> domain, std::vector<Problem> problems,
                  std::vector<std::string> problem_labels, EnvConfig cfg = {}, std::string domain_label = "domain");

  std::pair<State, ResetInfo> reset();
  /// Throws ContractError before the first reset.
  StepResult step(const GroundAction& action);

  std::optional<OperatorMatch> match_operator(const State& s, const GroundAction& a) const;
  /// Sorted.
  std::vector<GroundAction> enumerate_valid_actions(const State& s) const;
  /// Every type-respecting grounding of every action predicate, sorted.
  std::vector<GroundAction> all_actions(const State& s) const;
  /// Uniform over valid actions in dynamic mode (DeadEndError if none),
  /// otherwise over all_actions.
  GroundAction sample_action(const State& s, Rng& rng) const;

  bool goal_holds(const State& s) const;
  /// `s` plus its derived literals.
  State observe(const State& s) const;

  const State& state() const;
  /// Starts a new episode from `s` (step count reset to zero). Derived
  /// literals in `s` are ignored.
  void set_state(const State& s);
  /// Closed-world model of `s` including derived facts.
  std::shared_ptr<const inference::Model> model(const State& s) const { return model_for(s); }
  /// A copy with different settings over the same compiled domain. Throws
  /// ConfigurationError if operators_as_actions differs.
  Env with_config(EnvConfig cfg) const;
  bool has_state() const { return state_.has_value(); }
  std::size_t step_count() const { return steps_; }
  std::size_t problem_index() const { return problem_index_; }

  void seed(std::uint64_t seed) { rng_.seed(seed); }
  Rng& rng() { return rng_; }

  const EnvConfig& config() const { return cfg_; }
  /// The domain used for stepping (with synthesized action predicates in
  /// operators_as_actions mode).
  const Domain& domain() const;
  /// The domain as parsed.
  const std::shared_ptr<const Domain>& source_domain() const;
  const std::vector<Problem>& problems() const;
  const std::vector<std::string>& problem_labels() const;
  /// Initial state of problem i (constants merged into objects).
  const State& initial_state(std::size_t i) const;
  /// Action predicate names, in declaration order.
  std::vector<std::string> action_predicates() const;

 private:
  Env(std::shared_ptr<const Simulator> sim, EnvConfig cfg);

  std::shared_ptr<const inference::Model> model_for(const State& s) const;

  std::shared_ptr<const Simulator> sim_;
  EnvConfig cfg_;
  Rng rng_;
  std::optional<State> state_;
  std::size_t problem_index_ = 0;
  std::size_t steps_ = 0;

  struct Cache {
    std::optional<State> state;
    std::shared_ptr<const inference::Model> model;
    std::optional<std::vector<GroundAction>> valid;
  };
  mutable Cache cache_;
};

}  // namespace pddlenv

#endif  // PDDLENV_ENV_HPP
