#ifndef PDDLENV_PLANNER_HPP
#define PDDLENV_PLANNER_HPP

#include <chrono>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "pddlenv/env.hpp"

namespace pddlenv::planner {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct SearchStats {
  std::size_t expansions = 0;
  std::size_t generated = 0;
  double wall_seconds = 0.0;
};

struct Plan {
  std::vector<GroundAction> actions;
  SearchStats stats;
};

struct PlanResult {
  enum class Status { Solved, Timeout, Unsolvable };

  Status status = Status::Unsolvable;
  Plan plan;  // actions empty unless solved

  bool solved() const { return status == Status::Solved; }
};

std::string to_string(PlanResult::Status status);

/// Effect used by search for a probabilistic operator: the most likely
/// outcome (lowest index on ties), or nothing when the implicit trivial
/// outcome is strictly more likely than every listed one.
DeterministicEffect most_likely_outcome(const Effect& e);

/// Additive delete-relaxation heuristic over the operators of one object
/// set, grounded once. Operators are pruned by their static preconditions
/// evaluated in `reference`, which must agree with every evaluated state on
/// static predicates.
class HAdd {
 public:
  HAdd(const Env& env, const State& reference);

  /// 0 exactly when the goal holds in `s`; kInfinity when the relaxation
  /// cannot reach it.
  double operator()(const State& s, const Formula& goal, const inference::Model& model) const;
  double operator()(const State& s, const Formula& goal) const;

  std::size_t ground_operator_count() const { return ops_.size(); }

 private:
  struct RelaxedOp {
    std::vector<int> pre;
    std::vector<int> add;
  };

  int fact_id(const Literal& l) const;
  double goal_cost(const Formula& f, const State& s, const inference::Model& model,
                   const std::vector<double>& cost) const;

  const Env* env_;
  std::unordered_map<std::string, int> facts_;
  std::vector<RelaxedOp> ops_;
  std::vector<char> fluent_;  // by predicate id
};

/// One-shot h_add for `s`.
double h_add(const State& s, const Formula& goal, const Env& env);

/// Greedy best-first search on h_add from `start`, FIFO among equal h.
/// Successors come from the valid actions of each state and the
/// most-likely-outcome determinization.
PlanResult plan_gbfs(const Env& env, const State& start, std::chrono::duration<double> timeout);
/// From the initial state of problem `problem_index`.
PlanResult plan_gbfs(const Env& env, std::size_t problem_index, std::chrono::duration<double> timeout);

/// Executes `plan` on a copy of `env` from `start` with no horizon. True iff
/// every action matches an operator and the last step (or `start`, for an
/// empty plan) satisfies the goal.
bool validate_plan(const Env& env, const State& start, const std::vector<GroundAction>& plan);
bool validate_plan(const Env& env, std::size_t problem_index, const std::vector<GroundAction>& plan);

/// One action per line, `(predicate obj1 obj2)`.
std::string format_plan(const std::vector<GroundAction>& plan);
/// Inverse of format_plan. Blank lines and `;` comments are skipped.
/// Throws pddl::ParseError on malformed lines.
std::vector<GroundAction> parse_plan(std::string_view text, std::string_view file = "<plan>");

}  // namespace pddlenv::planner

#endif  // PDDLENV_PLANNER_HPP
