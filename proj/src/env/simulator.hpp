#ifndef PDDLENV_SRC_ENV_SIMULATOR_HPP
#define PDDLENV_SRC_ENV_SIMULATOR_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pddlenv/env.hpp"
#include "pddlenv/inference.hpp"

namespace pddlenv {

/// An operator split into the action literal the agent supplies and the
/// rest of its precondition.
struct OperatorSchema {
  const Operator* op = nullptr;
  std::string action_predicate;
  std::vector<Term> action_args;
  /// For each action argument, the index of the operator parameter it
  /// names, or -1 for a constant.
  std::vector<int> arg_param;
  Formula body = Formula::truth();
};

struct ProblemData {
  std::string label;
  std::optional<std::filesystem::path> file;
  std::optional<State> initial;
  std::shared_ptr<const inference::Universe> universe;
  /// Per operator: body over all parameters, AllSolutions.
  std::vector<inference::CompiledQuery> enumerate;
  std::vector<GroundAction> all_actions;
};

/// Immutable part of an environment, shared between Env copies. Holds
/// internal pointers, so it is never moved after construction.
class Simulator {
 public:
  Simulator(std::shared_ptr<const Domain> source, std::vector<Problem> problems, std::vector<std::string> labels,
            std::vector<std::optional<std::filesystem::path>> files, std::string domain_label,
            std::optional<std::filesystem::path> domain_file, bool operators_as_actions);
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  const std::shared_ptr<const Domain>& source() const { return source_; }
  const Domain& domain() const { return domain_; }
  const inference::Program& program() const { return *program_; }
  const std::vector<OperatorSchema>& schemas() const { return schemas_; }
  /// nullptr for an unknown action predicate.
  const OperatorSchema* schema_for(const std::string& action_predicate) const;

  const std::vector<Problem>& problems() const { return problems_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const ProblemData& problem(std::size_t i) const { return data_[i]; }
  std::size_t problem_count() const { return data_.size(); }
  const std::string& domain_label() const { return domain_label_; }
  const std::optional<std::filesystem::path>& domain_file() const { return domain_file_; }
  bool has_derived() const { return !domain_.derived.empty(); }

  /// The bundled problem whose objects `s` uses, or nullptr.
  const ProblemData* problem_for(const State& s) const;
  std::shared_ptr<const inference::Universe> universe_for(const State& s) const;

  std::vector<GroundAction> ground_all_actions(const std::vector<Term>& objects) const;

 private:
  void build_schemas(bool operators_as_actions);

  std::shared_ptr<const Domain> source_;
  Domain domain_;
  std::unique_ptr<inference::Program> program_;
  std::vector<OperatorSchema> schemas_;
  std::unordered_map<std::string, std::size_t> by_action_;
  std::vector<Problem> problems_;
  std::vector<std::string> labels_;
  std::vector<ProblemData> data_;
  std::string domain_label_;
  std::optional<std::filesystem::path> domain_file_;
};

}  // namespace pddlenv

#endif  // PDDLENV_SRC_ENV_SIMULATOR_HPP
