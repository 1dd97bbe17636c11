#ifndef PDDLENV_INFERENCE_HPP
#define PDDLENV_INFERENCE_HPP

#include <cstddef>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pddlenv/model.hpp"

namespace pddlenv::inference {

enum class Mode { AllSolutions, FirstSolution, Boolean };

/// Which evaluator answers a query. Auto sends pure conjunctions of
/// literals and equalities to the backtracking join and everything else to
/// the general evaluator; the other two force a path.
enum class Strategy { Auto, Conjunctive, General };

struct Query {
  Formula formula;
  /// Variables to solve for. Variables listed here but absent from the
  /// formula range over every object of their type.
  std::vector<Term> free_vars;
  Mode mode = Mode::AllSolutions;

  static Query over(Formula f, Mode mode = Mode::AllSolutions);
};

/// Groups derived rules (indices into Domain::derived) into strata, lowest
/// first. Throws ModelError(Declaration) if a derived predicate depends
/// negatively on itself or on something in its own recursive component.
std::vector<std::vector<std::size_t>> stratify(const Domain& d);

class Universe;
struct Node;

/// Per-domain tables: predicate ids and the derived-rule strata. The domain
/// must outlive the program.
class Program {
 public:
  explicit Program(const Domain& d);

  const Domain& domain() const { return *domain_; }
  /// -1 when undeclared.
  int predicate_id(const std::string& name) const;
  std::size_t predicate_count() const { return predicates_.size(); }
  const Predicate& predicate(int id) const { return *predicates_[static_cast<std::size_t>(id)]; }
  const std::vector<std::vector<std::size_t>>& strata() const { return strata_; }

 private:
  const Domain* domain_;
  std::vector<const Predicate*> predicates_;
  std::unordered_map<std::string, int> ids_;
  std::vector<std::vector<std::size_t>> strata_;
};

/// A query resolved against a universe: variables become slots, constants
/// become object ids. Reusable across every model over that universe.
class CompiledQuery {
 public:
  CompiledQuery(const Universe& u, const Query& q);
  ~CompiledQuery();
  CompiledQuery(CompiledQuery&&) noexcept;
  CompiledQuery& operator=(CompiledQuery&&) noexcept;

  const Node& root() const { return *root_; }
  std::size_t slot_count() const { return slot_flags_.size(); }
  std::size_t free_count() const { return free_vars_.size(); }
  const std::vector<Term>& free_vars() const { return free_vars_; }
  const std::vector<int>& slot_domain(std::size_t slot) const { return *slot_domains_[slot]; }
  const std::vector<char>& slot_flags(std::size_t slot) const { return *slot_flags_[slot]; }
  Mode mode() const { return mode_; }
  /// True when the conjunctive fast path accepts this query.
  bool is_conjunctive() const { return conjunctive_; }

 private:
  std::unique_ptr<Node> root_;
  std::vector<Term> free_vars_;
  std::vector<const std::vector<int>*> slot_domains_;
  std::vector<const std::vector<char>*> slot_flags_;
  Mode mode_;
  bool conjunctive_ = false;
};

/// Object numbering for one object set. Ids follow name order, so sorting
/// by id sorts by object name. Derived-rule bodies are compiled here once.
class Universe {
 public:
  Universe(const Program& program, const std::vector<Term>& objects);
  ~Universe();
  Universe(const Universe&) = delete;
  Universe& operator=(const Universe&) = delete;

  const Program& program() const { return *program_; }
  std::size_t size() const { return objects_.size(); }
  /// -1 when the name is not an object of this universe.
  int object_id(const std::string& name) const;
  const Term& object(int id) const { return objects_[static_cast<std::size_t>(id)]; }
  /// Ids of objects whose type is a subtype of `type`, ascending.
  const std::vector<int>& members(const std::string& type) const;
  /// membership flags indexed by object id
  const std::vector<char>& member_flags(const std::string& type) const;

  const std::vector<CompiledQuery>& rule_queries() const { return rule_queries_; }
  const std::vector<int>& rule_heads() const { return rule_heads_; }

 private:
  const Program* program_;
  std::vector<Term> objects_;
  std::unordered_map<std::string, int> ids_;
  std::unordered_map<std::string, std::vector<int>> members_;
  std::unordered_map<std::string, std::vector<char>> flags_;
  std::vector<CompiledQuery> rule_queries_;
  std::vector<int> rule_heads_;
};

/// One answer row: object ids for the query's free variables, in order.
using Row = std::vector<int>;

/// The closed-world interpretation of a state: base facts indexed per
/// predicate plus the least fixpoint of the derived rules.
class Model {
 public:
  struct Table {
    std::size_t arity = 0;
    std::vector<int> rows;  // row-major, arity ints per row
    std::vector<std::vector<std::size_t>> by_first;
    std::unordered_set<std::string> members;
    bool nullary = false;

    std::size_t row_count() const { return arity == 0 ? (nullary ? 1 : 0) : rows.size() / arity; }
    bool contains(const int* values) const;
    /// Returns false when already present.
    bool insert(const int* values, std::size_t universe_size);
  };

  Model(std::shared_ptr<const Universe> universe, const State& state);

  const Universe& universe() const { return *universe_; }
  const Table& table(int predicate) const { return tables_[static_cast<std::size_t>(predicate)]; }

  /// Rows in ascending lexicographic order (free-variable order, then
  /// object name). FirstSolution returns the least row; Boolean returns at
  /// most one row.
  std::vector<Row> solve(const CompiledQuery& q, Strategy strategy = Strategy::Auto) const;
  bool satisfiable(const CompiledQuery& q, Strategy strategy = Strategy::Auto) const;

  std::vector<Substitution> find_assignments(const Query& q, Strategy strategy = Strategy::Auto) const;
  /// Throws ContractError if `f` has free variables.
  bool holds(const Formula& f, Strategy strategy = Strategy::Auto) const;
  /// Ground positive literal lookup (base or derived).
  bool contains(const Literal& l) const;
  /// Derived atoms true in this model, sorted.
  std::vector<Literal> derived_literals() const;

  Substitution to_substitution(const CompiledQuery& q, const Row& row) const;

 private:
  void close_derived();

  std::shared_ptr<const Universe> universe_;
  std::vector<Table> tables_;
};

// Convenience entry points that build the program, universe and model on
// each call. Prefer the layered classes when querying one state repeatedly.
std::vector<Substitution> find_assignments(const Query& q, const State& s, const Domain& d,
                                           Strategy strategy = Strategy::Auto);
bool holds(const Formula& f, const State& s, const Domain& d);
std::vector<Literal> derived_closure(const State& s, const Domain& d);

}  // namespace pddlenv::inference

#endif  // PDDLENV_INFERENCE_HPP
