#ifndef PDDLENV_MODEL_HPP
#define PDDLENV_MODEL_HPP

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pddlenv/probability.hpp"

namespace pddlenv {

inline const std::string kRootType = "object";

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Single-inheritance type tree rooted at `object`. Construction rejects
/// unknown parents and cycles; ancestor sets are precomputed so subtype
/// queries are a set lookup.
class TypeHierarchy {
 public:
  using ParentMap = std::map<std::string, std::optional<std::string>>;

  TypeHierarchy();
  /// `parents` may omit `object`; it is always added as the root.
  explicit TypeHierarchy(ParentMap parents);

  bool contains(const std::string& type) const { return parents_.count(type) != 0; }

  /// Reflexive. Throws ModelError(Declaration) on unknown names.
  bool is_subtype(const std::string& child, const std::string& parent) const;

  /// `type` followed by its ancestors, ending at `object`.
  std::vector<std::string> ancestor_chain(const std::string& type) const;

  const ParentMap& parents() const { return parents_; }

  friend bool operator==(const TypeHierarchy& a, const TypeHierarchy& b) {
    return a.parents_ == b.parents_;
  }

 private:
  ParentMap parents_;
  std::map<std::string, std::set<std::string>> ancestors_;
};

bool is_subtype(const std::string& child, const std::string& parent, const TypeHierarchy& h);

// ---------------------------------------------------------------------------
// Terms, predicates, literals
// ---------------------------------------------------------------------------

/// A typed variable (`?x`) or a typed constant/object name.
struct Term {
  std::string name;
  std::string type = kRootType;

  static Term variable(std::string name, std::string type = kRootType);
  static Term constant(std::string name, std::string type = kRootType);

  bool is_variable() const { return !name.empty() && name.front() == '?'; }

  friend auto operator<=>(const Term&, const Term&) = default;
};

struct Predicate {
  std::string name;
  std::vector<std::string> param_types;
  bool is_action_predicate = false;
  bool is_derived = false;

  std::size_t arity() const { return param_types.size(); }

  friend auto operator<=>(const Predicate&, const Predicate&) = default;
};

struct Literal {
  std::string predicate;
  std::vector<Term> args;
  bool negated = false;

  bool is_ground() const;
  Literal positive() const;
  Literal negation() const;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// The action chosen by an agent: a positive ground literal over an action
/// predicate. With operators used directly as actions the predicate is the
/// operator name and the arguments bind every operator parameter.
struct GroundAction {
  Literal literal;

  const std::string& predicate() const { return literal.predicate; }
  const std::vector<Term>& args() const { return literal.args; }

  friend auto operator<=>(const GroundAction&, const GroundAction&) = default;
};

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

/// First-order formula tree. A negated atom is stored as an Atom whose
/// literal is negative; Not wraps everything else.
class Formula {
 public:
  enum class Kind { Atom, And, Or, Not, ForAll, Exists, Equal };

  static Formula atom(Literal literal);
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);
  static Formula negation(Formula child);
  static Formula forall(std::vector<Term> variables, Formula body);
  static Formula exists(std::vector<Term> variables, Formula body);
  static Formula equal(Term lhs, Term rhs);
  /// The empty conjunction.
  static Formula truth() { return conjunction({}); }

  Kind kind() const { return kind_; }
  /// Atom payload, or the (lhs, rhs) pair of an Equal node in args.
  const Literal& literal() const { return literal_; }
  const std::vector<Formula>& children() const { return children_; }
  /// Body of Not / ForAll / Exists.
  const Formula& body() const { return children_.front(); }
  const std::vector<Term>& variables() const { return variables_; }
  const Term& lhs() const { return literal_.args[0]; }
  const Term& rhs() const { return literal_.args[1]; }

  friend bool operator==(const Formula&, const Formula&) = default;

 private:
  Formula() = default;

  Kind kind_ = Kind::And;
  Literal literal_;
  std::vector<Formula> children_;
  std::vector<Term> variables_;
};

/// Free variables in order of first occurrence.
std::vector<Term> free_variables(const Formula& f);

/// Every literal occurring anywhere in the formula (atoms only, not
/// equalities), with polarity as written.
void collect_literals(const Formula& f, std::vector<Literal>& out);

// ---------------------------------------------------------------------------
// Effects
// ---------------------------------------------------------------------------

struct DeterministicEffect {
  std::set<Literal> add;
  std::set<Literal> del;

  bool empty() const { return add.empty() && del.empty(); }

  friend bool operator==(const DeterministicEffect&, const DeterministicEffect&) = default;
};

struct Outcome {
  Probability probability;
  DeterministicEffect effect;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

class Effect {
 public:
  static constexpr double kSumTolerance = 1e-9;

  Effect() = default;
  static Effect deterministic(DeterministicEffect e);
  /// Throws ModelError(Declaration) if the probabilities sum above one.
  static Effect probabilistic(std::vector<Outcome> outcomes);

  bool is_probabilistic() const { return std::holds_alternative<std::vector<Outcome>>(repr_); }
  const DeterministicEffect& as_deterministic() const { return std::get<DeterministicEffect>(repr_); }
  const std::vector<Outcome>& outcomes() const { return std::get<std::vector<Outcome>>(repr_); }
  /// Mass left for the implicit empty outcome; zero for deterministic effects.
  Probability residual() const;

  friend bool operator==(const Effect&, const Effect&) = default;

 private:
  std::variant<DeterministicEffect, std::vector<Outcome>> repr_;
};

// ---------------------------------------------------------------------------
// Operators, domains, problems
// ---------------------------------------------------------------------------

struct Operator {
  std::string name;
  std::vector<Term> parameters;
  Formula precondition = Formula::truth();
  Effect effect;
  /// Name of the action predicate whose positive literal appears in the
  /// precondition, when the domain declares exactly one such literal.
  std::optional<std::string> action_predicate;

  friend bool operator==(const Operator&, const Operator&) = default;
};

struct DerivedRule {
  Literal head;  // positive, arguments are distinct typed variables
  Formula body = Formula::truth();

  friend bool operator==(const DerivedRule&, const DerivedRule&) = default;
};

struct Domain {
  std::string name;
  std::set<std::string> requirements;
  TypeHierarchy types;
  std::vector<Term> constants;
  std::vector<Predicate> predicates;
  std::vector<Operator> operators;
  std::vector<DerivedRule> derived;

  const Predicate* find_predicate(std::string_view name) const;
  const Operator* find_operator(std::string_view name) const;
  const Term* find_constant(std::string_view name) const;

  friend bool operator==(const Domain&, const Domain&) = default;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<Term> objects;
  std::set<Literal> init;
  Formula goal = Formula::truth();

  friend bool operator==(const Problem&, const Problem&) = default;
};

// ---------------------------------------------------------------------------
// Substitutions
// ---------------------------------------------------------------------------

/// Finite map from variable names to constants. Each entry remembers the
/// variable's declared type so application can re-check typing.
class Substitution {
 public:
  struct Binding {
    std::string variable_type;
    Term value;
    friend bool operator==(const Binding&, const Binding&) = default;
  };
  using Map = std::map<std::string, Binding>;

  Substitution() = default;

  /// Throws ModelError(Typing) when value's type is not a subtype of the
  /// variable's type, or when either side has the wrong kind.
  void bind(const Term& variable, const Term& value, const TypeHierarchy& h);
  /// Caller guarantees typing.
  void bind_unchecked(const Term& variable, Term value);

  const Term* lookup(std::string_view variable) const;
  bool contains(std::string_view variable) const { return lookup(variable) != nullptr; }
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  const Map& bindings() const { return map_; }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  Map map_;
};

/// Replaces bound variables; unbound ones stay symbolic. Throws
/// ModelError(Typing) if a binding's value is not a subtype of the type the
/// literal declares for that variable.
Literal apply_substitution(const Literal& l, const Substitution& s, const TypeHierarchy& h);

/// Substitutes inside a formula, respecting quantifier shadowing.
Formula apply_substitution(const Formula& f, const Substitution& s, const TypeHierarchy& h);

/// Fully grounds an effect. Per outcome, literals both added and deleted are
/// dropped from the delete set. Throws ModelError(Grounding) on an unbound
/// variable.
Effect ground_effect(const Effect& e, const Substitution& s, const TypeHierarchy& h);

/// All type-respecting positive groundings of `p` over `objects`, sorted.
std::vector<Literal> all_groundings(const Predicate& p, const std::vector<Term>& objects,
                                    const TypeHierarchy& h);

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Immutable observation: objects, true positive ground literals (closed
/// world), and the goal. Objects and goal are shared between successive
/// states of one episode.
class State {
 public:
  State(std::vector<Term> objects, std::vector<Literal> literals, Formula goal);
  State(std::shared_ptr<const std::vector<Term>> objects, std::vector<Literal> literals,
        std::shared_ptr<const Formula> goal);

  const std::vector<Term>& objects() const { return *objects_; }
  /// Sorted, duplicate-free.
  const std::vector<Literal>& literals() const { return literals_; }
  const Formula& goal() const { return *goal_; }

  bool contains(const Literal& l) const;
  /// Same objects and goal, new literal set.
  State with_literals(std::vector<Literal> literals) const;

  std::size_t hash() const { return hash_; }

  const std::shared_ptr<const std::vector<Term>>& shared_objects() const { return objects_; }
  const std::shared_ptr<const Formula>& shared_goal() const { return goal_; }

  friend bool operator==(const State& a, const State& b);

 private:
  void normalize();

  std::shared_ptr<const std::vector<Term>> objects_;
  std::vector<Literal> literals_;
  std::shared_ptr<const Formula> goal_;
  std::size_t hash_ = 0;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

// ---------------------------------------------------------------------------
// Text forms (PDDL surface syntax)
// ---------------------------------------------------------------------------

std::string to_string(const Term& t);
std::string to_string(const Literal& l);
std::string to_string(const GroundAction& a);
std::string to_string(const Formula& f);
std::string to_string(const Substitution& s);

std::ostream& operator<<(std::ostream& os, const Literal& l);
std::ostream& operator<<(std::ostream& os, const GroundAction& a);
std::ostream& operator<<(std::ostream& os, const Formula& f);

}  // namespace pddlenv

#endif  // PDDLENV_MODEL_HPP
