#ifndef PDDLENV_TESTS_ORACLE_HPP
#define PDDLENV_TESTS_ORACLE_HPP

// Naive reference semantics used to check the engine. Everything here works
// on printed atoms ("(on a b)") and object names and enumerates every
// assignment, so it shares no evaluation code with the library.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pddlenv/env.hpp"
#include "pddlenv/model.hpp"

namespace oracle {

using Atoms = std::set<std::string>;
using Row = std::vector<std::string>;
using Bindings = std::map<std::string, std::string>;

std::string atom(const std::string& predicate, const std::vector<std::string>& args);
Atoms atoms_of(const std::vector<pddlenv::Literal>& literals);
Atoms atoms_of(const pddlenv::State& s);

class World {
 public:
  World(const pddlenv::Domain& d, const std::vector<pddlenv::Term>& objects, Atoms base);

  /// Names of objects whose type descends from `type`, sorted.
  std::vector<std::string> objects_of(const std::string& type) const;
  bool descends(const std::string& type, const std::string& ancestor) const;

  /// Base facts plus the derived closure.
  const Atoms& facts() const { return facts_; }
  bool holds(const pddlenv::Formula& f, const Bindings& b) const;
  bool holds(const pddlenv::Formula& f, const Bindings& b, const Atoms& facts) const;

  /// Every assignment of `vars` (in order, names ascending) satisfying f.
  std::vector<Row> solve(const pddlenv::Formula& f, const std::vector<pddlenv::Term>& vars) const;

  const pddlenv::Domain& domain() const { return *d_; }

 private:
  void close();

  const pddlenv::Domain* d_;
  std::vector<pddlenv::Term> objects_;
  Atoms facts_;
};

/// Derived atoms of a world (facts minus base), sorted.
Atoms derived_only(const World& w, const Atoms& base);

/// Variable names free in f, first occurrence order.
std::vector<std::string> free_names(const pddlenv::Formula& f);

/// Action literals whose operator precondition holds when the action literal
/// itself is assumed true. Operates on the domain the env steps with.
Atoms valid_actions(const pddlenv::Domain& d, const std::vector<pddlenv::Term>& objects, const Atoms& base);

/// STRIPS successor of a deterministic action: the least parameter binding
/// (names ascending, parameters in order) that satisfies the precondition,
/// then (s \ del) + add. Empty when the action is not applicable.
std::optional<Atoms> successor(const pddlenv::Domain& d, const std::vector<pddlenv::Term>& objects, const Atoms& base,
                               const std::string& action);

/// Shortest plan length from the initial state of problem `i` by breadth-first
/// search over valid_actions/successor, or nullopt past `limit` states.
std::optional<std::size_t> bfs_plan_length(const pddlenv::Env& env, std::size_t i, std::size_t limit = 200000);

}  // namespace oracle

#endif  // PDDLENV_TESTS_ORACLE_HPP
