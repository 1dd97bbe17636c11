#include <algorithm>
#include <cstring>

#include "node.hpp"
#include "pddlenv/errors.hpp"

namespace pddlenv::inference {

namespace {

std::string tuple_key(const int* values, std::size_t arity) {
  return std::string(reinterpret_cast<const char*>(values), arity * sizeof(int));
}

}  // namespace

bool Model::Table::contains(const int* values) const {
  if (arity == 0) return nullary;
  return members.count(tuple_key(values, arity)) != 0;
}

bool Model::Table::insert(const int* values, std::size_t universe_size) {
  if (arity == 0) {
    bool fresh = !nullary;
    nullary = true;
    return fresh;
  }
  if (!members.insert(tuple_key(values, arity)).second) return false;
  std::size_t row = rows.size() / arity;
  rows.insert(rows.end(), values, values + arity);
  if (by_first.size() < universe_size) by_first.resize(universe_size);
  by_first[static_cast<std::size_t>(values[0])].push_back(row);
  return true;
}

Model::Model(std::shared_ptr<const Universe> universe, const State& state) : universe_(std::move(universe)) {
  const Program& program = universe_->program();
  tables_.resize(program.predicate_count());
  for (std::size_t i = 0; i < tables_.size(); ++i) tables_[i].arity = program.predicate(static_cast<int>(i)).arity();

  int values[kMaxArity];
  for (const auto& l : state.literals()) {
    int pid = program.predicate_id(l.predicate);
    if (pid < 0) throw ModelError(ModelError::Kind::Declaration, "state uses undeclared predicate '" + l.predicate + "'");
    const Predicate& p = program.predicate(pid);
    if (p.is_derived) continue;  // always recomputed
    if (p.arity() != l.args.size())
      throw ModelError(ModelError::Kind::Declaration, "wrong number of arguments in state literal " + to_string(l));
    for (std::size_t i = 0; i < l.args.size(); ++i) {
      values[i] = universe_->object_id(l.args[i].name);
      if (values[i] < 0)
        throw ModelError(ModelError::Kind::Declaration, "state literal " + to_string(l) + " mentions unknown object '" +
                                                            l.args[i].name + "'");
    }
    tables_[static_cast<std::size_t>(pid)].insert(values, universe_->size());
  }
  close_derived();
}

void Model::close_derived() {
  const auto& queries = universe_->rule_queries();
  const auto& heads = universe_->rule_heads();
  for (const auto& stratum : universe_->program().strata()) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t rule : stratum) {
        std::vector<Row> rows;
        detail::solve_general(*this, queries[rule], false, rows);
        auto& table = tables_[static_cast<std::size_t>(heads[rule])];
        for (const auto& row : rows) changed |= table.insert(row.data(), universe_->size());
      }
    }
  }
}

std::vector<Row> Model::solve(const CompiledQuery& q, Strategy strategy) const {
  bool conjunctive = false;
  switch (strategy) {
    case Strategy::Auto:
      conjunctive = q.is_conjunctive();
      break;
    case Strategy::Conjunctive:
      if (!q.is_conjunctive()) throw ContractError("query is not a conjunction of literals");
      conjunctive = true;
      break;
    case Strategy::General:
      break;
  }
  std::vector<Row> rows;
  bool stop_at_first = q.mode() == Mode::Boolean;
  if (conjunctive)
    detail::solve_conjunctive(*this, q, stop_at_first, rows);
  else
    detail::solve_general(*this, q, stop_at_first, rows);
  if (stop_at_first) return rows;
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  if (q.mode() == Mode::FirstSolution && rows.size() > 1) rows.resize(1);
  return rows;
}

bool Model::satisfiable(const CompiledQuery& q, Strategy strategy) const {
  std::vector<Row> rows;
  bool conjunctive = strategy == Strategy::Conjunctive || (strategy == Strategy::Auto && q.is_conjunctive());
  if (strategy == Strategy::Conjunctive && !q.is_conjunctive())
    throw ContractError("query is not a conjunction of literals");
  if (conjunctive)
    detail::solve_conjunctive(*this, q, true, rows);
  else
    detail::solve_general(*this, q, true, rows);
  return !rows.empty();
}

Substitution Model::to_substitution(const CompiledQuery& q, const Row& row) const {
  Substitution s;
  for (std::size_t i = 0; i < row.size(); ++i) s.bind_unchecked(q.free_vars()[i], universe_->object(row[i]));
  return s;
}

std::vector<Substitution> Model::find_assignments(const Query& q, Strategy strategy) const {
  CompiledQuery cq(*universe_, q);
  std::vector<Substitution> out;
  for (const auto& row : solve(cq, strategy)) out.push_back(to_substitution(cq, row));
  return out;
}

bool Model::holds(const Formula& f, Strategy strategy) const {
  auto free = free_variables(f);
  if (!free.empty()) throw ContractError("holds() needs a closed formula; " + free.front().name + " is free");
  CompiledQuery cq(*universe_, Query{f, {}, Mode::Boolean});
  return satisfiable(cq, strategy);
}

bool Model::contains(const Literal& l) const {
  int pid = universe_->program().predicate_id(l.predicate);
  if (pid < 0) throw ModelError(ModelError::Kind::Declaration, "undeclared predicate '" + l.predicate + "'");
  const auto& t = tables_[static_cast<std::size_t>(pid)];
  if (t.arity != l.args.size()) return false;
  int values[kMaxArity];
  for (std::size_t i = 0; i < l.args.size(); ++i) {
    values[i] = universe_->object_id(l.args[i].name);
    if (values[i] < 0) return false;
  }
  return t.contains(values);
}

std::vector<Literal> Model::derived_literals() const {
  std::vector<Literal> out;
  const Program& program = universe_->program();
  for (std::size_t pid = 0; pid < tables_.size(); ++pid) {
    const Predicate& p = program.predicate(static_cast<int>(pid));
    if (!p.is_derived) continue;
    const auto& t = tables_[pid];
    if (t.arity == 0) {
      if (t.nullary) out.push_back(Literal{p.name, {}, false});
      continue;
    }
    for (std::size_t r = 0; r < t.row_count(); ++r) {
      Literal l{p.name, {}, false};
      for (std::size_t i = 0; i < t.arity; ++i) l.args.push_back(universe_->object(t.rows[r * t.arity + i]));
      out.push_back(std::move(l));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Substitution> find_assignments(const Query& q, const State& s, const Domain& d, Strategy strategy) {
  Program program(d);
  auto universe = std::make_shared<const Universe>(program, s.objects());
  Model model(universe, s);
  return model.find_assignments(q, strategy);
}

bool holds(const Formula& f, const State& s, const Domain& d) {
  Program program(d);
  auto universe = std::make_shared<const Universe>(program, s.objects());
  return Model(universe, s).holds(f);
}

std::vector<Literal> derived_closure(const State& s, const Domain& d) {
  Program program(d);
  auto universe = std::make_shared<const Universe>(program, s.objects());
  return Model(universe, s).derived_literals();
}

}  // namespace pddlenv::inference
