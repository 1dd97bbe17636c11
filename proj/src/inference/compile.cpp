#include <algorithm>
#include <string>
#include <unordered_map>

#include "node.hpp"
#include "pddlenv/errors.hpp"

namespace pddlenv::inference {

Query Query::over(Formula f, Mode mode) {
  auto vars = free_variables(f);
  return Query{std::move(f), std::move(vars), mode};
}

// ---------------------------------------------------------------------------
// Program

Program::Program(const Domain& d) : domain_(&d) {
  for (const auto& p : d.predicates) {
    if (p.arity() > kMaxArity)
      throw ModelError(ModelError::Kind::Declaration,
                       "predicate '" + p.name + "' exceeds the maximum arity of " + std::to_string(kMaxArity));
    if (ids_.emplace(p.name, static_cast<int>(predicates_.size())).second) predicates_.push_back(&p);
  }
  strata_ = stratify(d);
}

int Program::predicate_id(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

class Compiler {
 public:
  explicit Compiler(const Universe& u) : u_(u), next_unknown_(static_cast<int>(u.size())) {}

  int add_slot(const Term& var) {
    int slot = static_cast<int>(domains_.size());
    domains_.push_back(&u_.members(var.type));
    flags_.push_back(&u_.member_flags(var.type));
    return slot;
  }

  void push_scope(const Term& var, int slot) { scope_.emplace_back(var.name, slot); }
  void pop_scope(std::size_t n) { scope_.resize(scope_.size() - n); }

  Node compile(const Formula& f) {
    Node n;
    switch (f.kind()) {
      case Formula::Kind::Atom: {
        const Literal& l = f.literal();
        n.kind = l.negated ? Node::Kind::NegAtom : Node::Kind::Atom;
        n.predicate = u_.program().predicate_id(l.predicate);
        if (n.predicate < 0)
          throw ModelError(ModelError::Kind::Declaration, "undeclared predicate '" + l.predicate + "'");
        if (u_.program().predicate(n.predicate).arity() != l.args.size())
          throw ModelError(ModelError::Kind::Declaration, "wrong number of arguments in " + to_string(l));
        for (const auto& t : l.args) n.args.push_back(arg(t));
        break;
      }
      case Formula::Kind::Equal:
        n.kind = Node::Kind::Equal;
        n.args = {arg(f.lhs()), arg(f.rhs())};
        break;
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        bool is_and = f.kind() == Formula::Kind::And;
        if (f.children().empty()) {
          n.kind = is_and ? Node::Kind::True : Node::Kind::False;
          break;
        }
        n.kind = is_and ? Node::Kind::And : Node::Kind::Or;
        for (const auto& c : f.children()) n.children.push_back(compile(c));
        break;
      }
      case Formula::Kind::Not:
        n = negate(compile(f.body()));
        break;
      case Formula::Kind::Exists:
        n = quantify(f);
        break;
      case Formula::Kind::ForAll: {
        // forall v. b  ==  not exists v. not b
        std::size_t mark = scope_.size();
        Node e;
        e.kind = Node::Kind::Exists;
        for (const auto& v : f.variables()) {
          int slot = add_slot(v);
          push_scope(v, slot);
          e.quantified.push_back(slot);
        }
        e.children.push_back(negate(compile(f.body())));
        pop_scope(scope_.size() - mark);
        n = negate(std::move(e));
        break;
      }
    }
    return n;
  }

  std::vector<const std::vector<int>*> domains_;
  std::vector<const std::vector<char>*> flags_;

 private:
  Node quantify(const Formula& f) {
    std::size_t mark = scope_.size();
    Node e;
    e.kind = Node::Kind::Exists;
    for (const auto& v : f.variables()) {
      int slot = add_slot(v);
      push_scope(v, slot);
      e.quantified.push_back(slot);
    }
    e.children.push_back(compile(f.body()));
    pop_scope(scope_.size() - mark);
    return e;
  }

  static Node negate(Node child) {
    switch (child.kind) {
      case Node::Kind::Atom:
        child.kind = Node::Kind::NegAtom;
        return child;
      case Node::Kind::NegAtom:
        child.kind = Node::Kind::Atom;
        return child;
      case Node::Kind::True:
        child.kind = Node::Kind::False;
        return child;
      case Node::Kind::False:
        child.kind = Node::Kind::True;
        return child;
      case Node::Kind::Not: {
        Node inner = std::move(child.children.front());
        return inner;
      }
      default: {
        Node n;
        n.kind = Node::Kind::Not;
        n.children.push_back(std::move(child));
        return n;
      }
    }
  }

  Arg arg(const Term& t) {
    Arg a;
    if (t.is_variable()) {
      for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
        if (it->first == t.name) {
          a.slot = it->second;
          return a;
        }
      }
      throw ContractError("variable " + t.name + " is neither quantified nor a query variable");
    }
    int id = u_.object_id(t.name);
    if (id < 0) {
      auto [it, inserted] = unknown_.emplace(t.name, next_unknown_);
      if (inserted) ++next_unknown_;
      id = it->second;
    }
    a.object = id;
    return a;
  }

  const Universe& u_;
  std::vector<std::pair<std::string, int>> scope_;
  std::unordered_map<std::string, int> unknown_;
  int next_unknown_;
};

void annotate_free_slots(Node& n) {
  std::vector<int> slots;
  for (const auto& a : n.args)
    if (a.slot >= 0) slots.push_back(a.slot);
  for (auto& c : n.children) {
    annotate_free_slots(c);
    slots.insert(slots.end(), c.free_slots.begin(), c.free_slots.end());
  }
  std::sort(slots.begin(), slots.end());
  slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
  if (!n.quantified.empty()) {
    std::erase_if(slots, [&](int s) {
      return std::find(n.quantified.begin(), n.quantified.end(), s) != n.quantified.end();
    });
  }
  n.free_slots = std::move(slots);
}

bool is_literal_node(const Node& n) {
  switch (n.kind) {
    case Node::Kind::True:
    case Node::Kind::False:
    case Node::Kind::Atom:
    case Node::Kind::NegAtom:
    case Node::Kind::Equal:
      return true;
    case Node::Kind::And:
      return std::all_of(n.children.begin(), n.children.end(), is_literal_node);
    default:
      return false;
  }
}

}  // namespace

CompiledQuery::CompiledQuery(const Universe& u, const Query& q)
    : free_vars_(q.free_vars), mode_(q.mode) {
  Compiler c(u);
  for (std::size_t i = 0; i < q.free_vars.size(); ++i) {
    const Term& v = q.free_vars[i];
    if (!v.is_variable()) throw ContractError("query variable list contains constant '" + v.name + "'");
    for (std::size_t j = 0; j < i; ++j)
      if (q.free_vars[j].name == v.name) throw ContractError("query variable " + v.name + " listed twice");
    c.push_scope(v, c.add_slot(v));
  }
  root_ = std::make_unique<Node>(c.compile(q.formula));
  annotate_free_slots(*root_);
  slot_domains_ = std::move(c.domains_);
  slot_flags_ = std::move(c.flags_);
  conjunctive_ = is_literal_node(*root_);
}

CompiledQuery::~CompiledQuery() = default;
CompiledQuery::CompiledQuery(CompiledQuery&&) noexcept = default;
CompiledQuery& CompiledQuery::operator=(CompiledQuery&&) noexcept = default;

// ---------------------------------------------------------------------------
// Universe

Universe::Universe(const Program& program, const std::vector<Term>& objects) : program_(&program) {
  const Domain& d = program.domain();
  std::vector<Term> all = objects;
  all.insert(all.end(), d.constants.begin(), d.constants.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  for (std::size_t i = 0; i + 1 < all.size(); ++i)
    if (all[i].name == all[i + 1].name)
      throw ModelError(ModelError::Kind::Declaration, "object '" + all[i].name + "' declared with two types");
  objects_ = std::move(all);
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    if (!d.types.contains(objects_[i].type))
      throw ModelError(ModelError::Kind::Declaration,
                       "object '" + objects_[i].name + "' has undeclared type '" + objects_[i].type + "'");
    ids_.emplace(objects_[i].name, static_cast<int>(i));
  }
  for (const auto& [type, _] : d.types.parents()) {
    auto& list = members_[type];
    auto& flags = flags_[type];
    flags.assign(objects_.size(), 0);
    for (std::size_t i = 0; i < objects_.size(); ++i) {
      if (d.types.is_subtype(objects_[i].type, type)) {
        list.push_back(static_cast<int>(i));
        flags[i] = 1;
      }
    }
  }
  for (const auto& rule : d.derived) {
    rule_heads_.push_back(program.predicate_id(rule.head.predicate));
    rule_queries_.emplace_back(*this, Query{rule.body, rule.head.args, Mode::AllSolutions});
  }
}

Universe::~Universe() = default;

int Universe::object_id(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

const std::vector<int>& Universe::members(const std::string& type) const {
  auto it = members_.find(type);
  if (it == members_.end()) throw ModelError(ModelError::Kind::Declaration, "unknown type '" + type + "'");
  return it->second;
}

const std::vector<char>& Universe::member_flags(const std::string& type) const {
  auto it = flags_.find(type);
  if (it == flags_.end()) throw ModelError(ModelError::Kind::Declaration, "unknown type '" + type + "'");
  return it->second;
}

}  // namespace pddlenv::inference
