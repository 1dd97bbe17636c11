#include "pddlenv/model.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "pddlenv/errors.hpp"

namespace pddlenv {

namespace {

[[noreturn]] void declaration_error(const std::string& msg) {
  throw ModelError(ModelError::Kind::Declaration, msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// TypeHierarchy

TypeHierarchy::TypeHierarchy() : TypeHierarchy(ParentMap{}) {}

TypeHierarchy::TypeHierarchy(ParentMap parents) : parents_(std::move(parents)) {
  auto root = parents_.find(kRootType);
  if (root != parents_.end() && root->second.has_value())
    declaration_error("type 'object' cannot have a parent (declared '" + *root->second + "')");
  parents_[kRootType] = std::nullopt;

  for (const auto& [child, parent] : parents_) {
    if (child != kRootType && !parent.has_value())
      declaration_error("type '" + child + "' has no parent");
    if (parent && !parents_.count(*parent))
      declaration_error("type '" + child + "' has undeclared parent '" + *parent + "'");
  }
  for (const auto& [child, _] : parents_) {
    std::set<std::string> seen;
    std::string cur = child;
    while (true) {
      if (!seen.insert(cur).second) declaration_error("type hierarchy has a cycle through '" + child + "'");
      const auto& p = parents_.at(cur);
      if (!p) break;
      cur = *p;
    }
    ancestors_[child] = std::move(seen);
  }
}

bool TypeHierarchy::is_subtype(const std::string& child, const std::string& parent) const {
  auto it = ancestors_.find(child);
  if (it == ancestors_.end()) declaration_error("unknown type '" + child + "'");
  if (!parents_.count(parent)) declaration_error("unknown type '" + parent + "'");
  return it->second.count(parent) != 0;
}

std::vector<std::string> TypeHierarchy::ancestor_chain(const std::string& type) const {
  if (!contains(type)) declaration_error("unknown type '" + type + "'");
  std::vector<std::string> chain{type};
  while (const auto& p = parents_.at(chain.back())) chain.push_back(*p);
  return chain;
}

bool is_subtype(const std::string& child, const std::string& parent, const TypeHierarchy& h) {
  return h.is_subtype(child, parent);
}

// ---------------------------------------------------------------------------
// Terms and literals

Term Term::variable(std::string name, std::string type) {
  if (name.empty() || name.front() != '?') name.insert(name.begin(), '?');
  return Term{std::move(name), std::move(type)};
}

Term Term::constant(std::string name, std::string type) {
  if (!name.empty() && name.front() == '?')
    declaration_error("constant name may not start with '?': " + name);
  return Term{std::move(name), std::move(type)};
}

bool Literal::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

Literal Literal::positive() const {
  Literal l = *this;
  l.negated = false;
  return l;
}

Literal Literal::negation() const {
  Literal l = *this;
  l.negated = !negated;
  return l;
}

// ---------------------------------------------------------------------------
// Formula

Formula Formula::atom(Literal literal) {
  Formula f;
  f.kind_ = Kind::Atom;
  f.literal_ = std::move(literal);
  return f;
}

Formula Formula::conjunction(std::vector<Formula> children) {
  Formula f;
  f.kind_ = Kind::And;
  f.children_ = std::move(children);
  return f;
}

Formula Formula::disjunction(std::vector<Formula> children) {
  Formula f;
  f.kind_ = Kind::Or;
  f.children_ = std::move(children);
  return f;
}

Formula Formula::negation(Formula child) {
  Formula f;
  f.kind_ = Kind::Not;
  f.children_.push_back(std::move(child));
  return f;
}

Formula Formula::forall(std::vector<Term> variables, Formula body) {
  Formula f;
  f.kind_ = Kind::ForAll;
  f.variables_ = std::move(variables);
  f.children_.push_back(std::move(body));
  return f;
}

Formula Formula::exists(std::vector<Term> variables, Formula body) {
  Formula f;
  f.kind_ = Kind::Exists;
  f.variables_ = std::move(variables);
  f.children_.push_back(std::move(body));
  return f;
}

Formula Formula::equal(Term lhs, Term rhs) {
  Formula f;
  f.kind_ = Kind::Equal;
  f.literal_.predicate = "=";
  f.literal_.args = {std::move(lhs), std::move(rhs)};
  return f;
}

namespace {

void free_vars_rec(const Formula& f, std::vector<std::string>& bound, std::vector<Term>& out) {
  auto visit_term = [&](const Term& t) {
    if (!t.is_variable()) return;
    if (std::find(bound.begin(), bound.end(), t.name) != bound.end()) return;
    if (std::any_of(out.begin(), out.end(), [&](const Term& o) { return o.name == t.name; })) return;
    out.push_back(t);
  };
  switch (f.kind()) {
    case Formula::Kind::Atom:
    case Formula::Kind::Equal:
      for (const auto& t : f.literal().args) visit_term(t);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Not:
      for (const auto& c : f.children()) free_vars_rec(c, bound, out);
      break;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      std::size_t mark = bound.size();
      for (const auto& v : f.variables()) bound.push_back(v.name);
      free_vars_rec(f.body(), bound, out);
      bound.resize(mark);
      break;
    }
  }
}

}  // namespace

std::vector<Term> free_variables(const Formula& f) {
  std::vector<std::string> bound;
  std::vector<Term> out;
  free_vars_rec(f, bound, out);
  return out;
}

void collect_literals(const Formula& f, std::vector<Literal>& out) {
  if (f.kind() == Formula::Kind::Atom) {
    out.push_back(f.literal());
    return;
  }
  for (const auto& c : f.children()) collect_literals(c, out);
}

// ---------------------------------------------------------------------------
// Effect

Effect Effect::deterministic(DeterministicEffect e) {
  Effect out;
  out.repr_ = std::move(e);
  return out;
}

Effect Effect::probabilistic(std::vector<Outcome> outcomes) {
  double sum = 0.0;
  for (const auto& o : outcomes) {
    if (o.probability > Probability::one())
      declaration_error("outcome probability " + o.probability.to_string() + " exceeds 1");
    sum += o.probability.value();
  }
  if (sum > 1.0 + kSumTolerance) declaration_error("outcome probabilities sum to more than 1");
  Effect out;
  out.repr_ = std::move(outcomes);
  return out;
}

Probability Effect::residual() const {
  if (!is_probabilistic()) return Probability::zero();
  Probability sum;
  for (const auto& o : outcomes()) sum = sum + o.probability;
  if (sum >= Probability::one()) return Probability::zero();
  return Probability::one() - sum;
}

// ---------------------------------------------------------------------------
// Domain lookups

const Predicate* Domain::find_predicate(std::string_view n) const {
  for (const auto& p : predicates)
    if (p.name == n) return &p;
  return nullptr;
}

const Operator* Domain::find_operator(std::string_view n) const {
  for (const auto& o : operators)
    if (o.name == n) return &o;
  return nullptr;
}

const Term* Domain::find_constant(std::string_view n) const {
  for (const auto& c : constants)
    if (c.name == n) return &c;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Substitution

void Substitution::bind(const Term& variable, const Term& value, const TypeHierarchy& h) {
  if (!variable.is_variable())
    throw ModelError(ModelError::Kind::Typing, "cannot bind non-variable '" + variable.name + "'");
  if (value.is_variable())
    throw ModelError(ModelError::Kind::Typing, "cannot bind " + variable.name + " to variable " + value.name);
  if (!h.is_subtype(value.type, variable.type))
    throw ModelError(ModelError::Kind::Typing, "binding " + variable.name + " - " + variable.type + " to " +
                                                   value.name + " - " + value.type + " violates typing");
  map_[variable.name] = Binding{variable.type, value};
}

void Substitution::bind_unchecked(const Term& variable, Term value) {
  map_[variable.name] = Binding{variable.type, std::move(value)};
}

const Term* Substitution::lookup(std::string_view variable) const {
  auto it = map_.find(std::string(variable));
  return it == map_.end() ? nullptr : &it->second.value;
}

Literal apply_substitution(const Literal& l, const Substitution& s, const TypeHierarchy& h) {
  Literal out = l;
  for (auto& arg : out.args) {
    if (!arg.is_variable()) continue;
    const Term* value = s.lookup(arg.name);
    if (!value) continue;
    if (!h.is_subtype(value->type, arg.type))
      throw ModelError(ModelError::Kind::Typing, "binding " + arg.name + " - " + arg.type + " to " + value->name +
                                                     " - " + value->type + " violates typing in " + to_string(l));
    arg = *value;
  }
  return out;
}

namespace {

Term substitute_term(const Term& t, const Substitution& s, const std::vector<std::string>& shadowed,
                     const TypeHierarchy& h) {
  if (!t.is_variable()) return t;
  if (std::find(shadowed.begin(), shadowed.end(), t.name) != shadowed.end()) return t;
  const Term* value = s.lookup(t.name);
  if (!value) return t;
  if (!h.is_subtype(value->type, t.type))
    throw ModelError(ModelError::Kind::Typing, "binding " + t.name + " - " + t.type + " to " + value->name +
                                                   " - " + value->type + " violates typing");
  return *value;
}

Formula substitute_rec(const Formula& f, const Substitution& s, std::vector<std::string>& shadowed,
                       const TypeHierarchy& h) {
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      Literal l = f.literal();
      for (auto& a : l.args) a = substitute_term(a, s, shadowed, h);
      return Formula::atom(std::move(l));
    }
    case Formula::Kind::Equal:
      return Formula::equal(substitute_term(f.lhs(), s, shadowed, h), substitute_term(f.rhs(), s, shadowed, h));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> cs;
      cs.reserve(f.children().size());
      for (const auto& c : f.children()) cs.push_back(substitute_rec(c, s, shadowed, h));
      return f.kind() == Formula::Kind::And ? Formula::conjunction(std::move(cs))
                                            : Formula::disjunction(std::move(cs));
    }
    case Formula::Kind::Not:
      return Formula::negation(substitute_rec(f.body(), s, shadowed, h));
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      std::size_t mark = shadowed.size();
      for (const auto& v : f.variables()) shadowed.push_back(v.name);
      Formula body = substitute_rec(f.body(), s, shadowed, h);
      shadowed.resize(mark);
      return f.kind() == Formula::Kind::ForAll ? Formula::forall(f.variables(), std::move(body))
                                               : Formula::exists(f.variables(), std::move(body));
    }
  }
  return f;
}

std::set<Literal> ground_set(const std::set<Literal>& in, const Substitution& s, const TypeHierarchy& h) {
  std::set<Literal> out;
  for (const auto& l : in) {
    Literal g = apply_substitution(l, s, h);
    if (!g.is_ground())
      throw ModelError(ModelError::Kind::Grounding, "unbound variable in effect literal " + to_string(g));
    out.insert(std::move(g));
  }
  return out;
}

DeterministicEffect ground_deterministic(const DeterministicEffect& e, const Substitution& s,
                                         const TypeHierarchy& h) {
  DeterministicEffect out{ground_set(e.add, s, h), ground_set(e.del, s, h)};
  for (const auto& a : out.add) out.del.erase(a);
  return out;
}

}  // namespace

Formula apply_substitution(const Formula& f, const Substitution& s, const TypeHierarchy& h) {
  std::vector<std::string> shadowed;
  return substitute_rec(f, s, shadowed, h);
}

Effect ground_effect(const Effect& e, const Substitution& s, const TypeHierarchy& h) {
  if (!e.is_probabilistic()) return Effect::deterministic(ground_deterministic(e.as_deterministic(), s, h));
  std::vector<Outcome> outcomes;
  outcomes.reserve(e.outcomes().size());
  for (const auto& o : e.outcomes()) outcomes.push_back({o.probability, ground_deterministic(o.effect, s, h)});
  return Effect::probabilistic(std::move(outcomes));
}

std::vector<Literal> all_groundings(const Predicate& p, const std::vector<Term>& objects, const TypeHierarchy& h) {
  std::vector<std::vector<const Term*>> slots(p.arity());
  for (std::size_t i = 0; i < p.arity(); ++i) {
    for (const auto& o : objects)
      if (h.is_subtype(o.type, p.param_types[i])) slots[i].push_back(&o);
    if (slots[i].empty()) return {};
  }
  std::vector<Literal> out;
  std::vector<std::size_t> idx(p.arity(), 0);
  while (true) {
    Literal l{p.name, {}, false};
    l.args.reserve(p.arity());
    for (std::size_t i = 0; i < p.arity(); ++i) l.args.push_back(*slots[i][idx[i]]);
    out.push_back(std::move(l));
    std::size_t k = p.arity();
    while (k > 0 && ++idx[k - 1] == slots[k - 1].size()) {
      idx[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// State

State::State(std::vector<Term> objects, std::vector<Literal> literals, Formula goal)
    : State(std::make_shared<const std::vector<Term>>(std::move(objects)), std::move(literals),
            std::make_shared<const Formula>(std::move(goal))) {}

State::State(std::shared_ptr<const std::vector<Term>> objects, std::vector<Literal> literals,
             std::shared_ptr<const Formula> goal)
    : objects_(std::move(objects)), literals_(std::move(literals)), goal_(std::move(goal)) {
  if (!std::is_sorted(objects_->begin(), objects_->end()) ||
      std::adjacent_find(objects_->begin(), objects_->end()) != objects_->end()) {
    auto sorted = *objects_;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    objects_ = std::make_shared<const std::vector<Term>>(std::move(sorted));
  }
  normalize();
}

void State::normalize() {
  for (const auto& l : literals_) {
    if (l.negated) declaration_error("state literal must be positive: " + to_string(l));
    if (!l.is_ground()) throw ModelError(ModelError::Kind::Grounding, "state literal must be ground: " + to_string(l));
  }
  if (!std::is_sorted(literals_.begin(), literals_.end())) std::sort(literals_.begin(), literals_.end());
  literals_.erase(std::unique(literals_.begin(), literals_.end()), literals_.end());

  std::size_t h = literals_.size();
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  std::hash<std::string> sh;
  for (const auto& l : literals_) {
    mix(sh(l.predicate));
    for (const auto& a : l.args) mix(sh(a.name));
  }
  hash_ = h;
}

bool State::contains(const Literal& l) const {
  if (l.negated) return !std::binary_search(literals_.begin(), literals_.end(), l.positive());
  return std::binary_search(literals_.begin(), literals_.end(), l);
}

State State::with_literals(std::vector<Literal> literals) const {
  return State(objects_, std::move(literals), goal_);
}

bool operator==(const State& a, const State& b) {
  if (a.hash_ != b.hash_ || a.literals_ != b.literals_) return false;
  if (a.objects_ != b.objects_ && *a.objects_ != *b.objects_) return false;
  return a.goal_ == b.goal_ || *a.goal_ == *b.goal_;
}

// ---------------------------------------------------------------------------
// Text

std::string to_string(const Term& t) { return t.name; }

std::string to_string(const Literal& l) {
  std::string s = "(" + l.predicate;
  for (const auto& a : l.args) s += " " + a.name;
  s += ")";
  return l.negated ? "(not " + s + ")" : s;
}

std::string to_string(const GroundAction& a) { return to_string(a.literal); }

namespace {

void typed_vars(std::ostringstream& os, const std::vector<Term>& vars) {
  os << "(";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) os << " ";
    os << vars[i].name << " - " << vars[i].type;
  }
  os << ")";
}

void write_formula(std::ostringstream& os, const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      os << to_string(f.literal());
      return;
    case Formula::Kind::Equal:
      os << "(= " << f.lhs().name << " " << f.rhs().name << ")";
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      os << (f.kind() == Formula::Kind::And ? "(and" : "(or");
      for (const auto& c : f.children()) {
        os << " ";
        write_formula(os, c);
      }
      os << ")";
      return;
    case Formula::Kind::Not:
      os << "(not ";
      write_formula(os, f.body());
      os << ")";
      return;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      os << (f.kind() == Formula::Kind::ForAll ? "(forall " : "(exists ");
      typed_vars(os, f.variables());
      os << " ";
      write_formula(os, f.body());
      os << ")";
      return;
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::ostringstream os;
  write_formula(os, f);
  return os.str();
}

std::string to_string(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [var, binding] : s.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += var + "->" + binding.value.name;
  }
  return out + "}";
}

std::ostream& operator<<(std::ostream& os, const Literal& l) { return os << to_string(l); }
std::ostream& operator<<(std::ostream& os, const GroundAction& a) { return os << to_string(a); }
std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << to_string(f); }

}  // namespace pddlenv
