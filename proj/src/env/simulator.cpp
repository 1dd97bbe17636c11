#include "simulator.hpp"

#include <algorithm>
#include <set>

namespace pddlenv {

namespace {

void flatten(const Formula& f, std::vector<Formula>& out) {
  if (f.kind() == Formula::Kind::And) {
    for (const auto& c : f.children()) flatten(c, out);
  } else {
    out.push_back(f);
  }
}

bool is_action_atom(const Formula& f, const Domain& d) {
  if (f.kind() != Formula::Kind::Atom || f.literal().negated) return false;
  const Predicate* p = d.find_predicate(f.literal().predicate);
  return p && p->is_action_predicate;
}

std::vector<Term> merged_objects(const Domain& d, const Problem& p) {
  std::vector<Term> out = p.objects;
  for (const auto& c : d.constants)
    if (std::none_of(out.begin(), out.end(), [&](const Term& t) { return t.name == c.name; })) out.push_back(c);
  return out;
}

}  // namespace

Simulator::Simulator(std::shared_ptr<const Domain> source, std::vector<Problem> problems,
                     std::vector<std::string> labels, std::vector<std::optional<std::filesystem::path>> files,
                     std::string domain_label, std::optional<std::filesystem::path> domain_file,
                     bool operators_as_actions)
    : source_(std::move(source)),
      domain_(*source_),
      problems_(std::move(problems)),
      labels_(std::move(labels)),
      domain_label_(std::move(domain_label)),
      domain_file_(std::move(domain_file)) {
  if (problems_.empty()) throw ConfigurationError("an environment needs at least one problem");
  build_schemas(operators_as_actions);
  program_ = std::make_unique<inference::Program>(domain_);

  labels_.resize(problems_.size());
  files.resize(problems_.size());
  data_.resize(problems_.size());
  for (std::size_t i = 0; i < problems_.size(); ++i) {
    const Problem& p = problems_[i];
    if (p.domain_name != domain_.name)
      throw ConfigurationError("problem '" + p.name + "' is for domain '" + p.domain_name + "', not '" + domain_.name +
                               "'");
    ProblemData& pd = data_[i];
    pd.label = labels_[i].empty() ? p.name : labels_[i];
    labels_[i] = pd.label;
    pd.file = files[i];
    std::vector<Term> objects = merged_objects(domain_, p);
    pd.initial.emplace(objects, std::vector<Literal>(p.init.begin(), p.init.end()), p.goal);
    pd.universe = std::make_shared<const inference::Universe>(*program_, pd.initial->objects());
    for (const auto& s : schemas_)
      pd.enumerate.emplace_back(*pd.universe,
                                inference::Query{s.body, s.op->parameters, inference::Mode::AllSolutions});
    pd.all_actions = ground_all_actions(pd.initial->objects());
  }
}

void Simulator::build_schemas(bool operators_as_actions) {
  if (operators_as_actions) {
    std::set<std::string> former;
    for (auto& p : domain_.predicates) {
      if (p.is_action_predicate) former.insert(p.name);
      p.is_action_predicate = false;
    }
    for (auto& op : domain_.operators) {
      std::vector<Formula> conjuncts;
      flatten(op.precondition, conjuncts);
      std::vector<Formula> kept;
      for (auto& c : conjuncts) {
        bool declared_action = c.kind() == Formula::Kind::Atom && !c.literal().negated &&
                               former.count(c.literal().predicate);
        if (!declared_action) kept.push_back(std::move(c));
      }
      op.precondition = Formula::conjunction(std::move(kept));
    }
    // Declared action predicates nothing refers to any more are dropped, so
    // an operator may share its name with its old action predicate.
    std::set<std::string> used;
    auto note = [&](const Formula& f) {
      std::vector<Literal> lits;
      collect_literals(f, lits);
      for (const auto& l : lits) used.insert(l.predicate);
    };
    auto note_effect = [&](const DeterministicEffect& e) {
      for (const auto& l : e.add) used.insert(l.predicate);
      for (const auto& l : e.del) used.insert(l.predicate);
    };
    for (const auto& op : domain_.operators) {
      note(op.precondition);
      if (op.effect.is_probabilistic()) {
        for (const auto& o : op.effect.outcomes()) note_effect(o.effect);
      } else {
        note_effect(op.effect.as_deterministic());
      }
    }
    for (const auto& r : domain_.derived) note(r.body);
    std::erase_if(domain_.predicates,
                  [&](const Predicate& p) { return former.count(p.name) && !used.count(p.name); });

    for (auto& op : domain_.operators) {
      if (domain_.find_predicate(op.name))
        throw ConfigurationError("cannot synthesize action predicate '" + op.name +
                                 "': a predicate with that name already exists");
      Predicate ap{op.name, {}, true, false};
      for (const auto& v : op.parameters) ap.param_types.push_back(v.type);
      domain_.predicates.push_back(std::move(ap));
      std::vector<Formula> conjuncts;
      flatten(op.precondition, conjuncts);
      conjuncts.insert(conjuncts.begin(), Formula::atom(Literal{op.name, op.parameters, false}));
      op.precondition = Formula::conjunction(std::move(conjuncts));
      op.action_predicate = op.name;
    }
  }

  for (const auto& op : domain_.operators) {
    std::vector<Formula> conjuncts;
    flatten(op.precondition, conjuncts);
    OperatorSchema s;
    s.op = &op;
    std::vector<Formula> rest;
    for (auto& c : conjuncts) {
      if (!is_action_atom(c, domain_)) {
        rest.push_back(std::move(c));
        continue;
      }
      if (!s.action_predicate.empty())
        throw ConfigurationError("operator '" + op.name + "' has more than one action predicate in its precondition");
      s.action_predicate = c.literal().predicate;
      s.action_args = c.literal().args;
    }
    if (s.action_predicate.empty())
      throw ConfigurationError("operator '" + op.name +
                               "' has no action predicate in its precondition; declare one or use operators as actions");
    auto [it, inserted] = by_action_.emplace(s.action_predicate, schemas_.size());
    if (!inserted)
      throw ConfigurationError("operators '" + schemas_[it->second].op->name + "' and '" + op.name +
                               "' share the action predicate '" + s.action_predicate + "'");
    for (const auto& t : s.action_args) {
      int idx = -1;
      for (std::size_t k = 0; k < op.parameters.size(); ++k)
        if (op.parameters[k].name == t.name) idx = static_cast<int>(k);
      s.arg_param.push_back(idx);
    }
    s.body = Formula::conjunction(std::move(rest));
    schemas_.push_back(std::move(s));
  }
  // Keep Operator::action_predicate consistent with what stepping uses.
  for (auto& op : domain_.operators) op.action_predicate = schemas_[&op - domain_.operators.data()].action_predicate;
}

const OperatorSchema* Simulator::schema_for(const std::string& action_predicate) const {
  auto it = by_action_.find(action_predicate);
  return it == by_action_.end() ? nullptr : &schemas_[it->second];
}

const ProblemData* Simulator::problem_for(const State& s) const {
  for (const auto& pd : data_)
    if (pd.initial->shared_objects() == s.shared_objects()) return &pd;
  for (const auto& pd : data_)
    if (pd.initial->objects() == s.objects()) return &pd;
  return nullptr;
}

std::shared_ptr<const inference::Universe> Simulator::universe_for(const State& s) const {
  if (const ProblemData* pd = problem_for(s)) return pd->universe;
  return std::make_shared<const inference::Universe>(*program_, s.objects());
}

std::vector<GroundAction> Simulator::ground_all_actions(const std::vector<Term>& objects) const {
  std::vector<GroundAction> out;
  for (const auto& p : domain_.predicates) {
    if (!p.is_action_predicate) continue;
    for (auto& l : all_groundings(p, objects, domain_.types)) out.push_back(GroundAction{std::move(l)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pddlenv
