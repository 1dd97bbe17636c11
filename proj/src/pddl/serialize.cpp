#include <sstream>

#include "pddlenv/pddl.hpp"

namespace pddlenv::pddl {

namespace {

std::string typed(const std::vector<Term>& terms) {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += ' ';
    out += t.name + " - " + t.type;
  }
  return out;
}

std::string literals(const std::set<Literal>& add, const std::set<Literal>& del) {
  std::string out = "(and";
  for (const auto& l : add) out += " " + to_string(l);
  for (const auto& l : del) out += " (not " + to_string(l.positive()) + ")";
  return out + ")";
}

std::string effect_text(const Effect& e) {
  if (!e.is_probabilistic()) {
    const auto& d = e.as_deterministic();
    return literals(d.add, d.del);
  }
  std::string out = "(probabilistic";
  for (const auto& o : e.outcomes())
    out += " " + o.probability.to_string() + " " + literals(o.effect.add, o.effect.del);
  return out + ")";
}

}  // namespace

std::string serialize_domain(const Domain& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : d.requirements) os << ' ' << r;
    os << ")\n";
  }
  if (d.types.parents().size() > 1) {
    os << "  (:types";
    for (const auto& [name, parent] : d.types.parents())
      if (parent) os << ' ' << name << " - " << *parent;
    os << ")\n";
  }
  if (!d.constants.empty()) os << "  (:constants " << typed(d.constants) << ")\n";

  os << "  (:predicates";
  for (const auto& p : d.predicates) {
    os << "\n    (" << p.name;
    for (std::size_t i = 0; i < p.param_types.size(); ++i) os << " ?x" << i << " - " << p.param_types[i];
    os << ")";
  }
  os << ")\n";

  std::vector<std::string> action_preds;
  for (const auto& p : d.predicates)
    if (p.is_action_predicate) action_preds.push_back(p.name);
  if (!action_preds.empty()) {
    os << "  (:actions";
    for (const auto& a : action_preds) os << ' ' << a;
    os << ")\n";
  }

  for (const auto& r : d.derived) {
    os << "  (:derived (" << r.head.predicate;
    if (!r.head.args.empty()) os << ' ' << typed(r.head.args);
    os << ")\n    " << to_string(r.body) << ")\n";
  }

  for (const auto& op : d.operators) {
    os << "  (:action " << op.name << "\n";
    os << "    :parameters (" << typed(op.parameters) << ")\n";
    os << "    :precondition " << to_string(op.precondition) << "\n";
    os << "    :effect " << effect_text(op.effect) << ")\n";
  }
  os << ")\n";
  return os.str();
}

std::string serialize_problem(const Problem& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n";
  os << "  (:domain " << p.domain_name << ")\n";
  if (!p.objects.empty()) os << "  (:objects " << typed(p.objects) << ")\n";
  os << "  (:init";
  for (const auto& l : p.init) os << "\n    " << to_string(l);
  os << ")\n";
  os << "  (:goal " << to_string(p.goal) << "))\n";
  return os.str();
}

}  // namespace pddlenv::pddl
