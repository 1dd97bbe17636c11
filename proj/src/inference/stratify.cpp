#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "pddlenv/errors.hpp"
#include "pddlenv/inference.hpp"

namespace pddlenv::inference {

namespace {

struct Dependency {
  std::string target;
  bool negative;
};

// Universal quantification counts as two negations (not exists not), so
// only explicit negation flips polarity.
void collect_dependencies(const Formula& f, bool negative, const std::set<std::string>& derived,
                          std::vector<Dependency>& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      if (derived.count(f.literal().predicate))
        out.push_back({f.literal().predicate, negative != f.literal().negated});
      return;
    case Formula::Kind::Equal:
      return;
    case Formula::Kind::Not:
      collect_dependencies(f.body(), !negative, derived, out);
      return;
    default:
      for (const auto& c : f.children()) collect_dependencies(c, negative, derived, out);
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> stratify(const Domain& d) {
  std::set<std::string> heads;
  for (const auto& r : d.derived) heads.insert(r.head.predicate);
  if (heads.empty()) return {};

  std::map<std::string, std::vector<Dependency>> edges;
  for (const auto& r : d.derived) {
    auto& e = edges[r.head.predicate];
    collect_dependencies(r.body, false, heads, e);
  }

  // Tarjan's algorithm emits a component only after every component it
  // depends on, which is exactly evaluation order.
  std::map<std::string, int> index, low;
  std::map<std::string, bool> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> components;
  int counter = 0;

  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& dep : edges[v]) {
      if (!index.count(dep.target)) {
        visit(dep.target);
        low[v] = std::min(low[v], low[dep.target]);
      } else if (on_stack[dep.target]) {
        low[v] = std::min(low[v], index[dep.target]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      components.push_back(std::move(comp));
    }
  };
  for (const auto& h : heads)
    if (!index.count(h)) visit(h);

  std::map<std::string, std::size_t> component_of;
  for (std::size_t i = 0; i < components.size(); ++i)
    for (const auto& p : components[i]) component_of[p] = i;

  for (const auto& [head, deps] : edges) {
    for (const auto& dep : deps) {
      if (dep.negative && component_of.at(dep.target) == component_of.at(head))
        throw ModelError(ModelError::Kind::Declaration,
                         "derived predicate '" + head + "' depends negatively on '" + dep.target +
                             "' within its own stratum; the rules are not stratifiable");
    }
  }

  std::vector<std::vector<std::size_t>> strata(components.size());
  for (std::size_t i = 0; i < d.derived.size(); ++i)
    strata[component_of.at(d.derived[i].head.predicate)].push_back(i);
  return strata;
}

}  // namespace pddlenv::inference
