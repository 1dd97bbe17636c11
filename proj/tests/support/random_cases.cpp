#include "random_cases.hpp"

#include <algorithm>

#include "oracle.hpp"
#include "pddlenv/pddl.hpp"

namespace cases {

using pddlenv::Formula;
using pddlenv::Literal;
using pddlenv::Term;

namespace {

constexpr const char* kDomain = R"(
(define (domain rnd)
  (:requirements :typing :equality :derived-predicates :negative-preconditions)
  (:types t1 t2 - object t3 - t1)
  (:predicates (p ?x - t1) (q ?x ?y - object) (r ?x - t2 ?y - t1) (z)
               (d1 ?x - t1) (d2 ?x - t1))
  (:derived (d1 ?x - t1) (or (p ?x) (exists (?y - t1) (and (q ?x ?y) (d1 ?y)))))
  (:derived (d2 ?x - t1) (and (p ?x) (not (exists (?y - t2) (r ?y ?x))))))
)";

const std::vector<std::string> kTypes = {"object", "t1", "t2", "t3"};

struct Gen {
  std::mt19937_64& g;
  const pddlenv::Domain& d;
  std::vector<Term> objects;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(g); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(g) < p; }

  bool descends(const std::string& t, const std::string& ancestor) const { return d.types.is_subtype(t, ancestor); }

  std::vector<Term> candidates(const std::vector<Term>& scope, const std::string& type) const {
    std::vector<Term> out;
    for (const auto& v : scope)
      if (descends(v.type, type)) out.push_back(v);
    for (const auto& o : objects)
      if (descends(o.type, type)) out.push_back(o);
    return out;
  }

  std::optional<Formula> atom(const std::vector<Term>& scope, bool negated) {
    for (int attempt = 0; attempt < 6; ++attempt) {
      const auto& p = d.predicates[static_cast<std::size_t>(pick(static_cast<int>(d.predicates.size())))];
      Literal l{p.name, {}, negated};
      bool ok = true;
      for (const auto& t : p.param_types) {
        auto c = candidates(scope, t);
        if (c.empty()) {
          ok = false;
          break;
        }
        // prefer variables so answers depend on the assignment
        std::size_t vars = 0;
        while (vars < c.size() && c[vars].is_variable()) ++vars;
        if (vars > 0 && chance(0.7))
          l.args.push_back(c[static_cast<std::size_t>(pick(static_cast<int>(vars)))]);
        else
          l.args.push_back(c[static_cast<std::size_t>(pick(static_cast<int>(c.size())))]);
      }
      if (ok) return Formula::atom(std::move(l));
    }
    return std::nullopt;
  }

  Formula equality(const std::vector<Term>& scope) {
    auto c = candidates(scope, "object");
    Term a = c[static_cast<std::size_t>(pick(static_cast<int>(c.size())))];
    Term b = c[static_cast<std::size_t>(pick(static_cast<int>(c.size())))];
    Formula e = Formula::equal(a, b);
    return chance(0.5) ? Formula::negation(std::move(e)) : e;
  }

  Formula leaf(const std::vector<Term>& scope) {
    double r = std::uniform_real_distribution<double>(0.0, 1.0)(g);
    if (r < 0.15) return equality(scope);
    if (auto a = atom(scope, r < 0.3)) return *a;
    return Formula::atom(Literal{"z", {}, false});
  }

  Formula formula(int depth, const std::vector<Term>& scope) {
    if (depth == 0 || chance(0.25)) return leaf(scope);
    switch (pick(5)) {
      case 0:
      case 1: {
        std::vector<Formula> kids;
        int n = 2 + pick(2);
        for (int i = 0; i < n; ++i) kids.push_back(formula(depth - 1, scope));
        return pick(2) == 0 ? Formula::conjunction(std::move(kids)) : Formula::disjunction(std::move(kids));
      }
      case 2:
        return Formula::negation(formula(depth - 1, scope));
      default: {
        static const char* pool[] = {"?a", "?b", "?c", "?f0"};
        std::vector<Term> vars;
        int n = 1 + pick(2);
        for (int i = 0; i < n; ++i) {
          std::string name = pool[pick(4)];
          if (std::any_of(vars.begin(), vars.end(), [&](const Term& t) { return t.name == name; })) continue;
          vars.push_back(Term::variable(name, kTypes[static_cast<std::size_t>(pick(4))]));
        }
        std::vector<Term> inner;
        for (const auto& s : scope)
          if (std::none_of(vars.begin(), vars.end(), [&](const Term& v) { return v.name == s.name; }))
            inner.push_back(s);
        inner.insert(inner.end(), vars.begin(), vars.end());
        Formula body = formula(depth - 1, inner);
        return pick(2) == 0 ? Formula::exists(std::move(vars), std::move(body))
                            : Formula::forall(std::move(vars), std::move(body));
      }
    }
  }

  void make_world(int max_objects) {
    int n = 1 + pick(max_objects);
    for (int i = 0; i < n; ++i)
      objects.push_back(Term::constant("o" + std::to_string(i), kTypes[static_cast<std::size_t>(pick(4))]));
  }

  std::vector<Literal> make_facts() {
    std::vector<Literal> facts;
    for (const auto& p : d.predicates) {
      if (p.is_derived) continue;
      for (const auto& l : pddlenv::all_groundings(p, objects, d.types))
        if (chance(0.35)) facts.push_back(l);
    }
    return facts;
  }

  std::vector<Term> free_vars() {
    std::vector<Term> out;
    int n = pick(4);
    for (int i = 0; i < n; ++i)
      out.push_back(Term::variable("?f" + std::to_string(i), kTypes[static_cast<std::size_t>(pick(4))]));
    return out;
  }
};

}  // namespace

const std::shared_ptr<const pddlenv::Domain>& fixture_domain() {
  static const auto d = std::make_shared<const pddlenv::Domain>(pddlenv::pddl::parse_domain(kDomain, "<rnd>"));
  return d;
}

pddlenv::State QueryCase::state() const { return pddlenv::State(objects, facts, Formula::truth()); }

std::string QueryCase::describe() const {
  std::string s = "objects:";
  for (const auto& o : objects) s += " " + o.name + "-" + o.type;
  s += "\nfacts:";
  for (const auto& f : facts) s += " " + pddlenv::to_string(f);
  s += "\nfree:";
  for (const auto& v : query.free_vars) s += " " + v.name + "-" + v.type;
  return s + "\nformula: " + pddlenv::to_string(query.formula);
}

QueryCase random_query(std::mt19937_64& g, int max_depth, int max_objects) {
  Gen gen{g, *fixture_domain(), {}};
  gen.make_world(max_objects);
  QueryCase c;
  c.facts = gen.make_facts();
  auto vars = gen.free_vars();
  c.query.formula = gen.formula(max_depth, vars);
  c.query.free_vars = std::move(vars);
  c.query.mode = pddlenv::inference::Mode::AllSolutions;
  c.objects = std::move(gen.objects);
  return c;
}

QueryCase random_conjunctive(std::mt19937_64& g, int max_objects) {
  Gen gen{g, *fixture_domain(), {}};
  gen.make_world(max_objects);
  QueryCase c;
  c.facts = gen.make_facts();
  auto vars = gen.free_vars();
  std::vector<Formula> parts;
  int n = 1 + gen.pick(4);
  for (int i = 0; i < n; ++i) {
    if (gen.chance(0.2)) {
      parts.push_back(gen.equality(vars));
    } else if (auto a = gen.atom(vars, gen.chance(0.25))) {
      parts.push_back(*a);
    }
  }
  c.query.formula = Formula::conjunction(std::move(parts));
  c.query.free_vars = std::move(vars);
  c.objects = std::move(gen.objects);
  return c;
}

std::optional<std::string> check_against_oracle(const QueryCase& c) {
  using namespace pddlenv::inference;
  const auto& d = *fixture_domain();
  oracle::Atoms base = oracle::atoms_of(c.facts);
  oracle::World world(d, c.objects, base);
  std::vector<oracle::Row> expected = world.solve(c.query.formula, c.query.free_vars);

  pddlenv::State s = c.state();
  Program program(d);
  auto universe = std::make_shared<const Universe>(program, s.objects());
  Model model(universe, s);
  auto names = [&](const std::vector<Row>& rows) {
    std::vector<oracle::Row> out;
    for (const auto& r : rows) {
      oracle::Row n;
      for (int id : r) n.push_back(universe->object(id).name);
      out.push_back(std::move(n));
    }
    return out;
  };
  auto show = [](const std::vector<oracle::Row>& rows) {
    std::string s = std::to_string(rows.size()) + " rows:";
    for (std::size_t i = 0; i < rows.size() && i < 8; ++i) {
      s += " (";
      for (const auto& x : rows[i]) s += " " + x;
      s += " )";
    }
    return s;
  };
  auto fail = [&](const std::string& what, const std::vector<oracle::Row>& got) {
    return what + "\nexpected " + show(expected) + "\ngot " + show(got) + "\n" + c.describe();
  };

  Query all = c.query;
  all.mode = Mode::AllSolutions;
  CompiledQuery cq(*universe, all);
  std::vector<Strategy> strategies{Strategy::Auto, Strategy::General};
  if (cq.is_conjunctive()) strategies.push_back(Strategy::Conjunctive);
  for (Strategy st : strategies) {
    auto got = names(model.solve(cq, st));
    std::string tag = st == Strategy::Auto ? "auto" : st == Strategy::General ? "general" : "conjunctive";
    if (got != expected) return fail(tag + " all-solutions mismatch", got);

    Query first = c.query;
    first.mode = Mode::FirstSolution;
    auto one = names(model.solve(CompiledQuery(*universe, first), st));
    std::vector<oracle::Row> want_one;
    if (!expected.empty()) want_one.push_back(expected.front());
    if (one != want_one) return fail(tag + " first-solution mismatch", one);

    Query boolean = c.query;
    boolean.mode = Mode::Boolean;
    if (model.satisfiable(CompiledQuery(*universe, boolean), st) != !expected.empty())
      return fail(tag + " boolean mismatch", {});
  }

  // the convenience path rebuilds everything from the state
  auto subs = find_assignments(c.query, s, d);
  std::vector<oracle::Row> via_subs;
  for (const auto& sub : subs) {
    oracle::Row r;
    for (const auto& v : c.query.free_vars) r.push_back(sub.lookup(v.name) ? sub.lookup(v.name)->name : "?");
    via_subs.push_back(std::move(r));
  }
  if (via_subs != expected) return fail("find_assignments mismatch", via_subs);
  return std::nullopt;
}

}  // namespace cases
