#include <map>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "pddlenv/inference.hpp"
#include "pddlenv/pddl.hpp"
#include "random_cases.hpp"

using namespace pddlenv;
using namespace pddlenv::inference;

namespace {

Domain parse(const std::string& text) { return pddl::parse_domain(text, "t.pddl"); }

const char* kGraph = R"(
(define (domain graph)
  (:requirements :typing :derived-predicates)
  (:types node)
  (:predicates (edge ?a ?b - node) (reach ?a ?b - node) (isolated ?a - node) (marked ?a - node))
  (:derived (reach ?a ?b - node) (or (edge ?a ?b) (exists (?c - node) (and (edge ?a ?c) (reach ?c ?b)))))
  (:derived (isolated ?a - node) (not (exists (?b - node) (or (edge ?a ?b) (edge ?b ?a))))))
)";

Term node(const std::string& n) { return Term::constant(n, "node"); }
Literal edge(const std::string& a, const std::string& b) { return Literal{"edge", {node(a), node(b)}, false}; }

}  // namespace

TEST_CASE("random queries agree with naive enumeration") {
  std::mt19937_64 g(2024);
  for (int i = 0; i < 300; ++i) {
    auto c = cases::random_query(g);
    auto mismatch = cases::check_against_oracle(c);
    if (mismatch) FAIL_CHECK("case " << i << ": " << *mismatch);
  }
}

TEST_CASE("conjunctive fast path agrees with the general evaluator") {
  std::mt19937_64 g(7);
  int conjunctive = 0;
  for (int i = 0; i < 300; ++i) {
    auto c = cases::random_conjunctive(g);
    Program program(*cases::fixture_domain());
    auto u = std::make_shared<const Universe>(program, c.state().objects());
    conjunctive += CompiledQuery(*u, c.query).is_conjunctive() ? 1 : 0;
    auto mismatch = cases::check_against_oracle(c);
    if (mismatch) FAIL_CHECK("case " << i << ": " << *mismatch);
  }
  // most of these must actually exercise the join
  CHECK(conjunctive > 200);
}

TEST_CASE("transitive closure through a recursive derived predicate") {
  Domain d = parse(kGraph);
  std::vector<Term> nodes = {node("n1"), node("n2"), node("n3"), node("n4"), node("n5")};
  State s(nodes, {edge("n1", "n2"), edge("n2", "n3"), edge("n3", "n1")}, Formula::truth());
  auto closure = derived_closure(s, d);
  oracle::World w(d, nodes, oracle::atoms_of(s));
  CHECK(oracle::atoms_of(closure) == oracle::derived_only(w, oracle::atoms_of(s)));
  // 9 reach facts in the cycle, n4 and n5 isolated
  CHECK(closure.size() == 11);
  CHECK(holds(Formula::atom(Literal{"reach", {node("n3"), node("n3")}, false}), s, d));
  CHECK_FALSE(holds(Formula::atom(Literal{"reach", {node("n1"), node("n4")}, false}), s, d));
}

TEST_CASE("derived facts of a negation-free program grow with the base facts") {
  Domain d = parse(kGraph);
  std::mt19937_64 g(3);
  std::vector<Term> nodes;
  for (int i = 0; i < 5; ++i) nodes.push_back(node("v" + std::to_string(i)));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Literal> small, large;
    for (const auto& a : nodes)
      for (const auto& b : nodes) {
        double r = std::uniform_real_distribution<double>(0, 1)(g);
        if (r < 0.15) small.push_back(edge(a.name, b.name));
        if (r < 0.3) large.push_back(edge(a.name, b.name));
      }
    auto reach = [&](const std::vector<Literal>& facts) {
      oracle::Atoms out;
      for (const auto& l : derived_closure(State(nodes, facts, Formula::truth()), d))
        if (l.predicate == "reach") out.insert(to_string(l));
      return out;
    };
    auto a = reach(small), b = reach(large);
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    oracle::World w(d, nodes, oracle::atoms_of(large));
    CHECK(oracle::atoms_of(derived_closure(State(nodes, large, Formula::truth()), d)) ==
          oracle::derived_only(w, oracle::atoms_of(large)));
  }
}

TEST_CASE("stratification orders negated dependencies first") {
  std::string text = kGraph;
  text.insert(text.rfind(')'), "(:derived (marked ?a - node) (not (reach ?a ?a)))");
  Domain d = parse(text);
  auto strata = stratify(d);
  std::map<std::string, std::size_t> at;
  for (std::size_t s = 0; s < strata.size(); ++s)
    for (auto i : strata[s]) at[d.derived[i].head.predicate] = s;
  CHECK(at["reach"] < at["marked"]);

  std::vector<Term> nodes = {node("n1"), node("n2"), node("n3")};
  State s(nodes, {edge("n1", "n2"), edge("n2", "n1")}, Formula::truth());
  oracle::World w(d, nodes, oracle::atoms_of(s));
  CHECK(oracle::atoms_of(derived_closure(s, d)) == oracle::derived_only(w, oracle::atoms_of(s)));
  CHECK(holds(Formula::atom(Literal{"marked", {node("n3")}, false}), s, d));
  CHECK_FALSE(holds(Formula::atom(Literal{"marked", {node("n1")}, false}), s, d));

  d = parse(kGraph);

  Domain bad = d;
  bad.derived.push_back(DerivedRule{Literal{"marked", {Term::variable("?a", "node")}, false},
                                    Formula::atom(Literal{"reach", {Term::variable("?a", "node"), Term::variable("?a", "node")}, false})});
  bad.derived.push_back(DerivedRule{Literal{"reach", {Term::variable("?a", "node"), Term::variable("?b", "node")}, false},
                                    Formula::negation(Formula::atom(Literal{"marked", {Term::variable("?a", "node")}, false}))});
  for (auto& p : bad.predicates)
    if (p.name == "marked") p.is_derived = true;
  CHECK_THROWS_AS(stratify(bad), ModelError);
}

TEST_CASE("answer modes and unused free variables") {
  Domain d = parse(kGraph);
  std::vector<Term> nodes = {node("c"), node("a"), node("b")};
  State s(nodes, {edge("b", "c"), edge("a", "c")}, Formula::truth());
  Term x = Term::variable("?x", "node"), y = Term::variable("?y", "node");
  Formula f = Formula::atom(Literal{"edge", {x, node("c")}, false});

  auto all = find_assignments(Query{f, {x}, Mode::AllSolutions}, s, d);
  REQUIRE(all.size() == 2);
  CHECK(all[0].lookup("?x")->name == "a");
  auto first = find_assignments(Query{f, {x}, Mode::FirstSolution}, s, d);
  REQUIRE(first.size() == 1);
  CHECK(first[0].lookup("?x")->name == "a");
  // ?y does not occur, so it ranges over every node
  CHECK(find_assignments(Query{f, {x, y}, Mode::AllSolutions}, s, d).size() == 6);
  CHECK(find_assignments(Query{f, {x, y}, Mode::Boolean}, s, d).size() == 1);
  CHECK_THROWS_AS(holds(f, s, d), ContractError);
}

TEST_CASE("quantifiers over empty types") {
  Domain d = parse("(define (domain e) (:types t u) (:predicates (p ?x - t)))");
  State s({Term::constant("a", "u")}, {}, Formula::truth());
  Term x = Term::variable("?x", "t");
  CHECK(holds(Formula::forall({x}, Formula::atom(Literal{"p", {x}, false})), s, d));
  CHECK_FALSE(holds(Formula::exists({x}, Formula::atom(Literal{"p", {x}, false})), s, d));
}
