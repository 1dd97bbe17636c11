#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "pddlenv/model.hpp"

using namespace pddlenv;

namespace {

TypeHierarchy vehicles() {
  return TypeHierarchy({{"vehicle", "object"}, {"car", "vehicle"}, {"truck", "vehicle"}, {"place", "object"}});
}

}  // namespace

TEST_CASE("type hierarchy subtype queries") {
  TypeHierarchy h = vehicles();
  CHECK(h.is_subtype("car", "vehicle"));
  CHECK(h.is_subtype("car", "object"));
  CHECK(h.is_subtype("car", "car"));
  CHECK_FALSE(h.is_subtype("vehicle", "car"));
  CHECK_FALSE(h.is_subtype("car", "truck"));
  CHECK(h.is_subtype("place", "object"));
  CHECK(h.ancestor_chain("car") == std::vector<std::string>{"car", "vehicle", "object"});
  CHECK_THROWS_AS(h.is_subtype("boat", "object"), ModelError);
}

TEST_CASE("type hierarchy rejects cycles and unknown parents") {
  CHECK_THROWS_AS(TypeHierarchy({{"a", "b"}, {"b", "a"}}), ModelError);
  CHECK_THROWS_AS(TypeHierarchy(TypeHierarchy::ParentMap{{"a", "a"}}), ModelError);
  CHECK_THROWS_AS(TypeHierarchy(TypeHierarchy::ParentMap{{"a", "missing"}}), ModelError);
  CHECK_THROWS_AS(TypeHierarchy({{"object", "a"}, {"a", std::nullopt}}), ModelError);
  CHECK_THROWS_AS(TypeHierarchy(TypeHierarchy::ParentMap{{"a", std::nullopt}}), ModelError);
}

TEST_CASE("probability arithmetic is exact") {
  auto p = *Probability::parse("0.7");
  auto q = *Probability::parse("0.2");
  CHECK(p.numerator() == 7);
  CHECK(p.denominator() == 10);
  CHECK((Probability::one() - p - q) == *Probability::parse("0.1"));
  CHECK((p + q + *Probability::parse(".1")) == Probability::one());
  CHECK(Probability::parse("1/3")->to_string() == "1/3");
  CHECK(Probability::parse("0.250")->to_string() == "0.25");
  CHECK(Probability::parse("1")->to_string() == "1");
  CHECK_FALSE(Probability::parse("abc"));
  CHECK_FALSE(Probability::parse("-0.5"));
  CHECK_FALSE(Probability::parse("99999999999999999999"));
  CHECK(*Probability::parse("0.3") < *Probability::parse("1/3"));
}

TEST_CASE("probability text round-trips") {
  std::mt19937_64 g(11);
  for (int i = 0; i < 500; ++i) {
    std::int64_t d = std::uniform_int_distribution<std::int64_t>(1, 1000)(g);
    std::int64_t n = std::uniform_int_distribution<std::int64_t>(0, d)(g);
    Probability p(n, d);
    auto back = Probability::parse(p.to_string());
    REQUIRE(back);
    CHECK(*back == p);
  }
}

TEST_CASE("effect probabilities may not exceed one") {
  DeterministicEffect a;
  a.add.insert(Literal{"p", {}, false});
  CHECK_THROWS_AS(Effect::probabilistic({{*Probability::parse("0.7"), a}, {*Probability::parse("0.4"), a}}),
                  ModelError);
  Effect e = Effect::probabilistic({{*Probability::parse("0.7"), a}, {*Probability::parse("0.2"), a}});
  CHECK(e.residual() == *Probability::parse("0.1"));
  CHECK(Effect::deterministic(a).residual() == Probability::zero());
}

TEST_CASE("substitution binding checks types") {
  TypeHierarchy h = vehicles();
  Substitution s;
  s.bind(Term::variable("?v", "vehicle"), Term::constant("c1", "car"), h);
  CHECK(s.lookup("?v")->name == "c1");
  CHECK_FALSE(s.contains("?w"));
  CHECK_THROWS_AS(s.bind(Term::variable("?c", "car"), Term::constant("t1", "truck"), h), ModelError);
  CHECK_THROWS_AS(s.bind(Term::constant("x"), Term::constant("y"), h), ModelError);
  CHECK_THROWS_AS(s.bind(Term::variable("?x"), Term::variable("?y"), h), ModelError);
  CHECK_THROWS_AS(Term::constant("?bad"), ModelError);
}

TEST_CASE("apply_substitution respects quantifier shadowing") {
  TypeHierarchy h = vehicles();
  Substitution s;
  s.bind(Term::variable("?x", "vehicle"), Term::constant("c1", "car"), h);
  Literal at{"at", {Term::variable("?x", "vehicle"), Term::variable("?p", "place")}, false};
  Formula f = Formula::conjunction({Formula::atom(at), Formula::exists({Term::variable("?x", "vehicle")}, Formula::atom(at))});
  Formula g = apply_substitution(f, s, h);
  CHECK(to_string(g) == "(and (at c1 ?p) (exists (?x - vehicle) (at ?x ?p)))");
  CHECK(free_variables(g).size() == 1);

  Substitution bad;
  bad.bind_unchecked(Term::variable("?x", "object"), Term::constant("home", "place"));
  CHECK_THROWS_AS(apply_substitution(at, bad, h), ModelError);
}

TEST_CASE("ground_effect drops deletes that are also added") {
  TypeHierarchy h;
  DeterministicEffect e;
  e.add.insert(Literal{"at", {Term::variable("?to")}, false});
  e.del.insert(Literal{"at", {Term::variable("?from")}, false});
  Substitution s;
  s.bind_unchecked(Term::variable("?to"), Term::constant("a"));
  s.bind_unchecked(Term::variable("?from"), Term::constant("a"));
  Effect g = ground_effect(Effect::deterministic(e), s, h);
  CHECK(g.as_deterministic().add.size() == 1);
  CHECK(g.as_deterministic().del.empty());

  Substitution partial;
  partial.bind_unchecked(Term::variable("?to"), Term::constant("a"));
  CHECK_THROWS_AS(ground_effect(Effect::deterministic(e), partial, h), ModelError);
}

TEST_CASE("all_groundings matches a brute-force count") {
  TypeHierarchy h = vehicles();
  std::vector<Term> objects = {Term::constant("c1", "car"), Term::constant("c2", "car"),
                               Term::constant("t1", "truck"), Term::constant("home", "place"),
                               Term::constant("misc", "object")};
  std::mt19937_64 g(5);
  std::vector<std::string> types = {"object", "vehicle", "car", "truck", "place"};
  for (int i = 0; i < 200; ++i) {
    Predicate p{"p", {}, false, false};
    int arity = std::uniform_int_distribution<int>(0, 3)(g);
    std::size_t expected = 1;
    for (int k = 0; k < arity; ++k) {
      const auto& t = types[std::uniform_int_distribution<std::size_t>(0, types.size() - 1)(g)];
      p.param_types.push_back(t);
      std::size_t n = 0;
      for (const auto& o : objects) n += h.is_subtype(o.type, t) ? 1 : 0;
      expected *= n;
    }
    auto all = all_groundings(p, objects, h);
    CHECK(all.size() == expected);
    CHECK(std::is_sorted(all.begin(), all.end()));
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  }
}

TEST_CASE("states are normalized and compared by literal set") {
  std::vector<Term> objs = {Term::constant("b"), Term::constant("a")};
  Literal pa{"p", {Term::constant("a")}, false};
  Literal pb{"p", {Term::constant("b")}, false};
  State s(objs, {pb, pa, pb}, Formula::truth());
  CHECK(s.literals().size() == 2);
  CHECK(s.literals().front() == pa);
  CHECK(s.objects().front().name == "a");
  CHECK(s.contains(pa));
  CHECK(s.contains(Literal{"p", {Term::constant("c")}, true}));
  State t = s.with_literals({pa, pb});
  CHECK(s == t);
  CHECK(s.hash() == t.hash());
  CHECK_FALSE(s == s.with_literals({pa}));
  CHECK_THROWS_AS(State(objs, {pa.negation()}, Formula::truth()), ModelError);
  CHECK_THROWS_AS(State(objs, {Literal{"p", {Term::variable("?x")}, false}}, Formula::truth()), ModelError);
}

TEST_CASE("formula text forms") {
  Literal on{"on", {Term::variable("?x"), Term::constant("b")}, false};
  CHECK(to_string(Formula::atom(on)) == "(on ?x b)");
  CHECK(to_string(Formula::atom(on.negation())) == "(not (on ?x b))");
  CHECK(to_string(Formula::truth()) == "(and)");
  CHECK(to_string(Formula::equal(Term::variable("?x"), Term::constant("b"))) == "(= ?x b)");
  CHECK(to_string(GroundAction{Literal{"pickup", {Term::constant("a")}, false}}) == "(pickup a)");
  std::vector<Literal> lits;
  collect_literals(Formula::disjunction({Formula::atom(on), Formula::negation(Formula::atom(on))}), lits);
  CHECK(lits.size() == 2);
}
