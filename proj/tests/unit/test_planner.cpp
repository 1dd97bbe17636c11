#include "doctest.h"
#include "oracle.hpp"
#include "pddlenv/library.hpp"
#include "pddlenv/pddl.hpp"
#include "pddlenv/planner.hpp"

using namespace pddlenv;
using namespace std::chrono_literals;

TEST_CASE("smallest deterministic problems are solved and validate") {
  for (const auto& e : library::list_envs()) {
    if (e.probabilistic) continue;
    CAPTURE(e.name);
    Env env = library::load_env(e.name);
    std::size_t i = library::smallest_problem(env);
    auto r = planner::plan_gbfs(env, i, 30s);
    REQUIRE(r.solved());
    CHECK(planner::validate_plan(env, i, r.plan.actions));
    CHECK(r.plan.stats.expansions > 0);
  }
}

TEST_CASE("hanoi with three discs needs seven moves") {
  Env env = library::load_env("hanoi");
  std::size_t three = 1;
  REQUIRE(env.problems()[three].name == "hanoi-3");
  auto r = planner::plan_gbfs(env, three, 30s);
  REQUIRE(r.solved());
  CHECK(r.plan.actions.size() >= 7);
  CHECK(oracle::bfs_plan_length(env, three) == std::optional<std::size_t>(7));
  CHECK(oracle::bfs_plan_length(env, 0) == std::optional<std::size_t>(3));
}

TEST_CASE("plans for probabilistic domains use the most likely outcome") {
  for (const char* name : {"river", "triangletireworld", "explodingblocks"}) {
    Env env = library::load_env(name);
    auto r = planner::plan_gbfs(env, library::smallest_problem(env), 30s);
    CAPTURE(name);
    CHECK(r.solved());
  }
}

TEST_CASE("most likely outcome") {
  DeterministicEffect a, b;
  a.add.insert(Literal{"a", {}, false});
  b.add.insert(Literal{"b", {}, false});
  auto p = [](const char* s) { return *Probability::parse(s); };
  CHECK(planner::most_likely_outcome(Effect::probabilistic({{p("0.3"), a}, {p("0.5"), b}})) == b);
  CHECK(planner::most_likely_outcome(Effect::probabilistic({{p("0.4"), a}, {p("0.4"), b}})) == a);
  CHECK(planner::most_likely_outcome(Effect::probabilistic({{p("0.2"), a}, {p("0.2"), b}})).empty());
  CHECK(planner::most_likely_outcome(Effect::deterministic(a)) == a);
}

TEST_CASE("h_add is zero exactly at goal states") {
  Env env = library::load_env("blocks");
  const State& s = env.initial_state(0);
  CHECK(planner::h_add(s, s.goal(), env) > 0.0);
  Env run = env;
  run.set_state(s);
  run.step(pddl::parse_ground_actions("(pickup a)")[0]);
  double mid = planner::h_add(run.state(), s.goal(), env);
  auto done = run.step(pddl::parse_ground_actions("(stack a b)")[0]);
  CHECK(done.reward == 1.0);
  CHECK(planner::h_add(done.observation, s.goal(), env) == 0.0);
  CHECK(mid > 0.0);
  CHECK(mid < planner::kInfinity);
}

TEST_CASE("unreachable goals are detected") {
  const char* d = R"((define (domain u) (:predicates (p) (q) (go)) (:actions go)
    (:action go :parameters () :precondition (and (go) (p)) :effect (q))))";
  Env env = Env::make(std::string(d), {"(define (problem u) (:domain u) (:init) (:goal (q)))"});
  auto r = planner::plan_gbfs(env, 0, 5s);
  CHECK(r.status == planner::PlanResult::Status::Unsolvable);
  CHECK(planner::to_string(r.status) == "unsolvable");
}

TEST_CASE("a tiny timeout stops the search") {
  Env env = library::load_env("sokoban");
  auto r = planner::plan_gbfs(env, std::size_t{2}, std::chrono::duration<double>(1e-7));
  CHECK(r.status == planner::PlanResult::Status::Timeout);
  CHECK(r.plan.actions.empty());
}

TEST_CASE("plan text round-trips and wrong plans fail validation") {
  Env env = library::load_env("gripper");
  auto r = planner::plan_gbfs(env, std::size_t{0}, 10s);
  REQUIRE(r.solved());
  std::string text = planner::format_plan(r.plan.actions);
  CHECK(planner::format_plan(planner::parse_plan(text)) == text);
  CHECK(planner::validate_plan(env, 0, planner::parse_plan(text)));
  auto broken = r.plan.actions;
  broken.pop_back();
  CHECK_FALSE(planner::validate_plan(env, 0, broken));
  CHECK_FALSE(planner::validate_plan(env, 0, planner::parse_plan("(drop ball1 left)")));
  CHECK_FALSE(planner::validate_plan(env, 0, planner::parse_plan("(teleport ball1)")));
  CHECK_THROWS_AS(planner::parse_plan("(move"), pddl::ParseError);
}
