#include <map>

#include "doctest.h"
#include "oracle.hpp"
#include "pddlenv/env.hpp"
#include "pddlenv/library.hpp"
#include "pddlenv/pddl.hpp"
#include "transition_tables.hpp"

using namespace pddlenv;

namespace {

GroundAction act(const std::string& text) { return pddl::parse_ground_actions(text).at(0); }

std::set<std::string> names(const std::vector<GroundAction>& actions) {
  std::set<std::string> out;
  for (const auto& a : actions) out.insert(to_string(a));
  return out;
}

// Parameter tuples the naive enumeration would visit for one state.
std::size_t naive_cost(const Domain& d, const State& s) {
  oracle::World w(d, s.objects(), {});
  std::size_t worst = 0;
  for (const auto& op : d.operators) {
    std::size_t n = 1;
    for (const auto& p : op.parameters) n *= std::max<std::size_t>(1, w.objects_of(p.type).size());
    worst = std::max(worst, n);
  }
  return worst;
}

const char* kCoin = R"(
(define (domain coin)
  (:predicates (heads) (tails) (edge) (flip))
  (:actions flip)
  (:action flip :parameters () :precondition (flip)
    :effect (probabilistic 0.7 (heads) 0.2 (tails))))
)";
const char* kCoinProblem = "(define (problem c) (:domain coin) (:init) (:goal (edge)))";

}  // namespace

TEST_CASE("transition tables") {
  for (const auto& table : tables::all()) {
    CHECK(table.rows.size() >= 10);
    for (const auto& row : table.rows) {
      auto problem = tables::check(table.env, row);
      if (problem) FAIL_CHECK(*problem);
    }
  }
}

TEST_CASE("step before reset is a contract error") {
  Env env = library::load_env("blocks");
  CHECK_FALSE(env.has_state());
  CHECK_THROWS_AS(env.step(act("(pickup a)")), ContractError);
  CHECK_THROWS_AS(env.state(), ContractError);
}

TEST_CASE("reset reports the chosen problem and is seeded") {
  EnvConfig cfg;
  cfg.seed = 42;
  Env a = library::load_env("blocks", false, cfg);
  Env b = library::load_env("blocks", false, cfg);
  for (int i = 0; i < 20; ++i) {
    auto [sa, ia] = a.reset();
    auto [sb, ib] = b.reset();
    CHECK(ia.problem == ib.problem);
    CHECK(ia.problem == a.problem_labels()[ia.problem_index]);
    CHECK(ia.domain == "blocks/domain.pddl");
    CHECK(sa == sb);
    CHECK(a.step_count() == 0);
  }
}

TEST_CASE("horizon truncates episodes that miss the goal") {
  EnvConfig cfg;
  cfg.max_episode_length = 2;
  Env env = library::load_env("blocks", false, cfg);
  env.set_state(env.initial_state(0));
  auto r1 = env.step(act("(putdown a)"));
  CHECK_FALSE(r1.done);
  auto r2 = env.step(act("(putdown a)"));
  CHECK(r2.done);
  CHECK(r2.info.truncated);
  CHECK(r2.reward == 0.0);
  // stepping after done is allowed and keeps reporting done
  auto r3 = env.step(act("(pickup a)"));
  CHECK(r3.done);
  CHECK(r3.info.operator_name == std::optional<std::string>("pick-up"));
}

TEST_CASE("goal reached on the horizon step is not truncated") {
  EnvConfig cfg;
  cfg.max_episode_length = 2;
  Env env = library::load_env("blocks", false, cfg);
  env.set_state(env.initial_state(0));
  env.step(act("(pickup a)"));
  auto r = env.step(act("(stack a b)"));
  CHECK(r.done);
  CHECK(r.reward == 1.0);
  CHECK_FALSE(r.info.truncated);
}

TEST_CASE("operator matching contracts") {
  Env env = library::load_env("hanoi");
  const State& s = env.initial_state(0);
  auto m = env.match_operator(s, act("(move d1 peg3)"));
  REQUIRE(m);
  CHECK(m->op->name == "move-disc");
  CHECK(m->substitution.lookup("?from")->name == "d2");
  CHECK_FALSE(env.match_operator(s, act("(move d2 peg3)")));
  CHECK_THROWS_AS(env.match_operator(s, act("(fly d1 peg3)")), ContractError);
  CHECK_THROWS_AS(env.match_operator(s, act("(move d1)")), ContractError);
  CHECK_THROWS_AS(env.match_operator(s, act("(move d1 peg9)")), ContractError);
  CHECK_THROWS_AS(env.match_operator(s, act("(clear d1)")), ContractError);
}

TEST_CASE("valid actions match brute force on random walks") {
  std::size_t checked = 0;
  for (const auto& entry : library::list_envs()) {
    for (bool test : {false, true}) {
      EnvConfig cfg;
      cfg.dynamic_action_space = true;
      cfg.seed = 5;
      Env env = library::load_env(entry.name, test, cfg);
      Rng policy(17);
      for (std::size_t i = 0; i < env.problems().size(); ++i) {
        const Domain& d = env.domain();
        if (naive_cost(d, env.initial_state(i)) > 300000) continue;
        env.set_state(env.initial_state(i));
        for (int t = 0; t < 12; ++t) {
          const State s = env.state();
          CAPTURE(entry.name);
          CAPTURE(env.problem_labels()[i]);
          auto valid = env.enumerate_valid_actions(s);
          CHECK(std::is_sorted(valid.begin(), valid.end()));
          CHECK(names(valid) == oracle::valid_actions(d, s.objects(), oracle::atoms_of(s)));
          ++checked;
          if (valid.empty()) break;
          auto a = env.sample_action(s, policy);
          auto r = env.step(a);
          if (!entry.probabilistic) {
            auto ref = oracle::successor(d, s.objects(), oracle::atoms_of(s), to_string(a));
            REQUIRE(ref);
            CHECK(*ref == oracle::atoms_of(env.state()));
          }
          if (r.done) break;
        }
      }
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("all_actions enumerates every typed grounding of the action predicates") {
  Env env = library::load_env("gripper");
  const State& s = env.initial_state(0);
  auto all = env.all_actions(s);
  // move: 2 rooms, pick and drop: 1 ball x 2 grippers each
  CHECK(all.size() == 6);
  CHECK(std::is_sorted(all.begin(), all.end()));
  auto valid = env.enumerate_valid_actions(s);
  for (const auto& v : valid) CHECK(std::binary_search(all.begin(), all.end(), v));
}

TEST_CASE("sampling draws from valid actions only in dynamic mode") {
  EnvConfig cfg;
  cfg.dynamic_action_space = true;
  Env env = library::load_env("hanoi", false, cfg);
  const State& s = env.initial_state(1);
  auto valid = names(env.enumerate_valid_actions(s));
  Rng rng(1);
  for (int i = 0; i < 200; ++i) CHECK(valid.count(to_string(env.sample_action(s, rng))) == 1);

  Env uniform = env.with_config(EnvConfig{});
  std::set<std::string> seen;
  for (int i = 0; i < 2000; ++i) seen.insert(to_string(uniform.sample_action(s, rng)));
  CHECK(seen.size() == uniform.all_actions(s).size());
}

TEST_CASE("dead ends raise in dynamic mode") {
  const char* domain = R"((define (domain stuck) (:predicates (p) (go)) (:actions go)
    (:action go :parameters () :precondition (and (go) (p)) :effect (not (p)))))";
  EnvConfig cfg;
  cfg.dynamic_action_space = true;
  Env env = Env::make(std::string(domain), {"(define (problem s) (:domain stuck) (:init) (:goal (p)))"}, cfg);
  env.reset();
  Rng rng(0);
  CHECK(env.enumerate_valid_actions(env.state()).empty());
  CHECK_THROWS_AS(env.sample_action(env.state(), rng), DeadEndError);
  CHECK(to_string(env.with_config(EnvConfig{}).sample_action(env.state(), rng)) == "(go)");
}

TEST_CASE("registration errors") {
  std::string ok = "(define (domain x) (:predicates (p) (a) (b)) (:actions a b)"
                   "(:action one :parameters () :precondition (a) :effect (p))";
  std::string prob = "(define (problem q) (:domain x) (:init) (:goal (p)))";
  CHECK_NOTHROW(Env::make(ok + ")", {prob}));
  CHECK_THROWS_AS(Env::make(ok + ")", {}), ConfigurationError);
  CHECK_THROWS_AS(Env::make(ok + "(:action two :parameters () :precondition (p) :effect (p)))", {prob}),
                  ConfigurationError);
  CHECK_THROWS_AS(Env::make(ok + "(:action two :parameters () :precondition (a) :effect (p)))", {prob}),
                  ConfigurationError);
  CHECK_THROWS_AS(
      Env::make(ok + "(:action two :parameters () :precondition (and (a) (b)) :effect (p)))", {prob}),
      ConfigurationError);
  CHECK_THROWS_AS(Env::make(ok + ")", {"(define (problem q) (:domain y) (:init) (:goal (p)))"}), Error);
  CHECK_THROWS_AS(Env::make(ok, {prob}), pddl::ParseError);
}

TEST_CASE("operators as actions") {
  EnvConfig cfg;
  cfg.operators_as_actions = true;
  Env env = library::load_env("gripper", false, cfg);
  const State& s = env.initial_state(0);
  auto valid = names(env.enumerate_valid_actions(s));
  CHECK(valid == std::set<std::string>{"(move-robby rooma roomb)", "(pick-ball ball1 rooma left)",
                                       "(pick-ball ball1 rooma right)"});
  CHECK(valid == oracle::valid_actions(env.domain(), s.objects(), oracle::atoms_of(s)));
  env.set_state(s);
  auto r = env.step(act("(pick-ball ball1 rooma left)"));
  CHECK(r.info.operator_name == std::optional<std::string>("pick-ball"));
  CHECK_THROWS_AS(env.with_config(EnvConfig{}), ConfigurationError);

  Env blocks = library::load_env("blocks", false, cfg);
  auto bv = names(blocks.enumerate_valid_actions(blocks.initial_state(0)));
  CHECK(bv == std::set<std::string>{"(pick-up a)", "(pick-up b)"});
}

TEST_CASE("observations include derived literals") {
  Env env = library::load_env("sokoban");
  const State& s = env.initial_state(0);
  State obs = env.observe(s);
  oracle::World w(env.domain(), s.objects(), oracle::atoms_of(s));
  auto derived = oracle::derived_only(w, oracle::atoms_of(s));
  oracle::Atoms extra;
  for (const auto& a : oracle::atoms_of(obs))
    if (!oracle::atoms_of(s).count(a)) extra.insert(a);
  CHECK(extra == derived);
  auto [first, info] = env.reset();
  CHECK(first == env.observe(env.initial_state(info.problem_index)));
}

TEST_CASE("the model cache does not change results") {
  EnvConfig cached, uncached;
  cached.seed = uncached.seed = 9;
  cached.dynamic_action_space = uncached.dynamic_action_space = true;
  uncached.cache = false;
  for (const char* name : {"doors", "sokoban", "triangletireworld"}) {
    Env a = library::load_env(name, false, cached);
    Env b = library::load_env(name, false, uncached);
    Rng pa(3), pb(3);
    a.reset();
    b.reset();
    for (int t = 0; t < 40; ++t) {
      auto va = a.enumerate_valid_actions(a.state());
      CHECK(va == b.enumerate_valid_actions(b.state()));
      if (va.empty()) break;
      auto ra = a.step(a.sample_action(a.state(), pa));
      auto rb = b.step(b.sample_action(b.state(), pb));
      CHECK(ra.observation == rb.observation);
      CHECK(ra.info.effect_index == rb.info.effect_index);
      if (ra.done) {
        a.reset();
        b.reset();
      }
    }
  }
}

TEST_CASE("probabilistic outcomes follow their weights") {
  Env env = Env::make(std::string(kCoin), {kCoinProblem});
  const Effect& e = env.domain().operators.at(0).effect;
  State s = env.initial_state(0);
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> seq;
    for (int i = 0; i < 10000; ++i) seq.push_back(apply_effect(s, e, rng).second);
    return seq;
  };
  auto seq = run(123);
  std::map<int, int> counts;
  for (int i : seq) ++counts[i];
  CHECK(std::abs(counts[0] / 10000.0 - 0.7) <= 0.02);
  CHECK(std::abs(counts[1] / 10000.0 - 0.2) <= 0.02);
  CHECK(std::abs(counts[-1] / 10000.0 - 0.1) <= 0.02);
  CHECK(run(123) == seq);
  CHECK(run(124) != seq);

  Rng rng(5);
  auto [heads, idx] = apply_effect(s, Effect::probabilistic({{Probability::one(), e.outcomes()[0].effect}}), rng);
  CHECK(idx == 0);
  CHECK(oracle::atoms_of(heads) == oracle::Atoms{"(heads)"});
}

TEST_CASE("step reports the sampled outcome index") {
  EnvConfig cfg;
  cfg.seed = 1;
  Env env = Env::make(std::string(kCoin), {kCoinProblem}, cfg);
  env.reset();
  std::map<int, int> counts;
  for (int i = 0; i < 2000; ++i) {
    env.set_state(env.initial_state(0));
    auto r = env.step(act("(flip)"));
    REQUIRE(r.info.effect_index);
    ++counts[*r.info.effect_index];
    oracle::Atoms got = oracle::atoms_of(r.observation);
    if (*r.info.effect_index == 0) CHECK(got == oracle::Atoms{"(heads)"});
    if (*r.info.effect_index == 1) CHECK(got == oracle::Atoms{"(tails)"});
    if (*r.info.effect_index == -1) CHECK(got.empty());
  }
  CHECK(counts.size() == 3);
}

TEST_CASE("rng streams") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(1);
  std::vector<int> hist(5, 0);
  for (int i = 0; i < 50000; ++i) ++hist[r.uniform_index(5)];
  for (int h : hist) CHECK(std::abs(h / 50000.0 - 0.2) < 0.01);
  for (int i = 0; i < 1000; ++i) {
    double u = r.uniform_real();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("with_config keeps the state and the compiled domain") {
  Env env = library::load_env("gripper");
  env.reset();
  env.step(act("(move roomb)"));
  EnvConfig cfg;
  cfg.raise_error_on_invalid_action = true;
  Env strict = env.with_config(cfg);
  CHECK(strict.state() == env.state());
  CHECK(&strict.domain() == &env.domain());
  CHECK_THROWS_AS(strict.step(act("(move roomb)")), InvalidActionError);
  CHECK_NOTHROW(env.step(act("(move roomb)")));
}

TEST_CASE("environments from files") {
  std::string dir = std::string(PDDLENV_TEST_ASSETS) + "/gripper/";
  Env env = Env::make(PddlSource::from_file(dir + "domain.pddl"), {PddlSource::from_file(dir + "problems/problem1.pddl")});
  auto [s, info] = env.reset();
  CHECK(info.problem_file.has_value());
  CHECK(s.literals().size() == 4);
  CHECK_THROWS_AS(PddlSource::from_file(dir + "missing.pddl"), IoError);
}
