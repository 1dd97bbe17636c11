#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pddlenv/library.hpp"
#include "pddlenv/pddl.hpp"

using namespace pddlenv;

TEST_CASE("registry lists every bundled environment") {
  const auto& envs = library::list_envs();
  std::vector<std::string> names;
  for (const auto& e : envs) names.push_back(e.name);
  CHECK(names == std::vector<std::string>{"blocks", "hanoi", "gripper", "tsp", "slidetile", "sokoban", "doors",
                                          "ferry", "river", "triangletireworld", "explodingblocks"});
  for (const auto& e : envs) {
    CAPTURE(e.name);
    CHECK(e.train.size() >= 2);
    CHECK(e.test.size() >= 1);
    Env train = library::load_env(e.name);
    Env test = library::load_env(e.name, true);
    CHECK(train.problems().size() == e.train.size());
    CHECK(test.problems().size() == e.test.size());
    CHECK(train.source_domain() == test.source_domain());
    CHECK(train.problem_labels() == e.train);
  }
  CHECK(library::find_env("river").probabilistic);
  CHECK_FALSE(library::find_env("blocks").probabilistic);
  CHECK_THROWS_AS(library::find_env("chess"), LookupError);
  CHECK_THROWS_AS(library::load_env("chess"), LookupError);
}

TEST_CASE("train and test ids") {
  CHECK(library::split_env_id("blocksTest") == std::pair<std::string, bool>{"blocks", true});
  CHECK(library::split_env_id("blocks") == std::pair<std::string, bool>{"blocks", false});
  CHECK(library::split_env_id("Test") == std::pair<std::string, bool>{"Test", false});
  CHECK(library::split_env_id("hanoi_eval", "_eval") == std::pair<std::string, bool>{"hanoi", true});
}

TEST_CASE("problems keep numeric order") {
  const auto& e = library::find_env("blocks");
  CHECK(e.train.front() == "blocks/problems/problem1.pddl");
  CHECK(e.train.back() == "blocks/problems/problem3.pddl");
}

TEST_CASE("smallest problem by object count") {
  for (const auto& e : library::list_envs()) {
    Env env = library::load_env(e.name);
    std::size_t i = library::smallest_problem(env);
    for (std::size_t j = 0; j < env.problems().size(); ++j)
      CHECK(env.initial_state(i).objects().size() <= env.initial_state(j).objects().size());
  }
  CHECK(library::smallest_problem(library::load_env("hanoi")) == 0);
}

TEST_CASE("asset override directory") {
  namespace fs = std::filesystem;
  fs::path root = fs::temp_directory_path() / "pddlenv_override_test";
  fs::remove_all(root);
  fs::create_directories(root / "blocks" / "problems");
  {
    std::ofstream out(root / "blocks" / "problems" / "problem1.pddl");
    out << "(define (problem one) (:domain blocks) (:objects x - block)"
           " (:init (clear x) (ontable x) (handempty)) (:goal (holding x)))";
  }
  library::set_asset_root(root);
  Env env = library::load_env("blocks");
  CHECK(env.problems().size() == 1);
  CHECK(env.problems()[0].name == "one");
  // files missing from the override fall back to the embedded copy
  CHECK(library::asset_text("blocks/domain.pddl").find("(domain blocks)") != std::string::npos);
  library::set_asset_root(std::nullopt);
  CHECK(library::load_env("blocks").problems().size() == 3);
  fs::remove_all(root);
  CHECK_THROWS_AS(library::asset_text("nowhere/domain.pddl"), LookupError);
}
