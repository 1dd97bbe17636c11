#ifndef PDDLENV_LIBRARY_HPP
#define PDDLENV_LIBRARY_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pddlenv/env.hpp"

namespace pddlenv::library {

/// Asset paths are relative to the asset root:
/// `<env>/domain.pddl`, `<env>/problems/problemN.pddl`,
/// `<env>/problems_test/problemN.pddl`.
struct RegistryEntry {
  std::string name;
  std::string domain;
  std::vector<std::string> train;
  std::vector<std::string> test;
  EnvConfig defaults;
  bool probabilistic = false;
};

/// Bundled entries in registry order.
const std::vector<RegistryEntry>& list_envs();

/// Throws LookupError for unknown names.
const RegistryEntry& find_env(std::string_view name);

/// Text of an asset, read from the override directory when one is set and
/// contains the file, otherwise from the embedded copy. Throws LookupError.
std::string asset_text(const std::string& path);

/// Directory searched before the embedded assets. Defaults to the
/// PDDLENV_ASSET_DIR environment variable. Not thread-safe; set it before
/// loading environments.
void set_asset_root(std::optional<std::filesystem::path> root);
const std::optional<std::filesystem::path>& asset_root();

/// Environments with the same name share one parsed Domain, whether train
/// or test problems are loaded. `cfg` replaces the entry's defaults.
Env load_env(std::string_view name, bool test = false, std::optional<EnvConfig> cfg = std::nullopt);

/// Separates an environment id such as "blocksTest" into ("blocks", true)
/// for the given test suffix. Names without the suffix are train envs.
std::pair<std::string, bool> split_env_id(std::string_view id, std::string_view test_suffix = "Test");

/// Index of the train problem with the fewest objects (ties: lowest index).
std::size_t smallest_problem(const Env& env);

}  // namespace pddlenv::library

#endif  // PDDLENV_LIBRARY_HPP
