#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>

#include "embedded.hpp"
#include "pddlenv/library.hpp"
#include "pddlenv/pddl.hpp"

namespace pddlenv::library {

namespace {

struct Spec {
  const char* name;
  bool probabilistic;
};

constexpr Spec kEntries[] = {
    {"blocks", false},       {"hanoi", false}, {"gripper", false},           {"tsp", false},
    {"slidetile", false},    {"sokoban", false}, {"doors", false},           {"ferry", false},
    {"river", true},         {"triangletireworld", true}, {"explodingblocks", true},
};

// "problem12.pddl" sorts after "problem2.pddl".
bool problem_order(const std::string& a, const std::string& b) {
  auto number = [](const std::string& s) {
    auto slash = s.find_last_of('/');
    std::string file = s.substr(slash + 1);
    std::string digits;
    for (char c : file)
      if (c >= '0' && c <= '9') digits += c;
    return digits.empty() ? 0UL : std::stoul(digits);
  };
  auto na = number(a), nb = number(b);
  return na != nb ? na < nb : a < b;
}

std::vector<std::string> embedded_under(const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& a : detail::embedded_assets()) {
    std::string_view p = a.path;
    if (p.substr(0, prefix.size()) == prefix && p.find('/', prefix.size()) == std::string_view::npos)
      out.emplace_back(p);
  }
  std::sort(out.begin(), out.end(), problem_order);
  return out;
}

std::vector<std::string> override_under(const std::filesystem::path& root, const std::string& prefix) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& f : std::filesystem::directory_iterator(root / prefix, ec))
    if (f.path().extension() == ".pddl") out.push_back(prefix + f.path().filename().string());
  std::sort(out.begin(), out.end(), problem_order);
  return out;
}

std::optional<std::filesystem::path>& root_slot() {
  static std::optional<std::filesystem::path> root = [] {
    std::optional<std::filesystem::path> r;
    if (const char* v = std::getenv("PDDLENV_ASSET_DIR"); v && *v) r = v;
    return r;
  }();
  return root;
}

struct DomainCache {
  std::mutex mutex;
  std::map<std::string, std::shared_ptr<const Domain>> domains;
};

DomainCache& domain_cache() {
  static DomainCache cache;
  return cache;
}

}  // namespace

const std::vector<RegistryEntry>& list_envs() {
  static const std::vector<RegistryEntry> entries = [] {
    std::vector<RegistryEntry> out;
    for (const auto& spec : kEntries) {
      RegistryEntry e;
      e.name = spec.name;
      e.domain = e.name + "/domain.pddl";
      e.train = embedded_under(e.name + "/problems/");
      e.test = embedded_under(e.name + "/problems_test/");
      e.probabilistic = spec.probabilistic;
      out.push_back(std::move(e));
    }
    return out;
  }();
  return entries;
}

const RegistryEntry& find_env(std::string_view name) {
  for (const auto& e : list_envs())
    if (e.name == name) return e;
  std::string known;
  for (const auto& e : list_envs()) known += (known.empty() ? "" : ", ") + e.name;
  throw LookupError("unknown environment '" + std::string(name) + "' (known: " + known + ")");
}

void set_asset_root(std::optional<std::filesystem::path> root) {
  root_slot() = std::move(root);
  std::lock_guard<std::mutex> lock(domain_cache().mutex);
  domain_cache().domains.clear();
}

const std::optional<std::filesystem::path>& asset_root() { return root_slot(); }

std::string asset_text(const std::string& path) {
  if (const auto& root = root_slot()) {
    auto file = *root / path;
    if (std::filesystem::exists(file)) return pddl::read_file(file);
  }
  for (const auto& a : detail::embedded_assets())
    if (a.path == path) return std::string(a.text);
  throw LookupError("no asset '" + path + "'");
}

Env load_env(std::string_view name, bool test, std::optional<EnvConfig> cfg) {
  const RegistryEntry& entry = find_env(name);
  std::vector<std::string> problems = test ? entry.test : entry.train;
  if (const auto& root = root_slot()) {
    auto overridden = override_under(*root, entry.name + (test ? "/problems_test/" : "/problems/"));
    if (!overridden.empty()) problems = std::move(overridden);
  }

  std::shared_ptr<const Domain> domain;
  {
    std::lock_guard<std::mutex> lock(domain_cache().mutex);
    auto& slot = domain_cache().domains[entry.name];
    if (!slot) slot = std::make_shared<const Domain>(pddl::parse_domain(asset_text(entry.domain), entry.domain));
    domain = slot;
  }
  std::vector<Problem> parsed;
  for (const auto& p : problems) parsed.push_back(pddl::parse_problem(asset_text(p), *domain, p));
  return Env::make(std::move(domain), std::move(parsed), problems, cfg.value_or(entry.defaults), entry.domain);
}

std::pair<std::string, bool> split_env_id(std::string_view id, std::string_view test_suffix) {
  if (!test_suffix.empty() && id.size() > test_suffix.size() &&
      id.substr(id.size() - test_suffix.size()) == test_suffix)
    return {std::string(id.substr(0, id.size() - test_suffix.size())), true};
  return {std::string(id), false};
}

std::size_t smallest_problem(const Env& env) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < env.problems().size(); ++i)
    if (env.initial_state(i).objects().size() < env.initial_state(best).objects().size()) best = i;
  return best;
}

}  // namespace pddlenv::library
