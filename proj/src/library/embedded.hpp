#ifndef PDDLENV_SRC_LIBRARY_EMBEDDED_HPP
#define PDDLENV_SRC_LIBRARY_EMBEDDED_HPP

#include <string_view>
#include <vector>

namespace pddlenv::library::detail {

struct EmbeddedAsset {
  std::string_view path;  // relative, e.g. "blocks/problems/problem1.pddl"
  std::string_view text;
};

const std::vector<EmbeddedAsset>& embedded_assets();

}  // namespace pddlenv::library::detail

#endif  // PDDLENV_SRC_LIBRARY_EMBEDDED_HPP
