#include "pddlenv/rng.hpp"

#include <limits>

#include "pddlenv/errors.hpp"

namespace pddlenv {

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw ContractError("uniform_index over an empty range");
  const std::uint64_t bound = n;
  // Largest multiple of n representable, so the modulo is unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

}  // namespace pddlenv
