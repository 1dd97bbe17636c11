#ifndef PDDLENV_RNG_HPP
#define PDDLENV_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <random>

namespace pddlenv {

/// Seedable stream with platform-independent draws. std::mt19937_64 is
/// specified bit-for-bit, but the standard distributions are not, so the
/// two draws used by the engine are implemented here.
class Rng {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0;

  explicit Rng(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  void seed(std::uint64_t seed) { engine_.seed(seed); }

  std::uint64_t next() { return engine_(); }

  /// Uniform over [0, n). Throws ContractError when n == 0.
  std::size_t uniform_index(std::size_t n);

  /// Uniform over [0, 1) with 53 random bits.
  double uniform_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pddlenv

#endif  // PDDLENV_RNG_HPP
