#ifndef PDDLENV_PROBABILITY_HPP
#define PDDLENV_PROBABILITY_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pddlenv {

/// Exact non-negative rational used for effect probabilities. Decimal text
/// such as "0.7" is held as 7/10, so sums and residuals are exact.
class Probability {
 public:
  constexpr Probability() = default;
  Probability(std::int64_t numerator, std::int64_t denominator);

  static Probability zero() { return {}; }
  static Probability one() { return Probability(1, 1); }

  /// Accepts "1", "0.25", ".5", "1/3". Returns nullopt on anything else
  /// (including values that overflow 64-bit numerator/denominator).
  static std::optional<Probability> parse(std::string_view text);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Shortest exact text: a terminating decimal when one exists,
  /// otherwise "n/d". parse(to_string()) reproduces the value.
  std::string to_string() const;

  Probability operator+(const Probability& other) const;
  Probability operator-(const Probability& other) const;
  Probability operator*(const Probability& other) const;

  friend bool operator==(const Probability& a, const Probability& b) = default;
  friend std::strong_ordering operator<=>(const Probability& a, const Probability& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace pddlenv

#endif  // PDDLENV_PROBABILITY_HPP
