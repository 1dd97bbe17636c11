#include "pddlenv/probability.hpp"

#include <charconv>
#include <numeric>

#include "pddlenv/errors.hpp"

namespace pddlenv {

namespace {

using Wide = __int128;

Probability reduce(Wide num, Wide den) {
  if (den == 0) throw ModelError(ModelError::Kind::Declaration, "probability with zero denominator");
  if (num < 0 || den < 0) throw ModelError(ModelError::Kind::Declaration, "negative probability");
  Wide a = num, b = den;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  if (a == 0) a = 1;
  num /= a;
  den /= a;
  constexpr Wide kMax = INT64_MAX;
  if (num > kMax || den > kMax)
    throw ModelError(ModelError::Kind::Declaration, "probability overflows 64-bit rational");
  return Probability(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::optional<std::int64_t> parse_digits(std::string_view digits) {
  if (digits.empty()) return std::int64_t{0};
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return out;
}

bool all_digits(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace

Probability::Probability(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw ModelError(ModelError::Kind::Declaration, "probability with zero denominator");
  if (numerator < 0 || denominator < 0) throw ModelError(ModelError::Kind::Declaration, "negative probability");
  std::int64_t g = std::gcd(numerator, denominator);
  if (g == 0) g = 1;
  num_ = numerator / g;
  den_ = denominator / g;
}

std::optional<Probability> Probability::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto n = text.substr(0, slash), d = text.substr(slash + 1);
    if (n.empty() || d.empty() || !all_digits(n) || !all_digits(d)) return std::nullopt;
    auto num = parse_digits(n), den = parse_digits(d);
    if (!num || !den || *den == 0) return std::nullopt;
    return Probability(*num, *den);
  }
  auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) return std::nullopt;
  if (!all_digits(whole) || !all_digits(frac)) return std::nullopt;
  while (!frac.empty() && frac.back() == '0') frac.remove_suffix(1);
  if (frac.size() > 18) return std::nullopt;
  auto w = parse_digits(whole), f = parse_digits(frac);
  if (!w || !f) return std::nullopt;
  Wide scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  try {
    return reduce(Wide(*w) * scale + *f, scale);
  } catch (const ModelError&) {
    return std::nullopt;
  }
}

std::string Probability::to_string() const {
  std::int64_t d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
  int digits = std::max(twos, fives);
  if (digits == 0) return std::to_string(num_);
  // Scale the numerator so the denominator becomes 10^digits.
  Wide scaled = num_;
  for (int i = twos; i < digits; ++i) scaled *= 2;
  for (int i = fives; i < digits; ++i) scaled *= 5;
  Wide pow10 = 1;
  for (int i = 0; i < digits; ++i) pow10 *= 10;
  auto whole = static_cast<std::int64_t>(scaled / pow10);
  auto frac = static_cast<std::int64_t>(scaled % pow10);
  std::string frac_text = std::to_string(frac);
  frac_text.insert(0, static_cast<std::size_t>(digits) - frac_text.size(), '0');
  return std::to_string(whole) + "." + frac_text;
}

Probability Probability::operator+(const Probability& other) const {
  return reduce(Wide(num_) * other.den_ + Wide(other.num_) * den_, Wide(den_) * other.den_);
}

Probability Probability::operator-(const Probability& other) const {
  Wide n = Wide(num_) * other.den_ - Wide(other.num_) * den_;
  if (n < 0) throw ModelError(ModelError::Kind::Declaration, "negative probability difference");
  return reduce(n, Wide(den_) * other.den_);
}

Probability Probability::operator*(const Probability& other) const {
  return reduce(Wide(num_) * other.num_, Wide(den_) * other.den_);
}

std::strong_ordering operator<=>(const Probability& a, const Probability& b) {
  Wide lhs = Wide(a.num_) * b.den_;
  Wide rhs = Wide(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace pddlenv
