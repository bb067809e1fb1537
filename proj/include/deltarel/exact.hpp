#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace deltarel {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", a finite decimal ("0.95", "1", ".5") or an integer into an
/// exact rational. Decimals are converted without rounding.
/// Throws std::invalid_argument on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);

/// Largest integer m with 2^m <= r. Requires r > 0.
std::int64_t floor_log2(const Rational& r);

/// Smallest integer m with r <= 2^m. Requires r > 0.
std::int64_t ceil_log2(const Rational& r);

Rational pow2(std::int64_t exponent);

/// Exact probability numerator / 2^exponent, kept in lowest terms
/// (odd numerator, or zero with exponent 0).
///
/// All threshold comparisons against rationals are done by
/// cross-multiplication in integers.
class DyadicProb {
 public:
  DyadicProb() = default;
  DyadicProb(BigInt numerator, std::uint64_t exponent);

  static DyadicProb zero() { return {}; }
  static DyadicProb one() { return DyadicProb(1, 0); }
  static DyadicProb half() { return DyadicProb(1, 1); }

  const BigInt& numerator() const { return numerator_; }
  std::uint64_t exponent() const { return exponent_; }

  bool is_zero() const { return numerator_.is_zero(); }
  bool is_one() const { return exponent_ == 0 && numerator_ == 1; }

  DyadicProb complement() const;

  /// P(A and B) for independent A, B.
  static DyadicProb both(const DyadicProb& a, const DyadicProb& b);
  /// P(A or B) for independent A, B.
  static DyadicProb either(const DyadicProb& a, const DyadicProb& b);
  /// P(A xor B) for independent A, B.
  static DyadicProb exactly_one(const DyadicProb& a, const DyadicProb& b);
  /// (a + b) / 2, the Shannon-expansion combine.
  static DyadicProb average(const DyadicProb& a, const DyadicProb& b);

  Rational to_rational() const;
  double to_double() const;

  /// Sign of (this - r), computed exactly.
  int compare(const Rational& r) const;
  /// Sign of (this - other), computed exactly.
  int compare(const DyadicProb& other) const;

  /// "numerator/2^exponent".
  std::string to_string() const;

  friend bool operator==(const DyadicProb&, const DyadicProb&) = default;

 private:
  void normalize();

  BigInt numerator_ = 0;
  std::uint64_t exponent_ = 0;
};

inline bool operator>=(const DyadicProb& p, const Rational& r) { return p.compare(r) >= 0; }
inline bool operator>(const DyadicProb& p, const Rational& r) { return p.compare(r) > 0; }
inline bool operator<(const DyadicProb& p, const Rational& r) { return p.compare(r) < 0; }
inline bool operator<=(const DyadicProb& p, const Rational& r) { return p.compare(r) <= 0; }

}  // namespace deltarel
