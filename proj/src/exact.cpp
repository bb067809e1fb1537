#include "deltarel/exact.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace deltarel {

namespace mp = boost::multiprecision;

namespace {

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt parse_digits(std::string_view s) {
  BigInt value = 0;
  for (char c : s) value = value * 10 + (c - '0');
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");

  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Rational result;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (num.empty() || den.empty() || !all_digits(num) || !all_digits(den)) {
      throw std::invalid_argument("malformed fraction '" + std::string(text) + "'");
    }
    BigInt d = parse_digits(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    result = Rational(parse_digits(num), d);
  } else {
    auto dot = text.find('.');
    auto whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || !all_digits(whole) || !all_digits(frac)) {
      throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
    BigInt scale = mp::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    BigInt num = parse_digits(whole) * scale + parse_digits(frac);
    result = Rational(num, scale);
  }
  return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& r) {
  if (mp::denominator(r) == 1) return mp::numerator(r).str();
  return mp::numerator(r).str() + "/" + mp::denominator(r).str();
}

Rational pow2(std::int64_t exponent) {
  if (exponent >= 0) return Rational(BigInt(1) << static_cast<unsigned>(exponent));
  return Rational(BigInt(1), BigInt(1) << static_cast<unsigned>(-exponent));
}

std::int64_t floor_log2(const Rational& r) {
  if (r <= 0) throw std::invalid_argument("floor_log2 of non-positive value");
  const BigInt& num = mp::numerator(r);
  const BigInt& den = mp::denominator(r);
  auto m = static_cast<std::int64_t>(mp::msb(num)) - static_cast<std::int64_t>(mp::msb(den));
  // m is within one of the answer; settle it exactly.
  while (pow2(m) > r) --m;
  while (pow2(m + 1) <= r) ++m;
  return m;
}

std::int64_t ceil_log2(const Rational& r) {
  auto m = floor_log2(r);
  return pow2(m) == r ? m : m + 1;
}

DyadicProb::DyadicProb(BigInt numerator, std::uint64_t exponent)
    : numerator_(std::move(numerator)), exponent_(exponent) {
  if (numerator_ < 0) throw std::invalid_argument("negative probability numerator");
  normalize();
  if (numerator_ > (BigInt(1) << static_cast<unsigned>(exponent_))) {
    throw std::invalid_argument("probability exceeds one");
  }
}

void DyadicProb::normalize() {
  if (numerator_.is_zero()) {
    exponent_ = 0;
    return;
  }
  auto shift = std::min<std::uint64_t>(mp::lsb(numerator_), exponent_);
  if (shift > 0) {
    numerator_ >>= static_cast<unsigned>(shift);
    exponent_ -= shift;
  }
}

DyadicProb DyadicProb::complement() const {
  DyadicProb r;
  r.numerator_ = (BigInt(1) << static_cast<unsigned>(exponent_)) - numerator_;
  r.exponent_ = exponent_;
  r.normalize();
  return r;
}

DyadicProb DyadicProb::both(const DyadicProb& a, const DyadicProb& b) {
  DyadicProb r;
  r.numerator_ = a.numerator_ * b.numerator_;
  r.exponent_ = a.exponent_ + b.exponent_;
  r.normalize();
  return r;
}

DyadicProb DyadicProb::either(const DyadicProb& a, const DyadicProb& b) {
  return both(a.complement(), b.complement()).complement();
}

DyadicProb DyadicProb::exactly_one(const DyadicProb& a, const DyadicProb& b) {
  // a(1-b) + b(1-a), both terms over 2^(ea+eb)
  auto e = a.exponent_ + b.exponent_;
  BigInt one_a = (BigInt(1) << static_cast<unsigned>(a.exponent_)) - a.numerator_;
  BigInt one_b = (BigInt(1) << static_cast<unsigned>(b.exponent_)) - b.numerator_;
  DyadicProb r;
  r.numerator_ = a.numerator_ * one_b + b.numerator_ * one_a;
  r.exponent_ = e;
  r.normalize();
  return r;
}

DyadicProb DyadicProb::average(const DyadicProb& a, const DyadicProb& b) {
  auto e = std::max(a.exponent_, b.exponent_);
  DyadicProb r;
  r.numerator_ = (a.numerator_ << static_cast<unsigned>(e - a.exponent_)) +
                 (b.numerator_ << static_cast<unsigned>(e - b.exponent_));
  r.exponent_ = e + 1;
  r.normalize();
  return r;
}

Rational DyadicProb::to_rational() const {
  return Rational(numerator_, BigInt(1) << static_cast<unsigned>(exponent_));
}

double DyadicProb::to_double() const {
  return static_cast<double>(to_rational());
}

int DyadicProb::compare(const Rational& r) const {
  BigInt lhs = numerator_ * mp::denominator(r);
  BigInt rhs = mp::numerator(r) << static_cast<unsigned>(exponent_);
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

int DyadicProb::compare(const DyadicProb& other) const {
  const auto e = std::max(exponent_, other.exponent_);
  BigInt lhs = numerator_ << static_cast<unsigned>(e - exponent_);
  BigInt rhs = other.numerator_ << static_cast<unsigned>(e - other.exponent_);
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

std::string DyadicProb::to_string() const {
  return numerator_.str() + "/2^" + std::to_string(exponent_);
}

}  // namespace deltarel
