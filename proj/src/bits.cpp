#include "deltarel/bits.hpp"

#include <bit>
#include <charconv>
#include <stdexcept>

namespace deltarel {

BitVector::BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

void BitVector::set(std::size_t i, bool value) {
  auto mask = std::uint64_t{1} << (i & 63);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

std::size_t BitVector::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

Assignment Assignment::from_string(std::string_view bits) {
  Assignment a(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') {
      throw std::invalid_argument("assignment must be a string of 0/1, got '" + std::string(bits) + "'");
    }
    a.set(i, bits[i] == '1');
  }
  return a;
}

Assignment Assignment::filled(std::size_t arity, bool value) {
  Assignment a(arity);
  for (std::size_t i = 0; i < arity; ++i) a.set(i, value);
  return a;
}

std::string Assignment::to_string() const {
  std::string s(size(), '0');
  for (std::size_t i = 0; i < size(); ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

SubsetMask SubsetMask::full(std::size_t arity) {
  SubsetMask s(arity);
  for (std::size_t i = 0; i < arity; ++i) s.insert(i);
  return s;
}

SubsetMask SubsetMask::from_positions(std::size_t arity, std::span<const std::size_t> positions) {
  SubsetMask s(arity);
  for (auto p : positions) {
    if (p >= arity) throw std::out_of_range("subset position out of range");
    s.insert(p);
  }
  return s;
}

SubsetMask SubsetMask::from_variables(std::size_t arity, std::initializer_list<std::size_t> variables) {
  SubsetMask s(arity);
  for (auto v : variables) {
    if (v == 0 || v > arity) throw std::out_of_range("variable number out of range");
    s.insert(v - 1);
  }
  return s;
}

SubsetMask SubsetMask::parse(std::size_t arity, std::string_view text) {
  if (!text.empty() && text.front() == '{') text.remove_prefix(1);
  if (!text.empty() && text.back() == '}') text.remove_suffix(1);
  SubsetMask s(arity);
  while (!text.empty()) {
    while (!text.empty() && (text.front() == ' ' || text.front() == ',')) text.remove_prefix(1);
    if (text.empty()) break;
    if (text.front() == 'x') text.remove_prefix(1);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || v == 0 || v > arity) {
      throw std::invalid_argument("bad subset element in '" + std::string(text) + "'");
    }
    s.insert(v - 1);
    text.remove_prefix(static_cast<std::size_t>(ptr - text.data()));
  }
  return s;
}

void SubsetMask::insert(std::size_t position) {
  if (!bits_.test(position)) {
    bits_.set(position, true);
    ++count_;
  }
}

void SubsetMask::erase(std::size_t position) {
  if (bits_.test(position)) {
    bits_.set(position, false);
    --count_;
  }
}

std::vector<std::size_t> SubsetMask::positions() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < arity(); ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

std::string SubsetMask::to_string() const {
  std::string s = "{";
  bool first = true;
  for (auto p : positions()) {
    if (!first) s += ",";
    s += std::to_string(p + 1);
    first = false;
  }
  return s + "}";
}

}  // namespace deltarel
