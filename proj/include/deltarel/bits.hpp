#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace deltarel {

/// Fixed-length packed bit vector, 64 bits per word, bit i in word i / 64.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size);

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value = true);
  std::size_t count() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// A point x in {0,1}^d. Position i holds the value of variable x_{i+1}.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t arity) : bits_(arity) {}

  /// Leftmost character is x1. Throws std::invalid_argument on anything but 0/1.
  static Assignment from_string(std::string_view bits);
  static Assignment filled(std::size_t arity, bool value);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t position) const { return bits_.test(position); }
  void set(std::size_t position, bool value) { bits_.set(position, value); }

  std::string to_string() const;
  const BitVector& bits() const { return bits_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  BitVector bits_;
};

/// A subset S of the variable positions {0..d-1}, with its size cached.
class SubsetMask {
 public:
  SubsetMask() = default;
  explicit SubsetMask(std::size_t arity) : bits_(arity) {}

  static SubsetMask full(std::size_t arity);
  /// Zero-based positions.
  static SubsetMask from_positions(std::size_t arity, std::span<const std::size_t> positions);
  /// One-based variable numbers, as in x1..xd.
  static SubsetMask from_variables(std::size_t arity, std::initializer_list<std::size_t> variables);
  /// Parses "1,3" or "{1,3}" or "" (empty set); numbers are one-based.
  static SubsetMask parse(std::size_t arity, std::string_view text);

  std::size_t arity() const { return bits_.size(); }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool contains(std::size_t position) const { return bits_.test(position); }
  void insert(std::size_t position);
  void erase(std::size_t position);

  std::vector<std::size_t> positions() const;
  /// "{1,3}" with one-based variable numbers.
  std::string to_string() const;

  friend bool operator==(const SubsetMask&, const SubsetMask&) = default;

 private:
  BitVector bits_;
  std::size_t count_ = 0;
};

}  // namespace deltarel
