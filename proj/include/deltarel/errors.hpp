#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace deltarel {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Input shapes disagree (assignment length vs. formula arity, mask arity, ...).
class ArityMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured limit refused the work. `dimension` names the limit.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(std::string dimension, std::uint64_t requested, std::uint64_t cap)
      : std::runtime_error(dimension + " " + std::to_string(requested) + " exceeds cap " + std::to_string(cap)),
        dimension_(std::move(dimension)),
        requested_(requested),
        cap_(cap) {}

  const std::string& dimension() const { return dimension_; }
  std::uint64_t requested() const { return requested_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::string dimension_;
  std::uint64_t requested_;
  std::uint64_t cap_;
};

}  // namespace deltarel
