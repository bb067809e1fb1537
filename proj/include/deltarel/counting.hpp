#pragma once

#include "deltarel/bits.hpp"
#include "deltarel/exact.hpp"
#include "deltarel/formula.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace deltarel {

struct CountOptions {
  /// Largest number of free variables enumerated in one block.
  std::uint32_t enumeration_cap = 26;
  /// Shannon branches allowed per query before falling back to enumeration.
  std::uint64_t branch_budget = std::uint64_t{1} << 22;
  unsigned threads = 1;
};

/// Exact model counter for one formula under partial assignments.
///
/// Counts by walking the circuit: a gate whose children share no free
/// variable combines the children's counts by the independence laws; a
/// gate with shared free variables is either enumerated bit-parallel or
/// split by Shannon expansion on a shared variable. Counts of subtrees that
/// no fixed variable touches are cached at construction.
///
/// Holds mutable scratch state: use one instance per thread.
class ConditionalCounter {
 public:
  explicit ConditionalCounter(const Formula& f, const CountOptions& options = {});
  ~ConditionalCounter();
  ConditionalCounter(ConditionalCounter&&) noexcept;
  ConditionalCounter& operator=(ConditionalCounter&&) noexcept;

  const Formula& formula() const;

  /// P(f) under the uniform distribution.
  DyadicProb unconditional() const;
  /// P_y(f(y) = 1 | y_S = x_S).
  DyadicProb satisfaction(const Assignment& x, const SubsetMask& S);
  /// P_y(f(y) = f(x) | y_S = x_S).
  DyadicProb agreement(const Assignment& x, const SubsetMask& S);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DyadicProb satisfaction_probability(const Formula& f, const CountOptions& options = {});

DyadicProb conditional_satisfaction_probability(const Formula& f, const Assignment& x, const SubsetMask& S,
                                                const CountOptions& options = {});

DyadicProb conditional_agreement_probability(const Formula& f, const Assignment& x, const SubsetMask& S,
                                             const CountOptions& options = {});

/// A split of a formula into variable-disjoint parts with the law that
/// combines their probabilities.
struct Decomposition {
  enum class Law { Leaf, Not, And, Or, Xor };

  Law law = Law::Leaf;
  NodePtr node;
  /// Sorted one-based variables of `node`.
  std::vector<std::uint32_t> variables;
  std::vector<Decomposition> parts;
};

/// Splits top-level And/Or/Xor gates whose operands fall into groups with
/// pairwise-disjoint variables, recursing into parts still above the cap.
/// A part that cannot be split is returned as a single leaf.
Decomposition decompose_independent(const Formula& f, std::uint32_t cap = 26);

/// Combines exact leaf probabilities (each leaf enumerated on its own
/// variables). Throws CapExceeded for a leaf above the cap.
DyadicProb probability(const Decomposition& d, std::uint32_t cap = 26);

}  // namespace deltarel
