#pragma once

#include "deltarel/bits.hpp"
#include "deltarel/exact.hpp"
#include "deltarel/formula.hpp"

#include <cstdint>
#include <vector>

namespace deltarel {

struct ShapleyOptions {
  /// Arity limit for a single characteristic value.
  std::uint32_t single_cap = 16;
  /// Arity limit for the full Shapley vector.
  std::uint32_t vector_cap = 12;
};

struct CharacteristicEval {
  SubsetMask S;
  /// nu(S) = E[f | y_S = x_S] - E[f]; may be negative.
  Rational value;
  DyadicProb expectation;
  bool fx = false;
};

struct ShapleyVector {
  std::vector<Rational> phi;
  /// nu([d]) = f(x) - E[f].
  Rational nu_full;
  /// sum of phi equals nu([d]).
  bool efficiency = false;
};

/// Throws CapExceeded above options.single_cap and ArityMismatch on shape errors.
CharacteristicEval characteristic_value(const Formula& f, const Assignment& x, const SubsetMask& S,
                                        const ShapleyOptions& options = {});

/// Exact Shapley values of the characteristic function, all subsets at once.
/// Throws CapExceeded above options.vector_cap.
ShapleyVector shapley_values(const Formula& f, const Assignment& x, const ShapleyOptions& options = {});

/// |nu(S) + E[f] - f(x)| <= 1 - delta.
bool relevance_from_characteristic(const Formula& f, const Assignment& x, const SubsetMask& S, const Rational& delta,
                                   const ShapleyOptions& options = {});

}  // namespace deltarel
