#pragma once

#include "deltarel/exact.hpp"
#include "deltarel/formula.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace deltarel {

struct GadgetStep {
  std::uint64_t delta_n = 0;
  /// Probability before this step.
  DyadicProb p;
};

/// Monotone DNF over fresh variables x1..xn with its exact probability.
struct Gadget {
  Formula pi;
  std::uint32_t n = 0;
  DyadicProb prob;
  std::vector<GadgetStep> trace;
  /// Pi is the constant 1 on zero variables.
  bool trivial = false;
  /// "conjunction", "iterative" or "constant".
  std::string shape;
};

/// Approximates eta within 2^-ell. Throws std::invalid_argument unless
/// 0 < eta <= 1 and ell >= 1; throws std::logic_error if any of the
/// construction's bounds fails.
Gadget build_pi(const Rational& eta, std::uint32_t ell);

/// The parameters the raising and lowering constructions derive.
struct GadgetPlan {
  Gadget gadget;
  /// 1: plain conjunction (raising) or constant (lowering); 2: from build_pi.
  int branch = 2;
  std::optional<Rational> a, b, eta;
  std::optional<std::uint32_t> ell;
  /// "or" for raising, "and" for lowering.
  std::string combiner;
};

/// P(phi) > delta1  <=>  P(phi | pi) >= delta2 for every phi on d variables.
GadgetPlan raise_probability_gadget(std::uint32_t d, const Rational& delta1, const Rational& delta2);

/// P(phi) >= delta2  <=>  P(phi & pi) > delta1 for every phi on d variables.
GadgetPlan lower_probability_gadget(std::uint32_t d, const Rational& delta1, const Rational& delta2);

/// phi combined with the gadget on variables d+1..d+n.
Formula attach(const Formula& phi, const GadgetPlan& plan);

}  // namespace deltarel
