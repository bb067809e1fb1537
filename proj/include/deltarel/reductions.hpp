#pragma once

#include "deltarel/bits.hpp"
#include "deltarel/exact.hpp"
#include "deltarel/formula.hpp"
#include "deltarel/gadgets.hpp"
#include "deltarel/relevance.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace deltarel {

enum class ProblemKind { Sat, EMajSat, IP1, IP2, IP3, RelevantInput };
std::string to_string(ProblemKind k);
/// Accepts the names produced by to_string, case-insensitively.
ProblemKind parse_problem_kind(std::string_view text);

/// A named run of variables, one-based and inclusive of `first`.
struct Block {
  std::string name;
  std::uint32_t first = 1;
  std::uint32_t count = 0;
};

struct ProblemInstance {
  ProblemKind kind = ProblemKind::RelevantInput;
  Formula f;
  std::optional<Assignment> x;  // absent for Sat and EMajSat
  std::size_t k = 0;
  std::optional<std::size_t> m;  // IP3
  std::optional<Rational> delta;
  std::optional<Rational> gamma;
  std::vector<Block> layout;

  /// Throws std::invalid_argument when a field required by the kind is
  /// missing or out of range, or when a nonempty layout does not partition
  /// the variables.
  void validate() const;
};

/// Phi'(u, v, r, t) = Phi(u, r) xor ((OR_i u_i xor v_i) and t),
/// x' = (0_k, 1_k, 0_{d-k}, 0), k' = 2k.
ProblemInstance reduce_emajsat_to_ip1(const ProblemInstance& source);

/// Phi'(y, t, r) = (Phi(y) and t) or Pi(r) with Pi raising 1/4 to delta on
/// d + 1 variables, x' = (x, 1, 1_n), k' = k. Needs delta in [1/2, 1).
ProblemInstance reduce_ip1_to_ip2(const ProblemInstance& source, const Rational& delta);

/// Phi'(u, v, r1, r2, r3) = (Phi(u, r1 xor r2 xor r3) xor !Phi(x)) and
/// AND_i ((u_i xor !x_i) or v_i), x' = (x_[k], 1_k, x_rest, x_rest, x_rest).
/// Uses the source delta, which must lie in [1/2, 1).
ProblemInstance reduce_ip2_to_relevant_input(const ProblemInstance& source);

/// q = ceil(log2(d / (1 - delta))), p = floor(log2(1 / (delta - gamma))) + 1,
/// Phi' = Phi(AND_j u^(j)) or AND_{i <= m' + p} v_i, x' = all ones,
/// k' = dq, m' defaults to k'.
ProblemInstance reduce_sat_to_ip3(const Formula& phi, const Rational& delta, const Rational& gamma,
                                  std::optional<std::size_t> m_override = std::nullopt);

struct InapproxParameters {
  std::int64_t q = 0;
  std::int64_t p = 0;
  BigInt k_prime;
  BigInt m_prime;
  BigInt d_prime;
  /// Upper bound on k' d'^(1 - alpha).
  Rational lhs_upper;
  /// The two arguments of the max, as upper bounds.
  Rational first_term_upper;
  Rational second_term_upper;
  bool check = false;
};

/// m' = ceil(max(2k'(k'^(1-a) + p^(1-a)), (2k')^(1/a) + 1)), d' = k' + m' + p.
/// Powers are bracketed by exact integer roots; m' is the exact ceiling and
/// `check` compares an upper bound of k' d'^(1-a) against m'.
InapproxParameters inapprox_parameters(std::uint64_t d, const Rational& delta, const Rational& gamma,
                                       const Rational& alpha);

struct VerificationReport {
  ProblemKind source_kind;
  ProblemKind reduced_kind;
  std::string source_verdict;
  std::string reduced_verdict;
  bool pass = false;
  bool skipped = false;
  std::vector<std::string> notes;
};

/// Runs the exact oracle of each side and compares the answers. Throws
/// std::invalid_argument for a pair no reduction produces and CapExceeded
/// when an oracle refuses.
VerificationReport verify_reduction(const ProblemInstance& source, const ProblemInstance& reduced,
                                    const SearchOptions& options = {});

}  // namespace deltarel
