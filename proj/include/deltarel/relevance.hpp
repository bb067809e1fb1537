#pragma once

#include "deltarel/bits.hpp"
#include "deltarel/counting.hpp"
#include "deltarel/exact.hpp"
#include "deltarel/formula.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace deltarel {

enum class Verdict { Yes, No, DontKnow, Indeterminate };
std::string to_string(Verdict v);

struct SearchOptions {
  CountOptions count;
  /// Refuses a search whose candidate list sum_{i<=k} C(d, i) exceeds this.
  std::uint64_t max_subsets = std::uint64_t{1} << 20;
  unsigned threads = 1;
};

/// sum_{i=lo..hi} C(d, i), saturating at UINT64_MAX.
std::uint64_t count_subsets(std::size_t d, std::size_t lo, std::size_t hi);

struct RelevanceCheck {
  bool relevant = false;
  DyadicProb probability;
};

/// Exact test of P_y(f(y) = f(x) | y_S = x_S) >= delta.
RelevanceCheck is_delta_relevant(const Formula& f, const Assignment& x, const SubsetMask& S, const Rational& delta,
                                 const CountOptions& options = {});

struct RelevanceReport {
  Verdict verdict = Verdict::No;
  std::optional<SubsetMask> witness;
  /// Exact runs: the witness probability on Yes, the best probability seen on No.
  std::optional<DyadicProb> probability;
  /// Sampled runs: point estimate and samples per run for the witness.
  std::optional<double> estimate;
  std::uint64_t samples = 0;
  std::uint64_t candidates_checked = 0;
  std::string method;
  /// Gapped runs: "yes-instance", "no-instance", "outside-promise" or "unclassified".
  std::string promise;
};

/// Is there S with |S| <= k and agreement >= delta? Candidates are visited by
/// size, then lexicographically by their sorted positions; the first hit is
/// the witness.
RelevanceReport decide_relevant_input(const Formula& f, const Assignment& x, std::size_t k, const Rational& delta,
                                      const SearchOptions& options = {});

struct MinRelevantResult {
  std::size_t k = 0;
  SubsetMask witness;
  DyadicProb probability;
  std::uint64_t candidates_checked = 0;
};

/// Smallest k with a delta-relevant set of size k (k = 0 allowed).
MinRelevantResult solve_min_relevant_input(const Formula& f, const Assignment& x, const Rational& delta,
                                           const SearchOptions& options = {});

// ---------------------------------------------------------------------------
// Sampling

/// ceil(2 ln 3 / gamma^2). Throws std::invalid_argument unless gamma > 0.
std::uint64_t sample_count(const Rational& gamma);

/// splitmix64 hash of (seed, index); index 0 returns the seed unchanged.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct SampleResult {
  Verdict verdict = Verdict::No;
  std::uint64_t agreements = 0;
  std::uint64_t samples = 0;
  double estimate = 0.0;
  std::uint64_t seed = 0;
};

/// Draws sample_count(gamma) assignments of the positions outside S from a
/// std::mt19937_64 seeded with `seed`. Bits are taken least significant
/// first from successive 64-bit outputs, one per free position in ascending
/// order, sample after sample. Answers Yes iff xi >= delta - gamma/2 (exact).
SampleResult sample_relevance(const Formula& f, const Assignment& x, const SubsetMask& S, const Rational& delta,
                              const Rational& gamma, std::uint64_t seed);

struct AmplifiedResult {
  Verdict verdict = Verdict::No;
  std::uint32_t rounds = 0;
  std::uint32_t yes_votes = 0;
  std::vector<SampleResult> runs;
};

/// Majority over `rounds` (odd) runs seeded derive_seed(seed, r).
AmplifiedResult amplified_sample_relevance(const Formula& f, const Assignment& x, const SubsetMask& S,
                                           const Rational& delta, const Rational& gamma, std::uint64_t seed,
                                           std::uint32_t rounds);

struct GappedOptions {
  SearchOptions search;
  std::uint32_t rounds = 15;
  /// Also decide exactly whether the instance satisfies the promise.
  bool classify_promise = true;
};

/// Subset search where each candidate (index i in search order) is accepted
/// by amplified_sample_relevance seeded derive_seed(seed, i).
RelevanceReport decide_gapped(const Formula& f, const Assignment& x, std::size_t k, const Rational& delta,
                              const Rational& gamma, std::uint64_t seed, const GappedOptions& options = {});

struct GreedyStep {
  std::size_t added = 0;  // zero-based position
  double estimate = 0.0;
};

struct GreedyResult {
  std::size_t k = 0;
  SubsetMask set;
  std::vector<GreedyStep> steps;
  /// Set when the exact check ran: agreement of the returned set.
  std::optional<DyadicProb> exact_probability;
};

struct GreedyOptions {
  std::uint32_t rounds = 15;
  /// Require the exact (delta - gamma)-relevance check before accepting.
  bool verify_exact = true;
  CountOptions count;
};

/// Grows S from the empty set, adding the position with the largest sampled
/// agreement (ties to the smallest position) until the amplified test
/// accepts. Makes no approximation guarantee.
GreedyResult greedy_min_relevant(const Formula& f, const Assignment& x, const Rational& delta, const Rational& gamma,
                                 std::uint64_t seed, const GreedyOptions& options = {});

// ---------------------------------------------------------------------------
// Brute-force oracles for the intermediate problems

struct OracleResult {
  bool yes = false;
  /// E-Maj-Sat: prefix assignment of length k. Others: unused.
  std::optional<Assignment> prefix;
  std::optional<SubsetMask> witness;
  /// Probability at the witness on Yes, the largest probability seen on No.
  DyadicProb probability;
};

/// Exists a prefix p in {0,1}^k with P(f | y_[k] = p) > 1/2?
OracleResult solve_emajsat(const Formula& f, std::size_t k, const CountOptions& options = {});
/// Exists S within the first k positions with P(f | y_S = x_S) > 1/2?
OracleResult solve_ip1(const Formula& f, const Assignment& x, std::size_t k, const CountOptions& options = {});
/// Exists S within the first k positions with P(f | y_S = x_S) >= delta?
OracleResult solve_ip2(const Formula& f, const Assignment& x, std::size_t k, const Rational& delta,
                       const CountOptions& options = {});

struct Ip3Result {
  Verdict verdict = Verdict::Indeterminate;
  std::optional<SubsetMask> witness;
  /// Best agreement over |S| <= m.
  DyadicProb best;
};

/// Yes if some |S| <= k is delta-relevant; No if no |S| <= m is
/// (delta - gamma)-relevant; Indeterminate otherwise.
Ip3Result solve_ip3(const Formula& f, const Assignment& x, std::size_t k, std::size_t m, const Rational& delta,
                    const Rational& gamma, const SearchOptions& options = {});

}  // namespace deltarel
