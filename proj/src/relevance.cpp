#include "deltarel/relevance.hpp"

#include "deltarel/errors.hpp"
#include "subset_search.hpp"

#include <stdexcept>

namespace deltarel {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes:
      return "Yes";
    case Verdict::No:
      return "No";
    case Verdict::DontKnow:
      return "DontKnow";
    case Verdict::Indeterminate:
      return "Indeterminate";
  }
  return "?";
}

std::uint64_t count_subsets(std::size_t d, std::size_t lo, std::size_t hi) {
  unsigned __int128 total = 0;
  unsigned __int128 binom = 1;  // C(d, i)
  for (std::size_t i = 0; i <= std::min(hi, d); ++i) {
    if (i > 0) binom = binom * (d - i + 1) / i;
    if (i >= lo) total += binom;
    if (total > UINT64_MAX || binom > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(total);
}

namespace {

void check_shapes(const Formula& f, const Assignment& x) {
  if (x.size() != f.arity()) {
    throw ArityMismatch("x has length " + std::to_string(x.size()) + " but the formula has arity " +
                        std::to_string(f.arity()));
  }
}

void check_delta(const Rational& delta) {
  if (delta <= 0 || delta > 1) throw std::invalid_argument("delta must lie in (0, 1]");
}

void check_cap(std::uint64_t candidates, std::uint64_t cap) {
  if (candidates > cap) throw CapExceeded("candidate subsets", candidates, cap);
}

struct ExactState {
  ConditionalCounter counter;
  std::optional<DyadicProb> best;

  void offer(const DyadicProb& p) {
    if (!best || p.compare(*best) > 0) best = p;
  }
};

std::optional<DyadicProb> best_of(const std::vector<ExactState>& states) {
  std::optional<DyadicProb> best;
  for (const auto& s : states) {
    if (s.best && (!best || s.best->compare(*best) > 0)) best = s.best;
  }
  return best;
}

}  // namespace

RelevanceCheck is_delta_relevant(const Formula& f, const Assignment& x, const SubsetMask& S, const Rational& delta,
                                 const CountOptions& options) {
  check_shapes(f, x);
  check_delta(delta);
  auto p = conditional_agreement_probability(f, x, S, options);
  return {p >= delta, p};
}

RelevanceReport decide_relevant_input(const Formula& f, const Assignment& x, std::size_t k, const Rational& delta,
                                      const SearchOptions& options) {
  check_shapes(f, x);
  check_delta(delta);
  if (k > f.arity()) throw std::invalid_argument("k exceeds the arity");
  const auto total = count_subsets(f.arity(), 0, k);
  check_cap(total, options.max_subsets);

  std::vector<ExactState> states;
  auto hit = detail::search_first<ExactState>(
      f.arity(), f.arity(), 0, k, options.threads, [&] { return ExactState{ConditionalCounter(f, options.count), {}}; },
      [&](ExactState& st, const SubsetMask& S, std::uint64_t) {
        auto p = st.counter.agreement(x, S);
        st.offer(p);
        return p >= delta;
      },
      states);

  RelevanceReport report;
  report.method = "exact";
  if (hit) {
    report.verdict = Verdict::Yes;
    report.witness = hit->mask;
    report.probability = states.front().counter.agreement(x, hit->mask);
    report.candidates_checked = hit->index + 1;
  } else {
    report.verdict = Verdict::No;
    report.probability = best_of(states);
    report.candidates_checked = total;
  }
  return report;
}

MinRelevantResult solve_min_relevant_input(const Formula& f, const Assignment& x, const Rational& delta,
                                           const SearchOptions& options) {
  check_shapes(f, x);
  check_delta(delta);
  MinRelevantResult result;
  std::uint64_t checked = 0;
  for (std::size_t size = 0; size <= f.arity(); ++size) {
    const auto level = count_subsets(f.arity(), size, size);
    check_cap(checked + level, options.max_subsets);
    std::vector<ExactState> states;
    auto hit = detail::search_first<ExactState>(
        f.arity(), f.arity(), size, size, options.threads,
        [&] { return ExactState{ConditionalCounter(f, options.count), {}}; },
        [&](ExactState& st, const SubsetMask& S, std::uint64_t) { return st.counter.agreement(x, S) >= delta; },
        states);
    if (hit) {
      result.k = size;
      result.witness = hit->mask;
      result.probability = states.front().counter.agreement(x, hit->mask);
      result.candidates_checked = checked + hit->index + 1;
      return result;
    }
    checked += level;
  }
  throw std::logic_error("the full set is always 1-relevant");
}

// ---------------------------------------------------------------------------
// Brute-force oracles

namespace {

SubsetMask prefix_mask(std::size_t arity, std::size_t k) {
  SubsetMask s(arity);
  for (std::size_t i = 0; i < k; ++i) s.insert(i);
  return s;
}

void check_k(std::size_t k, std::size_t d) {
  if (k < 1 || k > d) throw std::invalid_argument("k must satisfy 1 <= k <= d");
}

}  // namespace

OracleResult solve_emajsat(const Formula& f, std::size_t k, const CountOptions& options) {
  check_k(k, f.arity());
  if (k > 30) throw CapExceeded("prefix variables", k, 30);
  ConditionalCounter counter(f, options);
  const auto mask = prefix_mask(f.arity(), k);
  const Rational half(1, 2);
  OracleResult result;
  for (std::uint64_t j = 0; j < (std::uint64_t{1} << k); ++j) {
    Assignment a(f.arity());
    for (std::size_t i = 0; i < k; ++i) a.set(i, (j >> i) & 1U);
    auto p = counter.satisfaction(a, mask);
    if (j == 0 || p.compare(result.probability) > 0) result.probability = p;
    if (p > half) {
      Assignment prefix(k);
      for (std::size_t i = 0; i < k; ++i) prefix.set(i, a[i]);
      result.yes = true;
      result.prefix = prefix;
      result.probability = p;
      return result;
    }
  }
  return result;
}

namespace {

OracleResult prefix_subset_search(const Formula& f, const Assignment& x, std::size_t k, const CountOptions& options,
                                  const std::function<bool(const DyadicProb&)>& accept) {
  check_shapes(f, x);
  check_k(k, f.arity());
  if (k > 30) throw CapExceeded("prefix variables", k, 30);
  ConditionalCounter counter(f, options);
  OracleResult result;
  bool first = true;
  for (detail::SubsetCursor c(f.arity(), k, 0, k); !c.done(); c.advance()) {
    auto S = c.current();
    auto p = counter.satisfaction(x, S);
    if (first || p.compare(result.probability) > 0) result.probability = p;
    first = false;
    if (accept(p)) {
      result.yes = true;
      result.witness = S;
      result.probability = p;
      return result;
    }
  }
  return result;
}

}  // namespace

OracleResult solve_ip1(const Formula& f, const Assignment& x, std::size_t k, const CountOptions& options) {
  const Rational half(1, 2);
  return prefix_subset_search(f, x, k, options, [&](const DyadicProb& p) { return p > half; });
}

OracleResult solve_ip2(const Formula& f, const Assignment& x, std::size_t k, const Rational& delta,
                       const CountOptions& options) {
  check_delta(delta);
  return prefix_subset_search(f, x, k, options, [&](const DyadicProb& p) { return p >= delta; });
}

Ip3Result solve_ip3(const Formula& f, const Assignment& x, std::size_t k, std::size_t m, const Rational& delta,
                    const Rational& gamma, const SearchOptions& options) {
  check_shapes(f, x);
  check_delta(delta);
  if (gamma < 0 || gamma >= delta) throw std::invalid_argument("gamma must lie in [0, delta)");
  if (!(1 <= k && k <= m && m <= f.arity())) throw std::invalid_argument("need 1 <= k <= m <= d");

  Ip3Result result;
  auto yes = decide_relevant_input(f, x, k, delta, options);
  if (yes.verdict == Verdict::Yes) {
    result.verdict = Verdict::Yes;
    result.witness = yes.witness;
    result.best = *yes.probability;
    return result;
  }
  result.best = *yes.probability;
  // Sizes k+1..m: any (delta - gamma)-relevant set puts the instance in the gap.
  const Rational low = delta - gamma;
  if (result.best >= low) {
    result.verdict = Verdict::Indeterminate;
    return result;
  }
  check_cap(count_subsets(f.arity(), 0, m), options.max_subsets);
  std::vector<ExactState> states;
  auto hit = detail::search_first<ExactState>(
      f.arity(), f.arity(), k + 1, m, options.threads,
      [&] { return ExactState{ConditionalCounter(f, options.count), {}}; },
      [&](ExactState& st, const SubsetMask& S, std::uint64_t) {
        auto p = st.counter.agreement(x, S);
        st.offer(p);
        return p >= low;
      },
      states);
  if (auto b = best_of(states); b && b->compare(result.best) > 0) result.best = *b;
  if (hit) {
    result.verdict = Verdict::Indeterminate;
    result.witness = hit->mask;
  } else {
    result.verdict = Verdict::No;
  }
  return result;
}

}  // namespace deltarel
