#include "circuit.hpp"
#include "deltarel/errors.hpp"
#include "deltarel/relevance.hpp"
#include "subset_search.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace deltarel {

std::uint64_t sample_count(const Rational& gamma) {
  if (gamma <= 0) throw std::invalid_argument("sampling needs gamma > 0");
  const long double g = numerator(gamma).convert_to<long double>() / denominator(gamma).convert_to<long double>();
  const long double exact = 2.0L * std::log(3.0L) / (g * g);
  return static_cast<std::uint64_t>(std::ceil(exact));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  if (index == 0) return seed;
  std::uint64_t z = seed + index * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

void check_gap(const Rational& delta, const Rational& gamma) {
  if (delta <= 0 || delta > 1) throw std::invalid_argument("delta must lie in (0, 1]");
  if (gamma <= 0) throw std::invalid_argument("sampling needs gamma > 0");
  if (gamma >= delta) throw std::invalid_argument("gamma must be below delta");
}

class Sampler {
 public:
  Sampler(const Formula& f, const Assignment& x) : circuit_(f), x_(x) {
    if (x.size() != f.arity()) {
      throw ArityMismatch("x has length " + std::to_string(x.size()) + " but the formula has arity " +
                          std::to_string(f.arity()));
    }
    fx_ = evaluate(f, x);
  }

  std::size_t arity() const { return x_.size(); }

  SampleResult run(const SubsetMask& S, const Rational& delta, const Rational& gamma, std::uint64_t seed) {
    if (S.arity() != arity()) throw ArityMismatch("subset arity does not match formula arity");
    const std::uint64_t n = sample_count(gamma);
    std::vector<std::uint32_t> rank(arity(), 0);
    std::uint32_t free = 0;
    for (std::size_t i = 0; i < arity(); ++i) {
      if (!S.contains(i)) rank[i] = free++;
    }

    std::mt19937_64 gen(seed);
    std::uint64_t buffer = 0;
    unsigned left = 0;
    auto next_bit = [&]() -> std::uint64_t {
      if (left == 0) {
        buffer = gen();
        left = 64;
      }
      const std::uint64_t b = buffer & 1U;
      buffer >>= 1;
      --left;
      return b;
    };

    std::vector<std::uint64_t> words(free);
    std::vector<std::uint64_t> scratch;
    std::uint64_t agree = 0;
    for (std::uint64_t done = 0; done < n; done += 64) {
      const unsigned chunk = static_cast<unsigned>(std::min<std::uint64_t>(64, n - done));
      std::fill(words.begin(), words.end(), 0);
      for (unsigned s = 0; s < chunk; ++s) {
        for (std::uint32_t j = 0; j < free; ++j) words[j] |= next_bit() << s;
      }
      auto out = circuit_.eval_words(0, circuit_.root(),
                                     [&](std::uint32_t v) -> std::uint64_t {
                                       if (S.contains(v)) return x_[v] ? ~std::uint64_t{0} : 0;
                                       return words[rank[v]];
                                     },
                                     scratch);
      if (!fx_) out = ~out;
      const std::uint64_t mask = chunk == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << chunk) - 1);
      agree += static_cast<std::uint64_t>(std::popcount(out & mask));
    }

    SampleResult r;
    r.agreements = agree;
    r.samples = n;
    r.estimate = static_cast<double>(agree) / static_cast<double>(n);
    r.seed = seed;
    r.verdict = Rational(agree, n) >= delta - gamma / 2 ? Verdict::Yes : Verdict::No;
    return r;
  }

  AmplifiedResult amplified(const SubsetMask& S, const Rational& delta, const Rational& gamma, std::uint64_t seed,
                            std::uint32_t rounds) {
    if (rounds % 2 == 0) throw std::invalid_argument("rounds must be odd");
    AmplifiedResult a;
    a.rounds = rounds;
    for (std::uint32_t r = 0; r < rounds; ++r) {
      a.runs.push_back(run(S, delta, gamma, derive_seed(seed, r)));
      a.yes_votes += a.runs.back().verdict == Verdict::Yes;
    }
    a.verdict = 2 * a.yes_votes > rounds ? Verdict::Yes : Verdict::No;
    return a;
  }

 private:
  detail::Circuit circuit_;
  Assignment x_;
  bool fx_ = false;
};

}  // namespace

SampleResult sample_relevance(const Formula& f, const Assignment& x, const SubsetMask& S, const Rational& delta,
                              const Rational& gamma, std::uint64_t seed) {
  check_gap(delta, gamma);
  return Sampler(f, x).run(S, delta, gamma, seed);
}

AmplifiedResult amplified_sample_relevance(const Formula& f, const Assignment& x, const SubsetMask& S,
                                           const Rational& delta, const Rational& gamma, std::uint64_t seed,
                                           std::uint32_t rounds) {
  check_gap(delta, gamma);
  return Sampler(f, x).amplified(S, delta, gamma, seed, rounds);
}

RelevanceReport decide_gapped(const Formula& f, const Assignment& x, std::size_t k, const Rational& delta,
                              const Rational& gamma, std::uint64_t seed, const GappedOptions& options) {
  check_gap(delta, gamma);
  if (k > f.arity()) throw std::invalid_argument("k exceeds the arity");
  if (options.rounds % 2 == 0) throw std::invalid_argument("rounds must be odd");
  const auto total = count_subsets(f.arity(), 0, k);
  if (total > options.search.max_subsets) throw CapExceeded("candidate subsets", total, options.search.max_subsets);

  std::vector<Sampler> states;
  auto hit = detail::search_first<Sampler>(
      f.arity(), f.arity(), 0, k, options.search.threads, [&] { return Sampler(f, x); },
      [&](Sampler& s, const SubsetMask& S, std::uint64_t index) {
        return s.amplified(S, delta, gamma, derive_seed(seed, index), options.rounds).verdict == Verdict::Yes;
      },
      states);

  RelevanceReport report;
  report.method = "sampled";
  report.samples = sample_count(gamma);
  if (hit) {
    report.verdict = Verdict::Yes;
    report.witness = hit->mask;
    auto a = states.front().amplified(hit->mask, delta, gamma, derive_seed(seed, hit->index), options.rounds);
    std::uint64_t agree = 0;
    for (const auto& r : a.runs) agree += r.agreements;
    report.estimate = static_cast<double>(agree) / static_cast<double>(report.samples * a.rounds);
    report.candidates_checked = hit->index + 1;
  } else {
    report.verdict = Verdict::No;
    report.candidates_checked = total;
  }

  report.promise = "unclassified";
  if (options.classify_promise) {
    try {
      ConditionalCounter counter(f, options.search.count);
      std::optional<DyadicProb> best;
      bool yes_instance = false;
      for (detail::SubsetCursor c(f.arity(), f.arity(), 0, k); !c.done(); c.advance()) {
        auto p = counter.agreement(x, c.current());
        if (!best || p.compare(*best) > 0) best = p;
        if (p >= delta) {
          yes_instance = true;
          break;
        }
      }
      report.probability = best;
      report.promise = yes_instance ? "yes-instance" : (*best < delta - gamma ? "no-instance" : "outside-promise");
    } catch (const CapExceeded&) {
      report.promise = "unclassified";
    }
  }
  return report;
}

GreedyResult greedy_min_relevant(const Formula& f, const Assignment& x, const Rational& delta, const Rational& gamma,
                                 std::uint64_t seed, const GreedyOptions& options) {
  check_gap(delta, gamma);
  if (options.rounds % 2 == 0) throw std::invalid_argument("rounds must be odd");
  Sampler sampler(f, x);
  std::optional<ConditionalCounter> counter;
  if (options.verify_exact) {
    try {
      counter.emplace(f, options.count);
    } catch (const CapExceeded&) {
      counter.reset();
    }
  }
  const Rational low = delta - gamma;

  GreedyResult result;
  result.set = SubsetMask(f.arity());
  for (std::uint64_t step = 0;; ++step) {
    const auto step_seed = derive_seed(seed, step);
    const bool full = result.set.size() == f.arity();
    bool accept = full || sampler.amplified(result.set, delta, gamma, step_seed, options.rounds).verdict == Verdict::Yes;
    if (accept && counter) {
      auto p = counter->agreement(x, result.set);
      result.exact_probability = p;
      accept = full || p >= low;
    }
    if (accept) break;

    std::optional<std::size_t> best;
    double best_estimate = -1.0;
    for (std::size_t v = 0; v < f.arity(); ++v) {
      if (result.set.contains(v)) continue;
      auto trial = result.set;
      trial.insert(v);
      auto r = sampler.run(trial, delta, gamma, derive_seed(step_seed, options.rounds + v));
      if (r.estimate > best_estimate) {
        best_estimate = r.estimate;
        best = v;
      }
    }
    result.set.insert(*best);
    result.steps.push_back({*best, best_estimate});
  }
  result.k = result.set.size();
  return result;
}

}  // namespace deltarel
