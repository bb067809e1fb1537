#include "deltarel/shapley.hpp"

#include "deltarel/counting.hpp"
#include "deltarel/errors.hpp"

namespace deltarel {

namespace {

void check_shapes(const Formula& f, const Assignment& x) {
  if (x.size() != f.arity()) {
    throw ArityMismatch("x has length " + std::to_string(x.size()) + " but the formula has arity " +
                        std::to_string(f.arity()));
  }
}

}  // namespace

CharacteristicEval characteristic_value(const Formula& f, const Assignment& x, const SubsetMask& S,
                                        const ShapleyOptions& options) {
  check_shapes(f, x);
  if (S.arity() != f.arity()) throw ArityMismatch("subset arity does not match the formula");
  if (f.arity() > options.single_cap) throw CapExceeded("characteristic arity", f.arity(), options.single_cap);
  ConditionalCounter counter(f);
  CharacteristicEval out;
  out.S = S;
  out.expectation = counter.unconditional();
  out.value = counter.satisfaction(x, S).to_rational() - out.expectation.to_rational();
  out.fx = evaluate(f, x);
  return out;
}

ShapleyVector shapley_values(const Formula& f, const Assignment& x, const ShapleyOptions& options) {
  check_shapes(f, x);
  const std::uint32_t d = f.arity();
  if (d > options.vector_cap) throw CapExceeded("shapley arity", d, options.vector_cap);
  const std::uint64_t full = (std::uint64_t{1} << d) - 1;

  // With z = y xor x, y agrees with x on S iff z avoids S, so the number of
  // models agreeing on S is a subset sum over the complement of S.
  std::uint64_t xb = 0;
  for (std::uint32_t i = 0; i < d; ++i) xb |= std::uint64_t{x[i]} << i;
  TruthTableOptions tt;
  tt.enumeration_cap = d;
  const auto table = truth_table(f, tt);
  std::vector<std::int64_t> h(full + 1);
  for (std::uint64_t z = 0; z <= full; ++z) h[z] = table.test(z ^ xb);
  for (std::uint32_t i = 0; i < d; ++i) {
    for (std::uint64_t u = 0; u <= full; ++u) {
      if (u >> i & 1U) h[u] += h[u ^ (std::uint64_t{1} << i)];
    }
  }
  // N(S) = 2^d (nu(S) + E[f]) = models(S) 2^|S|.
  std::vector<std::int64_t> N(full + 1);
  for (std::uint64_t s = 0; s <= full; ++s) N[s] = h[full ^ s] << __builtin_popcountll(s);

  std::vector<BigInt> fact(d + 1, 1);
  for (std::uint32_t i = 1; i <= d; ++i) fact[i] = fact[i - 1] * i;
  const Rational scale = Rational(fact[d]) * pow2(d);

  ShapleyVector out;
  Rational total = 0;
  for (std::uint32_t i = 0; i < d; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    BigInt acc = 0;
    for (std::uint64_t s = 0; s <= full; ++s) {
      if (s & bit) continue;
      const auto size = static_cast<std::uint32_t>(__builtin_popcountll(s));
      acc += fact[size] * fact[d - size - 1] * (N[s | bit] - N[s]);
    }
    out.phi.push_back(Rational(acc) / scale);
    total += out.phi.back();
  }
  out.nu_full = Rational(N[full] - N[0], 1) / pow2(d);
  out.efficiency = total == out.nu_full;
  return out;
}

bool relevance_from_characteristic(const Formula& f, const Assignment& x, const SubsetMask& S, const Rational& delta,
                                   const ShapleyOptions& options) {
  auto ev = characteristic_value(f, x, S, options);
  Rational gap = ev.value + ev.expectation.to_rational() - (ev.fx ? 1 : 0);
  if (gap < 0) gap = -gap;
  return gap <= 1 - delta;
}

}  // namespace deltarel
