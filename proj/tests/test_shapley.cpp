#include "deltarel/errors.hpp"
#include "deltarel/relevance.hpp"
#include "deltarel/shapley.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace deltarel;

namespace {
Rational q(const char* s) { return parse_rational(s); }

/// Shapley values straight from the displayed sum, nu from the naive oracle.
std::vector<Rational> naive_shapley(const Formula& f, const Assignment& x) {
  const auto d = f.arity();
  const auto xb = oracle::bits_of(x);
  const Rational e = oracle::probability(f);
  std::vector<Rational> nu(std::size_t{1} << d);
  for (std::uint64_t s = 0; s < nu.size(); ++s) nu[s] = oracle::conditional(f, xb, s, true) - e;
  std::vector<Rational> fact(d + 1, 1);
  for (std::uint32_t i = 1; i <= d; ++i) fact[i] = fact[i - 1] * i;
  std::vector<Rational> phi(d, 0);
  for (std::uint32_t i = 0; i < d; ++i) {
    for (std::uint64_t s = 0; s < nu.size(); ++s) {
      if (s >> i & 1U) continue;
      const auto k = __builtin_popcountll(s);
      phi[i] += fact[k] * fact[d - k - 1] / fact[d] * (nu[s | (std::uint64_t{1} << i)] - nu[s]);
    }
  }
  return phi;
}
}  // namespace

TEST_CASE("characteristic examples") {
  auto f = parse("(x1 & x2) | !x3");
  auto x = Assignment::from_string("110");
  auto ev = characteristic_value(f, x, SubsetMask::from_variables(3, {3}));
  CHECK(ev.value == q("3/8"));
  CHECK(ev.expectation.to_rational() == q("5/8"));
  CHECK(ev.fx);
  CHECK(characteristic_value(f, x, SubsetMask(3)).value == 0);
  CHECK(characteristic_value(f, x, SubsetMask::full(3)).value == q("3/8"));
  CHECK(characteristic_value(f, x, SubsetMask::from_variables(3, {1})).value == q("1/8"));

  CHECK(relevance_from_characteristic(f, x, SubsetMask::from_variables(3, {3}), 1));
  CHECK_FALSE(relevance_from_characteristic(f, x, SubsetMask::from_variables(3, {1}), q("4/5")));
  CHECK(relevance_from_characteristic(f, x, SubsetMask::full(3), 1));

  ShapleyOptions tight;
  tight.single_cap = 2;
  CHECK_THROWS_AS(characteristic_value(f, x, SubsetMask(3), tight), CapExceeded);
  CHECK_THROWS_AS(characteristic_value(f, Assignment::from_string("11"), SubsetMask(3)), ArityMismatch);
}

TEST_CASE("shapley examples") {
  auto one = shapley_values(parse("x1"), Assignment::from_string("1"));
  REQUIRE(one.phi.size() == 1);
  CHECK(one.phi[0] == q("1/2"));

  auto sym = shapley_values(parse("x1 & x2"), Assignment::from_string("11"));
  CHECK(sym.phi[0] == sym.phi[1]);
  CHECK(sym.efficiency);

  auto circuit = shapley_values(parse("(x1 & x2) | !x3"), Assignment::from_string("110"));
  CHECK(circuit.phi[0] + circuit.phi[1] + circuit.phi[2] == q("3/8"));
  CHECK(circuit.nu_full == q("3/8"));
  CHECK(circuit.efficiency);

  auto dummy = shapley_values(parse("x1 | x3", 4), Assignment::from_string("0110"));
  CHECK(dummy.phi[1] == 0);
  CHECK(dummy.phi[3] == 0);

  ShapleyOptions tight;
  tight.vector_cap = 3;
  CHECK_THROWS_AS(shapley_values(parse("x1 & x4"), Assignment::from_string("0000"), tight), CapExceeded);
}

TEST_CASE("shapley matches the displayed sum") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 80; ++i) {
    const std::uint32_t d = 1 + rng() % 6;
    auto f = oracle::random_formula(rng, d);
    auto x = oracle::assignment_of(rng() & ((std::uint64_t{1} << d) - 1), d);
    auto v = shapley_values(f, x);
    CHECK(v.phi == naive_shapley(f, x));
    CHECK(v.efficiency);
    CHECK(v.nu_full == Rational(oracle::eval(f, oracle::bits_of(x)) ? 1 : 0) - oracle::probability(f));
    for (const auto& p : v.phi) {
      BigInt den = 1;
      for (std::uint32_t j = 2; j <= d; ++j) den *= j;
      den <<= d;
      CHECK(den % denominator(p) == 0);
    }
  }
}

TEST_CASE("characteristic identity matches relevance") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 60; ++i) {
    const std::uint32_t d = 1 + rng() % 7;
    auto f = oracle::random_formula(rng, d);
    auto x = oracle::assignment_of(rng() & ((std::uint64_t{1} << d) - 1), d);
    for (const auto& S : oracle::subsets_up_to(d, 3)) {
      auto ev = characteristic_value(f, x, S);
      const Rational bound = ev.value + ev.expectation.to_rational() - (ev.fx ? 1 : 0);
      CHECK(bound <= 1);
      CHECK(bound >= -1);
      for (const char* delta : {"1/4", "1/2", "3/4", "1"}) {
        CHECK(relevance_from_characteristic(f, x, S, q(delta)) == is_delta_relevant(f, x, S, q(delta)).relevant);
      }
    }
  }
}
