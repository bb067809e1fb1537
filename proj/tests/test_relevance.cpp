#include "deltarel/errors.hpp"
#include "deltarel/relevance.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace deltarel;

namespace {
const Formula kCircuit = parse("(x1 & x2) | !x3");
Rational q(const char* s) { return parse_rational(s); }

Formula parity(std::uint32_t d) {
  NodePtr acc = build::var(1);
  for (std::uint32_t i = 2; i <= d; ++i) acc = build::exclusive(acc, build::var(i));
  return Formula(acc, d);
}
}  // namespace

TEST_CASE("is_delta_relevant examples") {
  auto x = Assignment::from_string("110");
  auto s1 = SubsetMask::from_variables(3, {1});
  auto r = is_delta_relevant(kCircuit, x, s1, q("3/4"));
  CHECK(r.relevant);
  CHECK(r.probability == DyadicProb(3, 2));
  CHECK_FALSE(is_delta_relevant(kCircuit, x, s1, q("4/5")).relevant);
  CHECK(is_delta_relevant(kCircuit, x, SubsetMask::full(3), q("1")).relevant);
  CHECK_THROWS_AS(is_delta_relevant(kCircuit, Assignment::from_string("11"), SubsetMask(2), q("1")), ArityMismatch);
}

TEST_CASE("decide_relevant_input examples") {
  auto r = decide_relevant_input(kCircuit, Assignment::from_string("110"), 1, q("1"));
  CHECK(r.verdict == Verdict::Yes);
  CHECK(r.witness->to_string() == "{3}");
  CHECK(r.probability->is_one());

  // At x = 111: {3} gives 1/4, while {1} and {2} each give 3/4.
  auto y = Assignment::from_string("111");
  ConditionalCounter c(kCircuit);
  CHECK(c.agreement(y, SubsetMask::from_variables(3, {3})) == DyadicProb(1, 2));
  CHECK(c.agreement(y, SubsetMask::from_variables(3, {1})) == DyadicProb(3, 2));
  CHECK(c.agreement(y, SubsetMask::from_variables(3, {2})) == DyadicProb(3, 2));
  auto yes = decide_relevant_input(kCircuit, y, 1, q("3/4"));
  CHECK(yes.verdict == Verdict::Yes);
  CHECK(yes.witness->to_string() == "{1}");
  auto no = decide_relevant_input(kCircuit, y, 1, q("4/5"));
  CHECK(no.verdict == Verdict::No);
  CHECK_FALSE(no.witness);
  CHECK(*no.probability == DyadicProb(3, 2));

  auto all = decide_relevant_input(kCircuit, Assignment::from_string("111"), 3, q("1"));
  CHECK(all.verdict == Verdict::Yes);
}

TEST_CASE("search refuses large candidate lists") {
  SearchOptions opts;
  opts.max_subsets = 10;
  CHECK_THROWS_AS(decide_relevant_input(parity(8), Assignment::filled(8, true), 2, q("1"), opts), CapExceeded);
  CHECK(count_subsets(8, 0, 2) == 37);
  CHECK(count_subsets(20, 0, 20) == (1U << 20));
}

TEST_CASE("threaded search returns the sequential witness") {
  std::mt19937_64 rng(31);
  SearchOptions many;
  many.threads = 3;
  for (int i = 0; i < 40; ++i) {
    auto f = oracle::random_formula(rng, 9, 5);
    auto x = oracle::assignment_of(rng(), 9);
    auto a = decide_relevant_input(f, x, 4, q("7/8"));
    auto b = decide_relevant_input(f, x, 4, q("7/8"), many);
    CHECK(a.verdict == b.verdict);
    CHECK(a.witness == b.witness);
    CHECK(a.candidates_checked == b.candidates_checked);
  }
}

TEST_CASE("minimisation examples") {
  auto x = Assignment::from_string("110");
  auto one = solve_min_relevant_input(kCircuit, x, q("1"));
  CHECK(one.k == 1);
  CHECK(one.witness.to_string() == "{3}");
  auto zero = solve_min_relevant_input(kCircuit, x, q("5/8"));
  CHECK(zero.k == 0);
  CHECK(zero.witness.empty());
  CHECK(solve_min_relevant_input(parse("1", 3), x, q("1")).k == 0);
}

TEST_CASE("decide agrees with the naive enumerator on every subset") {
  std::mt19937_64 rng(32);
  const Rational deltas[] = {q("1/4"), q("1/2"), q("3/4"), q("7/8"), q("1")};
  for (int i = 0; i < 60; ++i) {
    std::uint32_t d = 1 + static_cast<std::uint32_t>(rng() % 8);
    auto f = oracle::random_formula(rng, d, 5);
    auto x = oracle::assignment_of(rng(), d);
    for (const auto& delta : deltas) {
      for (std::size_t k = 0; k <= std::min<std::size_t>(d, 3); ++k) {
        std::optional<SubsetMask> first;
        for (const auto& S : oracle::subsets_up_to(d, k)) {
          if (oracle::agreement(f, x, S) >= delta) {
            // lexicographic-by-size minimum among the oracle's hits
            auto key = [](const SubsetMask& m) {
              auto p = m.positions();
              return std::make_pair(p.size(), p);
            };
            if (!first || key(S) < key(*first)) first = S;
          }
        }
        auto r = decide_relevant_input(f, x, k, delta);
        REQUIRE((r.verdict == Verdict::Yes) == first.has_value());
        if (first) {
          CHECK(*r.witness == *first);
          CHECK(oracle::agreement(f, x, *r.witness) >= delta);
        }
      }
    }
  }
}

TEST_CASE("minimal k is nondecreasing in delta") {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 40; ++i) {
    std::uint32_t d = 1 + static_cast<std::uint32_t>(rng() % 10);
    auto f = oracle::random_formula(rng, d, 5);
    auto x = oracle::assignment_of(rng(), d);
    std::size_t prev = 0;
    for (int j = 1; j <= 16; ++j) {
      auto r = solve_min_relevant_input(f, x, Rational(j, 16));
      CHECK(r.k >= prev);
      CHECK(r.witness.size() == r.k);
      CHECK(oracle::agreement(f, x, r.witness) >= Rational(j, 16));
      prev = r.k;
    }
  }
}

TEST_CASE("parity: every proper subset has agreement one half") {
  for (std::uint32_t d = 1; d <= 8; ++d) {
    auto f = parity(d);
    auto x = Assignment::filled(d, true);
    ConditionalCounter c(f);
    for (const auto& S : oracle::subsets_up_to(d, d)) {
      auto p = c.agreement(x, S);
      if (S.size() == d) {
        CHECK(p.is_one());
      } else {
        CHECK(p == DyadicProb::half());
      }
    }
  }
}

TEST_CASE("yes answers of the exact search are yes answers of the gapped oracle") {
  std::mt19937_64 rng(34);
  for (int i = 0; i < 40; ++i) {
    std::uint32_t d = 2 + static_cast<std::uint32_t>(rng() % 6);
    auto f = oracle::random_formula(rng, d, 5);
    auto x = oracle::assignment_of(rng(), d);
    for (std::size_t k = 1; k <= d; ++k) {
      auto r = decide_relevant_input(f, x, k, q("3/4"));
      if (r.verdict != Verdict::Yes) continue;
      for (std::size_t m = k; m <= d; ++m) {
        for (const auto& gamma : {q("0"), q("1/4"), q("1/2")}) {
          CHECK(solve_ip3(f, x, k, m, q("3/4"), gamma).verdict == Verdict::Yes);
        }
      }
    }
  }
}

TEST_CASE("oracle examples for the intermediate problems") {
  auto f = parse("x1 & (x2 | x3)");
  auto e = solve_emajsat(f, 1);
  CHECK(e.yes);
  CHECK(e.prefix->to_string() == "1");
  CHECK(e.probability == DyadicProb(3, 2));
  CHECK_FALSE(solve_emajsat(parse("x1 ^ x2"), 1).yes);

  auto ip1 = solve_ip1(f, Assignment::from_string("100"), 1);
  CHECK(ip1.yes);
  CHECK(ip1.witness->to_string() == "{1}");
  CHECK_FALSE(solve_ip1(f, Assignment::from_string("000"), 1).yes);

  CHECK(solve_ip2(f, Assignment::from_string("100"), 1, q("3/4")).yes);
  CHECK_FALSE(solve_ip2(f, Assignment::from_string("100"), 1, q("4/5")).yes);

  auto p4 = parity(4);
  auto x = Assignment::filled(4, false);
  CHECK(solve_ip3(p4, x, 1, 3, q("9/10"), q("1/5")).verdict == Verdict::No);
  CHECK(solve_ip3(p4, x, 1, 4, q("9/10"), q("1/5")).verdict == Verdict::Indeterminate);
  CHECK(solve_ip3(p4, x, 4, 4, q("9/10"), q("1/5")).verdict == Verdict::Yes);
  CHECK(solve_ip3(p4, x, 1, 3, q("1/2"), q("0")).verdict == Verdict::Yes);
}

TEST_CASE("sample counts follow the formula") {
  CHECK(sample_count(q("1/10")) == 220);
  CHECK(sample_count(q("1/20")) == 879);
  CHECK(sample_count(q("0.2")) == 55);
  CHECK_THROWS_AS(sample_count(q("0")), std::invalid_argument);
}

TEST_CASE("sampler basics") {
  auto one = parse("1", 3);
  auto r = sample_relevance(one, Assignment::filled(3, false), SubsetMask(3), q("0.9"), q("0.1"), 7);
  CHECK(r.samples == 220);
  CHECK(r.agreements == 220);
  CHECK(r.verdict == Verdict::Yes);
  CHECK_THROWS_AS(sample_relevance(one, Assignment::filled(3, false), SubsetMask(3), q("0.9"), q("0"), 7),
                  std::invalid_argument);

  auto x = Assignment::from_string("110");
  auto a = sample_relevance(kCircuit, x, SubsetMask::from_variables(3, {1}), q("3/4"), q("1/10"), 99);
  auto b = sample_relevance(kCircuit, x, SubsetMask::from_variables(3, {1}), q("3/4"), q("1/10"), 99);
  CHECK(a.agreements == b.agreements);

  auto single = amplified_sample_relevance(kCircuit, x, SubsetMask(3), q("3/4"), q("1/10"), 5, 1);
  auto direct = sample_relevance(kCircuit, x, SubsetMask(3), q("3/4"), q("1/10"), 5);
  CHECK(single.verdict == direct.verdict);
  CHECK(single.runs.front().agreements == direct.agreements);
  CHECK_THROWS_AS(amplified_sample_relevance(kCircuit, x, SubsetMask(3), q("3/4"), q("1/10"), 5, 4),
                  std::invalid_argument);
}

TEST_CASE("sampler consumes bits least significant first, free positions ascending") {
  // f = x2 with S = {1}: sample s takes bit (s * 2 + 1) of the stream as x2.
  auto f = parse("x2", 3);
  auto x = Assignment::from_string("011");
  auto r = sample_relevance(f, x, SubsetMask::from_variables(3, {1}), q("1/2"), q("1/10"), 42);
  std::mt19937_64 gen(42);
  std::uint64_t buffer = 0, ones = 0;
  unsigned left = 0;
  for (std::uint64_t s = 0; s < 220; ++s) {
    for (int j = 0; j < 2; ++j) {
      if (left == 0) {
        buffer = gen();
        left = 64;
      }
      if (j == 0) ones += buffer & 1U;
      buffer >>= 1;
      --left;
    }
  }
  CHECK(r.agreements == ones);
}

TEST_CASE("gapped decision examples") {
  auto x = Assignment::from_string("110");
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 12345ULL}) {
    auto r = decide_gapped(kCircuit, x, 1, q("0.95"), q("0.2"), seed);
    CHECK(r.verdict == Verdict::Yes);
    CHECK(r.promise == "yes-instance");
    auto p = decide_gapped(parity(4), Assignment::filled(4, true), 3, q("0.9"), q("0.2"), seed);
    CHECK(p.verdict == Verdict::No);
    CHECK(p.promise == "no-instance");
    auto full = decide_gapped(parity(4), Assignment::filled(4, true), 4, q("0.9"), q("0.2"), seed);
    CHECK(full.verdict == Verdict::Yes);
  }
}

TEST_CASE("greedy examples") {
  auto x = Assignment::from_string("110");
  auto g = greedy_min_relevant(kCircuit, x, q("0.95"), q("0.1"), 3);
  CHECK(g.k == 1);
  CHECK(g.set.to_string() == "{3}");
  CHECK(greedy_min_relevant(parse("1", 3), x, q("0.95"), q("0.1"), 3).k == 0);
  auto conj = parse("x1 & x2 & x3 & x4 & x5 & x6");
  auto all = greedy_min_relevant(conj, Assignment::filled(6, true), q("1"), q("0.01"), 9);
  CHECK(all.k == 6);
  CHECK(all.set == SubsetMask::full(6));
}

TEST_CASE("greedy output passes the exact relaxed check") {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 30; ++i) {
    std::uint32_t d = 1 + static_cast<std::uint32_t>(rng() % 8);
    auto f = oracle::random_formula(rng, d, 5);
    auto x = oracle::assignment_of(rng(), d);
    auto g = greedy_min_relevant(f, x, q("3/4"), q("1/8"), rng());
    CHECK(oracle::agreement(f, x, g.set) >= q("5/8"));
    CHECK(g.k == g.set.size());
  }
}
