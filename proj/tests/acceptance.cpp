// Acceptance suite: one PASS/FAIL line per criterion. `--only N` runs one.

#include "deltarel/cli.hpp"
#include "deltarel/counting.hpp"
#include "deltarel/gadgets.hpp"
#include "deltarel/reductions.hpp"
#include "deltarel/relevance.hpp"
#include "deltarel/relu.hpp"
#include "deltarel/shapley.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>

using namespace deltarel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Rational q(const char* s) { return parse_rational(s); }

std::vector<bool> table_of(const Formula& f) {
  std::vector<bool> t(std::size_t{1} << f.arity());
  for (std::uint64_t j = 0; j < t.size(); ++j) t[j] = oracle::eval(f, j);
  return t;
}

Rational naive_agreement(const std::vector<bool>& t, std::uint64_t x, std::uint64_t s) {
  const bool target = t[x];
  std::uint64_t hits = 0, all = 0;
  for (std::uint64_t y = 0; y < t.size(); ++y) {
    if ((y & s) != (x & s)) continue;
    ++all;
    hits += t[y] == target;
  }
  return Rational(hits) / Rational(all);
}

SubsetMask mask_of(std::uint64_t s, std::size_t d) {
  SubsetMask m(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (s >> i & 1U) m.insert(i);
  }
  return m;
}

std::vector<std::uint64_t> masks_up_to(std::size_t d, int k) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << d); ++s) {
    if (__builtin_popcountll(s) <= k) out.push_back(s);
  }
  return out;
}

// 1 ------------------------------------------------------------------------
Outcome oracle_suite() {
  std::mt19937_64 rng(101);
  std::uint64_t checks = 0, bad = 0;
  const Rational deltas[] = {q("1/4"), q("1/2"), q("3/4"), q("1")};
  for (int i = 0; i < 500; ++i) {
    const std::uint32_t d = 1 + rng() % 10;
    auto f = oracle::random_formula(rng, d, 5);
    const auto t = table_of(f);
    const std::uint64_t xb = rng() & ((std::uint64_t{1} << d) - 1);
    const auto x = oracle::assignment_of(xb, d);
    ConditionalCounter counter(f);
    for (auto s : masks_up_to(d, 3)) {
      const auto S = mask_of(s, d);
      const Rational naive = naive_agreement(t, xb, s);
      const Rational random_delta(1 + rng() % 64, 64);
      for (const auto& delta : {deltas[0], deltas[1], deltas[2], deltas[3], random_delta}) {
        auto r = is_delta_relevant(f, x, S, delta);
        ++checks;
        if (r.probability.to_rational() != naive || r.relevant != (naive >= delta)) ++bad;
      }
      if (counter.agreement(x, S).to_rational() != naive) ++bad;
    }
  }
  return {bad == 0, std::to_string(checks) + " (formula, x, S, delta) checks, " + std::to_string(bad) + " mismatches"};
}

// 2 ------------------------------------------------------------------------
Outcome gadget_pi() {
  std::mt19937_64 rng(202);
  int bad = 0, brute = 0;
  for (int i = 0; i < 200; ++i) {
    const std::uint32_t ell = 1 + rng() % 12;
    const Rational eta(1 + rng() % 99999, 100000);
    auto g = build_pi(eta, ell);
    bool ok = true;
    Rational err = g.prob.to_rational() - eta;
    if (err < 0) err = -err;
    ok &= err <= pow2(-static_cast<std::int64_t>(ell));
    ok &= 2 * static_cast<std::uint64_t>(g.n) <= static_cast<std::uint64_t>(ell) * (ell + 3);
    for (std::size_t s = 0; s < g.trace.size(); ++s) {
      const Rational p = g.trace[s].p.to_rational();
      const Rational next = s + 1 < g.trace.size() ? g.trace[s + 1].p.to_rational() : g.prob.to_rational();
      Rational a = eta - next, b = eta - p;
      if (a < 0) a = -a;
      if (b < 0) b = -b;
      ok &= 2 * a <= b;
      ok &= pow2(static_cast<std::int64_t>(g.trace[s].delta_n) - 1) * (eta - p) < 1;
      ok &= next == p + (1 - p) * pow2(-static_cast<std::int64_t>(g.trace[s].delta_n));
    }
    if (g.n <= 26) {
      ++brute;
      Rational exact;
      if (g.n <= 18) {
        exact = oracle::probability(g.pi);
      } else {
        TruthTableOptions tt;
        auto table = truth_table(g.pi, tt);
        exact = Rational(table.count()) / Rational(pow2(g.n));
      }
      ok &= exact == g.prob.to_rational();
    }
    bad += !ok;
  }
  return {bad == 0, "200 gadgets, " + std::to_string(brute) + " brute-forced, " + std::to_string(bad) + " failures"};
}

// 3 ------------------------------------------------------------------------
std::vector<Formula> threshold_formulas(std::mt19937_64& rng) {
  std::vector<Formula> out;
  for (int i = 0; i < 500; ++i) {
    const std::uint32_t d = 3 + i % 6;
    if (i % 2 == 0) {
      std::uint64_t table = 0;
      for (std::uint64_t j = 0; j < (std::uint64_t{1} << d); ++j) table |= (rng() & 1U ? std::uint64_t{1} : 0) << j;
      if (d <= 6) {
        out.push_back(oracle::from_table(table, d));
        continue;
      }
    }
    out.push_back(oracle::random_formula(rng, d, 5));
  }
  return out;
}

Outcome gadget_equivalences() {
  std::mt19937_64 rng(303);
  auto pool = threshold_formulas(rng);
  std::uint64_t checks = 0, bad = 0;
  auto run = [&](const Formula& phi, const std::pair<const char*, const char*>& pair, bool raise) {
    const Rational d1 = q(pair.first), d2 = q(pair.second);
    auto plan = raise ? raise_probability_gadget(phi.arity(), d1, d2) : lower_probability_gadget(phi.arity(), d1, d2);
    const Rational p = oracle::probability(phi);
    const DyadicProb combined = satisfaction_probability(attach(phi, plan));
    const bool lhs = raise ? p > d1 : p >= d2;
    const bool rhs = raise ? combined >= d2 : combined > d1;
    ++checks;
    bad += lhs != rhs;
  };
  const std::pair<const char*, const char*> up[] = {{"1/4", "1/2"}, {"1/2", "3/4"}, {"1/2", "9/10"}};
  const std::pair<const char*, const char*> down[] = {{"1/4", "3/4"}, {"1/2", "3/4"}};
  for (std::uint64_t t = 0; t < 16; ++t) {
    auto phi = oracle::from_table(t, 2);
    for (const auto& p : up) run(phi, p, true);
    for (const auto& p : down) run(phi, p, false);
  }
  for (const auto& phi : pool) {
    for (const auto& p : up) run(phi, p, true);
    for (const auto& p : down) run(phi, p, false);
  }
  return {bad == 0, std::to_string(checks) + " biconditionals (raise and lower), " + std::to_string(bad) + " failures"};
}

// 4 ------------------------------------------------------------------------
struct ChainStats {
  int instances = 0;
  int bad = 0;
  int yes = 0;
};

void chain(const Formula& phi, std::size_t k, ChainStats& st, const SearchOptions& search) {
  const Rational half(1, 2);
  ProblemInstance e;
  e.kind = ProblemKind::EMajSat;
  e.f = phi;
  e.k = k;
  const bool truth = oracle::emajsat(phi, k);
  auto ip1 = reduce_emajsat_to_ip1(e);
  const bool v1 = oracle::prefix_problem(ip1.f, *ip1.x, ip1.k, half, true);
  auto ip2 = reduce_ip1_to_ip2(ip1, half);
  const bool v2 = solve_ip2(ip2.f, *ip2.x, ip2.k, half, search.count).yes;
  auto ri = reduce_ip2_to_relevant_input(ip2);
  const bool v3 = decide_relevant_input(ri.f, *ri.x, ri.k, half, search).verdict == Verdict::Yes;
  ++st.instances;
  st.yes += truth;
  st.bad += !(truth == v1 && v1 == v2 && v2 == v3);
}

Outcome reduction_chain() {
  SearchOptions search;
  search.max_subsets = std::uint64_t{1} << 23;
  ChainStats exhaustive, sampled;
  for (std::uint64_t t = 0; t < 16; ++t) {
    for (std::size_t k : {1, 2}) chain(oracle::from_table(t, 2), k, exhaustive, search);
  }
  std::mt19937_64 rng(404);
  for (int i = 0; i < 100; ++i) {
    Formula phi = i % 2 ? oracle::random_formula(rng, 3, 4) : oracle::from_table(rng() & 0xFF, 3);
    chain(phi, 1, sampled, search);
  }

  int sat_yes = 0, sat_no = 0, ip3_bad = 0, gap = 0;
  const Rational delta = q("1/2"), gamma = q("1/4");
  std::mt19937_64 rng3(405);
  for (int tries = 0; (sat_yes < 50 || sat_no < 50) && tries < 200000; ++tries) {
    const std::uint32_t d = 1 + rng3() % 3;
    Formula phi = tries % 3 == 0 ? oracle::random_formula(rng3, d, 4)
                                 : Formula(build::all_of({oracle::random_node(rng3, d, 3), oracle::random_node(rng3, d, 3)}), d);
    const bool s = oracle::sat(phi);
    if ((s && sat_yes >= 50) || (!s && sat_no >= 50)) continue;
    (s ? sat_yes : sat_no)++;
    auto red = reduce_sat_to_ip3(phi, delta, gamma);
    auto res = solve_ip3(red.f, *red.x, red.k, *red.m, delta, gamma, search);
    gap += res.verdict == Verdict::Indeterminate;
    ip3_bad += res.verdict != (s ? Verdict::Yes : Verdict::No);
  }
  std::ostringstream os;
  os << "d=2 exhaustive " << exhaustive.instances - exhaustive.bad << "/" << exhaustive.instances << " (" << exhaustive.yes
     << " yes); d=3 sampled " << sampled.instances - sampled.bad << "/" << sampled.instances << " (" << sampled.yes
     << " yes); SAT->IP3 " << (sat_yes + sat_no - ip3_bad) << "/" << (sat_yes + sat_no) << " (" << sat_yes << " sat, "
     << sat_no << " unsat, " << gap << " in gap)";
  const bool ok = exhaustive.bad == 0 && sampled.bad == 0 && ip3_bad == 0 && sat_yes == 50 && sat_no == 50;
  return {ok, os.str()};
}

// 5 ------------------------------------------------------------------------
struct Planted {
  Formula f;
  Assignment x;
  SubsetMask S;
  Rational delta;
  bool expected;
};

std::vector<Planted> planted_instances(std::mt19937_64& rng, const Rational& gamma) {
  std::vector<Planted> out;
  const Rational margin = q("0.05");
  while (out.size() < 200) {
    const std::uint32_t d = 4 + rng() % 7;
    auto f = oracle::random_formula(rng, d, 5);
    const std::uint64_t xb = rng() & ((std::uint64_t{1} << d) - 1);
    auto S = mask_of(rng() & ((std::uint64_t{1} << d) - 1) & (rng() | rng()), d);
    const Rational p = oracle::conditional(f, xb, oracle::mask_bits(S), oracle::eval(f, xb));
    const bool want_yes = out.size() % 2 == 0;
    // delta on a 1/100 grid, at least 0.05 beyond the promise band
    Rational delta;
    if (want_yes) {
      const Rational hi_r = (p - margin) * 100;
      const BigInt hi = numerator(hi_r) / denominator(hi_r);
      if (hi < 15) continue;
      delta = Rational(hi - static_cast<long>(rng() % 5), 100);
      if (delta <= gamma) continue;
    } else {
      const Rational lo_r = (p + gamma + margin) * 100;
      BigInt lo = numerator(lo_r) / denominator(lo_r);
      if (Rational(lo) < lo_r) lo += 1;
      delta = Rational(lo + static_cast<long>(rng() % 5), 100);
      if (delta > 1) continue;
    }
    out.push_back({f, oracle::assignment_of(xb, d), S, delta, want_yes});
  }
  return out;
}

Outcome sampler() {
  std::mt19937_64 rng(505);
  const Rational gamma = q("0.1");
  auto inst = planted_instances(rng, gamma);
  const double z = 2.5758293035489;  // two-sided 99%
  const double limit = 1.0 / 3 + z * std::sqrt((1.0 / 3) * (2.0 / 3) / 1000);
  double worst_single = 0, worst_amp = 0;
  std::uint64_t single_errors = 0, amp_errors = 0;
  int bad = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto& P = inst[i];
    const bool exact = is_delta_relevant(P.f, P.x, P.S, P.delta).relevant;
    if (exact != P.expected) ++bad;
    std::uint64_t e1 = 0, e15 = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
      const std::uint64_t seed = derive_seed(0x5eed0000 + i, s + 1);
      if (sample_relevance(P.f, P.x, P.S, P.delta, gamma, seed).samples != 220) ++bad;
      e1 += (sample_relevance(P.f, P.x, P.S, P.delta, gamma, seed).verdict == Verdict::Yes) != exact;
      e15 += (amplified_sample_relevance(P.f, P.x, P.S, P.delta, gamma, seed, 15).verdict == Verdict::Yes) != exact;
    }
    single_errors += e1;
    amp_errors += e15;
    worst_single = std::max(worst_single, e1 / 1000.0);
    worst_amp = std::max(worst_amp, e15 / 1000.0);
    if (e1 / 1000.0 > limit || e15 / 1000.0 > 0.05) ++bad;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "200 planted instances x 1000 seeds; single-run error mean %.4f worst %.3f (limit %.4f); "
                "15-round error mean %.5f worst %.3f (limit 0.05)",
                single_errors / 200000.0, worst_single, limit, amp_errors / 200000.0, worst_amp);
  return {bad == 0, buf};
}

// 6 ------------------------------------------------------------------------
Outcome shapley_identity() {
  std::mt19937_64 rng(606);
  std::uint64_t checks = 0, bad = 0, eff = 0;
  for (int i = 0; i < 200; ++i) {
    const std::uint32_t d = 1 + rng() % 8;
    auto f = oracle::random_formula(rng, d, 5);
    auto x = oracle::assignment_of(rng() & ((std::uint64_t{1} << d) - 1), d);
    for (auto s : masks_up_to(d, 3)) {
      const auto S = mask_of(s, d);
      for (const char* delta : {"1/4", "1/2", "3/4", "1"}) {
        ++checks;
        bad += relevance_from_characteristic(f, x, S, q(delta)) != is_delta_relevant(f, x, S, q(delta)).relevant;
      }
    }
    auto v = shapley_values(f, x);
    Rational sum = 0;
    for (const auto& p : v.phi) sum += p;
    eff += !(v.efficiency && sum == v.nu_full &&
             v.nu_full == characteristic_value(f, x, SubsetMask::full(d)).value);
  }
  return {bad == 0 && eff == 0, std::to_string(checks) + " identity checks, " + std::to_string(bad) +
                                    " mismatches; efficiency failures " + std::to_string(eff) + "/200"};
}

// 7 ------------------------------------------------------------------------
Outcome inapprox() {
  int sweep = 0, bad = 0;
  for (std::uint64_t d = 1; d <= 6; ++d) {
    for (const char* delta : {"1/2", "3/4"}) {
      for (int g = 0; g < 2; ++g) {
        const Rational gamma = g == 0 ? Rational(0) : q(delta) / 2;
        for (const char* alpha : {"1/4", "1/2", "3/4"}) {
          ++sweep;
          bad += !inapprox_parameters(d, q(delta), gamma, q(alpha)).check;
        }
      }
    }
  }
  auto w = inapprox_parameters(3, q("1/2"), q("1/4"), q("1/2"));
  const bool worked = w.k_prime == 9 && w.p == 3 && w.m_prime == 325 && w.d_prime == 337 && w.check;
  return {bad == 0 && worked, "sweep " + std::to_string(sweep - bad) + "/" + std::to_string(sweep) +
                                  " checks true; worked example k'=" + w.k_prime.str() + " p=" + std::to_string(w.p) +
                                  " m'=" + w.m_prime.str() + " d'=" + w.d_prime.str()};
}

// 8 ------------------------------------------------------------------------
Outcome relu() {
  std::mt19937_64 rng(808);
  std::uint64_t inputs = 0, bad = 0;
  for (int i = 0; i < 500; ++i) {
    const std::uint32_t d = 1 + rng() % 10;
    auto f = oracle::random_formula(rng, d, 6);
    auto net = compile_to_relu(f);
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << d); ++j) {
      ++inputs;
      bad += net.evaluate(oracle::assignment_of(j, d)) != oracle::eval(f, j);
    }
  }
  return {bad == 0, "500 networks, " + std::to_string(inputs) + " inputs, " + std::to_string(bad) + " disagreements"};
}

// 9 ------------------------------------------------------------------------
Outcome determinism() {
  std::mt19937_64 rng(909);
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const std::uint32_t d = 2 + rng() % 6;
    auto f = oracle::random_formula(rng, d, 4);
    std::string x;
    for (std::uint32_t j = 0; j < d; ++j) x += rng() & 1U ? '1' : '0';
    const std::string seed = std::to_string(rng());
    const std::string text = render(f);
    std::vector<std::string> args;
    switch (i % 3) {
      case 0:
        args = {"sample", "--formula", text, "--arity", std::to_string(d), "--x", x, "--S", "1",
                "--delta", "3/4", "--gamma", "1/10", "--seed", seed, "--rounds", "3"};
        break;
      case 1:
        args = {"decide-gapped", "--formula", text, "--arity", std::to_string(d), "--x", x, "--k", "2",
                "--delta", "0.8", "--gamma", "0.2", "--seed", seed};
        break;
      default:
        args = {"greedy", "--formula", text, "--arity", std::to_string(d), "--x", x, "--delta", "0.9", "--gamma",
                "0.2", "--seed", seed};
    }
    auto a = cli::run(args);
    auto b = cli::run(args);
    bad += a.report != b.report || a.exit_code != b.exit_code || a.exit_code >= 64;
  }
  return {bad == 0, "100 sampling commands re-run, " + std::to_string(bad) + " differing or failed reports"};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0) only = std::atoi(argv[i + 1]);
  }
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"relevance oracle suite", oracle_suite},
      {"gadget Pi bounds", gadget_pi},
      {"raising and lowering biconditionals", gadget_equivalences},
      {"reduction chain", reduction_chain},
      {"Monte-Carlo sampler error rates", sampler},
      {"Shapley identity and efficiency", shapley_identity},
      {"inapproximability arithmetic", inapprox},
      {"ReLU compilation", relu},
      {"sampling determinism", determinism},
  };
  int failed = 0;
  for (int c = 1; c <= 9; ++c) {
    if (only && c != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c, criteria[c - 1].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
