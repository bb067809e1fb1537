#include "deltarel/reductions.hpp"

#include "deltarel/counting.hpp"
#include "deltarel/errors.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace deltarel {

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::Sat:
      return "Sat";
    case ProblemKind::EMajSat:
      return "EMajSat";
    case ProblemKind::IP1:
      return "IP1";
    case ProblemKind::IP2:
      return "IP2";
    case ProblemKind::IP3:
      return "IP3";
    case ProblemKind::RelevantInput:
      return "RelevantInput";
  }
  return "?";
}

ProblemKind parse_problem_kind(std::string_view text) {
  std::string lower;
  for (char c : text) {
    if (c != '-' && c != '_') lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  for (auto k : {ProblemKind::Sat, ProblemKind::EMajSat, ProblemKind::IP1, ProblemKind::IP2, ProblemKind::IP3,
                 ProblemKind::RelevantInput}) {
    std::string name;
    for (char c : to_string(k)) name += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (name == lower) return k;
  }
  throw std::invalid_argument("unknown problem kind '" + std::string(text) + "'");
}

void ProblemInstance::validate() const {
  const auto d = f.arity();
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument(to_string(kind) + " instance: " + what);
  };
  const bool needs_x = kind != ProblemKind::Sat && kind != ProblemKind::EMajSat;
  if (needs_x && !x) fail("x is required");
  if (x && x->size() != d) {
    throw ArityMismatch("x has length " + std::to_string(x->size()) + " but the formula has arity " +
                        std::to_string(d));
  }
  if (kind != ProblemKind::Sat) {
    if (k > d) fail("k exceeds the arity");
    if (kind != ProblemKind::RelevantInput && k < 1) fail("k must be at least 1");
  }
  if (kind == ProblemKind::IP2 || kind == ProblemKind::IP3 || kind == ProblemKind::RelevantInput) {
    if (!delta) fail("delta is required");
    if (*delta <= 0 || *delta > 1) fail("delta must lie in (0, 1]");
  }
  if (kind == ProblemKind::IP3) {
    if (!m) fail("m is required");
    if (*m < k || *m > d) fail("need k <= m <= d");
    if (!gamma) fail("gamma is required");
    if (*gamma < 0 || *gamma >= *delta) fail("gamma must lie in [0, delta)");
  }
  if (!layout.empty()) {
    std::uint32_t next = 1;
    for (const auto& b : layout) {
      if (b.first != next) fail("layout block '" + b.name + "' does not start at x" + std::to_string(next));
      next += b.count;
    }
    if (next != d + 1) fail("layout covers " + std::to_string(next - 1) + " of " + std::to_string(d) + " variables");
  }
}

namespace {

void require_kind(const ProblemInstance& inst, ProblemKind kind) {
  if (inst.kind != kind) {
    throw std::invalid_argument("expected a " + to_string(kind) + " instance, got " + to_string(inst.kind));
  }
  inst.validate();
}

void require_point(const ProblemInstance& out) {
  if (!evaluate(out.f, *out.x)) throw std::logic_error("constructed point does not satisfy the reduced formula");
}

void check_half_open(const Rational& delta) {
  if (delta < Rational(1, 2) || delta >= 1) throw std::invalid_argument("delta must lie in [1/2, 1)");
}

std::vector<NodePtr> identity_map(std::uint32_t d) {
  std::vector<NodePtr> out;
  for (std::uint32_t i = 1; i <= d; ++i) out.push_back(build::var(i));
  return out;
}

}  // namespace

ProblemInstance reduce_emajsat_to_ip1(const ProblemInstance& source) {
  require_kind(source, ProblemKind::EMajSat);
  const auto d = source.f.arity();
  const auto k = static_cast<std::uint32_t>(source.k);

  // u = 1..k, v = k+1..2k, r = 2k+1..d+k, t = d+k+1
  auto rename = identity_map(d);
  for (std::uint32_t i = k + 1; i <= d; ++i) rename[i - 1] = build::var(i + k);
  auto phi = substitute(source.f.root(), rename);

  std::vector<NodePtr> differ;
  for (std::uint32_t i = 1; i <= k; ++i) differ.push_back(build::exclusive(build::var(i), build::var(k + i)));
  const std::uint32_t t = d + k + 1;
  auto psi = build::all_of({build::any_of(differ), build::var(t)});

  ProblemInstance out;
  out.kind = ProblemKind::IP1;
  out.f = Formula(build::exclusive(phi, psi), d + k + 1);
  Assignment x(d + k + 1);
  for (std::uint32_t i = 0; i < k; ++i) x.set(k + i, true);
  out.x = x;
  out.k = 2 * source.k;
  out.layout = {{"u", 1, k}, {"v", k + 1, k}, {"r", 2 * k + 1, d - k}, {"t", t, 1}};
  out.validate();
  return out;
}

ProblemInstance reduce_ip1_to_ip2(const ProblemInstance& source, const Rational& delta) {
  require_kind(source, ProblemKind::IP1);
  check_half_open(delta);
  const auto d = source.f.arity();
  // The gadget must work for Phi(y) and t, a function of d + 1 variables.
  auto plan = raise_probability_gadget(d + 1, Rational(1, 4), delta);
  const auto n = plan.gadget.n;

  ProblemInstance out;
  out.kind = ProblemKind::IP2;
  auto pi = shift_variables(plan.gadget.pi.root(), d + 1);
  out.f = Formula(build::any_of({build::all_of({source.f.root(), build::var(d + 1)}), pi}), d + 1 + n);
  Assignment x(d + 1 + n);
  for (std::uint32_t i = 0; i < d; ++i) x.set(i, (*source.x)[i]);
  for (std::uint32_t i = d; i < d + 1 + n; ++i) x.set(i, true);
  out.x = x;
  out.k = source.k;
  out.delta = delta;
  out.layout = {{"y", 1, d}, {"t", d + 1, 1}, {"gadget", d + 2, n}};
  out.validate();
  require_point(out);
  return out;
}

ProblemInstance reduce_ip2_to_relevant_input(const ProblemInstance& source) {
  require_kind(source, ProblemKind::IP2);
  const Rational delta = *source.delta;
  check_half_open(delta);
  const auto d = source.f.arity();
  const auto k = static_cast<std::uint32_t>(source.k);
  const auto rest = d - k;
  const Assignment& x = *source.x;

  // u = 1..k, v = k+1..2k, r1, r2, r3 follow with rest variables each.
  const std::uint32_t r1 = 2 * k + 1, r2 = r1 + rest, r3 = r2 + rest;
  auto rename = identity_map(d);
  for (std::uint32_t j = 0; j < rest; ++j) {
    rename[k + j] = build::exclusive(build::exclusive(build::var(r1 + j), build::var(r2 + j)), build::var(r3 + j));
  }
  const bool phi_x = evaluate(source.f, x);
  auto core = build::exclusive(substitute(source.f.root(), rename), build::constant(!phi_x));

  std::vector<NodePtr> terms{core};
  for (std::uint32_t i = 1; i <= k; ++i) {
    auto pinned = build::exclusive(build::var(i), build::constant(!x[i - 1]));
    terms.push_back(build::any_of({pinned, build::var(k + i)}));
  }

  ProblemInstance out;
  out.kind = ProblemKind::RelevantInput;
  const std::uint32_t arity = 2 * k + 3 * rest;
  out.f = Formula(build::all_of(terms), arity);
  Assignment xp(arity);
  for (std::uint32_t i = 0; i < k; ++i) {
    xp.set(i, x[i]);
    xp.set(k + i, true);
  }
  for (std::uint32_t j = 0; j < rest; ++j) {
    for (std::uint32_t b = 0; b < 3; ++b) xp.set(2 * k + b * rest + j, x[k + j]);
  }
  out.x = xp;
  out.k = source.k;
  out.delta = delta;
  out.layout = {{"u", 1, k}, {"v", k + 1, k}, {"r1", r1, rest}, {"r2", r2, rest}, {"r3", r3, rest}};
  out.validate();
  require_point(out);
  return out;
}

ProblemInstance reduce_sat_to_ip3(const Formula& phi, const Rational& delta, const Rational& gamma,
                                  std::optional<std::size_t> m_override) {
  if (!(0 < delta && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (gamma < 0 || gamma >= delta) throw std::invalid_argument("gamma must lie in [0, delta)");
  const auto d = phi.arity();
  if (d < 1) throw std::invalid_argument("the formula needs at least one variable");

  const auto q = static_cast<std::uint32_t>(ceil_log2(Rational(d) / (1 - delta)));
  const auto p = static_cast<std::uint32_t>(floor_log2(1 / (delta - gamma)) + 1);
  const std::uint32_t k = d * q;
  const std::size_t m = m_override.value_or(k);
  if (m < k) throw std::invalid_argument("m' must be at least k' = " + std::to_string(k));
  const auto vcount = static_cast<std::uint32_t>(m + p);

  std::vector<NodePtr> rename;
  for (std::uint32_t i = 1; i <= d; ++i) {
    std::vector<NodePtr> copies;
    for (std::uint32_t j = 0; j < q; ++j) copies.push_back(build::var(j * d + i));
    rename.push_back(build::all_of(copies));
  }
  std::vector<NodePtr> vs;
  for (std::uint32_t i = 1; i <= vcount; ++i) vs.push_back(build::var(k + i));

  ProblemInstance out;
  out.kind = ProblemKind::IP3;
  const std::uint32_t arity = k + vcount;
  out.f = Formula(build::any_of({substitute(phi.root(), rename), build::all_of(vs)}), arity);
  out.x = Assignment::filled(arity, true);
  out.k = k;
  out.m = m;
  out.delta = delta;
  out.gamma = gamma;
  for (std::uint32_t j = 0; j < q; ++j) out.layout.push_back({"u" + std::to_string(j + 1), j * d + 1, d});
  out.layout.push_back({"v", k + 1, vcount});
  out.validate();
  require_point(out);
  return out;
}

// ---------------------------------------------------------------------------
// Inapproximability arithmetic

namespace {

/// floor(N^(1/n)) for N >= 0.
BigInt integer_root(const BigInt& N, unsigned n) {
  if (N < 2 || n == 1) return N;
  BigInt x = BigInt(1) << (msb(N) / n + 1);  // above the root
  while (true) {
    BigInt y = ((n - 1) * x + N / pow(x, n - 1)) / n;
    if (y >= x) break;
    x = y;
  }
  while (pow(x, n) > N) --x;
  while (pow(x + 1, n) <= N) ++x;
  return x;
}

struct Bracket {
  Rational lo, hi;
};

/// z^(a/b) for integer z >= 0 and a/b > 0, bracketed to within 2^-bits.
Bracket power(const BigInt& z, const Rational& e, unsigned bits = 64) {
  const auto a = static_cast<unsigned>(numerator(e));
  const auto b = static_cast<unsigned>(denominator(e));
  const BigInt N = pow(z, a) << (bits * b);
  const BigInt r = integer_root(N, b);
  const Rational scale = pow2(bits);
  if (pow(r, b) == N) return {r / scale, r / scale};
  return {r / scale, (r + 1) / scale};
}

BigInt ceil_of(const Rational& r) {
  BigInt f = numerator(r) / denominator(r);
  return Rational(f) == r ? f : f + 1;
}

}  // namespace

InapproxParameters inapprox_parameters(std::uint64_t d, const Rational& delta, const Rational& gamma,
                                       const Rational& alpha) {
  if (!(0 < alpha && alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(0 < delta && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (gamma < 0 || gamma >= delta) throw std::invalid_argument("gamma must lie in [0, delta)");
  if (d < 1) throw std::invalid_argument("d must be positive");
  if (numerator(alpha) > 64 || denominator(alpha) > 64) {
    throw std::invalid_argument("alpha needs numerator and denominator at most 64");
  }

  InapproxParameters out;
  out.q = ceil_log2(Rational(d) / (1 - delta));
  out.p = floor_log2(1 / (delta - gamma)) + 1;
  out.k_prime = BigInt(d) * out.q;
  const BigInt& k = out.k_prime;
  const Rational beta = 1 - alpha;

  // The ceiling is exact once both bracket ends round up to the same integer.
  for (unsigned bits = 64;; bits *= 2) {
    auto kb = power(k, beta, bits);
    auto pb = power(BigInt(out.p), beta, bits);
    auto inv = power(2 * k, 1 / alpha, bits);
    const Rational first_lo = 2 * k * (kb.lo + pb.lo), first_hi = 2 * k * (kb.hi + pb.hi);
    const Rational second_lo = inv.lo + 1, second_hi = inv.hi + 1;
    const BigInt lo = ceil_of(std::max(first_lo, second_lo));
    const BigInt hi = ceil_of(std::max(first_hi, second_hi));
    if (lo == hi || bits >= 4096) {
      out.m_prime = hi;
      out.first_term_upper = first_hi;
      out.second_term_upper = second_hi;
      break;
    }
  }
  out.d_prime = out.k_prime + out.m_prime + out.p;
  out.lhs_upper = Rational(out.k_prime) * power(out.d_prime, beta).hi;
  out.check = out.lhs_upper < Rational(out.m_prime);
  return out;
}

// ---------------------------------------------------------------------------
// Verification

namespace {

struct Answer {
  std::string verdict;
  std::optional<bool> yes;  // empty inside a promise gap
  std::vector<std::string> notes;
};

Answer solve(const ProblemInstance& inst, const SearchOptions& options) {
  Answer a;
  auto yn = [&](bool yes) {
    a.yes = yes;
    a.verdict = yes ? "Yes" : "No";
  };
  switch (inst.kind) {
    case ProblemKind::Sat:
      yn(!satisfaction_probability(inst.f, options.count).is_zero());
      break;
    case ProblemKind::EMajSat:
      yn(solve_emajsat(inst.f, inst.k, options.count).yes);
      break;
    case ProblemKind::IP1:
      yn(solve_ip1(inst.f, *inst.x, inst.k, options.count).yes);
      break;
    case ProblemKind::IP2:
      if (!evaluate(inst.f, *inst.x)) {
        a.notes.push_back("IP2 source has Phi(x) = 0: threshold applied to satisfaction, not agreement");
      }
      yn(solve_ip2(inst.f, *inst.x, inst.k, *inst.delta, options.count).yes);
      break;
    case ProblemKind::RelevantInput:
      yn(decide_relevant_input(inst.f, *inst.x, inst.k, *inst.delta, options).verdict == Verdict::Yes);
      break;
    case ProblemKind::IP3: {
      auto r = solve_ip3(inst.f, *inst.x, inst.k, *inst.m, *inst.delta, inst.gamma.value_or(0), options);
      a.verdict = to_string(r.verdict);
      if (r.verdict != Verdict::Indeterminate) a.yes = r.verdict == Verdict::Yes;
      break;
    }
  }
  return a;
}

bool valid_pair(ProblemKind s, ProblemKind r) {
  return (s == ProblemKind::EMajSat && r == ProblemKind::IP1) || (s == ProblemKind::IP1 && r == ProblemKind::IP2) ||
         (s == ProblemKind::IP2 && r == ProblemKind::RelevantInput) || (s == ProblemKind::Sat && r == ProblemKind::IP3);
}

}  // namespace

VerificationReport verify_reduction(const ProblemInstance& source, const ProblemInstance& reduced,
                                    const SearchOptions& options) {
  if (!valid_pair(source.kind, reduced.kind)) {
    throw std::invalid_argument("no reduction maps " + to_string(source.kind) + " to " + to_string(reduced.kind));
  }
  source.validate();
  reduced.validate();

  VerificationReport report;
  report.source_kind = source.kind;
  report.reduced_kind = reduced.kind;
  auto s = solve(source, options);
  report.source_verdict = s.verdict;
  report.notes = s.notes;
  if (!s.yes) {
    report.skipped = true;
    report.reduced_verdict = "skipped";
    report.notes.push_back("source lies in the promise gap");
    return report;
  }
  auto r = solve(reduced, options);
  report.reduced_verdict = r.verdict;
  report.notes.insert(report.notes.end(), r.notes.begin(), r.notes.end());
  if (!r.yes) {
    report.notes.push_back("reduced instance lies in the promise gap");
    report.pass = false;
    return report;
  }
  report.pass = *s.yes == *r.yes;
  return report;
}

}  // namespace deltarel
