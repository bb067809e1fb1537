#include "deltarel/gadgets.hpp"

#include <stdexcept>

namespace deltarel {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::logic_error("gadget construction bound violated: " + what);
}

Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

DyadicProb dyadic(const Rational& r) {
  const auto& den = denominator(r);
  auto e = msb(den);
  if (BigInt(1) << e != den) throw std::logic_error("probability is not dyadic");
  return DyadicProb(numerator(r), e);
}

NodePtr conjunction(std::uint32_t first, std::uint32_t count) {
  std::vector<NodePtr> vars;
  for (std::uint32_t i = 0; i < count; ++i) vars.push_back(build::var(first + i));
  return build::all_of(std::move(vars));
}

Gadget conjunction_gadget(std::uint32_t n) {
  Gadget g;
  g.n = n;
  g.pi = Formula(conjunction(1, n), n);
  g.prob = DyadicProb(1, n);
  g.shape = "conjunction";
  return g;
}

void check_deltas(const Rational& delta1, const Rational& delta2) {
  if (!(0 < delta1 && delta1 < delta2 && delta2 < 1)) {
    throw std::invalid_argument("need 0 < delta1 < delta2 < 1");
  }
}

Rational floor_rational(const Rational& r) { return Rational(numerator(r) / denominator(r)); }

Rational ceil_rational(const Rational& r) {
  Rational f = floor_rational(r);
  return f == r ? f : f + 1;
}

std::uint32_t ell_for(const Rational& a, const Rational& b) {
  // floor(-log2((b - a) / 2)) + 1 = floor(log2(2 / (b - a))) + 1
  return static_cast<std::uint32_t>(floor_log2(Rational(2) / (b - a)) + 1);
}

}  // namespace

Gadget build_pi(const Rational& eta, std::uint32_t ell) {
  if (!(eta > 0 && eta <= 1)) throw std::invalid_argument("eta must lie in (0, 1]");
  if (ell < 1) throw std::invalid_argument("ell must be positive");
  const Rational tol = pow2(-static_cast<std::int64_t>(ell));
  if (eta <= tol) return conjunction_gadget(ell);

  Gadget g;
  g.shape = "iterative";
  std::vector<NodePtr> terms;
  Rational p = 0;
  std::uint32_t n = 0;
  while (abs(eta - p) > tol) {
    std::uint64_t dn = 1;
    while (p + (1 - p) * pow2(-static_cast<std::int64_t>(dn)) > eta) ++dn;
    const Rational next = p + (1 - p) * pow2(-static_cast<std::int64_t>(dn));
    require(abs(eta - next) * 2 <= abs(eta - p), "gap halving");
    // dn < -log2(eta - p) + 1  <=>  2^(dn-1) (eta - p) < 1
    require(pow2(static_cast<std::int64_t>(dn) - 1) * (eta - p) < 1, "step width");
    g.trace.push_back({dn, dyadic(p)});
    terms.push_back(conjunction(n + 1, static_cast<std::uint32_t>(dn)));
    n += static_cast<std::uint32_t>(dn);
    p = next;
  }
  require(2 * static_cast<std::uint64_t>(n) <= static_cast<std::uint64_t>(ell) * (ell + 3), "variable count");
  g.n = n;
  g.pi = Formula(build::any_of(std::move(terms)), n);
  g.prob = dyadic(p);
  return g;
}

GadgetPlan raise_probability_gadget(std::uint32_t d, const Rational& delta1, const Rational& delta2) {
  check_deltas(delta1, delta2);
  const Rational scale = pow2(d);
  const Rational F = floor_rational(delta1 * scale);

  GadgetPlan plan;
  plan.combiner = "or";
  if (delta2 <= (F + 1) / scale) {
    plan.branch = 1;
    const auto n = static_cast<std::uint32_t>(floor_log2(1 / (delta2 - delta1)) + 1);
    plan.gadget = conjunction_gadget(n);
    require(plan.gadget.prob < delta2 - delta1, "conjunction probability below delta2 - delta1");
  } else {
    plan.branch = 2;
    const Rational a = (delta2 * scale - F - 1) / (scale - F - 1);
    const Rational b = (delta2 * scale - F) / (scale - F);
    plan.a = a;
    plan.b = b;
    plan.eta = (a + b) / 2;
    plan.ell = ell_for(a, b);
    plan.gadget = build_pi(*plan.eta, *plan.ell);
    require(plan.gadget.prob >= a && plan.gadget.prob < b, "a <= P(pi) < b");
  }
  // The two boundary cases of P(phi) that decide the equivalence.
  const Rational p = plan.gadget.prob.to_rational();
  require(F / scale + (1 - F / scale) * p < delta2, "upper boundary");
  require((F + 1) / scale + (1 - (F + 1) / scale) * p >= delta2, "lower boundary");
  return plan;
}

GadgetPlan lower_probability_gadget(std::uint32_t d, const Rational& delta1, const Rational& delta2) {
  check_deltas(delta1, delta2);
  const Rational scale = pow2(d);
  const Rational C = ceil_rational(delta2 * scale);

  GadgetPlan plan;
  plan.combiner = "and";
  if ((C - 1) / scale <= delta1) {
    plan.branch = 1;
    plan.gadget.pi = Formula(build::constant(true), 0);
    plan.gadget.prob = DyadicProb::one();
    plan.gadget.trivial = true;
    plan.gadget.shape = "constant";
  } else {
    plan.branch = 2;
    const Rational a = delta1 * scale / C;
    const Rational b = delta1 * scale / (C - 1);
    plan.a = a;
    plan.b = b;
    plan.eta = (a + b) / 2;
    plan.ell = ell_for(a, b);
    plan.gadget = build_pi(*plan.eta, *plan.ell);
    require(plan.gadget.prob > a && plan.gadget.prob <= b, "a < P(pi) <= b");
  }
  const Rational p = plan.gadget.prob.to_rational();
  require(C / scale * p > delta1, "upper boundary");
  require((C - 1) / scale * p <= delta1, "lower boundary");
  return plan;
}

Formula attach(const Formula& phi, const GadgetPlan& plan) {
  const auto d = phi.arity();
  auto pi = shift_variables(plan.gadget.pi.root(), d);
  auto root = plan.combiner == "or" ? build::any_of({phi.root(), pi}) : build::all_of({phi.root(), pi});
  return Formula(root, d + plan.gadget.n);
}

}  // namespace deltarel
