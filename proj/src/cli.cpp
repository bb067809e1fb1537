#include "deltarel/cli.hpp"

#include "deltarel/counting.hpp"
#include "deltarel/errors.hpp"
#include "deltarel/gadgets.hpp"
#include "deltarel/relevance.hpp"
#include "deltarel/relu.hpp"
#include "deltarel/shapley.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace deltarel::cli {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// JSON helpers

json subset_json(const SubsetMask& S) {
  json out = json::array();
  for (auto p : S.positions()) out.push_back(p + 1);
  return out;
}

std::string prob_text(const DyadicProb& p) { return to_string(p.to_rational()); }

Rational rational_field(const json& v, const std::string& name) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number()) return parse_rational(v.dump());
  throw std::invalid_argument("field '" + name + "' must be a rational string or number");
}

template <typename T>
T uint_field(const json& v, const std::string& name) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw std::invalid_argument("field '" + name + "' must be a nonnegative integer");
  }
  return v.get<T>();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

json instance_to_json(const ProblemInstance& inst, std::optional<std::uint64_t> seed) {
  json j;
  j["kind"] = to_string(inst.kind);
  j["formula"] = render(inst.f);
  j["arity"] = inst.f.arity();
  if (inst.x) j["x"] = inst.x->to_string();
  j["k"] = inst.k;
  if (inst.m) j["m"] = *inst.m;
  if (inst.delta) j["delta"] = to_string(*inst.delta);
  if (inst.gamma) j["gamma"] = to_string(*inst.gamma);
  if (seed) j["seed"] = *seed;
  if (!inst.layout.empty()) {
    json blocks = json::array();
    for (const auto& b : inst.layout) blocks.push_back({{"name", b.name}, {"first", b.first}, {"count", b.count}});
    j["layout"] = blocks;
  }
  return j;
}

ProblemInstance instance_from_json(const json& doc) {
  const json& j = doc.contains("instance") ? doc["instance"] : doc;
  if (!j.is_object()) throw std::invalid_argument("instance must be a JSON object");
  if (!j.contains("formula") || !j["formula"].is_string()) throw std::invalid_argument("instance needs a formula string");
  ProblemInstance inst;
  if (j.contains("kind")) inst.kind = parse_problem_kind(j["kind"].get<std::string>());
  const auto arity = j.contains("arity") ? uint_field<std::uint32_t>(j["arity"], "arity") : 0;
  inst.f = parse(j["formula"].get<std::string>(), arity);
  if (j.contains("x")) inst.x = Assignment::from_string(j["x"].get<std::string>());
  if (j.contains("k")) inst.k = uint_field<std::size_t>(j["k"], "k");
  if (j.contains("m")) inst.m = uint_field<std::size_t>(j["m"], "m");
  if (j.contains("delta")) inst.delta = rational_field(j["delta"], "delta");
  if (j.contains("gamma")) inst.gamma = rational_field(j["gamma"], "gamma");
  if (j.contains("layout")) {
    for (const auto& b : j["layout"]) {
      inst.layout.push_back({b.at("name").get<std::string>(), uint_field<std::uint32_t>(b.at("first"), "first"),
                             uint_field<std::uint32_t>(b.at("count"), "count")});
    }
  }
  return inst;
}

namespace {

// ---------------------------------------------------------------------------
// Option plumbing

std::uint64_t env_or(const char* name, std::uint64_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  try {
    std::size_t used = 0;
    auto n = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument("trailing text");
    return n;
  } catch (const std::exception&) {
    throw UsageError(std::string("environment variable ") + name + " must be a nonnegative integer");
  }
}

/// Raw option text as typed; empty strings mean "not given".
struct Raw {
  std::string formula, input, x, S, delta, gamma, eta, delta1, delta2, alpha, source, reduced, write, output;
  std::string k, m, seed, rounds, ell, d, arity;
  unsigned threads = 1;
  std::string max_subsets, enum_cap;
  bool no_verify = false;
  bool no_check = false;
};

struct Context {
  Raw raw;
  json params = json::object();
  std::optional<json> file;  // --input document

  const json* from_file(const char* key) const {
    if (!file) return nullptr;
    const json& j = file->contains("instance") ? (*file)["instance"] : *file;
    return j.contains(key) ? &j[key] : nullptr;
  }

  std::uint64_t integer(const std::string& text, const char* name) {
    try {
      std::size_t used = 0;
      if (text.empty() || text[0] == '-') throw std::invalid_argument("sign");
      auto v = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw UsageError(std::string("--") + name + " must be a nonnegative integer, got '" + text + "'");
    }
  }

  std::optional<std::uint64_t> opt_integer(const std::string& flag, const char* name) {
    std::optional<std::uint64_t> v;
    if (!flag.empty()) {
      v = integer(flag, name);
    } else if (auto f = from_file(name)) {
      v = uint_field<std::uint64_t>(*f, name);
    }
    if (v) params[name] = *v;
    return v;
  }

  std::uint64_t req_integer(const std::string& flag, const char* name) {
    auto v = opt_integer(flag, name);
    if (!v) throw UsageError(std::string("--") + name + " is required");
    return *v;
  }

  std::optional<Rational> opt_rational(const std::string& flag, const char* name) {
    std::optional<Rational> v;
    try {
      if (!flag.empty()) {
        v = parse_rational(flag);
      } else if (auto f = from_file(name)) {
        v = rational_field(*f, name);
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--") + name + ": " + e.what());
    }
    if (v) params[name] = to_string(*v);
    return v;
  }

  Rational req_rational(const std::string& flag, const char* name) {
    auto v = opt_rational(flag, name);
    if (!v) throw UsageError(std::string("--") + name + " is required");
    return *v;
  }

  Formula formula() {
    std::string text;
    if (!raw.formula.empty() && !raw.input.empty()) throw UsageError("give exactly one of --formula and --input");
    if (!raw.formula.empty()) {
      text = raw.formula;
    } else if (auto f = from_file("formula")) {
      text = f->get<std::string>();
    } else {
      throw UsageError("a formula is required (--formula or --input)");
    }
    std::uint32_t arity = 0;
    if (!raw.arity.empty()) {
      arity = static_cast<std::uint32_t>(integer(raw.arity, "arity"));
    } else if (auto f = from_file("arity")) {
      arity = uint_field<std::uint32_t>(*f, "arity");
    }
    auto f = parse(text, arity);
    params["formula"] = text;
    params["arity"] = f.arity();
    return f;
  }

  Assignment point(const Formula& f) {
    std::string text = raw.x;
    if (text.empty()) {
      if (auto j = from_file("x")) text = j->get<std::string>();
    }
    if (text.empty()) throw UsageError("--x is required");
    auto x = Assignment::from_string(text);
    if (x.size() != f.arity()) {
      throw ArityMismatch("x has length " + std::to_string(x.size()) + " but the formula has arity " +
                          std::to_string(f.arity()));
    }
    params["x"] = text;
    return x;
  }

  SubsetMask subset(const Formula& f) {
    std::string text = raw.S;
    if (text.empty()) {
      if (auto j = from_file("S")) text = j->get<std::string>();
    }
    auto S = SubsetMask::parse(f.arity(), text);
    params["S"] = subset_json(S);
    return S;
  }

  std::uint64_t seed() { return req_integer(raw.seed, "seed"); }

  CountOptions count() {
    CountOptions o;
    o.enumeration_cap = static_cast<std::uint32_t>(
        raw.enum_cap.empty() ? env_or("DELTAREL_ENUM_CAP", o.enumeration_cap) : integer(raw.enum_cap, "enum-cap"));
    o.threads = std::max(1U, raw.threads);
    params["enum_cap"] = o.enumeration_cap;
    params["threads"] = o.threads;
    return o;
  }

  SearchOptions search() {
    SearchOptions s;
    s.count = count();
    s.threads = s.count.threads;
    s.max_subsets = raw.max_subsets.empty() ? env_or("DELTAREL_MAX_SUBSETS", s.max_subsets)
                                            : integer(raw.max_subsets, "max-subsets");
    params["max_subsets"] = s.max_subsets;
    return s;
  }

  std::uint32_t rounds(std::uint32_t fallback) {
    auto r = raw.rounds.empty() ? fallback : static_cast<std::uint32_t>(integer(raw.rounds, "rounds"));
    if (r % 2 == 0) throw UsageError("--rounds must be odd");
    params["rounds"] = r;
    return r;
  }
};

struct Result {
  json body = json::object();
  int exit_code = kYes;
};

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::Yes:
      return kYes;
    case Verdict::No:
      return kNo;
    default:
      return kIndeterminate;
  }
}

json report_json(const RelevanceReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["witness"] = r.witness ? subset_json(*r.witness) : json(nullptr);
  if (r.probability) j["probability"] = prob_text(*r.probability);
  if (r.estimate) j["estimate"] = *r.estimate;
  if (r.samples) j["samples"] = r.samples;
  j["candidates_checked"] = r.candidates_checked;
  j["method"] = r.method;
  if (!r.promise.empty()) j["promise"] = r.promise;
  return j;
}

json sample_json(const SampleResult& s) {
  return {{"verdict", to_string(s.verdict)},
          {"agreements", s.agreements},
          {"samples", s.samples},
          {"estimate", s.estimate},
          {"seed", s.seed}};
}

json gadget_json(const Gadget& g) {
  json trace = json::array();
  for (const auto& t : g.trace) trace.push_back({{"delta_n", t.delta_n}, {"p", prob_text(t.p)}});
  return {{"formula", render(g.pi)}, {"n", g.n},          {"probability", prob_text(g.prob)},
          {"shape", g.shape},        {"trivial", g.trivial}, {"trace", trace}};
}

json plan_json(const GadgetPlan& p) {
  json j;
  j["branch"] = p.branch;
  j["combiner"] = p.combiner;
  if (p.a) j["a"] = to_string(*p.a);
  if (p.b) j["b"] = to_string(*p.b);
  if (p.eta) j["eta"] = to_string(*p.eta);
  if (p.ell) j["ell"] = *p.ell;
  j["gadget"] = gadget_json(p.gadget);
  return j;
}

// ---------------------------------------------------------------------------
// Commands

Result cmd_eval(Context& c) {
  auto f = c.formula();
  auto x = c.point(f);
  Result r;
  r.body["value"] = evaluate(f, x) ? 1 : 0;
  return r;
}

Result cmd_prob(Context& c) {
  auto f = c.formula();
  auto opts = c.count();
  Result r;
  ConditionalCounter counter(f, opts);
  r.body["probability"] = prob_text(counter.unconditional());
  r.body["models"] = to_string(counter.unconditional().to_rational() * pow2(f.arity()));
  if (!c.raw.x.empty() || c.from_file("x")) {
    auto x = c.point(f);
    auto S = c.subset(f);
    r.body["conditional_satisfaction"] = prob_text(counter.satisfaction(x, S));
    r.body["conditional_agreement"] = prob_text(counter.agreement(x, S));
  }
  return r;
}

Result cmd_check(Context& c) {
  auto f = c.formula();
  auto x = c.point(f);
  auto S = c.subset(f);
  auto delta = c.req_rational(c.raw.delta, "delta");
  auto res = is_delta_relevant(f, x, S, delta, c.count());
  Result r;
  r.body["relevant"] = res.relevant;
  r.body["probability"] = prob_text(res.probability);
  r.exit_code = res.relevant ? kYes : kNo;
  return r;
}

Result cmd_decide(Context& c) {
  auto f = c.formula();
  auto x = c.point(f);
  auto k = c.req_integer(c.raw.k, "k");
  auto delta = c.req_rational(c.raw.delta, "delta");
  auto rep = decide_relevant_input(f, x, k, delta, c.search());
  Result r;
  r.body = report_json(rep);
  r.exit_code = verdict_code(rep.verdict);
  return r;
}

Result cmd_minimize(Context& c) {
  auto f = c.formula();
  auto x = c.point(f);
  auto delta = c.req_rational(c.raw.delta, "delta");
  auto res = solve_min_relevant_input(f, x, delta, c.search());
  Result r;
  r.body["k"] = res.k;
  r.body["witness"] = subset_json(res.witness);
  r.body["probability"] = prob_text(res.probability);
  r.body["candidates_checked"] = res.candidates_checked;
  return r;
}

Result cmd_sample(Context& c) {
  auto f = c.formula();
  auto x = c.point(f);
  auto S = c.subset(f);
  auto delta = c.req_rational(c.raw.delta, "delta");
  auto gamma = c.req_rational(c.raw.gamma, "gamma");
  auto seed = c.seed();
  auto rounds = c.rounds(1);
  Result r;
  if (rounds == 1) {
    auto s = sample_relevance(f, x, S, delta, gamma, seed);
    r.body = sample_json(s);
    r.exit_code = verdict_code(s.verdict);
  } else {
    auto a = amplified_sample_relevance(f, x, S, delta, gamma, seed, rounds);
    r.body["verdict"] = to_string(a.verdict);
    r.body["rounds"] = a.rounds;
    r.body["yes_votes"] = a.yes_votes;
    json runs = json::array();
    for (const auto& s : a.runs) runs.push_back(sample_json(s));
    r.body["runs"] = runs;
    r.exit_code = verdict_code(a.verdict);
  }
  return r;
}

Result cmd_gapped(Context& c) {
  auto f = c.formula();
  auto x = c.point(f);
  auto k = c.req_integer(c.raw.k, "k");
  auto delta = c.req_rational(c.raw.delta, "delta");
  auto gamma = c.req_rational(c.raw.gamma, "gamma");
  auto seed = c.seed();
  GappedOptions g;
  g.search = c.search();
  g.rounds = c.rounds(g.rounds);
  g.classify_promise = !c.raw.no_check;
  c.params["classify_promise"] = g.classify_promise;
  auto rep = decide_gapped(f, x, k, delta, gamma, seed, g);
  Result r;
  r.body = report_json(rep);
  if (rep.promise == "outside-promise") r.body["note"] = "instance lies outside the promise; verdict unreliable";
  r.exit_code = rep.promise == "outside-promise" ? kIndeterminate : verdict_code(rep.verdict);
  return r;
}

Result cmd_greedy(Context& c) {
  auto f = c.formula();
  auto x = c.point(f);
  auto delta = c.req_rational(c.raw.delta, "delta");
  auto gamma = c.req_rational(c.raw.gamma, "gamma");
  auto seed = c.seed();
  GreedyOptions g;
  g.count = c.count();
  g.rounds = c.rounds(g.rounds);
  g.verify_exact = !c.raw.no_verify;
  c.params["verify_exact"] = g.verify_exact;
  auto res = greedy_min_relevant(f, x, delta, gamma, seed, g);
  Result r;
  r.body["k"] = res.k;
  r.body["set"] = subset_json(res.set);
  json steps = json::array();
  for (const auto& s : res.steps) steps.push_back({{"added", s.added + 1}, {"estimate", s.estimate}});
  r.body["steps"] = steps;
  if (res.exact_probability) r.body["exact_probability"] = prob_text(*res.exact_probability);
  return r;
}

Result cmd_gadget_pi(Context& c) {
  auto eta = c.req_rational(c.raw.eta, "eta");
  auto ell = c.req_integer(c.raw.ell, "ell");
  Result r;
  r.body = gadget_json(build_pi(eta, static_cast<std::uint32_t>(ell)));
  return r;
}

Result cmd_gadget_plan(Context& c, bool raise) {
  auto d = c.req_integer(c.raw.d, "d");
  auto d1 = c.req_rational(c.raw.delta1, "delta1");
  auto d2 = c.req_rational(c.raw.delta2, "delta2");
  auto plan = raise ? raise_probability_gadget(static_cast<std::uint32_t>(d), d1, d2)
                    : lower_probability_gadget(static_cast<std::uint32_t>(d), d1, d2);
  Result r;
  r.body = plan_json(plan);
  return r;
}

ProblemInstance load_instance(Context& c, const std::string& path, const char* role) {
  if (path.empty()) throw UsageError(std::string("--") + role + " is required");
  c.params[role] = path;
  try {
    return instance_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw UsageError(std::string(role) + " instance: " + e.what());
  }
}

Result cmd_reduce(Context& c, const std::string& step) {
  c.params["step"] = step;
  ProblemInstance out;
  if (step == "sat-ip3") {
    auto f = c.formula();
    auto delta = c.req_rational(c.raw.delta, "delta");
    auto gamma = c.req_rational(c.raw.gamma, "gamma");
    auto m = c.opt_integer(c.raw.m, "m");
    out = reduce_sat_to_ip3(f, delta, gamma, m ? std::optional<std::size_t>(*m) : std::nullopt);
  } else {
    auto src = load_instance(c, c.raw.input, "input");
    if (step == "emajsat-ip1") {
      src.kind = ProblemKind::EMajSat;
      if (!c.raw.k.empty()) src.k = c.integer(c.raw.k, "k");
      out = reduce_emajsat_to_ip1(src);
    } else if (step == "ip1-ip2") {
      src.kind = ProblemKind::IP1;
      if (!c.raw.k.empty()) src.k = c.integer(c.raw.k, "k");
      out = reduce_ip1_to_ip2(src, c.req_rational(c.raw.delta, "delta"));
    } else {
      src.kind = ProblemKind::IP2;
      if (!c.raw.k.empty()) src.k = c.integer(c.raw.k, "k");
      if (!c.raw.delta.empty()) src.delta = parse_rational(c.raw.delta);
      out = reduce_ip2_to_relevant_input(src);
    }
    c.params["k"] = src.k;
    if (src.delta) c.params["source_delta"] = to_string(*src.delta);
  }
  Result r;
  r.body["instance"] = instance_to_json(out);
  if (!c.raw.write.empty()) {
    c.params["write"] = c.raw.write;
    write_file(c.raw.write, instance_to_json(out).dump(2) + "\n");
  }
  return r;
}

Result cmd_verify(Context& c) {
  auto src = load_instance(c, c.raw.source, "source");
  auto red = load_instance(c, c.raw.reduced, "reduced");
  auto v = verify_reduction(src, red, c.search());
  Result r;
  r.body["source_kind"] = to_string(v.source_kind);
  r.body["reduced_kind"] = to_string(v.reduced_kind);
  r.body["source_verdict"] = v.source_verdict;
  r.body["reduced_verdict"] = v.reduced_verdict;
  r.body["pass"] = v.pass;
  r.body["skipped"] = v.skipped;
  r.body["notes"] = v.notes;
  r.exit_code = v.skipped ? kIndeterminate : v.pass ? kYes : kNo;
  return r;
}

Result cmd_inapprox(Context& c) {
  auto d = c.req_integer(c.raw.d, "d");
  auto delta = c.req_rational(c.raw.delta, "delta");
  auto gamma = c.req_rational(c.raw.gamma, "gamma");
  auto alpha = c.req_rational(c.raw.alpha, "alpha");
  auto p = inapprox_parameters(d, delta, gamma, alpha);
  Result r;
  r.body["q"] = p.q;
  r.body["p"] = p.p;
  r.body["k_prime"] = p.k_prime.str();
  r.body["m_prime"] = p.m_prime.str();
  r.body["d_prime"] = p.d_prime.str();
  r.body["first_term_upper"] = static_cast<double>(p.first_term_upper);
  r.body["second_term_upper"] = static_cast<double>(p.second_term_upper);
  r.body["lhs_upper"] = static_cast<double>(p.lhs_upper);
  r.body["check"] = p.check;
  r.exit_code = p.check ? kYes : kNo;
  return r;
}

Result cmd_shapley(Context& c) {
  auto f = c.formula();
  auto x = c.point(f);
  auto v = shapley_values(f, x);
  Result r;
  json phi = json::array();
  for (const auto& p : v.phi) phi.push_back(to_string(p));
  r.body["phi"] = phi;
  r.body["nu_full"] = to_string(v.nu_full);
  r.body["efficiency_check"] = v.efficiency;
  return r;
}

Result cmd_relu(Context& c) {
  auto f = c.formula();
  auto net = compile_to_relu(f);
  Result r;
  r.body["inputs"] = net.inputs;
  r.body["hidden_layers"] = net.hidden_layers();
  r.body["neurons"] = net.neurons();
  json layers = json::array();
  for (const auto& l : net.layers) layers.push_back({{"weights", l.weights}, {"bias", l.bias}});
  r.body["layers"] = layers;
  const auto cap = c.count().enumeration_cap;
  if (!c.raw.no_verify && f.arity() <= std::min<std::uint32_t>(cap, 20)) {
    bool ok = true;
    for (std::uint64_t j = 0; ok && j < (std::uint64_t{1} << f.arity()); ++j) {
      Assignment a(f.arity());
      for (std::uint32_t i = 0; i < f.arity(); ++i) a.set(i, j >> i & 1U);
      ok = net.evaluate(a) == evaluate(f, a);
    }
    r.body["agreement"] = ok;
    if (!ok) r.exit_code = kInternal;
  }
  return r;
}

json error_body(const std::string& reason, const std::string& message) {
  return {{"status", "error"}, {"reason", reason}, {"message", message}};
}

}  // namespace

Outcome run(const std::vector<std::string>& args) {
  Context c;
  Raw& raw = c.raw;
  CLI::App app{"Exact and sampled delta-relevance tools", "deltarel"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto formula_opts = [&](CLI::App* s) {
    s->add_option("--formula", raw.formula, "Formula text");
    s->add_option("--input", raw.input, "Instance JSON file");
    s->add_option("--arity", raw.arity, "Minimum arity");
  };
  auto caps = [&](CLI::App* s) {
    s->add_option("--threads", raw.threads, "Worker threads");
    s->add_option("--enum-cap", raw.enum_cap, "Enumeration cap (default $DELTAREL_ENUM_CAP or 26)");
  };
  auto search = [&](CLI::App* s) {
    caps(s);
    s->add_option("--max-subsets", raw.max_subsets, "Candidate cap (default $DELTAREL_MAX_SUBSETS or 2^20)");
  };
  auto out = [&](CLI::App* s) { s->add_option("--output", raw.output, "Write the report here"); };

  std::string command;
  auto sub = [&](const char* name, const char* help) {
    auto s = app.add_subcommand(name, help);
    out(s);
    s->callback([&command, name] { command = name; });
    return s;
  };

  auto s_eval = sub("eval", "Evaluate at x");
  formula_opts(s_eval);
  s_eval->add_option("--x", raw.x, "Assignment bitstring, x1 first");

  auto s_prob = sub("prob", "Satisfaction probability, conditional when --x is given");
  formula_opts(s_prob);
  caps(s_prob);
  s_prob->add_option("--x", raw.x);
  s_prob->add_option("--S", raw.S, "Subset such as 1,3");

  auto s_check = sub("check", "Exact delta-relevance of a given set");
  formula_opts(s_check);
  caps(s_check);
  s_check->add_option("--x", raw.x);
  s_check->add_option("--S", raw.S);
  s_check->add_option("--delta", raw.delta);

  auto s_decide = sub("decide", "Relevant-input decision");
  formula_opts(s_decide);
  search(s_decide);
  s_decide->add_option("--x", raw.x);
  s_decide->add_option("--k", raw.k);
  s_decide->add_option("--delta", raw.delta);

  auto s_min = sub("minimize", "Smallest delta-relevant set");
  formula_opts(s_min);
  search(s_min);
  s_min->add_option("--x", raw.x);
  s_min->add_option("--delta", raw.delta);

  auto s_sample = sub("sample", "Sampled relevance test of one set");
  formula_opts(s_sample);
  s_sample->add_option("--x", raw.x);
  s_sample->add_option("--S", raw.S);
  s_sample->add_option("--delta", raw.delta);
  s_sample->add_option("--gamma", raw.gamma);
  s_sample->add_option("--seed", raw.seed);
  s_sample->add_option("--rounds", raw.rounds, "Odd number of amplification rounds");

  auto s_gapped = sub("decide-gapped", "Gapped decision with sampled acceptance");
  formula_opts(s_gapped);
  search(s_gapped);
  s_gapped->add_option("--x", raw.x);
  s_gapped->add_option("--k", raw.k);
  s_gapped->add_option("--delta", raw.delta);
  s_gapped->add_option("--gamma", raw.gamma);
  s_gapped->add_option("--seed", raw.seed);
  s_gapped->add_option("--rounds", raw.rounds);
  s_gapped->add_flag("--no-promise-check", raw.no_check, "Skip the exact promise classification");

  auto s_greedy = sub("greedy", "Greedy sampled minimisation");
  formula_opts(s_greedy);
  caps(s_greedy);
  s_greedy->add_option("--x", raw.x);
  s_greedy->add_option("--delta", raw.delta);
  s_greedy->add_option("--gamma", raw.gamma);
  s_greedy->add_option("--seed", raw.seed);
  s_greedy->add_option("--rounds", raw.rounds);
  s_greedy->add_flag("--no-verify", raw.no_verify, "Accept on the sampled test alone");

  auto s_gadget = app.add_subcommand("gadget", "Probability gadgets");
  s_gadget->require_subcommand(1);
  auto g_pi = s_gadget->add_subcommand("pi", "Monotone DNF approximating eta");
  out(g_pi);
  g_pi->add_option("--eta", raw.eta);
  g_pi->add_option("--ell", raw.ell);
  g_pi->callback([&] { command = "gadget pi"; });
  for (const char* name : {"raise", "lower"}) {
    auto g = s_gadget->add_subcommand(name, "Threshold conversion gadget");
    out(g);
    g->add_option("--d", raw.d);
    g->add_option("--delta1", raw.delta1);
    g->add_option("--delta2", raw.delta2);
    g->callback([&command, name] { command = std::string("gadget ") + name; });
  }

  auto s_reduce = app.add_subcommand("reduce", "Apply one reduction step");
  s_reduce->require_subcommand(1);
  for (const char* step : {"emajsat-ip1", "ip1-ip2", "ip2-ri", "sat-ip3"}) {
    auto s = s_reduce->add_subcommand(step, "Reduction step");
    out(s);
    formula_opts(s);
    s->add_option("--k", raw.k, "Override the source k");
    s->add_option("--delta", raw.delta);
    s->add_option("--gamma", raw.gamma);
    s->add_option("--m", raw.m);
    s->add_option("--write", raw.write, "Also write the bare reduced instance here");
    s->callback([&command, step] { command = std::string("reduce ") + step; });
  }

  auto s_verify = sub("verify", "Check a reduction biconditional with exact oracles");
  search(s_verify);
  s_verify->add_option("--source", raw.source);
  s_verify->add_option("--reduced", raw.reduced);

  auto s_inapprox = sub("inapprox-params", "Parameters of the inapproximability construction");
  s_inapprox->add_option("--d", raw.d);
  s_inapprox->add_option("--delta", raw.delta);
  s_inapprox->add_option("--gamma", raw.gamma);
  s_inapprox->add_option("--alpha", raw.alpha);

  auto s_shapley = sub("shapley", "Exact Shapley values");
  formula_opts(s_shapley);
  s_shapley->add_option("--x", raw.x);

  auto s_relu = sub("compile-relu", "Compile to a ReLU network");
  formula_opts(s_relu);
  caps(s_relu);
  s_relu->add_flag("--no-verify", raw.no_verify, "Skip the exhaustive agreement check");

  json report;
  int code = kYes;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    report["command"] = command;
    if (!raw.input.empty() && (command.rfind("reduce", 0) != 0 || command == "reduce sat-ip3")) {
      c.file = read_json(raw.input);
      c.params["input"] = raw.input;
    }
    Result res;
    if (command == "eval") res = cmd_eval(c);
    else if (command == "prob") res = cmd_prob(c);
    else if (command == "check") res = cmd_check(c);
    else if (command == "decide") res = cmd_decide(c);
    else if (command == "minimize") res = cmd_minimize(c);
    else if (command == "sample") res = cmd_sample(c);
    else if (command == "decide-gapped") res = cmd_gapped(c);
    else if (command == "greedy") res = cmd_greedy(c);
    else if (command == "gadget pi") res = cmd_gadget_pi(c);
    else if (command == "gadget raise") res = cmd_gadget_plan(c, true);
    else if (command == "gadget lower") res = cmd_gadget_plan(c, false);
    else if (command.rfind("reduce ", 0) == 0) res = cmd_reduce(c, command.substr(7));
    else if (command == "verify") res = cmd_verify(c);
    else if (command == "inapprox-params") res = cmd_inapprox(c);
    else if (command == "shapley") res = cmd_shapley(c);
    else if (command == "compile-relu") res = cmd_relu(c);
    else throw UsageError("no command given");
    report["parameters"] = c.params;
    report["status"] = "ok";
    report["result"] = res.body;
    code = res.exit_code;
  } catch (const CLI::CallForHelp&) {
    return {kYes, app.help()};
  } catch (const CLI::CallForAllHelp&) {
    return {kYes, app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    report = error_body("usage", e.what());
    code = kUsage;
  } catch (const CapExceeded& e) {
    report["command"] = command;
    report["parameters"] = c.params;
    report.update(error_body("cap-exceeded", e.what()));
    report["dimension"] = e.dimension();
    report["requested"] = e.requested();
    report["cap"] = e.cap();
    code = kCapRefused;
  } catch (const ParseError& e) {
    report["command"] = command;
    report.update(error_body("formula-syntax", e.what()));
    report["offset"] = e.offset();
    code = kUsage;
  } catch (const ArityMismatch& e) {
    report["command"] = command;
    report.update(error_body("arity-mismatch", e.what()));
    code = kUsage;
  } catch (const std::invalid_argument& e) {
    report["command"] = command;
    report.update(error_body("invalid-argument", e.what()));
    code = kUsage;
  } catch (const json::exception& e) {
    report["command"] = command;
    report.update(error_body("invalid-argument", e.what()));
    code = kUsage;
  } catch (const std::exception& e) {
    report["command"] = command;
    report.update(error_body("internal", e.what()));
    code = kInternal;
  }
  report["exit_code"] = code;
  std::string text = report.dump(2) + "\n";
  if (!raw.output.empty()) {
    try {
      write_file(raw.output, text);
    } catch (const std::exception& e) {
      return {kUsage, error_body("usage", e.what()).dump(2) + "\n"};
    }
  }
  return {code, text};
}

}  // namespace deltarel::cli
