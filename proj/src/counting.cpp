#include "deltarel/counting.hpp"

#include "circuit.hpp"
#include "deltarel/errors.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <thread>

namespace deltarel {

namespace {

using detail::Circuit;
using detail::Gate;
using U128 = unsigned __int128;

BigInt to_bigint(U128 v) {
  BigInt out = static_cast<std::uint64_t>(v >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(v);
  return out;
}
BigInt to_bigint(const BigInt& v) { return v; }

template <class Num>
Num pow2_num(std::uint32_t e) {
  return Num(1) << e;
}

// Free-variable enumeration of a circuit range, 64 assignments per word.
template <class VarWord>
std::uint64_t count_words(const Circuit& c, std::uint32_t begin, std::uint32_t last, std::uint32_t free,
                          VarWord&& base_word, unsigned threads) {
  if (free <= 6) {
    std::vector<std::uint64_t> scratch;
    auto word = c.eval_words(begin, last, [&](std::uint32_t v) { return base_word(v, 0); }, scratch);
    const std::uint64_t mask = free == 6 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (1U << free)) - 1);
    return static_cast<std::uint64_t>(std::popcount(word & mask));
  }
  const std::uint64_t blocks = std::uint64_t{1} << (free - 6);
  auto work = [&](std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> scratch;
    std::uint64_t total = 0;
    for (std::uint64_t b = lo; b < hi; ++b) {
      auto word = c.eval_words(begin, last, [&](std::uint32_t v) { return base_word(v, b); }, scratch);
      total += static_cast<std::uint64_t>(std::popcount(word));
    }
    return total;
  };
  const unsigned workers = blocks >= 4096 ? std::max(1U, threads) : 1U;
  if (workers == 1) return work(0, blocks);
  std::vector<std::uint64_t> partial(workers, 0);
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (blocks + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      auto lo = std::min(blocks, t * chunk);
      partial[t] = work(lo, std::min(blocks, lo + chunk));
    });
  }
  for (auto& th : pool) th.join();
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

struct GateInfo {
  std::vector<std::uint32_t> vars;        // sorted zero-based positions in the subtree
  std::vector<std::uint32_t> connectors;  // vars shared by two or more children
  std::uint32_t size = 0;                 // gates in the subtree
};

std::vector<GateInfo> analyse(const Circuit& c) {
  std::vector<GateInfo> info(c.size());
  for (std::uint32_t g = 0; g < c.size(); ++g) {
    const Gate& gt = c.gate(g);
    GateInfo& gi = info[g];
    gi.size = g - gt.begin + 1;
    if (gt.kind == NodeKind::Var) {
      gi.vars = {gt.var};
      continue;
    }
    std::map<std::uint32_t, std::uint32_t> seen;
    for (auto ch : c.children(g)) {
      for (auto v : info[ch].vars) ++seen[v];
    }
    for (auto [v, n] : seen) {
      gi.vars.push_back(v);
      if (n >= 2) gi.connectors.push_back(v);
    }
    std::stable_sort(gi.connectors.begin(), gi.connectors.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return seen[a] > seen[b]; });
  }
  return info;
}

class EngineBase {
 public:
  virtual ~EngineBase() = default;
  virtual DyadicProb unconditional() const = 0;
  virtual DyadicProb satisfaction(const Assignment& x, const SubsetMask& S) = 0;
};

template <class Num>
class Engine final : public EngineBase {
 public:
  Engine(const Formula& f, const CountOptions& options)
      : circuit_(f), info_(analyse(circuit_)), options_(options) {
    state_.assign(circuit_.arity(), -1);
    rank_.assign(circuit_.arity(), 0);
    cache_.resize(circuit_.size());
    ready_.assign(circuit_.size(), false);
    for (std::uint32_t g = 0; g < circuit_.size(); ++g) {
      branches_ = 0;
      cache_[g] = count(g);
      ready_[g] = true;
    }
    root_free_ = static_cast<std::uint32_t>(info_[circuit_.root()].vars.size());
  }

  DyadicProb unconditional() const override {
    return DyadicProb(to_bigint(cache_[circuit_.root()]), root_free_);
  }

  DyadicProb satisfaction(const Assignment& x, const SubsetMask& S) override {
    if (x.size() != circuit_.arity() || S.arity() != circuit_.arity()) {
      throw ArityMismatch("assignment/subset arity does not match formula arity " +
                          std::to_string(circuit_.arity()));
    }
    const auto& root_vars = info_[circuit_.root()].vars;
    for (auto p : S.positions()) {
      // Positions outside the formula's support do not affect the count.
      if (std::binary_search(root_vars.begin(), root_vars.end(), static_cast<std::uint32_t>(p))) {
        assign(static_cast<std::uint32_t>(p), x[p]);
      }
    }
    branches_ = 0;
    struct Reset {
      Engine* e;
      ~Reset() {
        while (!e->assigned_.empty()) e->unassign();
      }
    } reset{this};
    const auto free = static_cast<std::uint32_t>(root_vars.size() - assigned_.size());
    return DyadicProb(to_bigint(count(circuit_.root())), free);
  }

 private:
  void assign(std::uint32_t v, bool value) {
    state_[v] = value ? 1 : 0;
    assigned_.push_back(v);
  }
  void unassign() {
    state_[assigned_.back()] = -1;
    assigned_.pop_back();
  }

  std::uint32_t assigned_in(std::uint32_t g) const {
    const auto& vars = info_[g].vars;
    std::uint32_t n = 0;
    for (auto v : assigned_) n += std::binary_search(vars.begin(), vars.end(), v) ? 1 : 0;
    return n;
  }

  std::uint32_t free_in(std::uint32_t g) const {
    return static_cast<std::uint32_t>(info_[g].vars.size()) - assigned_in(g);
  }

  Num count(std::uint32_t g) {
    const Gate& gt = circuit_.gate(g);
    switch (gt.kind) {
      case NodeKind::Const:
        return gt.value ? Num(1) : Num(0);
      case NodeKind::Var:
        return state_[gt.var] < 0 ? Num(1) : Num(state_[gt.var]);
      default:
        break;
    }
    const std::uint32_t touched = assigned_in(g);
    if (touched == 0 && ready_[g]) return cache_[g];
    const auto free = static_cast<std::uint32_t>(info_[g].vars.size()) - touched;

    if (gt.kind == NodeKind::Not) return pow2_num<Num>(free) - count(circuit_.children(g)[0]);

    const bool independent = std::all_of(info_[g].connectors.begin(), info_[g].connectors.end(),
                                         [&](std::uint32_t v) { return state_[v] >= 0; });
    if (independent) return combine(g);

    const std::uint64_t words = free <= 6 ? 1 : (std::uint64_t{1} << std::min(free - 6, 40U));
    if (free <= options_.enumeration_cap && words * info_[g].size <= (std::uint64_t{1} << 16)) {
      return enumerate(g, free);
    }
    if (branches_ < options_.branch_budget) {
      std::uint32_t pivot = 0;
      for (auto v : info_[g].connectors) {
        if (state_[v] < 0) {
          pivot = v;
          break;
        }
      }
      branches_ += 2;
      assign(pivot, false);
      Num low = count(g);
      unassign();
      assign(pivot, true);
      Num high = count(g);
      unassign();
      return low + high;
    }
    if (free <= options_.enumeration_cap) return enumerate(g, free);
    throw CapExceeded("free variables after decomposition", free, options_.enumeration_cap);
  }

  Num combine(std::uint32_t g) {
    const Gate& gt = circuit_.gate(g);
    auto kids = circuit_.children(g);
    switch (gt.kind) {
      case NodeKind::And: {
        Num acc = 1;
        for (auto c : kids) {
          acc *= count(c);
          if (acc == 0) return 0;
        }
        return acc;
      }
      case NodeKind::Or: {
        Num fail = 1;
        std::uint32_t total = 0;
        for (auto c : kids) {
          const auto f = free_in(c);
          total += f;
          fail *= pow2_num<Num>(f) - count(c);
        }
        return pow2_num<Num>(total) - fail;
      }
      case NodeKind::Xor: {
        Num acc = 0;
        std::uint32_t total = 0;
        bool first = true;
        for (auto c : kids) {
          const auto f = free_in(c);
          const Num cc = count(c);
          if (first) {
            acc = cc;
            first = false;
          } else {
            acc = acc * (pow2_num<Num>(f) - cc) + (pow2_num<Num>(total) - acc) * cc;
          }
          total += f;
        }
        return acc;
      }
      default:
        return 0;
    }
  }

  Num enumerate(std::uint32_t g, std::uint32_t free) {
    std::uint32_t r = 0;
    for (auto v : info_[g].vars) {
      if (state_[v] < 0) rank_[v] = r++;
    }
    auto word = [this](std::uint32_t v, std::uint64_t block) -> std::uint64_t {
      if (state_[v] >= 0) return state_[v] ? ~std::uint64_t{0} : 0;
      const auto k = rank_[v];
      if (k < 6) return detail::kPositionPattern[k];
      return ((block >> (k - 6)) & 1U) ? ~std::uint64_t{0} : 0;
    };
    return Num(count_words(circuit_, circuit_.gate(g).begin, g, free, word, options_.threads));
  }

  Circuit circuit_;
  std::vector<GateInfo> info_;
  CountOptions options_;
  std::vector<std::int8_t> state_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::uint32_t> assigned_;
  std::vector<Num> cache_;
  std::vector<bool> ready_;
  std::uint64_t branches_ = 0;
  std::uint32_t root_free_ = 0;
};

}  // namespace

struct ConditionalCounter::Impl {
  Formula formula;
  std::unique_ptr<EngineBase> engine;
};

ConditionalCounter::ConditionalCounter(const Formula& f, const CountOptions& options)
    : impl_(std::make_unique<Impl>()) {
  impl_->formula = f;
  // 128-bit counts cover every formula with at most 120 occurring variables.
  if (occurring_variables(f.root()).size() <= 120) {
    impl_->engine = std::make_unique<Engine<U128>>(f, options);
  } else {
    impl_->engine = std::make_unique<Engine<BigInt>>(f, options);
  }
}

ConditionalCounter::~ConditionalCounter() = default;
ConditionalCounter::ConditionalCounter(ConditionalCounter&&) noexcept = default;
ConditionalCounter& ConditionalCounter::operator=(ConditionalCounter&&) noexcept = default;

const Formula& ConditionalCounter::formula() const { return impl_->formula; }

DyadicProb ConditionalCounter::unconditional() const { return impl_->engine->unconditional(); }

DyadicProb ConditionalCounter::satisfaction(const Assignment& x, const SubsetMask& S) {
  return impl_->engine->satisfaction(x, S);
}

DyadicProb ConditionalCounter::agreement(const Assignment& x, const SubsetMask& S) {
  auto p = satisfaction(x, S);
  return evaluate(impl_->formula, x) ? p : p.complement();
}

DyadicProb satisfaction_probability(const Formula& f, const CountOptions& options) {
  return ConditionalCounter(f, options).unconditional();
}

DyadicProb conditional_satisfaction_probability(const Formula& f, const Assignment& x, const SubsetMask& S,
                                                const CountOptions& options) {
  return ConditionalCounter(f, options).satisfaction(x, S);
}

DyadicProb conditional_agreement_probability(const Formula& f, const Assignment& x, const SubsetMask& S,
                                             const CountOptions& options) {
  return ConditionalCounter(f, options).agreement(x, S);
}

// ---------------------------------------------------------------------------
// Independence decomposition

namespace {

Decomposition::Law law_of(NodeKind k) {
  switch (k) {
    case NodeKind::And:
      return Decomposition::Law::And;
    case NodeKind::Or:
      return Decomposition::Law::Or;
    case NodeKind::Xor:
      return Decomposition::Law::Xor;
    default:
      return Decomposition::Law::Leaf;
  }
}

Decomposition leaf(const NodePtr& node, std::vector<std::uint32_t> vars) {
  Decomposition d;
  d.node = node;
  d.variables = std::move(vars);
  return d;
}

Decomposition split(const NodePtr& node, std::uint32_t cap, bool top) {
  auto vars = occurring_variables(node);
  if (!top && vars.size() <= cap) return leaf(node, std::move(vars));

  if (node->kind() == NodeKind::Not) {
    Decomposition d;
    d.law = Decomposition::Law::Not;
    d.node = node;
    d.variables = vars;
    d.parts.push_back(split(node->children().front(), cap, top));
    if (d.parts.front().law == Decomposition::Law::Leaf && top) return leaf(node, std::move(vars));
    return d;
  }
  if (node->kind() != NodeKind::And && node->kind() != NodeKind::Or && node->kind() != NodeKind::Xor) {
    return leaf(node, std::move(vars));
  }

  const auto& kids = node->children();
  std::vector<std::size_t> parent(kids.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };
  std::map<std::uint32_t, std::size_t> owner;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    for (auto v : occurring_variables(kids[i])) {
      auto [it, fresh] = owner.emplace(v, i);
      if (!fresh) parent[find(i)] = find(it->second);
    }
  }
  std::map<std::size_t, std::vector<NodePtr>> groups;
  for (std::size_t i = 0; i < kids.size(); ++i) groups[find(i)].push_back(kids[i]);
  if (groups.size() < 2) return leaf(node, std::move(vars));

  Decomposition d;
  d.law = law_of(node->kind());
  d.node = node;
  d.variables = std::move(vars);
  for (auto& [_, members] : groups) {
    NodePtr part = members.size() == 1 ? members.front() : Node::make(node->kind(), members);
    d.parts.push_back(split(part, cap, false));
  }
  return d;
}

DyadicProb leaf_probability(const Decomposition& d, std::uint32_t cap) {
  const auto n = static_cast<std::uint32_t>(d.variables.size());
  if (n > cap) throw CapExceeded("component variables", n, cap);
  std::vector<NodePtr> compact(d.variables.empty() ? 0 : d.variables.back());
  for (std::uint32_t i = 0; i < n; ++i) compact[d.variables[i] - 1] = Node::make_var(i + 1);
  for (auto& c : compact) {
    if (!c) c = Node::make_const(false);
  }
  Formula f(substitute(d.node, compact), n);
  TruthTableOptions opts;
  opts.enumeration_cap = cap;
  return DyadicProb(static_cast<std::uint64_t>(truth_table(f, opts).count()), n);
}

}  // namespace

Decomposition decompose_independent(const Formula& f, std::uint32_t cap) { return split(f.root(), cap, true); }

DyadicProb probability(const Decomposition& d, std::uint32_t cap) {
  using Law = Decomposition::Law;
  switch (d.law) {
    case Law::Leaf:
      return leaf_probability(d, cap);
    case Law::Not:
      return probability(d.parts.front(), cap).complement();
    default:
      break;
  }
  DyadicProb acc = probability(d.parts.front(), cap);
  for (std::size_t i = 1; i < d.parts.size(); ++i) {
    auto p = probability(d.parts[i], cap);
    acc = d.law == Law::And ? DyadicProb::both(acc, p)
          : d.law == Law::Or ? DyadicProb::either(acc, p)
                             : DyadicProb::exactly_one(acc, p);
  }
  return acc;
}

}  // namespace deltarel
