#include "deltarel/formula.hpp"

#include "circuit.hpp"
#include "deltarel/errors.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace deltarel {

// ---------------------------------------------------------------------------
// Nodes

NodePtr Node::make_const(bool value) {
  static const NodePtr kFalse = [] {
    auto n = std::shared_ptr<Node>(new Node());
    n->value_ = false;
    return n;
  }();
  static const NodePtr kTrue = [] {
    auto n = std::shared_ptr<Node>(new Node());
    n->value_ = true;
    return n;
  }();
  return value ? kTrue : kFalse;
}

NodePtr Node::make_var(std::uint32_t index) {
  if (index == 0) throw std::invalid_argument("variable indices start at 1");
  auto n = std::shared_ptr<Node>(new Node());
  n->kind_ = NodeKind::Var;
  n->var_ = index;
  n->max_var_ = index;
  return n;
}

NodePtr Node::make_not(NodePtr child) {
  return make(NodeKind::Not, {std::move(child)});
}

NodePtr Node::make(NodeKind kind, std::vector<NodePtr> children) {
  switch (kind) {
    case NodeKind::Const:
    case NodeKind::Var:
      throw std::invalid_argument("leaf kinds have dedicated constructors");
    case NodeKind::Not:
      if (children.size() != 1) throw std::invalid_argument("Not takes one child");
      break;
    case NodeKind::And:
    case NodeKind::Or:
      if (children.size() < 2) throw std::invalid_argument("And/Or take at least two children");
      break;
    case NodeKind::Xor:
      if (children.size() != 2) throw std::invalid_argument("Xor takes two children");
      break;
  }
  auto n = std::shared_ptr<Node>(new Node());
  n->kind_ = kind;
  for (const auto& c : children) {
    if (!c) throw std::invalid_argument("null child");
    n->max_var_ = std::max(n->max_var_, c->max_var_);
    n->size_ += c->size_;
  }
  n->children_ = std::move(children);
  return n;
}

namespace build {

NodePtr constant(bool value) { return Node::make_const(value); }

NodePtr var(std::uint32_t index) { return Node::make_var(index); }

NodePtr negate(NodePtr a) {
  if (a->kind() == NodeKind::Const) return constant(!a->value());
  if (a->kind() == NodeKind::Not) return a->children().front();
  return Node::make_not(std::move(a));
}

NodePtr literal(std::uint32_t index, bool positive) {
  return positive ? var(index) : Node::make_not(var(index));
}

namespace {

NodePtr fold(NodeKind kind, std::vector<NodePtr> terms) {
  const bool absorbing = kind == NodeKind::Or;  // value that decides the result
  std::vector<NodePtr> kept;
  kept.reserve(terms.size());
  for (auto& t : terms) {
    if (t->kind() == NodeKind::Const) {
      if (t->value() == absorbing) return constant(absorbing);
      continue;
    }
    kept.push_back(std::move(t));
  }
  if (kept.empty()) return constant(!absorbing);
  if (kept.size() == 1) return kept.front();
  return Node::make(kind, std::move(kept));
}

}  // namespace

NodePtr all_of(std::vector<NodePtr> terms) { return fold(NodeKind::And, std::move(terms)); }

NodePtr any_of(std::vector<NodePtr> terms) { return fold(NodeKind::Or, std::move(terms)); }

NodePtr exclusive(NodePtr a, NodePtr b) {
  if (a->kind() == NodeKind::Const) return a->value() ? negate(std::move(b)) : b;
  if (b->kind() == NodeKind::Const) return b->value() ? negate(std::move(a)) : a;
  return Node::make(NodeKind::Xor, {std::move(a), std::move(b)});
}

}  // namespace build

// ---------------------------------------------------------------------------
// Formula

Formula::Formula() : root_(Node::make_const(false)) {}

Formula::Formula(NodePtr root) : root_(std::move(root)) {
  if (!root_) throw std::invalid_argument("null formula root");
  arity_ = root_->max_var();
}

Formula::Formula(NodePtr root, std::uint32_t arity) : root_(std::move(root)), arity_(arity) {
  if (!root_) throw std::invalid_argument("null formula root");
  if (root_->max_var() > arity_) {
    throw ArityMismatch("formula mentions x" + std::to_string(root_->max_var()) + " but arity is " +
                        std::to_string(arity_));
  }
}

namespace {

bool same_tree(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind() || a.value() != b.value() || a.var() != b.var() ||
      a.children().size() != b.children().size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children().size(); ++i) {
    if (!same_tree(*a.children()[i], *b.children()[i])) return false;
  }
  return true;
}

}  // namespace

bool operator==(const Formula& a, const Formula& b) {
  return a.arity_ == b.arity_ && same_tree(*a.root_, *b.root_);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    auto node = parse_or();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_or() {
    std::vector<NodePtr> terms{parse_xor()};
    while (accept('|')) terms.push_back(parse_xor());
    return terms.size() == 1 ? terms.front() : Node::make(NodeKind::Or, std::move(terms));
  }

  NodePtr parse_xor() {
    auto lhs = parse_and();
    while (accept('^')) lhs = Node::make(NodeKind::Xor, {lhs, parse_and()});
    return lhs;
  }

  NodePtr parse_and() {
    std::vector<NodePtr> terms{parse_unary()};
    while (accept('&')) terms.push_back(parse_unary());
    return terms.size() == 1 ? terms.front() : Node::make(NodeKind::And, std::move(terms));
  }

  NodePtr parse_unary() {
    if (accept('!')) return Node::make_not(parse_unary());
    return parse_atom();
  }

  NodePtr parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_or();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (c == '0' || c == '1') {
      ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        --pos_;
        fail("constants are 0 or 1");
      }
      return Node::make_const(c == '1');
    }
    if (c == 'x') {
      std::size_t start = ++pos_;
      std::uint64_t index = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        index = index * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
        if (index > kMaxIndex) fail("variable index too large");
        ++pos_;
      }
      if (pos_ == start) fail("expected a variable index after 'x'");
      if (index == 0) {
        pos_ = start;
        fail("variable indices start at 1");
      }
      return Node::make_var(static_cast<std::uint32_t>(index));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  static constexpr std::uint64_t kMaxIndex = 1U << 24;

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text, std::uint32_t min_arity) {
  auto root = Parser(text).parse();
  return Formula(root, std::max(root->max_var(), min_arity));
}

// ---------------------------------------------------------------------------
// Rendering and evaluation

namespace {

void render_into(const Node& n, std::string& out) {
  switch (n.kind()) {
    case NodeKind::Const:
      out += n.value() ? '1' : '0';
      return;
    case NodeKind::Var:
      out += 'x';
      out += std::to_string(n.var());
      return;
    case NodeKind::Not:
      out += '!';
      render_into(*n.children().front(), out);
      return;
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Xor: {
      const char* sep = n.kind() == NodeKind::And ? " & " : (n.kind() == NodeKind::Or ? " | " : " ^ ");
      out += '(';
      bool first = true;
      for (const auto& c : n.children()) {
        if (!first) out += sep;
        render_into(*c, out);
        first = false;
      }
      out += ')';
      return;
    }
  }
}

bool eval_node(const Node& n, const Assignment& a) {
  switch (n.kind()) {
    case NodeKind::Const:
      return n.value();
    case NodeKind::Var:
      return a[n.var() - 1];
    case NodeKind::Not:
      return !eval_node(*n.children().front(), a);
    case NodeKind::And:
      for (const auto& c : n.children()) {
        if (!eval_node(*c, a)) return false;
      }
      return true;
    case NodeKind::Or:
      for (const auto& c : n.children()) {
        if (eval_node(*c, a)) return true;
      }
      return false;
    case NodeKind::Xor: {
      bool v = false;
      for (const auto& c : n.children()) v ^= eval_node(*c, a);
      return v;
    }
  }
  return false;
}

}  // namespace

std::string render(const NodePtr& node) {
  std::string out;
  render_into(*node, out);
  return out;
}

std::string render(const Formula& f) { return render(f.root()); }

bool evaluate(const Formula& f, const Assignment& a) {
  if (a.size() != f.arity()) {
    throw ArityMismatch("assignment has length " + std::to_string(a.size()) + ", formula arity is " +
                        std::to_string(f.arity()));
  }
  return eval_node(*f.root(), a);
}

// ---------------------------------------------------------------------------
// Circuit and truth tables

namespace detail {

Circuit::Circuit(const Formula& f) : arity_(f.arity()) {
  gates_.reserve(f.size());
  flatten(*f.root());
}

std::uint32_t Circuit::flatten(const Node& node) {
  auto begin = static_cast<std::uint32_t>(gates_.size());
  std::vector<std::uint32_t> kids;
  kids.reserve(node.children().size());
  for (const auto& c : node.children()) kids.push_back(flatten(*c));
  Gate g;
  g.kind = node.kind();
  g.value = node.value();
  g.var = node.kind() == NodeKind::Var ? node.var() - 1 : 0;
  g.first = static_cast<std::uint32_t>(edges_.size());
  g.count = static_cast<std::uint32_t>(kids.size());
  g.begin = begin;
  edges_.insert(edges_.end(), kids.begin(), kids.end());
  gates_.push_back(g);
  return static_cast<std::uint32_t>(gates_.size() - 1);
}

}  // namespace detail

BitVector truth_table(const Formula& f, const TruthTableOptions& options) {
  const auto d = f.arity();
  if (d > options.enumeration_cap) throw CapExceeded("enumeration arity", d, options.enumeration_cap);

  const detail::Circuit circuit(f);
  const std::uint64_t total = std::uint64_t{1} << d;
  BitVector table(static_cast<std::size_t>(total));
  auto words = table.words();
  const std::uint64_t blocks = words.size();
  const std::uint64_t tail_mask = total >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << total) - 1);

  auto work = [&](std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> scratch;
    for (std::uint64_t b = lo; b < hi; ++b) {
      auto var_word = [b](std::uint32_t i) -> std::uint64_t {
        if (i < 6) return detail::kPositionPattern[i];
        return ((b >> (i - 6)) & 1U) ? ~std::uint64_t{0} : 0;
      };
      words[b] = circuit.eval_words(0, circuit.root(), var_word, scratch) & tail_mask;
    }
  };

  const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    work(0, blocks);
  } else {
    // Each worker owns a disjoint word range, so the result is bit-identical
    // to the sequential pass.
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (blocks + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      auto lo = std::min(blocks, t * chunk);
      auto hi = std::min(blocks, lo + chunk);
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return table;
}

// ---------------------------------------------------------------------------
// Rewriting

namespace {

NodePtr rewrite(const NodePtr& node, const std::function<NodePtr(const Node&)>& leaf,
                std::unordered_map<const Node*, NodePtr>& memo) {
  if (auto it = memo.find(node.get()); it != memo.end()) return it->second;
  NodePtr out;
  switch (node->kind()) {
    case NodeKind::Const:
      out = node;
      break;
    case NodeKind::Var:
      out = leaf(*node);
      break;
    default: {
      std::vector<NodePtr> kids;
      kids.reserve(node->children().size());
      bool changed = false;
      for (const auto& c : node->children()) {
        kids.push_back(rewrite(c, leaf, memo));
        changed |= kids.back() != c;
      }
      out = changed ? Node::make(node->kind(), std::move(kids)) : node;
    }
  }
  memo.emplace(node.get(), out);
  return out;
}

}  // namespace

NodePtr substitute(const NodePtr& node, std::span<const NodePtr> replacement) {
  std::unordered_map<const Node*, NodePtr> memo;
  return rewrite(node, [&](const Node& v) -> NodePtr {
    if (v.var() > replacement.size()) throw ArityMismatch("no replacement for x" + std::to_string(v.var()));
    return replacement[v.var() - 1];
  }, memo);
}

Formula substitute(const Formula& f, std::span<const NodePtr> replacement, std::uint32_t new_arity) {
  if (replacement.size() < f.arity()) throw ArityMismatch("replacement list shorter than formula arity");
  return Formula(substitute(f.root(), replacement), new_arity);
}

NodePtr shift_variables(const NodePtr& node, std::uint32_t offset) {
  if (offset == 0) return node;
  std::unordered_map<const Node*, NodePtr> memo;
  return rewrite(node, [&](const Node& v) { return Node::make_var(v.var() + offset); }, memo);
}

std::vector<std::uint32_t> occurring_variables(const NodePtr& node) {
  std::vector<std::uint32_t> vars;
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{node.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->kind() == NodeKind::Var) vars.push_back(n->var());
    for (const auto& c : n->children()) stack.push_back(c.get());
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

}  // namespace deltarel
