#pragma once

#include "deltarel/bits.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace deltarel {

enum class NodeKind : std::uint8_t { Const, Var, Not, And, Or, Xor };

class Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable expression node. Subtrees may be shared between formulas.
class Node {
 public:
  NodeKind kind() const { return kind_; }
  /// Const only.
  bool value() const { return value_; }
  /// Var only; one-based, x1 is 1.
  std::uint32_t var() const { return var_; }
  const std::vector<NodePtr>& children() const { return children_; }

  /// Largest variable index in the subtree, 0 if none.
  std::uint32_t max_var() const { return max_var_; }
  /// Number of nodes in the subtree, counting shared subtrees once per use.
  std::size_t size() const { return size_; }

  static NodePtr make_const(bool value);
  static NodePtr make_var(std::uint32_t index);
  static NodePtr make_not(NodePtr child);
  /// And/Or need at least two children, Xor exactly two.
  static NodePtr make(NodeKind kind, std::vector<NodePtr> children);

 private:
  Node() = default;

  NodeKind kind_ = NodeKind::Const;
  bool value_ = false;
  std::uint32_t var_ = 0;
  std::uint32_t max_var_ = 0;
  std::size_t size_ = 1;
  std::vector<NodePtr> children_;
};

// Builders used by the constructions. They fold constants and collapse
// degenerate arities, so they never produce a one-child And/Or.
namespace build {
NodePtr constant(bool value);
NodePtr var(std::uint32_t index);
NodePtr negate(NodePtr a);
NodePtr all_of(std::vector<NodePtr> terms);
NodePtr any_of(std::vector<NodePtr> terms);
NodePtr exclusive(NodePtr a, NodePtr b);
NodePtr literal(std::uint32_t index, bool positive);
}  // namespace build

/// A Boolean function on {0,1}^d given by an expression over x1..xd.
///
/// The arity defaults to the largest variable index but may be larger, so
/// that e.g. a constant can be treated as a function of four inputs.
class Formula {
 public:
  Formula();
  explicit Formula(NodePtr root);
  Formula(NodePtr root, std::uint32_t arity);

  const NodePtr& root() const { return root_; }
  std::uint32_t arity() const { return arity_; }
  std::size_t size() const { return root_->size(); }

  /// Structural equality, including arity.
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  NodePtr root_;
  std::uint32_t arity_ = 0;
};

/// Grammar, whitespace-insensitive, precedence ! > & > ^ > |:
///   or   := xor ('|' xor)*
///   xor  := and ('^' and)*        (left-associative, binary)
///   and  := unary ('&' unary)*
///   unary:= '!' unary | atom
///   atom := 'x' <positive integer> | '0' | '1' | '(' or ')'
/// Throws ParseError with the byte offset of the problem.
/// The arity is max(largest index, min_arity).
Formula parse(std::string_view text, std::uint32_t min_arity = 0);

/// Fully parenthesised text that parses back to the same tree.
std::string render(const Formula& f);
std::string render(const NodePtr& node);

/// Throws ArityMismatch unless a.size() == f.arity().
bool evaluate(const Formula& f, const Assignment& a);

struct TruthTableOptions {
  std::uint32_t enumeration_cap = 26;
  unsigned threads = 1;
};

/// Bit j is f evaluated at the assignment whose position i is bit i of j
/// (x1 is the least significant bit). Evaluated 64 assignments per word.
/// Throws CapExceeded when the arity is above the cap.
BitVector truth_table(const Formula& f, const TruthTableOptions& options = {});

/// Replaces every x_i by replacement[i-1]. The result has the given arity.
Formula substitute(const Formula& f, std::span<const NodePtr> replacement, std::uint32_t new_arity);
NodePtr substitute(const NodePtr& node, std::span<const NodePtr> replacement);

/// Renames x_i to x_{i+offset}.
NodePtr shift_variables(const NodePtr& node, std::uint32_t offset);

/// Sorted, distinct one-based indices of the variables that occur in the node.
std::vector<std::uint32_t> occurring_variables(const NodePtr& node);

}  // namespace deltarel
