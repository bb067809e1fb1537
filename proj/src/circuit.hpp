#pragma once

// Flattened postorder form of a Formula, shared by the truth-table, counting
// and sampling back-ends. Not part of the public interface.

#include "deltarel/formula.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace deltarel::detail {

// Word patterns for the first six positions: bit j of pattern[i] is bit i of j.
inline constexpr std::uint64_t kPositionPattern[6] = {
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL,
};

struct Gate {
  NodeKind kind = NodeKind::Const;
  bool value = false;
  std::uint32_t var = 0;    // zero-based position (Var)
  std::uint32_t first = 0;  // offset into Circuit::edges
  std::uint32_t count = 0;  // number of children
  std::uint32_t begin = 0;  // first gate of this gate's subtree
};

class Circuit {
 public:
  explicit Circuit(const Formula& f);

  std::uint32_t arity() const { return arity_; }
  std::uint32_t root() const { return static_cast<std::uint32_t>(gates_.size() - 1); }
  std::size_t size() const { return gates_.size(); }
  const Gate& gate(std::uint32_t g) const { return gates_[g]; }
  std::span<const std::uint32_t> children(std::uint32_t g) const {
    return {edges_.data() + gates_[g].first, gates_[g].count};
  }

  // Evaluates gates [begin, last] on 64 inputs at once; var_word(position)
  // supplies the input word. Returns the word of gate `last`.
  template <class VarWord>
  std::uint64_t eval_words(std::uint32_t begin, std::uint32_t last, VarWord&& var_word,
                           std::vector<std::uint64_t>& scratch) const {
    scratch.resize(last - begin + 1);
    for (std::uint32_t g = begin; g <= last; ++g) {
      const Gate& gt = gates_[g];
      std::uint64_t w = 0;
      switch (gt.kind) {
        case NodeKind::Const:
          w = gt.value ? ~std::uint64_t{0} : 0;
          break;
        case NodeKind::Var:
          w = var_word(gt.var);
          break;
        case NodeKind::Not:
          w = ~scratch[edges_[gt.first] - begin];
          break;
        case NodeKind::And:
          w = ~std::uint64_t{0};
          for (auto c : children(g)) w &= scratch[c - begin];
          break;
        case NodeKind::Or:
          for (auto c : children(g)) w |= scratch[c - begin];
          break;
        case NodeKind::Xor:
          for (auto c : children(g)) w ^= scratch[c - begin];
          break;
      }
      scratch[g - begin] = w;
    }
    return scratch[last - begin];
  }

 private:
  std::uint32_t flatten(const Node& node);

  std::uint32_t arity_ = 0;
  std::vector<Gate> gates_;
  std::vector<std::uint32_t> edges_;
};

}  // namespace deltarel::detail
