#include "deltarel/relu.hpp"

#include "deltarel/errors.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace deltarel {

std::size_t ReluNetwork::neurons() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) n += layers[l].bias.size();
  return n;
}

void ReluNetwork::validate() const {
  if (layers.size() < 2) throw std::logic_error("network needs a hidden layer and an output layer");
  std::size_t width = inputs;
  for (const auto& layer : layers) {
    if (layer.weights.size() != layer.bias.size()) throw std::logic_error("bias length differs from row count");
    for (const auto& row : layer.weights) {
      if (row.size() != width) throw std::logic_error("weight row does not match the previous layer width");
    }
    width = layer.bias.size();
  }
  if (width != 1) throw std::logic_error("output layer must have one neuron");
}

std::int64_t ReluNetwork::forward(const Assignment& a) const {
  if (a.size() != inputs) {
    throw ArityMismatch("input has length " + std::to_string(a.size()) + " but the network has " +
                        std::to_string(inputs) + " inputs");
  }
  std::vector<std::int64_t> cur(inputs), next;
  for (std::uint32_t i = 0; i < inputs; ++i) cur[i] = a[i];
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    next.assign(layer.bias.begin(), layer.bias.end());
    for (std::size_t r = 0; r < next.size(); ++r) {
      const auto& row = layer.weights[r];
      for (std::size_t c = 0; c < row.size(); ++c) next[r] += row[c] * cur[c];
      if (l + 1 < layers.size()) next[r] = std::max<std::int64_t>(next[r], 0);
    }
    cur.swap(next);
  }
  return cur[0];
}

namespace {

/// c + sum w_j h_j over the neurons h of one layer (layer 0 is the input).
struct Affine {
  std::int64_t c = 0;
  std::map<std::uint32_t, std::int64_t> terms;
  std::uint32_t layer = 0;
};

class Compiler {
 public:
  explicit Compiler(std::uint32_t inputs) : inputs_(inputs) {}

  ReluNetwork finish(const NodePtr& root) {
    const auto top = std::max<std::uint32_t>(level(root), 1);
    Affine out = at(root, top);
    if (hidden_.empty()) out = neuron(1, out);
    ReluNetwork net;
    net.inputs = inputs_;
    std::size_t width = inputs_;
    for (auto& rows : hidden_) {
      ReluLayer layer;
      for (const auto& a : rows) {
        std::vector<std::int64_t> w(width, 0);
        for (auto [j, v] : a.terms) w[j] = v;
        layer.weights.push_back(std::move(w));
        layer.bias.push_back(a.c);
      }
      width = rows.size();
      net.layers.push_back(std::move(layer));
    }
    ReluLayer output;
    std::vector<std::int64_t> w(width, 0);
    for (auto [j, v] : out.terms) w[j] = v;
    output.weights.push_back(std::move(w));
    output.bias.push_back(out.c);
    net.layers.push_back(std::move(output));
    net.validate();
    return net;
  }

  /// Rewrites to binary And/Or, Not, Var and Const.
  NodePtr binarize(const NodePtr& n) {
    if (auto it = binary_.find(n.get()); it != binary_.end()) return it->second;
    NodePtr out;
    switch (n->kind()) {
      case NodeKind::Const:
      case NodeKind::Var:
        out = n;
        break;
      case NodeKind::Not:
        out = Node::make_not(binarize(n->children()[0]));
        break;
      case NodeKind::Xor: {
        auto a = binarize(n->children()[0]);
        auto b = binarize(n->children()[1]);
        out = Node::make(NodeKind::And, {Node::make(NodeKind::Or, {a, b}),
                                         Node::make_not(Node::make(NodeKind::And, {a, b}))});
        break;
      }
      case NodeKind::And:
      case NodeKind::Or: {
        std::vector<NodePtr> kids;
        for (const auto& c : n->children()) kids.push_back(binarize(c));
        out = fold(n->kind(), kids, 0, kids.size());
        break;
      }
    }
    keep_.push_back(n);
    binary_.emplace(n.get(), out);
    return out;
  }

 private:
  NodePtr fold(NodeKind kind, const std::vector<NodePtr>& kids, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return kids[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return Node::make(kind, {fold(kind, kids, lo, mid), fold(kind, kids, mid, hi)});
  }

  std::uint32_t level(const NodePtr& n) {
    if (auto it = level_.find(n.get()); it != level_.end()) return it->second;
    std::uint32_t l = 0;
    switch (n->kind()) {
      case NodeKind::Const:
      case NodeKind::Var:
        break;
      case NodeKind::Not:
        l = level(n->children()[0]);
        break;
      default:
        l = 1 + std::max(level(n->children()[0]), level(n->children()[1]));
    }
    level_.emplace(n.get(), l);
    return l;
  }

  /// One neuron in hidden layer `layer` (one-based) reading `in`.
  Affine neuron(std::uint32_t layer, const Affine& in) {
    if (hidden_.size() < layer) hidden_.resize(layer);
    hidden_[layer - 1].push_back(in);
    Affine h;
    h.layer = layer;
    h.terms[static_cast<std::uint32_t>(hidden_[layer - 1].size() - 1)] = 1;
    return h;
  }

  static Affine combine(const Affine& a, std::int64_t sa, const Affine& b, std::int64_t sb, std::int64_t c) {
    Affine out;
    out.c = c + sa * a.c + sb * b.c;
    out.terms = a.terms;
    for (auto& [j, v] : out.terms) v *= sa;
    for (auto [j, v] : b.terms) out.terms[j] += sb * v;
    std::erase_if(out.terms, [](const auto& t) { return t.second == 0; });
    return out;
  }

  /// Value of n as an affine form over hidden layer L, L >= level(n).
  Affine at(const NodePtr& n, std::uint32_t L) {
    auto key = std::make_pair(n.get(), L);
    if (auto it = at_.find(key); it != at_.end()) return it->second;
    Affine out;
    const auto own = level(n);
    if (n->kind() == NodeKind::Const) {
      out.c = n->value();
      out.layer = L;
    } else if (L > own) {
      out = neuron(L, at(n, L - 1));
    } else {
      switch (n->kind()) {
        case NodeKind::Var:
          out.terms[n->var() - 1] = 1;
          break;
        case NodeKind::Not: {
          Affine zero;
          out = combine(at(n->children()[0], L), -1, zero, 0, 1);
          out.layer = L;
          break;
        }
        case NodeKind::And: {
          auto a = at(n->children()[0], L - 1), b = at(n->children()[1], L - 1);
          out = neuron(L, combine(a, 1, b, 1, -1));
          break;
        }
        case NodeKind::Or: {
          auto a = at(n->children()[0], L - 1), b = at(n->children()[1], L - 1);
          auto h = neuron(L, combine(a, -1, b, -1, 1));
          out = combine(h, -1, Affine{}, 0, 1);
          out.layer = L;
          break;
        }
        default:
          throw std::logic_error("unexpected gate after binarization");
      }
    }
    at_.emplace(key, out);
    return out;
  }

  std::uint32_t inputs_;
  std::vector<std::vector<Affine>> hidden_;
  std::unordered_map<const Node*, NodePtr> binary_;
  std::vector<NodePtr> keep_;
  std::unordered_map<const Node*, std::uint32_t> level_;
  std::map<std::pair<const Node*, std::uint32_t>, Affine> at_;
};

}  // namespace

ReluNetwork compile_to_relu(const Formula& f) {
  Compiler c(f.arity());
  return c.finish(c.binarize(f.root()));
}

}  // namespace deltarel
