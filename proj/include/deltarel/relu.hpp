#pragma once

#include "deltarel/bits.hpp"
#include "deltarel/formula.hpp"

#include <cstdint>
#include <vector>

namespace deltarel {

/// Affine map from the previous layer; row r of `weights` feeds neuron r.
struct ReluLayer {
  std::vector<std::vector<std::int64_t>> weights;
  std::vector<std::int64_t> bias;
};

/// Feed-forward network on d inputs. Every layer but the last applies
/// max(., 0); the last has one linear output, thresholded at 1/2.
struct ReluNetwork {
  std::uint32_t inputs = 0;
  std::vector<ReluLayer> layers;

  std::size_t hidden_layers() const { return layers.empty() ? 0 : layers.size() - 1; }
  std::size_t neurons() const;
  /// Throws std::logic_error if the layer shapes do not chain.
  void validate() const;
  /// The raw output before thresholding.
  std::int64_t forward(const Assignment& a) const;
  bool evaluate(const Assignment& a) const { return 2 * forward(a) >= 1; }
};

/// Gates become NOT(z) = 1 - z, AND(a, b) = max(a + b - 1, 0) and
/// OR(a, b) = 1 - max(1 - a - b, 0); XOR expands to (a | b) & !(a & b) and
/// wide gates fold as balanced binary trees. Values needed later pass
/// through max(z, 0) = z. There is always at least one hidden layer.
ReluNetwork compile_to_relu(const Formula& f);

}  // namespace deltarel
