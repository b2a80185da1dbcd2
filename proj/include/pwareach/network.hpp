#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwareach/geometry.hpp"
#include "pwareach/types.hpp"

namespace pwareach {

struct Layer {
  Mat weights;  // rows = output neurons
  Vec bias;
};

/// Feedforward network with ReLU hidden activations and an affine output
/// layer. Immutable after construction; all queries are pure.
class ReluNetwork {
 public:
  explicit ReluNetwork(std::vector<Layer> layers);

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  int num_hidden_layers() const { return num_layers() - 1; }
  int num_hidden_neurons() const { return hidden_total_; }
  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(int i) const { return layers_[i]; }
  /// Flat index of neuron j in hidden layer i (layer-major order).
  int neuron_index(int layer, int j) const { return hidden_offsets_[layer] + j; }
  int hidden_size(int layer) const {
    return static_cast<int>(layers_[layer].bias.size());
  }

  Vec evaluate(const Vec& x) const;

 private:
  std::vector<Layer> layers_;
  std::vector<int> hidden_offsets_;
  int input_dim_ = 0;
  int output_dim_ = 0;
  int hidden_total_ = 0;
};

/// One bit per hidden neuron in layer-major order; bit = 1 iff the
/// preactivation is strictly positive.
struct ActivationPattern {
  std::vector<std::uint8_t> bits;

  int size() const { return static_cast<int>(bits.size()); }
  bool operator==(const ActivationPattern& o) const { return bits == o.bits; }
  /// Compact byte key for hashing/visited-set storage.
  std::string key() const;
  std::string to_string() const;  // "0101..." in flat order
  static ActivationPattern from_string(const std::string& s);
};

ActivationPattern activation_pattern(const ReluNetwork& net, const Vec& x);

/// Halfspace induced by one hidden neuron under a fixed activation pattern.
/// The raw pair satisfies z_pre(x) = raw_normal . x - raw_offset inside the
/// pattern's region; `normalized` carries the activation-dependent sign so
/// that the region satisfies normalized.normal . x <= normalized.offset.
struct NeuronHalfspace {
  int layer = 0;
  int index = 0;
  Vec raw_normal;
  double raw_offset = 0.0;
  Halfspace normalized;
};

/// Halfspaces of every hidden neuron under `pattern`, flat order. Degenerate
/// constraints (zero normal) are retained; downstream code decides their
/// disposition.
std::vector<NeuronHalfspace> neuron_halfspaces(const ReluNetwork& net,
                                               const ActivationPattern& pattern,
                                               const Tolerances& tol = {});

/// The affine map the network reduces to on the region of `pattern`.
AffineMap affine_map_for(const ReluNetwork& net, const ActivationPattern& pattern);

/// The network computing `steps` self-compositions of `net` (square nets
/// only). Has steps * r hidden neurons when net has r.
ReluNetwork concatenate(const ReluNetwork& net, int steps);

}  // namespace pwareach
