#include "pwareach/network.hpp"

#include <cmath>

namespace pwareach {

ReluNetwork::ReluNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidInputError("network: needs at least one layer");
  for (size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.weights.rows() != l.bias.size())
      throw InvalidInputError("network: weight rows != bias length");
    if (i > 0 && l.weights.cols() != layers_[i - 1].weights.rows())
      throw InvalidInputError("network: consecutive layer dimensions do not chain");
  }
  input_dim_ = static_cast<int>(layers_.front().weights.cols());
  output_dim_ = static_cast<int>(layers_.back().weights.rows());
  hidden_offsets_.resize(layers_.size() - 1);
  for (size_t i = 0; i + 1 < layers_.size(); ++i) {
    hidden_offsets_[i] = hidden_total_;
    hidden_total_ += static_cast<int>(layers_[i].bias.size());
  }
}

Vec ReluNetwork::evaluate(const Vec& x) const {
  if (x.size() != input_dim_)
    throw InvalidInputError("network: input dimension mismatch");
  Vec z = x;
  for (int i = 0; i < num_layers(); ++i) {
    z = layers_[i].weights * z + layers_[i].bias;
    if (i + 1 < num_layers()) z = z.cwiseMax(0.0);
  }
  return z;
}

std::string ActivationPattern::key() const {
  std::string k((bits.size() + 7) / 8, '\0');
  for (size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) k[i / 8] |= static_cast<char>(1 << (i % 8));
  return k;
}

std::string ActivationPattern::to_string() const {
  std::string s(bits.size(), '0');
  for (size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) s[i] = '1';
  return s;
}

ActivationPattern ActivationPattern::from_string(const std::string& s) {
  ActivationPattern p;
  p.bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1')
      throw InvalidInputError("pattern: bitstring must contain only 0/1");
    p.bits.push_back(c == '1' ? 1 : 0);
  }
  return p;
}

ActivationPattern activation_pattern(const ReluNetwork& net, const Vec& x) {
  if (x.size() != net.input_dim())
    throw InvalidInputError("network: input dimension mismatch");
  ActivationPattern p;
  p.bits.reserve(net.num_hidden_neurons());
  Vec z = x;
  for (int i = 0; i < net.num_hidden_layers(); ++i) {
    const Vec pre = net.layer(i).weights * z + net.layer(i).bias;
    for (int j = 0; j < pre.size(); ++j)
      p.bits.push_back(pre(j) > 0.0 ? 1 : 0);  // boundary (exactly 0) maps to 0
    z = pre.cwiseMax(0.0);
  }
  return p;
}

namespace {

// Normalization with the activation-dependent sign flip. The flip is applied
// in the degenerate branch as well, so a constant-positive neuron yields a
// trivially satisfied constraint rather than a spurious empty marker.
Halfspace normalize_neuron(const Vec& raw_a, double raw_b, std::uint8_t bit,
                           double eps_norm) {
  const double s = bit ? -1.0 : 1.0;
  const double na = raw_a.norm();
  if (na <= eps_norm) return {Vec::Zero(raw_a.size()), s * raw_b};
  return {s * raw_a / na, s * raw_b / na};
}

// Homogeneous layer matrix [W b; 0 1] for hidden layers.
Mat homogeneous(const Layer& l) {
  const int r = static_cast<int>(l.weights.rows());
  const int c = static_cast<int>(l.weights.cols());
  Mat h = Mat::Zero(r + 1, c + 1);
  h.topLeftCorner(r, c) = l.weights;
  h.col(c).head(r) = l.bias;
  h(r, c) = 1.0;
  return h;
}

}  // namespace

std::vector<NeuronHalfspace> neuron_halfspaces(const ReluNetwork& net,
                                               const ActivationPattern& pattern,
                                               const Tolerances& tol) {
  if (pattern.size() != net.num_hidden_neurons())
    throw InvalidInputError("network: pattern length mismatch");
  const int n = net.input_dim();
  std::vector<NeuronHalfspace> out;
  out.reserve(pattern.size());

  // prefix = Lambda_(i-1) Theta_(i-1) ... Lambda_(1) Theta_(1), homogeneous.
  Mat prefix = Mat::Identity(n + 1, n + 1);
  for (int i = 0; i < net.num_hidden_layers(); ++i) {
    const Layer& l = net.layer(i);
    const Mat rows = homogeneous(l) * prefix;  // (l_i + 1) x (n + 1)
    for (int j = 0; j < l.bias.size(); ++j) {
      NeuronHalfspace h;
      h.layer = i;
      h.index = j;
      h.raw_normal = rows.row(j).head(n).transpose();
      h.raw_offset = -rows(j, n);
      const std::uint8_t bit = pattern.bits[net.neuron_index(i, j)];
      h.normalized = normalize_neuron(h.raw_normal, h.raw_offset, bit, tol.norm);
      out.push_back(std::move(h));
    }
    Mat next = rows;
    for (int j = 0; j < l.bias.size(); ++j)
      if (!pattern.bits[net.neuron_index(i, j)]) next.row(j).setZero();
    prefix = std::move(next);
  }
  return out;
}

AffineMap affine_map_for(const ReluNetwork& net, const ActivationPattern& pattern) {
  if (pattern.size() != net.num_hidden_neurons())
    throw InvalidInputError("network: pattern length mismatch");
  const int n = net.input_dim();
  Mat prefix = Mat::Identity(n + 1, n + 1);
  for (int i = 0; i < net.num_hidden_layers(); ++i) {
    Mat rows = homogeneous(net.layer(i)) * prefix;
    for (int j = 0; j < net.layer(i).bias.size(); ++j)
      if (!pattern.bits[net.neuron_index(i, j)]) rows.row(j).setZero();
    prefix = std::move(rows);
  }
  const Layer& last = net.layers().back();
  Mat theta_out(last.weights.rows(), last.weights.cols() + 1);
  theta_out << last.weights, last.bias;
  const Mat cd = theta_out * prefix;
  return {cd.leftCols(n), cd.col(n)};
}

ReluNetwork concatenate(const ReluNetwork& net, int steps) {
  if (steps < 1) throw InvalidInputError("concatenate: steps must be positive");
  if (net.input_dim() != net.output_dim())
    throw InvalidInputError("concatenate: network must be square");
  if (steps == 1) return net;

  const auto& src = net.layers();
  const int L = net.num_layers();

  if (L == 1) {
    // Pure affine net: compose directly.
    Mat w = src[0].weights;
    Vec b = src[0].bias;
    for (int t = 1; t < steps; ++t) {
      b = src[0].weights * b + src[0].bias;
      w = src[0].weights * w;
    }
    return ReluNetwork({{w, b}});
  }

  std::vector<Layer> layers;
  for (int t = 0; t < steps; ++t) {
    if (t == 0) {
      for (int i = 0; i + 1 < L; ++i) layers.push_back(src[i]);
    } else {
      // Fold the previous copy's affine output layer into this copy's first
      // hidden layer; the merged layer stays a ReLU layer.
      const Layer& out = src[L - 1];
      const Layer& first = src[0];
      layers.push_back({first.weights * out.weights,
                        first.weights * out.bias + first.bias});
      for (int i = 1; i + 1 < L; ++i) layers.push_back(src[i]);
    }
  }
  layers.push_back(src[L - 1]);
  return ReluNetwork(std::move(layers));
}

}  // namespace pwareach
