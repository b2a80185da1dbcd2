#pragma once

// Test-only oracles, kept independent of the library's computation paths:
// straight-line network evaluation over std::vector, exhaustive 2-D vertex
// enumeration for LP/essentiality checks, and deterministic samplers whose
// output does not depend on the standard library's distribution
// implementations.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pwareach/geometry.hpp"
#include "pwareach/marching.hpp"
#include "pwareach/network.hpp"

namespace oracle {

using pwareach::Layer;
using pwareach::Mat;
using pwareach::Polyhedron;
using pwareach::ReluNetwork;
using pwareach::Vec;

// --------------------------------------------------------------------------
// Deterministic sampling (bit-reproducible across platforms).

inline double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& rng) {
  // Box-Muller; avoids implementation-defined std::normal_distribution.
  double u1 = unit_real(rng);
  while (u1 <= 1e-300) u1 = unit_real(rng);
  const double u2 = unit_real(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline Vec sample_box(std::mt19937_64& rng, const Vec& lo, const Vec& hi) {
  Vec x(lo.size());
  for (int j = 0; j < x.size(); ++j)
    x(j) = lo(j) + unit_real(rng) * (hi(j) - lo(j));
  return x;
}

// --------------------------------------------------------------------------
// Independent forward pass: plain loops over std::vector, no Eigen and no
// homogeneous-form machinery.

inline std::vector<double> forward_pass(const ReluNetwork& net,
                                        const std::vector<double>& x) {
  std::vector<double> z = x;
  const auto& layers = net.layers();
  for (size_t i = 0; i < layers.size(); ++i) {
    const auto& W = layers[i].weights;
    const auto& b = layers[i].bias;
    std::vector<double> next(static_cast<size_t>(W.rows()));
    for (int r = 0; r < W.rows(); ++r) {
      double acc = b(r);
      for (int c = 0; c < W.cols(); ++c) acc += W(r, c) * z[static_cast<size_t>(c)];
      next[static_cast<size_t>(r)] = acc;
    }
    if (i + 1 < layers.size())
      for (auto& v : next) v = v > 0.0 ? v : 0.0;
    z = std::move(next);
  }
  return z;
}

// Per-layer preactivation signs from the same straight-line pass.
inline std::vector<int> forward_pattern(const ReluNetwork& net,
                                        const std::vector<double>& x) {
  std::vector<int> bits;
  std::vector<double> z = x;
  const auto& layers = net.layers();
  for (size_t i = 0; i + 1 < layers.size(); ++i) {
    const auto& W = layers[i].weights;
    const auto& b = layers[i].bias;
    std::vector<double> next(static_cast<size_t>(W.rows()));
    for (int r = 0; r < W.rows(); ++r) {
      double acc = b(r);
      for (int c = 0; c < W.cols(); ++c) acc += W(r, c) * z[static_cast<size_t>(c)];
      next[static_cast<size_t>(r)] = acc;
      bits.push_back(acc > 0.0 ? 1 : 0);
    }
    for (auto& v : next) v = v > 0.0 ? v : 0.0;
    z = std::move(next);
  }
  return bits;
}

// --------------------------------------------------------------------------
// Exhaustive 2-D polytope oracles via constraint-pair intersections.

inline std::vector<Vec> vertices_2d(const Polyhedron& p, double feas_tol = 1e-7) {
  std::vector<Vec> verts;
  const int m = p.size();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const Vec& a1 = p.constraint(i).normal;
      const Vec& a2 = p.constraint(j).normal;
      const double det = a1(0) * a2(1) - a1(1) * a2(0);
      if (std::abs(det) < 1e-10) continue;
      Vec v(2);
      v(0) = (p.constraint(i).offset * a2(1) - p.constraint(j).offset * a1(1)) / det;
      v(1) = (a1(0) * p.constraint(j).offset - a2(0) * p.constraint(i).offset) / det;
      if (!p.contains(v, feas_tol)) continue;
      bool known = false;
      for (const auto& w : verts)
        if ((w - v).lpNorm<Eigen::Infinity>() <= 1e-7) known = true;
      if (!known) verts.push_back(std::move(v));
    }
  }
  return verts;
}

// Essential facets of a full-dimensional bounded 2-D polytope: constraints
// active at two or more distinct vertices.
inline std::vector<int> essential_facets_2d(const Polyhedron& p,
                                            double active_tol = 1e-7) {
  const auto verts = vertices_2d(p);
  std::vector<int> out;
  for (int i = 0; i < p.size(); ++i) {
    int active = 0;
    for (const auto& v : verts)
      if (std::abs(p.constraint(i).normal.dot(v) - p.constraint(i).offset) <=
          active_tol)
        ++active;
    if (active >= 2) out.push_back(i);
  }
  return out;
}

// Maximum of a linear objective over a bounded 2-D polytope: scan vertices.
inline double max_over_vertices_2d(const Polyhedron& p, const Vec& c) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices_2d(p)) best = std::max(best, c.dot(v));
  return best;
}

// Random bounded full-dimensional 2-D polytope: the [-1, 1] box plus
// random cuts that keep a ball around the origin.
inline Polyhedron random_polytope_2d(std::mt19937_64& rng, int cuts) {
  Vec lo = Vec::Constant(2, -1.0), hi = Vec::Constant(2, 1.0);
  Polyhedron p = Polyhedron::box(lo, hi);
  for (int k = 0; k < cuts; ++k) {
    const double th = unit_real(rng) * 2.0 * M_PI;
    const double r = 0.3 + 0.9 * unit_real(rng);
    Vec a(2);
    a << std::cos(th), std::sin(th);
    p.add({a, r});
  }
  return p;
}

// --------------------------------------------------------------------------
// Network builders.

inline ReluNetwork random_net(std::uint64_t seed, const std::vector<int>& sizes,
                              double weight_scale = 1.0, double bias_scale = 0.5) {
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  for (size_t i = 0; i + 1 < sizes.size(); ++i) {
    const int fan_in = sizes[i];
    const int fan_out = sizes[i + 1];
    Mat w(fan_out, fan_in);
    Vec b(fan_out);
    const double s = weight_scale * std::sqrt(2.0 / fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = s * gaussian(rng);
      b(r) = bias_scale * gaussian(rng);
    }
    layers.push_back({std::move(w), std::move(b)});
  }
  return ReluNetwork(std::move(layers));
}

// y = relu(x), scalar.
inline ReluNetwork relu_scalar_net() {
  Mat w1(1, 1), w2(1, 1);
  w1 << 1.0;
  w2 << 1.0;
  return ReluNetwork({{w1, Vec::Zero(1)}, {w2, Vec::Zero(1)}});
}

// y = x in n dimensions via relu(x) - relu(-x).
inline ReluNetwork identity_net(int n) {
  Mat w1(2 * n, n);
  w1 << Mat::Identity(n, n), -Mat::Identity(n, n);
  Mat w2(n, 2 * n);
  w2 << Mat::Identity(n, n), -Mat::Identity(n, n);
  return ReluNetwork({{w1, Vec::Zero(2 * n)}, {w2, Vec::Zero(n)}});
}

// y_i = |x_i| via relu(x) + relu(-x).
inline ReluNetwork absval_net(int n) {
  Mat w1(2 * n, n);
  w1 << Mat::Identity(n, n), -Mat::Identity(n, n);
  Mat w2(n, 2 * n);
  w2 << Mat::Identity(n, n), Mat::Identity(n, n);
  return ReluNetwork({{w1, Vec::Zero(2 * n)}, {w2, Vec::Zero(n)}});
}

// x+ = clamp(gain * x, -1, 1) per coordinate:
// clamp(y) = relu(y + 1) - relu(y - 1) - 1.
inline ReluNetwork saturated_linear_net(int n, double gain) {
  Mat w1(2 * n, n);
  Vec b1(2 * n);
  Mat w2(n, 2 * n);
  Vec b2(n);
  w1.setZero();
  w2.setZero();
  for (int i = 0; i < n; ++i) {
    w1(2 * i, i) = gain;
    b1(2 * i) = 1.0;
    w1(2 * i + 1, i) = gain;
    b1(2 * i + 1) = -1.0;
    w2(i, 2 * i) = 1.0;
    w2(i, 2 * i + 1) = -1.0;
    b2(i) = -1.0;
  }
  return ReluNetwork({{w1, b1}, {w2, b2}});
}

// Near-identity residual net F(x) = x + eps * G(x) in 2-D with two hidden
// layers; G's scale keeps every Jacobian close to the identity, so F is a
// homeomorphism. Hidden sizes are k + 4 per layer (k nonlinear neurons plus
// a +-x passthrough pair).
inline ReluNetwork residual_homeo_net(std::uint64_t seed, int k, double eps,
                                      double weight_scale, double bias_scale) {
  std::mt19937_64 rng(seed);
  const int n = 2;
  auto gauss_mat = [&](int r, int c, double s) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = s * gaussian(rng);
    return m;
  };
  auto gauss_vec = [&](int r, double s) {
    Vec v(r);
    for (int i = 0; i < r; ++i) v(i) = s * gaussian(rng);
    return v;
  };

  // Layer 1: [G1 x + c1; x; -x]
  const Mat g1 = gauss_mat(k, n, weight_scale / std::sqrt(double(n)));
  const Vec c1 = gauss_vec(k, bias_scale);
  Mat w1 = Mat::Zero(k + 2 * n, n);
  Vec b1 = Vec::Zero(k + 2 * n);
  w1.topRows(k) = g1;
  b1.head(k) = c1;
  w1.block(k, 0, n, n) = Mat::Identity(n, n);
  w1.block(k + n, 0, n, n) = -Mat::Identity(n, n);

  // Layer 2: [G2 h + c2; x; -x] where x = h[k..k+n) - h[k+n..k+2n).
  const Mat g2 = gauss_mat(k, k, weight_scale / std::sqrt(double(k)));
  const Vec c2 = gauss_vec(k, bias_scale);
  Mat w2 = Mat::Zero(k + 2 * n, k + 2 * n);
  Vec b2 = Vec::Zero(k + 2 * n);
  w2.topLeftCorner(k, k) = g2;
  b2.head(k) = c2;
  w2.block(k, k, n, n) = Mat::Identity(n, n);
  w2.block(k, k + n, n, n) = -Mat::Identity(n, n);
  w2.block(k + n, k, n, n) = -Mat::Identity(n, n);
  w2.block(k + n, k + n, n, n) = Mat::Identity(n, n);

  // Output: x + eps * (W3 g + c3).
  const Mat g3 = gauss_mat(n, k, 1.0 / std::sqrt(double(k)));
  const Vec c3 = gauss_vec(n, 0.2);
  Mat w3 = Mat::Zero(n, k + 2 * n);
  w3.leftCols(k) = eps * g3;
  w3.block(0, k, n, n) = Mat::Identity(n, n);
  w3.block(0, k + n, n, n) = -Mat::Identity(n, n);
  return ReluNetwork({{w1, b1}, {w2, b2}, {w3, eps * c3}});
}

// --------------------------------------------------------------------------
// Facet probes shared by the marching tests and the acceptance suite.

// Interior point of facet i of poly: slack maximization within the facet.
struct FacetPoint {
  bool ok = false;
  Vec point;
  double clearance = 0.0;
};

inline FacetPoint facet_interior_point(const Polyhedron& poly, int facet) {
  const int n = poly.dim();
  const int m = poly.size();
  pwareach::Mat A = pwareach::Mat::Zero(m + 1, n + 1);
  Vec b(m + 1);
  for (int j = 0; j < m; ++j) {
    A.block(j, 0, 1, n) = poly.constraint(j).normal.transpose();
    A(j, n) = j == facet ? 0.0 : 1.0;
    b(j) = poly.constraint(j).offset;
  }
  A.block(m, 0, 1, n) = -poly.constraint(facet).normal.transpose();
  A(m, n) = 0.0;
  b(m) = -poly.constraint(facet).offset;
  Vec c = Vec::Zero(n + 1);
  c(n) = 1.0;
  const pwareach::LpOutcome lp = pwareach::solve_lp(c, A, b);
  FacetPoint fp;
  if (lp.status != pwareach::LpStatus::Optimal || lp.value <= 1e-7) return fp;
  fp.ok = true;
  fp.point = lp.point.head(n);
  fp.clearance = lp.value;
  return fp;
}

// Cross-facet probe: steps off the facet on both sides, shrinking the step
// until the inner side reproduces the region's own pattern.
struct CrossFacet {
  bool probed = false;
  pwareach::ActivationPattern inside, outside;
};

inline CrossFacet cross_facet_patterns(const ReluNetwork& net,
                                       const pwareach::Region& region, int facet) {
  CrossFacet out;
  const FacetPoint fp = facet_interior_point(region.poly, facet);
  if (!fp.ok) return out;
  const Vec normal = region.poly.constraint(facet).normal;
  double step = 1e-5;
  for (int attempt = 0; attempt < 4; ++attempt, step *= 0.1) {
    const pwareach::ActivationPattern inner =
        pwareach::activation_pattern(net, fp.point - step * normal);
    if (!(inner == region.pattern)) continue;
    out.probed = true;
    out.inside = inner;
    out.outside = pwareach::activation_pattern(net, fp.point + step * normal);
    return out;
  }
  return out;
}

}  // namespace oracle
