#pragma once

#include <optional>
#include <vector>

#include "pwareach/marching.hpp"

namespace pwareach {

struct FixedPoint {
  Vec point;
  int region_index = -1;
  bool stable = false;
  double spectral_radius = 0.0;
};

/// Solves (I - C_k) x = d_k per region and keeps solutions that are unique
/// (well-conditioned I - C_k) and strictly interior to their region.
std::vector<FixedPoint> find_fixed_points(const PwaFunction& pwa,
                                          const Tolerances& tol = {});

/// Invariant polyhedral neighborhood of a stable fixed point, contained in
/// the fixed point's region. Built from a box in Lyapunov coordinates,
/// refined with backward images of the box until invariance is guaranteed,
/// then scaled to the largest size that stays inside the region (binary
/// search, each candidate verified by invariance_check and containment LPs).
/// Throws NumericalError if no positive scale passes.
Polyhedron seed_roa(const FixedPoint& fp, const Region& region,
                    const Tolerances& tol = {});

struct HomeoCertificate {
  bool is_homeomorphism = false;
  std::vector<int> minor_signs;  // per order r = 1..n; 0 when indefinite
  std::optional<int> failing_region;
};

/// A square piecewise-affine map is certified a homeomorphism when, for
/// each order r, the leading principal minors of all region matrices share
/// one nonzero sign.
HomeoCertificate check_homeomorphism(const PwaFunction& pwa,
                                     const Tolerances& tol = {});

struct RoaResult {
  FixedPoint fixed_point;
  Polyhedron seed;
  int steps = 0;
  PolyUnion roa;
  std::vector<int> region_counts_per_step;  // union size after each step
};

struct RoaOptions {
  bool use_connected = false;  // requires a passing homeomorphism check
  /// Compute the final step as one preimage through the `steps`-fold
  /// composed network instead of iterating. Intermediate states are then
  /// unconstrained by the domain, so this matches the iterated mode only
  /// when the domain is forward invariant. Cross-validation aid.
  bool one_shot = false;
  Tolerances tol;
  Limits limits;
};

/// Grows the region of attraction by iterated one-step preimages of the
/// seed, merging the union after each step.
RoaResult grow_roa(const ReluNetwork& net, const PwaFunction& pwa,
                   const FixedPoint& fp, const Polyhedron& seed, int steps,
                   const RoaOptions& opts = {});

/// One-step predecessor set of `target` for a piecewise-affine control
/// system over (x, u) space: states from which some admissible input maps
/// into the target. `admissible` is the allowed (x, u) set. An optional
/// additive polytopic disturbance shrinks the target by its support before
/// the computation.
PolyUnion predecessor_set(const PwaFunction& pwa_control, const PolyUnion& target,
                          const PolyUnion& admissible,
                          const std::optional<Polyhedron>& disturbance = {},
                          const Tolerances& tol = {}, const Limits& lim = {});

struct InvariantSetResult {
  PolyUnion invariant_set;
  bool converged = false;
  int iterations = 0;
};

/// Invariant-set recursion X_0 = Proj_x(domain), X_{i+1} = Pre(X_i);
/// converged when consecutive iterates coincide (both set differences
/// empty). A non-converged final iterate is still a valid outer iterate.
InvariantSetResult control_invariant_set(const PwaFunction& pwa_control,
                                         const PolyUnion& domain_xu, int max_iters,
                                         const Tolerances& tol = {},
                                         const Limits& lim = {});

}  // namespace pwareach
