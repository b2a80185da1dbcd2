#pragma once

#include <optional>
#include <vector>

#include "pwareach/geometry.hpp"
#include "pwareach/network.hpp"
#include "pwareach/types.hpp"

namespace pwareach {

/// Provenance of one facet of a region: the hidden neurons whose hyperplane
/// it is, and whether it (also) lies on the domain boundary. Facets on the
/// domain boundary never spawn neighbors.
struct FacetOrigin {
  bool domain_boundary = false;
  std::vector<int> neurons;  // flat neuron indices, ascending
};

/// One cell of the explicit piecewise-affine representation. `poly` is the
/// essential H-representation clipped to the domain; `origins` aligns with
/// poly's constraints.
struct Region {
  ActivationPattern pattern;
  Polyhedron poly;
  AffineMap map;
  std::vector<FacetOrigin> origins;
};

/// Domain polyhedron plus the regions tessellating it.
struct PwaFunction {
  Polyhedron domain;
  std::vector<Region> regions;

  /// Index of the first region containing x, or -1.
  int locate(const Vec& x, double tol = 1e-9) const;
  /// Evaluates the piecewise map at x; throws if x is in no region.
  Vec evaluate(const Vec& x, double tol = 1e-9) const;
};

/// All per-neuron halfspaces of the pattern plus the domain constraints,
/// duplicates removed. Trivially satisfied degenerate constraints are
/// dropped; an infeasible degenerate constraint is kept and marks the
/// region empty.
Polyhedron polyhedron_from_pattern(const ReluNetwork& net,
                                   const ActivationPattern& pattern,
                                   const Polyhedron& domain,
                                   const Tolerances& tol = {});

/// Activation pattern of the region across `facet` from the region of
/// `pattern`. Re-derives halfspaces layer by layer under the partially
/// updated pattern so that flips propagate to later layers.
ActivationPattern neighbor_pattern(const ReluNetwork& net,
                                   const ActivationPattern& pattern,
                                   const Halfspace& facet,
                                   const Tolerances& tol = {});

struct MarchOptions {
  std::optional<Vec> seed_point;
  std::uint64_t rng_seed = 20240;  // for seed-point sampling
  int threads = 1;
  Tolerances tol;
  Limits limits;
};

/// Enumerates every affine region of `net` reachable inside `domain` by
/// marching across shared facets, breadth first. Deterministic under a
/// single thread; with threads > 1 the region set is identical but the
/// emission order is not.
PwaFunction enumerate_regions(const ReluNetwork& net, const Polyhedron& domain,
                              const MarchOptions& opts = {});

struct ForwardReachResult {
  PwaFunction pwa;
  PolyUnion image;
};

/// Exact forward reachable set of the domain: the union of each region's
/// image under its affine map.
ForwardReachResult forward_reach(const ReluNetwork& net, const Polyhedron& domain,
                                 const MarchOptions& opts = {});

enum class ReachStatus { Complete, EarlyTerminated };

struct ReachResult {
  std::vector<PolyUnion> sets;  // one preimage union per target
  ReachStatus status = ReachStatus::Complete;
  std::optional<Region> witness;      // set when early-terminated
  Vec witness_point;                  // interior point mapping into a target
  int witness_target = -1;
  long regions_explored = 0;
};

struct BackwardOptions {
  bool early_stop = false;
  /// Restricts marching to the connected component of the preimage holding
  /// this point. Requires homeo_certified.
  std::optional<Vec> connected_from;
  /// Caller attests the network passed the homeomorphism check.
  bool homeo_certified = false;
  MarchOptions march;
};

/// Exact backward reachable sets of `targets` (output-space polyhedra),
/// computed region by region. With early_stop set, returns at the first
/// nonempty intersection together with a witness point.
ReachResult backward_reach(const ReluNetwork& net, const Polyhedron& domain,
                           const std::vector<Polyhedron>& targets,
                           const BackwardOptions& opts = {});

}  // namespace pwareach
