#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pwareach/lp.hpp"
#include "pwareach/types.hpp"

namespace pwareach {

/// One constraint `normal . x <= offset` in normalized form:
/// ||normal|| is 1, or 0 for a degenerate constraint. A degenerate
/// constraint is trivially satisfied when offset >= 0 and marks an empty
/// set when offset < 0.
struct Halfspace {
  Vec normal;
  double offset = 0.0;

  /// Normalizes a raw constraint `a . x <= b`. Normals below eps_norm in
  /// length collapse to zero with the offset kept as given.
  static Halfspace normalized(const Vec& a, double b, double eps_norm = 1e-9);

  bool degenerate(double eps_norm = 1e-9) const {
    return normal.norm() <= eps_norm;
  }
};

/// Intersection of halfspaces {x | A x <= b}, kept in normalized form.
/// May be empty, unbounded, or lower-dimensional.
class Polyhedron {
 public:
  Polyhedron() = default;
  explicit Polyhedron(int dim) : dim_(dim) {}
  Polyhedron(int dim, std::vector<Halfspace> constraints);

  /// Builds from stacked rows, normalizing each unless already normalized.
  static Polyhedron from_inequalities(const Mat& A, const Vec& b,
                                      double eps_norm = 1e-9);
  /// Axis-aligned box; per dimension emits x_i <= hi_i then -x_i <= -lo_i.
  static Polyhedron box(const Vec& lo, const Vec& hi);
  /// Canonical empty set in the given ambient dimension.
  static Polyhedron empty_set(int dim);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(constraints_.size()); }
  const std::vector<Halfspace>& constraints() const { return constraints_; }
  const Halfspace& constraint(int i) const { return constraints_[i]; }

  void add(Halfspace h);

  Mat matrix() const;  // stacked normals, size() x dim()
  Vec rhs() const;

  /// Pointwise membership with slack tolerance.
  bool contains(const Vec& x, double tol = 1e-9) const;
  /// Largest violation of any constraint at x (<= 0 inside).
  double violation(const Vec& x) const;

 private:
  int dim_ = 0;
  std::vector<Halfspace> constraints_;
};

/// y = matrix * x + offset.
struct AffineMap {
  Mat matrix;
  Vec offset;

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }
  Vec apply(const Vec& x) const { return matrix * x + offset; }
};

/// Finite union of nonempty polyhedra. Infeasible candidates are dropped
/// on insertion.
class PolyUnion {
 public:
  PolyUnion() = default;
  explicit PolyUnion(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  const std::vector<Polyhedron>& members() const { return members_; }

  /// Adds `p` if it is feasible; returns whether it was kept.
  bool add_if_feasible(Polyhedron p, const Tolerances& tol = {});
  /// Adds without a feasibility probe (caller already knows p is nonempty).
  void add(Polyhedron p);

  bool contains(const Vec& x, double tol = 1e-9) const;

 private:
  int dim_ = 0;
  std::vector<Polyhedron> members_;
};

// ---------------------------------------------------------------------------
// Feasibility and measurement helpers.

bool is_feasible(const Polyhedron& p, const Tolerances& tol = {});

struct ChebyshevResult {
  bool feasible = false;
  Vec center;
  double radius = 0.0;  // +inf when the inscribed ball is unbounded
};

/// Largest inscribed ball; radius 0 for lower-dimensional feasible sets.
ChebyshevResult chebyshev_center(const Polyhedron& p, const Tolerances& tol = {});

struct BoundingBox {
  bool feasible = false;
  Vec lo, hi;  // +-inf where unbounded
};

/// Axis-aligned bounding box via 2*dim LPs.
BoundingBox bounding_box(const Polyhedron& p, const Tolerances& tol = {});

bool is_bounded(const Polyhedron& p, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Representation cleanup.

/// Drops constraints that duplicate an earlier one componentwise within
/// tol.dup (constraints must be normalized first). Keeps the lower index.
Polyhedron remove_duplicates(const Polyhedron& p, const Tolerances& tol = {});

/// Index-tracking variant: result.second[i] is the original index of the
/// i-th kept constraint.
std::pair<Polyhedron, std::vector<int>> remove_duplicates_tracked(
    const Polyhedron& p, const Tolerances& tol = {});

/// Minimal H-representation: every kept constraint is essential, i.e. the
/// LP relaxing it alone exceeds its offset by more than tol.red (or is
/// unbounded). Requires duplicates removed. Returns the canonical empty
/// set if the input is infeasible.
Polyhedron essential_hrep(const Polyhedron& p, const Tolerances& tol = {});

/// Index-tracking variant of essential_hrep; second holds original indices
/// of kept constraints (empty input sentinel yields empty index list).
std::pair<Polyhedron, std::vector<int>> essential_hrep_tracked(
    const Polyhedron& p, const Tolerances& tol = {});

struct PrefilterResult {
  Polyhedron poly;                 // surviving constraints
  std::vector<int> kept;           // original indices of survivors
  std::vector<Halfspace> removed;  // constraints certified redundant
};

/// Cheap sound redundancy filter: certifies constraints redundant via
/// interval arithmetic over the bounding box. Never removes an essential
/// constraint (box max must clear the offset by tol.box_margin).
PrefilterResult bounding_box_prefilter(const Polyhedron& p,
                                       const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Set operations.

/// Concatenates constraint lists; no implicit cleanup.
Polyhedron intersect(const Polyhedron& p, const Polyhedron& q);

/// Image {map(x) | x in p}. Uses the direct inverse form when map.matrix is
/// square with condition number below tol.cond_max, otherwise projects the
/// lifted graph polyhedron onto the output coordinates.
Polyhedron affine_image(const Polyhedron& p, const AffineMap& map,
                        const Tolerances& tol = {}, const Limits& lim = {});

/// Preimage {x | map(x) in p}; exact, no LP involved.
Polyhedron affine_preimage(const Polyhedron& p, const AffineMap& map);

/// Projection onto the coordinates in keep_dims (ascending order) by
/// Fourier-Motzkin elimination with interleaved redundancy pruning.
Polyhedron project(const Polyhedron& p, const std::vector<int>& keep_dims,
                   const Tolerances& tol = {}, const Limits& lim = {});

/// Closure of a \ b as a union of polyhedra, built by subtracting b's
/// members in order and splitting along their facets in constraint order.
PolyUnion union_difference(const PolyUnion& a, const PolyUnion& b,
                           const Tolerances& tol = {}, const Limits& lim = {});

/// Greedy pairwise merging: two members are replaced by their common
/// envelope only when it covers exactly their union. Best effort; the
/// covered set never changes.
PolyUnion merge_union(const PolyUnion& u, const Tolerances& tol = {},
                      const Limits& lim = {});

/// True iff the one-step image of `s` under the affine map lies inside `s`
/// (one support LP per facet). `s` must be bounded and `map` square.
bool invariance_check(const Polyhedron& s, const AffineMap& map,
                      const Tolerances& tol = {});

}  // namespace pwareach
