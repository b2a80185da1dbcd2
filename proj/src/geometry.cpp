#include "pwareach/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pwareach {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCoefZero = 1e-12;
}  // namespace

Halfspace Halfspace::normalized(const Vec& a, double b, double eps_norm) {
  const double na = a.norm();
  if (na <= eps_norm) return {Vec::Zero(a.size()), b};
  return {a / na, b / na};
}

Polyhedron::Polyhedron(int dim, std::vector<Halfspace> constraints)
    : dim_(dim), constraints_(std::move(constraints)) {
  for (const auto& h : constraints_)
    if (h.normal.size() != dim_)
      throw InvalidInputError("polyhedron: constraint dimension mismatch");
}

Polyhedron Polyhedron::from_inequalities(const Mat& A, const Vec& b,
                                         double eps_norm) {
  if (A.rows() != b.size())
    throw InvalidInputError("polyhedron: A rows != b length");
  Polyhedron p(static_cast<int>(A.cols()));
  for (int i = 0; i < A.rows(); ++i) {
    const Vec a = A.row(i).transpose();
    const double na = a.norm();
    // Rows already in normalized form are kept bit-exact.
    if (std::abs(na - 1.0) <= 1e-12)
      p.constraints_.push_back({a, b(i)});
    else
      p.constraints_.push_back(Halfspace::normalized(a, b(i), eps_norm));
  }
  return p;
}

Polyhedron Polyhedron::box(const Vec& lo, const Vec& hi) {
  if (lo.size() != hi.size())
    throw InvalidInputError("box: bound length mismatch");
  const int n = static_cast<int>(lo.size());
  Polyhedron p(n);
  for (int j = 0; j < n; ++j) {
    if (!(lo(j) < hi(j)))
      throw InvalidInputError("box: requires lo < hi per dimension");
    Vec e = Vec::Zero(n);
    e(j) = 1.0;
    p.constraints_.push_back({e, hi(j)});
    p.constraints_.push_back({-e, -lo(j)});
  }
  return p;
}

Polyhedron Polyhedron::empty_set(int dim) {
  Polyhedron p(dim);
  p.constraints_.push_back({Vec::Zero(dim), -1.0});
  return p;
}

void Polyhedron::add(Halfspace h) {
  if (h.normal.size() != dim_)
    throw InvalidInputError("polyhedron: constraint dimension mismatch");
  constraints_.push_back(std::move(h));
}

Mat Polyhedron::matrix() const {
  Mat A(size(), dim_);
  for (int i = 0; i < size(); ++i) A.row(i) = constraints_[i].normal.transpose();
  return A;
}

Vec Polyhedron::rhs() const {
  Vec b(size());
  for (int i = 0; i < size(); ++i) b(i) = constraints_[i].offset;
  return b;
}

bool Polyhedron::contains(const Vec& x, double tol) const {
  return violation(x) <= tol;
}

double Polyhedron::violation(const Vec& x) const {
  double worst = -kInf;
  for (const auto& h : constraints_)
    worst = std::max(worst, h.normal.dot(x) - h.offset);
  return size() == 0 ? -kInf : worst;
}

bool PolyUnion::add_if_feasible(Polyhedron p, const Tolerances& tol) {
  if (dim_ == 0 && p.dim() > 0) dim_ = p.dim();
  if (p.dim() != dim_) throw InvalidInputError("union: member dimension mismatch");
  if (!is_feasible(p, tol)) return false;
  members_.push_back(std::move(p));
  return true;
}

void PolyUnion::add(Polyhedron p) {
  if (dim_ == 0 && p.dim() > 0) dim_ = p.dim();
  if (p.dim() != dim_) throw InvalidInputError("union: member dimension mismatch");
  members_.push_back(std::move(p));
}

bool PolyUnion::contains(const Vec& x, double tol) const {
  for (const auto& m : members_)
    if (m.contains(x, tol)) return true;
  return false;
}

// ---------------------------------------------------------------------------

bool is_feasible(const Polyhedron& p, const Tolerances& tol) {
  if (p.size() == 0) return true;
  return find_feasible(p.matrix(), p.rhs(), tol).feasible;
}

ChebyshevResult chebyshev_center(const Polyhedron& p, const Tolerances& tol) {
  const int n = p.dim();
  const int m = p.size();
  // Variables (x, r); maximize r s.t. a.x + r <= b per unit-normal row.
  Mat A = Mat::Zero(m, n + 1);
  Vec b(m);
  for (int i = 0; i < m; ++i) {
    const auto& h = p.constraint(i);
    A.block(i, 0, 1, n) = h.normal.transpose();
    A(i, n) = h.degenerate(tol.norm) ? 0.0 : 1.0;
    b(i) = h.offset;
  }
  Vec c = Vec::Zero(n + 1);
  c(n) = 1.0;
  const LpOutcome out = solve_lp(c, A, b, tol);
  ChebyshevResult res;
  if (out.status == LpStatus::Infeasible) return res;
  if (out.status == LpStatus::Unbounded) {
    res.feasible = true;
    res.radius = kInf;
    const auto f = find_feasible(p.matrix(), p.rhs(), tol);
    res.center = f.point;
    return res;
  }
  // The slack variable is free, so an empty set shows up as a strictly
  // negative optimal radius rather than an infeasible LP.
  if (out.value < -tol.feas) return res;
  res.feasible = true;
  res.center = out.point.head(n);
  res.radius = std::max(0.0, out.value);
  return res;
}

BoundingBox bounding_box(const Polyhedron& p, const Tolerances& tol) {
  BoundingBox box;
  const int n = p.dim();
  box.lo = Vec::Constant(n, -kInf);
  box.hi = Vec::Constant(n, kInf);
  const Mat A = p.matrix();
  const Vec b = p.rhs();
  for (int j = 0; j < n; ++j) {
    Vec c = Vec::Zero(n);
    c(j) = 1.0;
    LpOutcome up = solve_lp(c, A, b, tol);
    if (up.status == LpStatus::Infeasible) return box;
    if (up.status == LpStatus::Optimal) box.hi(j) = up.value;
    LpOutcome dn = solve_lp(Vec(-c), A, b, tol);
    if (dn.status == LpStatus::Infeasible) return box;
    if (dn.status == LpStatus::Optimal) box.lo(j) = -dn.value;
  }
  box.feasible = true;
  return box;
}

bool is_bounded(const Polyhedron& p, const Tolerances& tol) {
  const BoundingBox box = bounding_box(p, tol);
  if (!box.feasible) return true;  // empty sets are bounded
  return box.lo.allFinite() && box.hi.allFinite();
}

// ---------------------------------------------------------------------------

std::pair<Polyhedron, std::vector<int>> remove_duplicates_tracked(
    const Polyhedron& p, const Tolerances& tol) {
  Polyhedron out(p.dim());
  std::vector<int> kept;
  for (int j = 0; j < p.size(); ++j) {
    const auto& hj = p.constraint(j);
    bool dup = false;
    for (int idx : kept) {
      const auto& hi = p.constraint(idx);
      if (std::abs(hj.offset - hi.offset) <= tol.dup &&
          (hj.normal - hi.normal).lpNorm<Eigen::Infinity>() <= tol.dup) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      out.add(hj);
      kept.push_back(j);
    }
  }
  return {std::move(out), std::move(kept)};
}

Polyhedron remove_duplicates(const Polyhedron& p, const Tolerances& tol) {
  return remove_duplicates_tracked(p, tol).first;
}

std::pair<Polyhedron, std::vector<int>> essential_hrep_tracked(
    const Polyhedron& p, const Tolerances& tol) {
  if (p.size() == 0) return {Polyhedron(p.dim()), {}};
  if (!is_feasible(p, tol)) return {Polyhedron::empty_set(p.dim()), {}};

  std::vector<int> kept(p.size());
  for (int i = 0; i < p.size(); ++i) kept[i] = i;

  // Probe constraints in order against the current surviving set.
  for (int pos = 0; pos < static_cast<int>(kept.size());) {
    const int idx = kept[pos];
    const auto& h = p.constraint(idx);

    const int others = static_cast<int>(kept.size()) - 1;
    Mat A(others, p.dim());
    Vec b(others);
    int r = 0;
    for (int k : kept) {
      if (k == idx) continue;
      A.row(r) = p.constraint(k).normal.transpose();
      b(r) = p.constraint(k).offset;
      ++r;
    }

    const LpOutcome out = solve_lp(h.normal, A, b, tol);
    if (out.status == LpStatus::Infeasible)
      throw NumericalError("essential_hrep: relaxation reported infeasible");
    const bool redundant =
        out.status == LpStatus::Optimal && out.value <= h.offset + tol.red;
    if (redundant)
      kept.erase(kept.begin() + pos);
    else
      ++pos;
  }

  Polyhedron out(p.dim());
  for (int k : kept) out.add(p.constraint(k));
  return {std::move(out), std::move(kept)};
}

Polyhedron essential_hrep(const Polyhedron& p, const Tolerances& tol) {
  return essential_hrep_tracked(p, tol).first;
}

PrefilterResult bounding_box_prefilter(const Polyhedron& p,
                                       const Tolerances& tol) {
  PrefilterResult res;
  res.poly = Polyhedron(p.dim());
  const BoundingBox box = bounding_box(p, tol);
  if (!box.feasible) {
    // Empty set: nothing can be certified, leave untouched.
    res.poly = p;
    for (int i = 0; i < p.size(); ++i) res.kept.push_back(i);
    return res;
  }
  // Inflate against LP error so certification stays sound.
  Vec lo = box.lo, hi = box.hi;
  for (int j = 0; j < p.dim(); ++j) {
    if (std::isfinite(lo(j))) lo(j) -= tol.feas * (1.0 + std::abs(lo(j)));
    if (std::isfinite(hi(j))) hi(j) += tol.feas * (1.0 + std::abs(hi(j)));
  }
  for (int i = 0; i < p.size(); ++i) {
    const auto& h = p.constraint(i);
    bool removed = false;
    if (h.degenerate(tol.norm)) {
      removed = h.offset >= 0.0;
    } else {
      double worst = 0.0;
      for (int j = 0; j < p.dim(); ++j) {
        const double a = h.normal(j);
        if (a > kCoefZero)
          worst += a * hi(j);
        else if (a < -kCoefZero)
          worst += a * lo(j);
      }
      removed = std::isfinite(worst) && worst <= h.offset - tol.box_margin;
    }
    if (removed) {
      res.removed.push_back(h);
    } else {
      res.poly.add(h);
      res.kept.push_back(i);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

Polyhedron intersect(const Polyhedron& p, const Polyhedron& q) {
  if (p.dim() != q.dim())
    throw InvalidInputError("intersect: ambient dimension mismatch");
  Polyhedron out = p;
  for (const auto& h : q.constraints()) out.add(h);
  return out;
}

Polyhedron affine_preimage(const Polyhedron& p, const AffineMap& map) {
  if (map.rows() != p.dim())
    throw InvalidInputError("affine_preimage: map output dim != polyhedron dim");
  Polyhedron out(map.cols());
  for (const auto& h : p.constraints()) {
    const Vec a = map.matrix.transpose() * h.normal;
    const double b = h.offset - h.normal.dot(map.offset);
    Halfspace hs = Halfspace::normalized(a, b);
    // Degenerate rows carry no spatial information; keep only the
    // infeasibility marker.
    if (hs.degenerate()) {
      if (hs.offset < 0.0) out.add(std::move(hs));
    } else {
      out.add(std::move(hs));
    }
  }
  return out;
}

Polyhedron project(const Polyhedron& p, const std::vector<int>& keep_dims,
                   const Tolerances& tol, const Limits& lim) {
  std::vector<int> keep = keep_dims;
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.empty()) throw InvalidInputError("project: keep_dims empty");
  for (int k : keep)
    if (k < 0 || k >= p.dim())
      throw InvalidInputError("project: keep_dims out of range");

  std::vector<int> live(p.dim());
  for (int j = 0; j < p.dim(); ++j) live[j] = j;

  Mat A = p.matrix();
  Vec b = p.rhs();

  for (int d = 0; d < p.dim(); ++d) {
    if (std::binary_search(keep.begin(), keep.end(), d)) continue;
    const int e = static_cast<int>(
        std::find(live.begin(), live.end(), d) - live.begin());

    std::vector<int> pos, neg, zero;
    for (int i = 0; i < A.rows(); ++i) {
      const double a = A(i, e);
      if (a > 1e-10)
        pos.push_back(i);
      else if (a < -1e-10)
        neg.push_back(i);
      else
        zero.push_back(i);
    }
    const long count = static_cast<long>(zero.size()) +
                       static_cast<long>(pos.size()) * static_cast<long>(neg.size());
    if (count > lim.fm_constraint_cap)
      throw ResourceLimitError("project: intermediate constraint cap exceeded");

    const int cols = static_cast<int>(A.cols());
    Mat A2(count, cols - 1);
    Vec b2(count);
    auto drop_col = [&](const Eigen::RowVectorXd& row) {
      Eigen::RowVectorXd out(cols - 1);
      out.head(e) = row.head(e);
      out.tail(cols - 1 - e) = row.tail(cols - 1 - e);
      return out;
    };
    int r = 0;
    for (int i : zero) {
      A2.row(r) = drop_col(A.row(i));
      b2(r) = b(i);
      ++r;
    }
    for (int i : pos) {
      for (int j : neg) {
        const Eigen::RowVectorXd row = (-A(j, e)) * A.row(i) + A(i, e) * A.row(j);
        A2.row(r) = drop_col(row);
        b2(r) = (-A(j, e)) * b(i) + A(i, e) * b(j);
        ++r;
      }
    }

    Polyhedron step = Polyhedron::from_inequalities(A2, b2, tol.norm);
    step = remove_duplicates(step, tol);
    step = essential_hrep(step, tol);
    if (step.size() == 1 && step.constraint(0).degenerate(tol.norm) &&
        step.constraint(0).offset < 0.0)
      return Polyhedron::empty_set(static_cast<int>(keep.size()));

    A = step.matrix();
    b = step.rhs();
    live.erase(live.begin() + e);
  }

  Polyhedron out(static_cast<int>(keep.size()));
  for (int i = 0; i < A.rows(); ++i)
    out.add({A.row(i).transpose(), b(i)});
  return out;
}

Polyhedron affine_image(const Polyhedron& p, const AffineMap& map,
                        const Tolerances& tol, const Limits& lim) {
  if (map.cols() != p.dim())
    throw InvalidInputError("affine_image: map input dim != polyhedron dim");
  const int n = p.dim();
  const int m = map.rows();

  if (n == m) {
    Eigen::JacobiSVD<Mat> svd(map.matrix);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin > 0.0 && smax / smin < tol.cond_max) {
      // {y | A C^-1 y <= b + A C^-1 d}
      const Mat X =
          map.matrix.transpose().partialPivLu().solve(p.matrix().transpose()).transpose();
      const Vec rhs = p.rhs() + X * map.offset;
      return Polyhedron::from_inequalities(X, rhs, tol.norm);
    }
  }

  // Lifted graph {(x, y) | Ax <= b, y = Cx + d}, projected onto y.
  Mat L(p.size() + 2 * m, n + m);
  Vec r(p.size() + 2 * m);
  L.setZero();
  L.block(0, 0, p.size(), n) = p.matrix();
  r.head(p.size()) = p.rhs();
  L.block(p.size(), 0, m, n) = map.matrix;
  L.block(p.size(), n, m, m) = -Mat::Identity(m, m);
  r.segment(p.size(), m) = -map.offset;
  L.block(p.size() + m, 0, m, n) = -map.matrix;
  L.block(p.size() + m, n, m, m) = Mat::Identity(m, m);
  r.tail(m) = map.offset;

  std::vector<int> keep(m);
  for (int j = 0; j < m; ++j) keep[j] = n + j;
  return project(Polyhedron::from_inequalities(L, r, tol.norm), keep, tol, lim);
}

// ---------------------------------------------------------------------------

namespace {

// Pieces covering cl(p \ q) up to measure zero: split along q's facets in
// constraint order. Pieces without interior are dropped.
void subtract_one(const Polyhedron& p, const Polyhedron& q,
                  std::vector<Polyhedron>& out, const Tolerances& tol) {
  if (!is_feasible(intersect(p, q), tol)) {
    out.push_back(p);
    return;
  }
  for (int i = 0; i < q.size(); ++i) {
    Polyhedron piece = p;
    for (int l = 0; l < i; ++l) piece.add(q.constraint(l));
    const auto& h = q.constraint(i);
    piece.add({-h.normal, -h.offset});
    const ChebyshevResult cheb = chebyshev_center(piece, tol);
    if (!cheb.feasible || cheb.radius <= tol.feas) continue;
    Polyhedron reduced = essential_hrep(remove_duplicates(piece, tol), tol);
    out.push_back(std::move(reduced));
  }
}

}  // namespace

PolyUnion union_difference(const PolyUnion& a, const PolyUnion& b,
                           const Tolerances& tol, const Limits& lim) {
  if (a.size() > 0 && b.size() > 0 && a.dim() != b.dim())
    throw InvalidInputError("union_difference: ambient dimension mismatch");
  std::vector<Polyhedron> pieces = a.members();
  for (const auto& q : b.members()) {
    std::vector<Polyhedron> next;
    for (const auto& piece : pieces) subtract_one(piece, q, next, tol);
    pieces = std::move(next);
    if (static_cast<long>(pieces.size()) > lim.union_cap)
      throw ResourceLimitError("union_difference: member cap exceeded");
  }
  PolyUnion out(a.dim());
  for (auto& piece : pieces) out.add(std::move(piece));
  return out;
}

namespace {

// True when p and q have facets lying on a common hyperplane with opposite
// orientation, the geometric prerequisite for a convex pairwise union.
bool share_hyperplane(const Polyhedron& p, const Polyhedron& q,
                      const Tolerances& tol) {
  for (const auto& hp : p.constraints()) {
    if (hp.degenerate(tol.norm)) continue;
    for (const auto& hq : q.constraints()) {
      if (std::abs(hp.offset + hq.offset) <= tol.dup &&
          (hp.normal + hq.normal).lpNorm<Eigen::Infinity>() <= tol.dup)
        return true;
    }
  }
  return false;
}

// Constraints of each polyhedron that are valid for the other.
Polyhedron envelope(const Polyhedron& p, const Polyhedron& q,
                    const Tolerances& tol) {
  Polyhedron out(p.dim());
  auto scan = [&](const Polyhedron& from, const Polyhedron& other) {
    const Mat A = other.matrix();
    const Vec b = other.rhs();
    for (const auto& h : from.constraints()) {
      if (h.degenerate(tol.norm)) continue;
      const LpOutcome lp = solve_lp(h.normal, A, b, tol);
      if (lp.status == LpStatus::Optimal && lp.value <= h.offset + tol.feas)
        out.add(h);
    }
  };
  scan(p, q);
  scan(q, p);
  return out;
}

}  // namespace

PolyUnion merge_union(const PolyUnion& u, const Tolerances& tol,
                      const Limits& lim) {
  std::vector<Polyhedron> polys = u.members();
  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t i = 0; i < polys.size() && !merged; ++i) {
      for (size_t j = i + 1; j < polys.size() && !merged; ++j) {
        if (!share_hyperplane(polys[i], polys[j], tol)) continue;
        Polyhedron cand = envelope(polys[i], polys[j], tol);
        if (cand.size() == 0) continue;
        cand = essential_hrep(remove_duplicates(cand, tol), tol);
        PolyUnion cu(cand.dim());
        cu.add(cand);
        PolyUnion pair(polys[i].dim());
        pair.add(polys[i]);
        pair.add(polys[j]);
        if (union_difference(cu, pair, tol, lim).empty()) {
          polys[i] = std::move(cand);
          polys.erase(polys.begin() + j);
          merged = true;
        }
      }
    }
  }
  PolyUnion out(u.dim());
  for (auto& p : polys) out.add(std::move(p));
  return out;
}

bool invariance_check(const Polyhedron& s, const AffineMap& map,
                      const Tolerances& tol) {
  if (map.rows() != map.cols() || map.cols() != s.dim())
    throw InvalidInputError("invariance_check: map must be square over s's space");
  const BoundingBox box = bounding_box(s, tol);
  if (!box.feasible) return true;  // empty set, vacuously invariant
  if (!box.lo.allFinite() || !box.hi.allFinite())
    throw InvalidInputError("invariance_check: s must be bounded");

  const Mat A = s.matrix();
  const Vec b = s.rhs();
  for (const auto& h : s.constraints()) {
    if (h.degenerate(tol.norm)) continue;
    const Vec c = map.matrix.transpose() * h.normal;
    const LpOutcome lp = solve_lp(c, A, b, tol);
    if (lp.status != LpStatus::Optimal)
      throw NumericalError("invariance_check: support LP failed");
    if (lp.value + h.normal.dot(map.offset) > h.offset + tol.feas) return false;
  }
  return true;
}

}  // namespace pwareach
