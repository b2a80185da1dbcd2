#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "pwareach/geometry.hpp"

using namespace pwareach;

namespace {

Polyhedron interval(double lo, double hi) {
  Vec l(1), h(1);
  l << lo;
  h << hi;
  return Polyhedron::box(l, h);
}

Polyhedron square(double lo, double hi) {
  return Polyhedron::box(Vec::Constant(2, lo), Vec::Constant(2, hi));
}

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

bool same_constraints(const Polyhedron& a, const Polyhedron& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i) {
    if (a.constraint(i).offset != b.constraint(i).offset) return false;
    if ((a.constraint(i).normal - b.constraint(i).normal).lpNorm<Eigen::Infinity>() != 0.0)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("geometry: duplicate removal keeps the lower index") {
  Polyhedron p(1);
  Vec e(1);
  e << 1.0;
  p.add({e, 1.0});
  p.add({e, 1.0});
  p.add({-e, 0.0});
  const Polyhedron q = remove_duplicates(p);
  REQUIRE(q.size() == 2);
  CHECK(q.constraint(0).normal(0) == 1.0);
  CHECK(q.constraint(0).offset == 1.0);
  CHECK(q.constraint(1).normal(0) == -1.0);

  const Polyhedron r = remove_duplicates(q);
  CHECK(same_constraints(q, r));  // identity on duplicate-free input
}

TEST_CASE("geometry: injected scaled copies are all removed") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    const Polyhedron base = oracle::random_polytope_2d(rng, 5);
    const int m = base.size();
    const int inject = 1 + static_cast<int>(oracle::unit_real(rng) * 4);
    Mat A(m + inject, 2);
    Vec b(m + inject);
    A.topRows(m) = base.matrix();
    b.head(m) = base.rhs();
    for (int k = 0; k < inject; ++k) {
      const int src = static_cast<int>(oracle::unit_real(rng) * m);
      const double scale = 0.5 + 2.0 * oracle::unit_real(rng);
      A.row(m + k) = scale * A.row(src);
      b(m + k) = scale * b(src);
    }
    const Polyhedron p = Polyhedron::from_inequalities(A, b);
    const auto [q, kept] = remove_duplicates_tracked(p);
    CHECK(p.size() - q.size() == inject);
  }
}

TEST_CASE("geometry: essential H-representation, hand cases") {
  Polyhedron p(1);
  Vec e(1);
  e << 1.0;
  p.add({e, 1.0});
  p.add({e, 2.0});
  p.add({-e, 1.0});
  const Polyhedron q = essential_hrep(p);
  REQUIRE(q.size() == 2);
  CHECK(q.constraint(0).offset == 1.0);
  CHECK(q.constraint(1).normal(0) == -1.0);

  const Polyhedron sq = square(0.0, 1.0);
  CHECK(essential_hrep(sq).size() == 4);  // all facets essential

  Polyhedron bad = Polyhedron::empty_set(2);
  const Polyhedron eq = essential_hrep(bad);
  REQUIRE(eq.size() == 1);
  CHECK(eq.constraint(0).degenerate());
  CHECK(eq.constraint(0).offset < 0.0);
}

TEST_CASE("geometry: essential set equals the vertex-enumeration oracle") {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 100; ++trial) {
    Polyhedron p = oracle::random_polytope_2d(rng, 16);
    p = remove_duplicates(p);
    const auto [ess, kept] = essential_hrep_tracked(p);
    const std::vector<int> expected = oracle::essential_facets_2d(p);
    CHECK(kept == expected);
  }
}

TEST_CASE("geometry: essential_hrep is idempotent") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 25; ++trial) {
    const Polyhedron p =
        essential_hrep(remove_duplicates(oracle::random_polytope_2d(rng, 10)));
    CHECK(same_constraints(p, essential_hrep(p)));
  }
}

TEST_CASE("geometry: bounding box prefilter, hand cases") {
  Polyhedron p(2);
  p.add(Halfspace::normalized(v2(1, 0), 1.0));
  p.add(Halfspace::normalized(v2(-1, 0), 1.0));
  p.add(Halfspace::normalized(v2(1, 1), 10.0));
  p.add(Halfspace::normalized(v2(0, 1), 1.0));
  p.add(Halfspace::normalized(v2(0, -1), 1.0));
  const PrefilterResult res = bounding_box_prefilter(p);
  REQUIRE(res.removed.size() == 1);
  CHECK(res.removed[0].normal(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(res.poly.size() == 4);

  const PrefilterResult none = bounding_box_prefilter(square(0.0, 1.0));
  CHECK(none.removed.empty());
}

TEST_CASE("geometry: prefilter removals are always redundant") {
  std::mt19937_64 rng(104);
  for (int trial = 0; trial < 50; ++trial) {
    Polyhedron p = remove_duplicates(oracle::random_polytope_2d(rng, 12));
    const auto [ess, essential_idx] = essential_hrep_tracked(p);
    const PrefilterResult res = bounding_box_prefilter(p);
    // No essential constraint may be filtered out.
    for (int i = 0; i < p.size(); ++i) {
      const bool kept_by_filter =
          std::find(res.kept.begin(), res.kept.end(), i) != res.kept.end();
      const bool essential =
          std::find(essential_idx.begin(), essential_idx.end(), i) !=
          essential_idx.end();
      if (essential) CHECK(kept_by_filter);
    }
  }
}

TEST_CASE("geometry: intersection") {
  const Polyhedron a = intersect(interval(0, 2), interval(1, 3));
  const BoundingBox bb = bounding_box(a);
  REQUIRE(bb.feasible);
  CHECK(bb.lo(0) == doctest::Approx(1.0));
  CHECK(bb.hi(0) == doctest::Approx(2.0));

  CHECK(!is_feasible(intersect(interval(0, 1), interval(2, 3))));

  std::mt19937_64 rng(105);
  for (int trial = 0; trial < 10; ++trial) {
    const Polyhedron p = oracle::random_polytope_2d(rng, 4);
    const Polyhedron q = oracle::random_polytope_2d(rng, 4);
    const Polyhedron both = intersect(p, q);
    for (int s = 0; s < 100; ++s) {
      const Vec x = oracle::sample_box(rng, Vec::Constant(2, -1.2), Vec::Constant(2, 1.2));
      CHECK(both.contains(x, 1e-12) == (p.contains(x, 1e-12) && q.contains(x, 1e-12)));
    }
  }
}

TEST_CASE("geometry: affine image, hand cases") {
  const Polyhedron sq = square(0.0, 1.0);
  const AffineMap id{Mat::Identity(2, 2), Vec::Zero(2)};
  const Polyhedron img = affine_image(sq, id);
  const BoundingBox bb = bounding_box(img);
  CHECK(bb.lo.lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK((bb.hi - Vec::Ones(2)).lpNorm<Eigen::Infinity>() <= 1e-9);

  Mat c(1, 1);
  c << 2.0;
  Vec d(1);
  d << 1.0;
  const Polyhedron seg = affine_image(interval(0, 1), {c, d});
  const BoundingBox sb = bounding_box(seg);
  CHECK(sb.lo(0) == doctest::Approx(1.0));
  CHECK(sb.hi(0) == doctest::Approx(3.0));
}

TEST_CASE("geometry: affine image under non-square maps") {
  // y = x1 + x2 maps the unit square onto [0, 2] via the lifted projection.
  Mat C(1, 2);
  C << 1.0, 1.0;
  const Polyhedron img = affine_image(square(0.0, 1.0), {C, Vec::Zero(1)});
  const BoundingBox bb = bounding_box(img);
  REQUIRE(bb.feasible);
  CHECK(bb.lo(0) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(bb.hi(0) == doctest::Approx(2.0).epsilon(1e-7));

  // Rank-deficient square map: the image of the square under y = (x1, x1)
  // is a diagonal segment.
  Mat D(2, 2);
  D << 1.0, 0.0, 1.0, 0.0;
  const Polyhedron seg = affine_image(square(0.0, 1.0), {D, Vec::Zero(2)});
  CHECK(seg.contains(v2(0.5, 0.5), 1e-7));
  CHECK(!seg.contains(v2(0.2, 0.8), 1e-6));
}

TEST_CASE("geometry: affine image of random polytopes, sampling oracle") {
  std::mt19937_64 rng(106);
  int exterior_checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Polyhedron p = oracle::random_polytope_2d(rng, 5);
    Mat C(2, 2);
    do {
      C << oracle::gaussian(rng), oracle::gaussian(rng), oracle::gaussian(rng),
          oracle::gaussian(rng);
    } while (std::abs(C.determinant()) < 0.3);
    const Vec d = v2(oracle::gaussian(rng), oracle::gaussian(rng));
    const AffineMap map{C, d};
    const Polyhedron img = affine_image(p, map);

    const BoundingBox bb = bounding_box(img);
    REQUIRE(bb.feasible);
    for (int s = 0; s < 50; ++s) {
      // Interior points map into the image.
      const Vec x = oracle::sample_box(rng, Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
      if (p.contains(x, -1e-9)) CHECK(img.contains(map.apply(x), 1e-7));
      // Points clearly outside the image have no preimage inside p.
      const Vec y = oracle::sample_box(rng, bb.lo - Vec::Ones(2), bb.hi + Vec::Ones(2));
      if (img.violation(y) > 1e-6) {
        const Vec xpre = C.partialPivLu().solve(y - d);
        CHECK(!p.contains(xpre, 1e-9));
        ++exterior_checked;
      }
    }
  }
  CHECK(exterior_checked > 200);
}

TEST_CASE("geometry: affine preimage, hand cases and sampling oracle") {
  const AffineMap id{Mat::Identity(1, 1), Vec::Zero(1)};
  const Polyhedron pre_id = affine_preimage(interval(0, 1), id);
  CHECK(pre_id.contains(Vec::Constant(1, 0.5), 0.0));
  CHECK(!pre_id.contains(Vec::Constant(1, 1.5), 1e-9));

  Mat two(1, 1);
  two << 2.0;
  Polyhedron out(1);
  out.add({Vec::Ones(1), 2.0});  // y <= 2
  const Polyhedron pre = affine_preimage(out, {two, Vec::Zero(1)});
  REQUIRE(pre.size() == 1);
  CHECK(pre.constraint(0).offset == doctest::Approx(1.0));  // x <= 1

  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 20; ++trial) {
    const Polyhedron target = oracle::random_polytope_2d(rng, 4);
    Mat C(2, 2);
    C << oracle::gaussian(rng), oracle::gaussian(rng), oracle::gaussian(rng),
        oracle::gaussian(rng);
    const AffineMap map{C, v2(oracle::gaussian(rng), oracle::gaussian(rng))};
    const Polyhedron preimage = affine_preimage(target, map);
    for (int s = 0; s < 50; ++s) {
      const Vec x = oracle::sample_box(rng, Vec::Constant(2, -2.0), Vec::Constant(2, 2.0));
      const double viol = target.violation(map.apply(x));
      if (std::abs(viol) < 1e-9) continue;  // boundary
      CHECK(preimage.contains(x, 1e-9) == (viol < 0.0));
    }
  }
}

TEST_CASE("geometry: projection, hand cases") {
  const Polyhedron px = project(square(0.0, 1.0), {0});
  const BoundingBox bb = bounding_box(px);
  CHECK(bb.lo(0) == doctest::Approx(0.0));
  CHECK(bb.hi(0) == doctest::Approx(1.0));

  Polyhedron tri(2);
  tri.add(Halfspace::normalized(v2(1, 1), 1.0));
  tri.add(Halfspace::normalized(v2(-1, 0), 0.0));
  tri.add(Halfspace::normalized(v2(0, -1), 0.0));
  const Polyhedron tx = project(tri, {0});
  const BoundingBox tb = bounding_box(tx);
  CHECK(tb.lo(0) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(tb.hi(0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("geometry: projection matches the lift-feasibility oracle") {
  std::mt19937_64 rng(108);
  for (int trial = 0; trial < 15; ++trial) {
    // Random bounded 3-D polytope: box plus random cuts.
    Polyhedron p = Polyhedron::box(Vec::Constant(3, -1.0), Vec::Constant(3, 1.0));
    for (int k = 0; k < 4; ++k) {
      Vec a(3);
      a << oracle::gaussian(rng), oracle::gaussian(rng), oracle::gaussian(rng);
      if (a.norm() < 1e-6) continue;
      p.add(Halfspace::normalized(a, 0.3 + oracle::unit_real(rng)));
    }
    const Polyhedron proj = project(p, {0, 1});

    const Mat A = p.matrix();
    const Vec b = p.rhs();
    for (int s = 0; s < 70; ++s) {
      const Vec w = oracle::sample_box(rng, Vec::Constant(2, -1.3), Vec::Constant(2, 1.3));
      const double viol = proj.violation(w);
      if (std::abs(viol) < 1e-6) continue;
      // Lift LP: does some x3 complete w into p?
      Mat Af(A.rows() + 4, 3);
      Vec bf(A.rows() + 4);
      Af.topRows(A.rows()) = A;
      bf.head(A.rows()) = b;
      Af.row(A.rows()) << 1, 0, 0;
      bf(A.rows()) = w(0);
      Af.row(A.rows() + 1) << -1, 0, 0;
      bf(A.rows() + 1) = -w(0);
      Af.row(A.rows() + 2) << 0, 1, 0;
      bf(A.rows() + 2) = w(1);
      Af.row(A.rows() + 3) << 0, -1, 0;
      bf(A.rows() + 3) = -w(1);
      const bool liftable = find_feasible(Af, bf).feasible;
      CHECK(liftable == (viol < 0.0));
    }
    // Completeness: projected samples of the original lie in the projection.
    for (int s = 0; s < 50; ++s) {
      const Vec x = oracle::sample_box(rng, Vec::Constant(3, -1.0), Vec::Constant(3, 1.0));
      if (p.contains(x, -1e-9)) CHECK(proj.contains(x.head(2), 1e-7));
    }
  }
}

TEST_CASE("geometry: union difference, hand cases") {
  PolyUnion a(1), b(1);
  a.add(interval(0, 2));
  b.add(interval(1, 3));
  const PolyUnion diff = union_difference(a, b);
  REQUIRE(diff.size() == 1);
  const BoundingBox bb = bounding_box(diff.members()[0]);
  CHECK(bb.lo(0) == doctest::Approx(0.0));
  CHECK(bb.hi(0) == doctest::Approx(1.0));

  PolyUnion self(1);
  self.add(interval(0, 1));
  CHECK(union_difference(self, self).empty());
}

TEST_CASE("geometry: union difference matches the sampling partition oracle") {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 12; ++trial) {
    PolyUnion a(2), b(2);
    const int na = 1 + static_cast<int>(oracle::unit_real(rng) * 3);
    const int nb = 1 + static_cast<int>(oracle::unit_real(rng) * 3);
    for (int i = 0; i < na; ++i) a.add(oracle::random_polytope_2d(rng, 3));
    for (int i = 0; i < nb; ++i) b.add(oracle::random_polytope_2d(rng, 3));
    const PolyUnion r = union_difference(a, b);

    auto near_any_facet = [&](const Vec& x) {
      auto scan = [&](const PolyUnion& u) {
        for (const auto& m : u.members())
          for (const auto& h : m.constraints())
            if (std::abs(h.normal.dot(x) - h.offset) <= 1e-6) return true;
        return false;
      };
      return scan(a) || scan(b) || scan(r);
    };

    for (int s = 0; s < 170; ++s) {
      const Vec x = oracle::sample_box(rng, Vec::Constant(2, -1.1), Vec::Constant(2, 1.1));
      if (near_any_facet(x)) continue;
      const bool expect = a.contains(x, 0.0) && !b.contains(x, 0.0);
      CHECK(r.contains(x, 0.0) == expect);
    }
  }
}

TEST_CASE("geometry: merge union, hand cases") {
  PolyUnion adj(1);
  adj.add(interval(0, 1));
  adj.add(interval(1, 2));
  const PolyUnion merged = merge_union(adj);
  REQUIRE(merged.size() == 1);
  const BoundingBox bb = bounding_box(merged.members()[0]);
  CHECK(bb.lo(0) == doctest::Approx(0.0));
  CHECK(bb.hi(0) == doctest::Approx(2.0));

  PolyUnion gap(1);
  gap.add(interval(0, 1));
  gap.add(interval(2, 3));
  CHECK(merge_union(gap).size() == 2);
}

TEST_CASE("geometry: adjacent boxes merge exactly when the union is a box") {
  std::mt19937_64 rng(110);
  for (int trial = 0; trial < 30; ++trial) {
    const double split = 0.2 + 0.6 * oracle::unit_real(rng);
    const double h1 = 0.4 + 0.6 * oracle::unit_real(rng);
    const bool equal_heights = trial % 2 == 0;
    const double h2 = equal_heights ? h1 : h1 + 0.2 + 0.3 * oracle::unit_real(rng);
    PolyUnion u(2);
    u.add(Polyhedron::box(v2(0.0, 0.0), v2(split, h1)));
    u.add(Polyhedron::box(v2(split, 0.0), v2(1.0, h2)));
    const PolyUnion merged = merge_union(u);
    CHECK(merged.size() == (equal_heights ? 1 : 2));
  }
}

TEST_CASE("geometry: invariance check, hand cases") {
  Mat half(1, 1), twice(1, 1);
  half << 0.5;
  twice << 2.0;
  CHECK(invariance_check(interval(-1, 1), {half, Vec::Zero(1)}));
  CHECK(!invariance_check(interval(-1, 1), {twice, Vec::Zero(1)}));
}

TEST_CASE("geometry: invariance check agrees with the corner oracle") {
  std::mt19937_64 rng(111);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Mat M(2, 2);
    M << oracle::gaussian(rng), oracle::gaussian(rng), oracle::gaussian(rng),
        oracle::gaussian(rng);
    const double rho = M.eigenvalues().cwiseAbs().maxCoeff();
    const Mat C = M * ((0.3 + 0.85 * oracle::unit_real(rng)) / rho);
    const double c = 0.2 + oracle::unit_real(rng);
    const Polyhedron box = square(-c, c);

    // Exact oracle: a linear image of a box attains extremes at corners.
    bool contained = true;
    double margin = 1e9;
    for (int sx = -1; sx <= 1; sx += 2) {
      for (int sy = -1; sy <= 1; sy += 2) {
        const Vec corner = C * v2(sx * c, sy * c);
        const double viol = box.violation(corner);
        margin = std::min(margin, std::abs(viol));
        if (viol > 0.0) contained = false;
      }
    }
    if (margin < 1e-9) continue;  // borderline, tolerance-dependent
    CHECK(invariance_check(box, {C, Vec::Zero(2)}) == contained);
    ++compared;
  }
  CHECK(compared >= 40);
}

TEST_CASE("geometry: cleanup operations preserve the set pointwise") {
  std::mt19937_64 rng(112);
  for (int trial = 0; trial < 15; ++trial) {
    const Polyhedron p = oracle::random_polytope_2d(rng, 10);
    const Polyhedron d = remove_duplicates(p);
    const Polyhedron e = essential_hrep(d);
    const PrefilterResult f = bounding_box_prefilter(d);
    for (int s = 0; s < 70; ++s) {
      const Vec x = oracle::sample_box(rng, Vec::Constant(2, -1.1), Vec::Constant(2, 1.1));
      bool near_facet = false;
      for (const auto& h : p.constraints())
        if (std::abs(h.normal.dot(x) - h.offset) <= 1e-6) near_facet = true;
      if (near_facet) continue;
      const bool inside = p.contains(x, 0.0);
      CHECK(d.contains(x, 0.0) == inside);
      CHECK(e.contains(x, 0.0) == inside);
      CHECK(f.poly.contains(x, 0.0) == inside);
    }
  }
}

TEST_CASE("geometry: preimage of image round trip for invertible maps") {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 15; ++trial) {
    const Polyhedron p = oracle::random_polytope_2d(rng, 5);
    Mat C(2, 2);
    do {
      C << oracle::gaussian(rng), oracle::gaussian(rng), oracle::gaussian(rng),
          oracle::gaussian(rng);
    } while (std::abs(C.determinant()) < 0.3);
    const AffineMap map{C, v2(oracle::gaussian(rng), oracle::gaussian(rng))};
    const Polyhedron round = affine_preimage(affine_image(p, map), map);
    for (int s = 0; s < 60; ++s) {
      const Vec x = oracle::sample_box(rng, Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
      if (p.contains(x, -1e-7)) CHECK(round.contains(x, 1e-7));
    }
  }
}
