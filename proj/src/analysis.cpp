#include "pwareach/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pwareach {

std::vector<FixedPoint> find_fixed_points(const PwaFunction& pwa,
                                          const Tolerances& tol) {
  std::vector<FixedPoint> out;
  for (size_t k = 0; k < pwa.regions.size(); ++k) {
    const Region& r = pwa.regions[k];
    const int n = static_cast<int>(r.map.matrix.rows());
    if (r.map.matrix.cols() != n)
      throw InvalidInputError("find_fixed_points: maps must be square");
    const Mat M = Mat::Identity(n, n) - r.map.matrix;

    Eigen::JacobiSVD<Mat> svd(M);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin >= tol.cond_max) continue;  // non-unique

    const Vec x = M.fullPivLu().solve(r.map.offset);
    if ((M * x - r.map.offset).lpNorm<Eigen::Infinity>() > 1e-8) continue;

    // Strict interiority: every facet slack clears 1e-8.
    bool interior = true;
    for (const auto& h : r.poly.constraints()) {
      if (h.offset - h.normal.dot(x) <= 1e-8) {
        interior = false;
        break;
      }
    }
    if (!interior) continue;

    FixedPoint fp;
    fp.point = x;
    fp.region_index = static_cast<int>(k);
    Eigen::EigenSolver<Mat> eig(r.map.matrix);
    fp.spectral_radius = eig.eigenvalues().cwiseAbs().maxCoeff();
    fp.stable = fp.spectral_radius < 1.0 - tol.stab;
    out.push_back(std::move(fp));
  }
  return out;
}

namespace {

// Solves C' P C - P = -I via the Kronecker system; valid for rho(C) < 1.
Mat discrete_lyapunov(const Mat& C) {
  const int n = static_cast<int>(C.rows());
  const Mat Ct = C.transpose();
  Mat K = Mat::Zero(n * n, n * n);
  // vec(C' P C) = (C' kron C') vec(P) with column-major vec.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      K.block(i * n, j * n, n, n) = Ct(j, i) * Ct;
  Mat I = Mat::Identity(n, n);
  Eigen::Map<Vec> rhs(I.data(), n * n);
  const Mat A = K - Mat::Identity(n * n, n * n);
  Vec vp = A.fullPivLu().solve(Vec(-rhs));
  Mat P = Eigen::Map<Mat>(vp.data(), n, n);
  return 0.5 * (P + P.transpose());  // symmetrize against solve noise
}

}  // namespace

Polyhedron seed_roa(const FixedPoint& fp, const Region& region,
                    const Tolerances& tol) {
  if (!fp.stable)
    throw InvalidInputError("seed_roa: fixed point must be stable");
  const Mat& C = region.map.matrix;
  const int n = static_cast<int>(C.rows());

  const Mat P = discrete_lyapunov(C);
  Eigen::LLT<Mat> llt(P);
  if (llt.info() != Eigen::Success)
    throw NumericalError("seed_roa: Lyapunov matrix is not positive definite");
  const Mat F0 = Mat(llt.matrixL()).transpose();  // P = F0' F0

  // In Lyapunov coordinates w = F0 (x - fp) the dynamics contract in the
  // Euclidean norm with factor sig < 1. A box there need not be invariant
  // when the dynamics rotate, so intersect with backward images of the box
  // until the tail images are implied: sig^(K+1) sqrt(n) <= 1.
  const Mat Chat = F0 * C * F0.inverse();
  Eigen::JacobiSVD<Mat> svd(Chat);
  const double sig = svd.singularValues().maxCoeff();
  int K = 0;
  if (sig >= 1.0)
    throw NumericalError("seed_roa: Lyapunov contraction factor >= 1");
  while (std::pow(sig, K + 1) * std::sqrt(static_cast<double>(n)) > 1.0 && K < 200)
    ++K;

  // Facet rows at unit scale: +-(F0 C^k) for k = 0..K, shifted to fp.
  auto build = [&](double scale) {
    Polyhedron s(n);
    Mat Ck = Mat::Identity(n, n);
    for (int k = 0; k <= K; ++k) {
      const Mat rows = F0 * Ck;
      for (int i = 0; i < n; ++i) {
        const Vec a = rows.row(i).transpose();
        const double nrm = a.norm();
        if (nrm <= tol.norm) continue;
        s.add({a / nrm, scale / nrm + (a / nrm).dot(fp.point)});
        s.add({-a / nrm, scale / nrm - (a / nrm).dot(fp.point)});
      }
      Ck = C * Ck;
    }
    return essential_hrep(remove_duplicates(s, tol), tol);
  };

  // Containment bound: scale at which the unit-scale set first touches a
  // region facet, via one support LP per facet.
  const Polyhedron unit = build(1.0);
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& h : region.poly.constraints()) {
    if (h.degenerate(tol.norm)) continue;
    const double slack = h.offset - h.normal.dot(fp.point);
    const LpOutcome lp = solve_lp(h.normal, unit.matrix(), unit.rhs(), tol);
    if (lp.status != LpStatus::Optimal)
      throw NumericalError("seed_roa: support LP failed");
    const double support = lp.value - h.normal.dot(fp.point);
    if (support > tol.feas) hi = std::min(hi, slack / support);
  }
  if (!std::isfinite(hi) || hi <= 0.0)
    throw NumericalError("seed_roa: no positive scale fits inside the region");

  auto passes = [&](double scale) {
    const Polyhedron cand = build(scale);
    if (!invariance_check(cand, region.map, tol)) return false;
    for (const auto& h : region.poly.constraints()) {
      if (h.degenerate(tol.norm)) continue;
      const LpOutcome lp = solve_lp(h.normal, cand.matrix(), cand.rhs(), tol);
      if (lp.status != LpStatus::Optimal || lp.value > h.offset + tol.feas)
        return false;
    }
    return true;
  };

  double lo = 0.0;
  double best = -1.0;
  double probe = hi;  // the support bound is expected to pass already
  for (int it = 0; it < 20; ++it) {
    if (passes(probe)) {
      best = probe;
      lo = probe;
    } else {
      hi = probe;
    }
    if (hi - lo < 1e-12 * (1.0 + hi)) break;
    probe = 0.5 * (lo + hi);
  }
  if (best <= 0.0)
    throw NumericalError("seed_roa: no scale passed invariance and containment");
  return build(best);
}

HomeoCertificate check_homeomorphism(const PwaFunction& pwa,
                                     const Tolerances& tol) {
  HomeoCertificate cert;
  if (pwa.regions.empty()) return cert;
  const int n = static_cast<int>(pwa.regions.front().map.matrix.rows());
  if (pwa.regions.front().map.matrix.cols() != n)
    throw InvalidInputError("check_homeomorphism: maps must be square");

  cert.minor_signs.assign(static_cast<size_t>(n), 0);
  cert.is_homeomorphism = true;
  for (size_t k = 0; k < pwa.regions.size() && cert.is_homeomorphism; ++k) {
    const Mat& C = pwa.regions[k].map.matrix;
    for (int r = 1; r <= n; ++r) {
      const double det = C.topLeftCorner(r, r).determinant();
      const int sign = det > tol.det ? 1 : (det < -tol.det ? -1 : 0);
      int& consensus = cert.minor_signs[static_cast<size_t>(r - 1)];
      if (sign == 0 || (consensus != 0 && sign != consensus)) {
        cert.is_homeomorphism = false;
        cert.failing_region = static_cast<int>(k);
        consensus = 0;
        break;
      }
      consensus = sign;
    }
  }
  return cert;
}

RoaResult grow_roa(const ReluNetwork& net, const PwaFunction& pwa,
                   const FixedPoint& fp, const Polyhedron& seed, int steps,
                   const RoaOptions& opts) {
  RoaResult res;
  res.fixed_point = fp;
  res.seed = seed;
  res.steps = steps;
  res.roa = PolyUnion(seed.dim());
  res.roa.add(seed);
  res.region_counts_per_step.push_back(res.roa.size());

  if (opts.one_shot && steps >= 1) {
    const ReluNetwork composed = concatenate(net, steps);
    BackwardOptions bopts;
    bopts.march.tol = opts.tol;
    bopts.march.limits = opts.limits;
    if (opts.use_connected) {
      bopts.connected_from = fp.point;
      bopts.homeo_certified = true;
    }
    const ReachResult rr = backward_reach(composed, pwa.domain, {seed}, bopts);
    PolyUnion pre(seed.dim());
    pre.add(seed);  // the seed is invariant, so it belongs to every step
    for (const auto& m : rr.sets.front().members()) pre.add(m);
    res.roa = merge_union(pre, opts.tol, opts.limits);
    res.region_counts_per_step.push_back(res.roa.size());
    return res;
  }

  for (int t = 1; t <= steps; ++t) {
    PolyUnion next(seed.dim());
    if (opts.use_connected) {
      BackwardOptions bopts;
      bopts.connected_from = fp.point;
      bopts.homeo_certified = true;
      bopts.march.tol = opts.tol;
      bopts.march.limits = opts.limits;
      const ReachResult rr =
          backward_reach(net, pwa.domain, res.roa.members(), bopts);
      for (const auto& set : rr.sets)
        for (const auto& m : set.members()) next.add(m);
    } else {
      for (const auto& region : pwa.regions) {
        for (const auto& member : res.roa.members()) {
          Polyhedron piece =
              intersect(region.poly, affine_preimage(member, region.map));
          if (!is_feasible(piece, opts.tol)) continue;
          next.add(essential_hrep(remove_duplicates(piece, opts.tol), opts.tol));
        }
      }
    }
    res.roa = merge_union(next, opts.tol, opts.limits);
    if (static_cast<long>(res.roa.size()) > opts.limits.union_cap)
      throw ResourceLimitError("grow_roa: union cap exceeded");
    res.region_counts_per_step.push_back(res.roa.size());
  }
  return res;
}

namespace {

// Shrinks each facet of each member by the disturbance support in the
// facet-normal direction (Minkowski erosion for additive disturbances).
PolyUnion erode_by_disturbance(const PolyUnion& target, const Polyhedron& w,
                               const Tolerances& tol) {
  PolyUnion out(target.dim());
  const Mat A = w.matrix();
  const Vec b = w.rhs();
  for (const auto& member : target.members()) {
    Polyhedron shrunk(member.dim());
    for (const auto& h : member.constraints()) {
      if (h.degenerate(tol.norm)) {
        shrunk.add(h);
        continue;
      }
      const LpOutcome lp = solve_lp(h.normal, A, b, tol);
      if (lp.status != LpStatus::Optimal)
        throw InvalidInputError("predecessor_set: disturbance set must be a nonempty polytope");
      shrunk.add({h.normal, h.offset - lp.value});
    }
    out.add_if_feasible(std::move(shrunk), tol);
  }
  return out;
}

}  // namespace

PolyUnion predecessor_set(const PwaFunction& pwa_control, const PolyUnion& target,
                          const PolyUnion& admissible,
                          const std::optional<Polyhedron>& disturbance,
                          const Tolerances& tol, const Limits& lim) {
  if (pwa_control.regions.empty())
    throw InvalidInputError("predecessor_set: control system has no regions");
  const int n = static_cast<int>(pwa_control.regions.front().map.matrix.rows());
  const int nxu = pwa_control.domain.dim();
  if (n >= nxu)
    throw InvalidInputError("predecessor_set: map must drop the control dimensions");

  const PolyUnion goal =
      disturbance ? erode_by_disturbance(target, *disturbance, tol) : target;

  // Phi: admissible (x, u) pairs that map into the target.
  PolyUnion phi(nxu);
  for (const auto& region : pwa_control.regions) {
    for (const auto& member : goal.members()) {
      Polyhedron piece =
          intersect(region.poly, affine_preimage(member, region.map));
      if (!is_feasible(piece, tol)) continue;
      phi.add(essential_hrep(remove_duplicates(piece, tol), tol));
    }
  }

  // Sigma = Y \ (gamma \ Phi); in the deterministic case the intermediate
  // projection is the identity and Y coincides with the admissible set.
  const PolyUnion delta = union_difference(admissible, phi, tol, lim);
  const PolyUnion sigma = union_difference(admissible, delta, tol, lim);

  std::vector<int> keep(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) keep[static_cast<size_t>(j)] = j;
  PolyUnion pre(n);
  for (const auto& member : sigma.members())
    pre.add_if_feasible(project(member, keep, tol, lim), tol);
  return merge_union(pre, tol, lim);
}

InvariantSetResult control_invariant_set(const PwaFunction& pwa_control,
                                         const PolyUnion& domain_xu, int max_iters,
                                         const Tolerances& tol, const Limits& lim) {
  const int n = static_cast<int>(pwa_control.regions.front().map.matrix.rows());
  std::vector<int> keep(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) keep[static_cast<size_t>(j)] = j;

  InvariantSetResult res;
  PolyUnion current(n);
  for (const auto& member : domain_xu.members())
    current.add_if_feasible(project(member, keep, tol, lim), tol);
  current = merge_union(current, tol, lim);

  for (int it = 1; it <= max_iters; ++it) {
    PolyUnion next = predecessor_set(pwa_control, current, domain_xu, {}, tol, lim);
    res.iterations = it;
    const bool same = union_difference(current, next, tol, lim).empty() &&
                      union_difference(next, current, tol, lim).empty();
    current = std::move(next);
    if (same) {
      res.converged = true;
      break;
    }
  }
  res.invariant_set = std::move(current);
  return res;
}

}  // namespace pwareach
