#include "pwareach/marching.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <limits>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_set>

namespace pwareach {

int PwaFunction::locate(const Vec& x, double tol) const {
  for (size_t k = 0; k < regions.size(); ++k)
    if (regions[k].poly.contains(x, tol)) return static_cast<int>(k);
  return -1;
}

Vec PwaFunction::evaluate(const Vec& x, double tol) const {
  const int k = locate(x, tol);
  if (k < 0) throw InvalidInputError("pwa: point lies in no region");
  return regions[static_cast<size_t>(k)].map.apply(x);
}

namespace {

struct TaggedConstraints {
  std::vector<Halfspace> constraints;
  std::vector<FacetOrigin> origins;
  bool infeasible_marker = false;  // a constant-negative neuron was hit
};

// Neuron halfspaces followed by domain constraints, duplicates merged.
// Trivially satisfied degenerate constraints are dropped; an infeasible
// degenerate constraint flags the region empty.
TaggedConstraints tagged_constraints(const ReluNetwork& net,
                                     const ActivationPattern& pattern,
                                     const Polyhedron& domain,
                                     const Tolerances& tol) {
  TaggedConstraints out;
  const auto hs = neuron_halfspaces(net, pattern, tol);
  for (size_t q = 0; q < hs.size(); ++q) {
    const Halfspace& h = hs[q].normalized;
    if (h.degenerate(tol.norm)) {
      if (h.offset < 0.0) out.infeasible_marker = true;
      continue;
    }
    out.constraints.push_back(h);
    out.origins.push_back({false, {static_cast<int>(q)}});
  }
  for (const auto& h : domain.constraints()) {
    out.constraints.push_back(h);
    out.origins.push_back({true, {}});
  }

  // Merge duplicates, keeping the lower index and unioning provenance.
  std::vector<Halfspace> cs;
  std::vector<FacetOrigin> os;
  for (size_t j = 0; j < out.constraints.size(); ++j) {
    const Halfspace& hj = out.constraints[j];
    bool dup = false;
    for (size_t i = 0; i < cs.size(); ++i) {
      if (std::abs(hj.offset - cs[i].offset) <= tol.dup &&
          (hj.normal - cs[i].normal).lpNorm<Eigen::Infinity>() <= tol.dup) {
        os[i].domain_boundary |= out.origins[j].domain_boundary;
        for (int q : out.origins[j].neurons) os[i].neurons.push_back(q);
        dup = true;
        break;
      }
    }
    if (!dup) {
      cs.push_back(hj);
      os.push_back(out.origins[j]);
    }
  }
  out.constraints = std::move(cs);
  out.origins = std::move(os);
  return out;
}

}  // namespace

Polyhedron polyhedron_from_pattern(const ReluNetwork& net,
                                   const ActivationPattern& pattern,
                                   const Polyhedron& domain,
                                   const Tolerances& tol) {
  if (domain.dim() != net.input_dim())
    throw InvalidInputError("polyhedron_from_pattern: domain dimension mismatch");
  const TaggedConstraints tc = tagged_constraints(net, pattern, domain, tol);
  Polyhedron p(net.input_dim());
  if (tc.infeasible_marker) {
    p.add({Vec::Zero(net.input_dim()), -1.0});
    return p;
  }
  for (const auto& h : tc.constraints) p.add(h);
  return p;
}

ActivationPattern neighbor_pattern(const ReluNetwork& net,
                                   const ActivationPattern& pattern,
                                   const Halfspace& facet,
                                   const Tolerances& tol) {
  if (pattern.size() != net.num_hidden_neurons())
    throw InvalidInputError("neighbor_pattern: pattern length mismatch");
  const int n = net.input_dim();
  ActivationPattern next = pattern;

  Mat prefix = Mat::Identity(n + 1, n + 1);
  for (int i = 0; i < net.num_hidden_layers(); ++i) {
    const Layer& l = net.layer(i);
    Mat hom = Mat::Zero(l.weights.rows() + 1, l.weights.cols() + 1);
    hom.topLeftCorner(l.weights.rows(), l.weights.cols()) = l.weights;
    hom.col(l.weights.cols()).head(l.weights.rows()) = l.bias;
    hom(l.weights.rows(), l.weights.cols()) = 1.0;
    Mat rows = hom * prefix;

    for (int j = 0; j < l.bias.size(); ++j) {
      const int q = net.neuron_index(i, j);
      const Vec raw_a = rows.row(j).head(n).transpose();
      const double raw_b = -rows(j, n);
      const double s = next.bits[q] ? -1.0 : 1.0;
      const double na = raw_a.norm();
      if (na <= tol.norm) {
        // Degenerate-zero hyperplane: the neuron pins to inactive.
        if (std::abs(s * raw_b) <= tol.dup) next.bits[q] = 0;
        continue;
      }
      const Vec a = s * raw_a / na;
      const double b = s * raw_b / na;
      if (std::abs(b - facet.offset) <= tol.dup &&
          (a - facet.normal).lpNorm<Eigen::Infinity>() <= tol.dup)
        next.bits[q] ^= 1;  // this neuron's hyperplane is the shared facet
    }

    for (int j = 0; j < l.bias.size(); ++j)
      if (!next.bits[net.neuron_index(i, j)]) rows.row(j).setZero();
    prefix = std::move(rows);
  }
  return next;
}

namespace {

struct BuiltRegion {
  bool valid = false;
  Region region;
  Vec interior_point;
};

BuiltRegion build_region(const ReluNetwork& net, const ActivationPattern& pattern,
                         const Polyhedron& domain, const Tolerances& tol) {
  BuiltRegion out;
  TaggedConstraints tc = tagged_constraints(net, pattern, domain, tol);
  if (tc.infeasible_marker) return out;

  Polyhedron raw(net.input_dim());
  for (const auto& h : tc.constraints) raw.add(h);

  // Regions without interior (empty or lower-dimensional after clipping)
  // are discarded.
  const ChebyshevResult cheb = chebyshev_center(raw, tol);
  if (!cheb.feasible || cheb.radius <= tol.feas) return out;

  const PrefilterResult pre = bounding_box_prefilter(raw, tol);
  auto [ess, ess_kept] = essential_hrep_tracked(pre.poly, tol);
  if (ess.size() == 1 && ess.constraint(0).degenerate(tol.norm)) return out;

  out.valid = true;
  out.interior_point = cheb.center;
  out.region.pattern = pattern;
  out.region.poly = std::move(ess);
  out.region.map = affine_map_for(net, pattern);
  out.region.origins.reserve(ess_kept.size());
  for (int k : ess_kept)
    out.region.origins.push_back(tc.origins[static_cast<size_t>(pre.kept[k])]);
  return out;
}

double min_preactivation_magnitude(const ReluNetwork& net, const Vec& x) {
  double best = std::numeric_limits<double>::infinity();
  Vec z = x;
  for (int i = 0; i < net.num_hidden_layers(); ++i) {
    const Vec pre = net.layer(i).weights * z + net.layer(i).bias;
    best = std::min(best, pre.cwiseAbs().minCoeff());
    z = pre.cwiseMax(0.0);
  }
  return best;
}

// Uniform seed sampling in the domain, rejecting points on or near any
// neuron hyperplane. 100 attempts, then give up.
Vec sample_seed(const ReluNetwork& net, const Polyhedron& domain,
                const BoundingBox& box, std::uint64_t rng_seed,
                const std::optional<Vec>& requested) {
  constexpr double kBoundaryMargin = 1e-7;
  if (requested) {
    if (requested->size() != net.input_dim())
      throw InvalidInputError("march: seed point dimension mismatch");
    if (domain.contains(*requested, -1e-12) &&
        min_preactivation_magnitude(net, *requested) >= kBoundaryMargin)
      return *requested;
    // Fall through: a boundary seed triggers automatic resampling.
  }
  std::mt19937_64 rng(rng_seed);
  const auto next_unit = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vec x(net.input_dim());
    for (int j = 0; j < x.size(); ++j)
      x(j) = box.lo(j) + next_unit() * (box.hi(j) - box.lo(j));
    if (!domain.contains(x, -1e-9)) continue;
    if (min_preactivation_magnitude(net, x) >= kBoundaryMargin) return x;
  }
  throw NumericalError("march: failed to sample an interior seed point off all neuron hyperplanes");
}

struct VisitOutcome {
  bool expand = true;
  bool stop = false;
};

// Candidate neighbor patterns across a region's non-domain facets.
std::vector<ActivationPattern> neighbor_candidates(const ReluNetwork& net,
                                                   const Region& region,
                                                   const Tolerances& tol) {
  std::vector<ActivationPattern> out;
  for (int i = 0; i < region.poly.size(); ++i) {
    if (region.origins[static_cast<size_t>(i)].domain_boundary) continue;
    out.push_back(neighbor_pattern(net, region.pattern, region.poly.constraint(i), tol));
  }
  return out;
}

// Breadth-first march over activation patterns. The visitor runs once per
// valid region and decides whether its neighbors join the working set.
// Returns the number of regions visited.
template <typename Visitor>
long march(const ReluNetwork& net, const Polyhedron& domain,
           const MarchOptions& opts, Visitor&& visit) {
  if (domain.dim() != net.input_dim())
    throw InvalidInputError("march: domain dimension mismatch");
  const BoundingBox box = bounding_box(domain, opts.tol);
  if (!box.feasible) throw InvalidInputError("march: domain is empty");
  if (!box.lo.allFinite() || !box.hi.allFinite())
    throw InvalidInputError("march: domain must be bounded");

  const Vec seed =
      sample_seed(net, domain, box, opts.rng_seed, opts.seed_point);
  const ActivationPattern seed_pattern = activation_pattern(net, seed);

  std::deque<ActivationPattern> work;
  std::unordered_set<std::string> seen;
  work.push_back(seed_pattern);
  seen.insert(seed_pattern.key());
  long processed = 0;

  if (opts.threads <= 1) {
    while (!work.empty()) {
      ActivationPattern lam = std::move(work.front());
      work.pop_front();
      BuiltRegion built = build_region(net, lam, domain, opts.tol);
      if (!built.valid) continue;
      if (++processed > opts.limits.region_cap)
        throw ResourceLimitError("march: region cap exceeded");
      const VisitOutcome out = visit(built);
      if (out.stop) break;
      if (!out.expand) continue;
      for (auto& cand : neighbor_candidates(net, built.region, opts.tol))
        if (seen.insert(cand.key()).second) work.push_back(std::move(cand));
    }
    return processed;
  }

  // Worker pool: the visited set provides test-and-insert under a shared
  // lock, so the region set matches the sequential mode while emission
  // order does not.
  std::mutex mu;
  std::condition_variable cv;
  int active = 0;
  bool stop = false;
  std::exception_ptr error;

  auto worker = [&]() {
    std::unique_lock<std::mutex> lk(mu);
    while (true) {
      cv.wait(lk, [&] {
        return stop || error || !work.empty() || active == 0;
      });
      if (stop || error) return;
      if (work.empty()) {
        if (active == 0) {
          cv.notify_all();
          return;
        }
        continue;
      }
      ActivationPattern lam = std::move(work.front());
      work.pop_front();
      ++active;
      lk.unlock();

      BuiltRegion built;
      std::vector<ActivationPattern> cands;
      std::exception_ptr local_error;
      try {
        built = build_region(net, lam, domain, opts.tol);
      } catch (...) {
        local_error = std::current_exception();
      }

      lk.lock();
      if (local_error) {
        error = local_error;
        --active;
        cv.notify_all();
        return;
      }
      if (!built.valid) {
        --active;
        cv.notify_all();
        continue;
      }
      if (++processed > opts.limits.region_cap)
        error = std::make_exception_ptr(
            ResourceLimitError("march: region cap exceeded"));
      VisitOutcome out;
      if (!error) {
        try {
          out = visit(built);
        } catch (...) {
          error = std::current_exception();
        }
      }
      if (out.stop) stop = true;
      bool expand = !error && !stop && out.expand;
      lk.unlock();

      if (expand) {
        try {
          cands = neighbor_candidates(net, built.region, opts.tol);
        } catch (...) {
          local_error = std::current_exception();
        }
      }

      lk.lock();
      if (local_error) error = local_error;
      for (auto& cand : cands)
        if (seen.insert(cand.key()).second) work.push_back(std::move(cand));
      --active;
      cv.notify_all();
      if (stop || error) return;
    }
  };

  std::vector<std::thread> pool;
  const int nthreads = std::max(2, opts.threads);
  pool.reserve(static_cast<size_t>(nthreads));
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return processed;
}

}  // namespace

PwaFunction enumerate_regions(const ReluNetwork& net, const Polyhedron& domain,
                              const MarchOptions& opts) {
  PwaFunction pwa;
  pwa.domain = domain;
  march(net, domain, opts, [&](const BuiltRegion& built) {
    pwa.regions.push_back(built.region);
    return VisitOutcome{};
  });
  return pwa;
}

ForwardReachResult forward_reach(const ReluNetwork& net, const Polyhedron& domain,
                                 const MarchOptions& opts) {
  ForwardReachResult res;
  res.image = PolyUnion(net.output_dim());
  res.pwa.domain = domain;
  march(net, domain, opts, [&](const BuiltRegion& built) {
    res.pwa.regions.push_back(built.region);
    res.image.add_if_feasible(
        affine_image(built.region.poly, built.region.map, opts.tol, opts.limits),
        opts.tol);
    return VisitOutcome{};
  });
  return res;
}

ReachResult backward_reach(const ReluNetwork& net, const Polyhedron& domain,
                           const std::vector<Polyhedron>& targets,
                           const BackwardOptions& opts) {
  if (targets.empty())
    throw InvalidInputError("backward_reach: needs at least one target");
  for (const auto& t : targets)
    if (t.dim() != net.output_dim())
      throw InvalidInputError("backward_reach: target dimension mismatch");

  const bool connected = opts.connected_from.has_value();
  if (connected && !opts.homeo_certified)
    throw InvalidInputError(
        "backward_reach: connected mode requires a homeomorphism certificate");

  MarchOptions mopts = opts.march;
  if (connected) {
    const Vec& x0 = *opts.connected_from;
    const Vec y0 = net.evaluate(x0);
    bool in_target = false;
    for (const auto& t : targets)
      if (t.contains(y0, mopts.tol.feas)) in_target = true;
    if (!in_target)
      throw InvalidInputError(
          "backward_reach: connected seed does not map into any target");
    mopts.seed_point = x0;
  }

  ReachResult res;
  res.sets.assign(targets.size(), PolyUnion(net.input_dim()));

  res.regions_explored =
      march(net, domain, mopts, [&](const BuiltRegion& built) {
        VisitOutcome out;
        bool hit = false;
        for (size_t t = 0; t < targets.size(); ++t) {
          Polyhedron piece =
              intersect(built.region.poly, affine_preimage(targets[t], built.region.map));
          const ChebyshevResult cheb = chebyshev_center(piece, mopts.tol);
          if (!cheb.feasible) continue;
          hit = true;
          res.sets[t].add(
              essential_hrep(remove_duplicates(piece, mopts.tol), mopts.tol));
          if (opts.early_stop && res.status == ReachStatus::Complete) {
            res.status = ReachStatus::EarlyTerminated;
            res.witness = built.region;
            res.witness_point = cheb.center;
            res.witness_target = static_cast<int>(t);
          }
        }
        if (opts.early_stop && hit) {
          out.stop = true;
          return out;
        }
        out.expand = connected ? hit : true;
        return out;
      });
  return res;
}

}  // namespace pwareach
