#include "pwareach/driver.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pwareach/analysis.hpp"
#include "pwareach/json_io.hpp"
#include "pwareach/marching.hpp"
#include "pwareach/svg.hpp"

namespace pwareach {

namespace {

Polyhedron parse_domain(const JobConfig& cfg, int expected_dim) {
  if (!cfg.domain_poly_path.empty())
    return load_polyhedron(cfg.domain_poly_path, expected_dim);
  if (cfg.domain_box.empty())
    throw InvalidInputError("a domain is required (--domain-box or --domain)");
  std::vector<double> los, his;
  std::stringstream ss(cfg.domain_box);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    const auto comma = part.find(',');
    if (comma == std::string::npos)
      throw InvalidInputError("domain box: expected 'lo,hi;lo,hi;...'");
    los.push_back(std::stod(part.substr(0, comma)));
    his.push_back(std::stod(part.substr(comma + 1)));
  }
  const int n = static_cast<int>(los.size());
  if (expected_dim >= 0 && n != expected_dim)
    throw InvalidInputError("domain box dimension does not match the network input");
  Vec lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(los[j]) || !std::isfinite(his[j]) || !(los[j] < his[j]))
      throw InvalidInputError("domain box: bounds must be finite with lo < hi");
    lo(j) = los[j];
    hi(j) = his[j];
  }
  return Polyhedron::box(lo, hi);
}

MarchOptions march_options(const JobConfig& cfg) {
  MarchOptions m;
  m.threads = cfg.parallel;
  m.rng_seed = cfg.seed;
  if (cfg.tol_feas > 0.0) m.tol.feas = cfg.tol_feas;
  if (cfg.region_cap > 0) m.limits.region_cap = cfg.region_cap;
  if (!cfg.seed_point.empty()) {
    std::vector<double> vals;
    std::stringstream ss(cfg.seed_point);
    std::string part;
    while (std::getline(ss, part, ',')) vals.push_back(std::stod(part));
    Vec x(static_cast<int>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) x(static_cast<int>(i)) = vals[i];
    m.seed_point = std::move(x);
  }
  return m;
}

void emit(const JobConfig& cfg, const Json& j) {
  if (cfg.out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    save_json(cfg.out_path, j);
}

void maybe_svg(const JobConfig& cfg, const std::vector<Polyhedron>& polys,
               const Polyhedron& bounds_poly) {
  if (cfg.svg_path.empty()) return;
  const BoundingBox bb = bounding_box(bounds_poly);
  if (!bb.feasible || bounds_poly.dim() != 2)
    throw InvalidInputError("--svg requires a nonempty 2-D domain");
  std::ofstream out(cfg.svg_path);
  if (!out) throw InvalidInputError("cannot write file: " + cfg.svg_path);
  out << render_svg(polys, bb.lo, bb.hi, cfg.seed);
}

std::vector<Polyhedron> region_polys(const PwaFunction& pwa) {
  std::vector<Polyhedron> out;
  out.reserve(pwa.regions.size());
  for (const auto& r : pwa.regions) out.push_back(r.poly);
  return out;
}

int cmd_decompose(const JobConfig& cfg) {
  const ReluNetwork net = load_network(cfg.network_path);
  const Polyhedron domain = parse_domain(cfg, net.input_dim());
  const PwaFunction pwa = enumerate_regions(net, domain, march_options(cfg));
  std::cout << "regions: " << pwa.regions.size() << "\n";
  emit(cfg, to_json(pwa));
  maybe_svg(cfg, region_polys(pwa), domain);
  return 0;
}

int cmd_forward(const JobConfig& cfg) {
  const ReluNetwork net = load_network(cfg.network_path);
  const Polyhedron domain = parse_domain(cfg, net.input_dim());
  const ForwardReachResult res = forward_reach(net, domain, march_options(cfg));
  Json j;
  j["pwa"] = to_json(res.pwa);
  j["image"] = to_json(res.image);
  emit(cfg, j);
  maybe_svg(cfg, region_polys(res.pwa), domain);
  return 0;
}

ReachResult run_backward(const JobConfig& cfg, const ReluNetwork& base_net) {
  const ReluNetwork net =
      cfg.steps > 1 ? concatenate(base_net, cfg.steps) : base_net;
  const Polyhedron domain = parse_domain(cfg, net.input_dim());
  if (cfg.target_paths.empty())
    throw InvalidInputError("at least one --target file is required");
  std::vector<Polyhedron> targets;
  for (const auto& path : cfg.target_paths)
    targets.push_back(load_polyhedron(path, net.output_dim()));

  BackwardOptions opts;
  opts.early_stop = cfg.early_stop;
  opts.march = march_options(cfg);
  if (cfg.connected) {
    const PwaFunction pwa =
        enumerate_regions(net, domain, march_options(cfg));
    const HomeoCertificate cert = check_homeomorphism(pwa);
    if (!cert.is_homeomorphism)
      throw InvalidInputError(
          "--connected: network failed the homeomorphism check");
    opts.homeo_certified = true;
    // Seed the connected march from a domain point mapping into a target.
    bool found = false;
    for (const auto& region : pwa.regions) {
      for (size_t t = 0; t < targets.size() && !found; ++t) {
        Polyhedron piece =
            intersect(region.poly, affine_preimage(targets[t], region.map));
        const ChebyshevResult ch = chebyshev_center(piece, opts.march.tol);
        if (ch.feasible && ch.radius > opts.march.tol.feas) {
          opts.connected_from = ch.center;
          found = true;
        }
      }
      if (found) break;
    }
    if (!found)
      throw InvalidInputError("--connected: preimage is empty, nothing to seed from");
  }
  return backward_reach(net, domain, targets, opts);
}

int cmd_backward(const JobConfig& cfg) {
  const ReluNetwork net = load_network(cfg.network_path);
  const ReachResult res = run_backward(cfg, net);
  emit(cfg, to_json(res));
  if (!cfg.svg_path.empty()) {
    std::vector<Polyhedron> polys;
    for (const auto& s : res.sets)
      for (const auto& m : s.members()) polys.push_back(m);
    maybe_svg(cfg, polys, parse_domain(cfg, net.input_dim()));
  }
  return 0;
}

int cmd_verify(const JobConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const ReluNetwork net = load_network(cfg.network_path);
  const ReachResult res = run_backward(cfg, net);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool unsafe = res.status == ReachStatus::EarlyTerminated;
  for (const auto& s : res.sets)
    if (!s.empty()) unsafe = true;

  Json j = to_json(res);
  j["result"] = unsafe ? "UNSAFE" : "SAFE";
  if (unsafe && res.status == ReachStatus::Complete) {
    // Non-anytime run: report an interior witness from the first piece.
    for (const auto& s : res.sets) {
      if (s.empty()) continue;
      const ChebyshevResult ch = chebyshev_center(s.members().front());
      if (ch.feasible) {
        Json wp = Json::array();
        for (int i = 0; i < ch.center.size(); ++i) wp.push_back(ch.center(i));
        j["witness_point"] = std::move(wp);
      }
      break;
    }
  }
  emit(cfg, j);
  std::cout << "result: " << (unsafe ? "UNSAFE" : "SAFE")
            << "  regions_explored: " << res.regions_explored
            << "  wall_time_s: " << wall << "\n";
  return unsafe ? 1 : 0;
}

int cmd_fixed_points(const JobConfig& cfg) {
  const ReluNetwork net = load_network(cfg.network_path);
  const Polyhedron domain = parse_domain(cfg, net.input_dim());
  const PwaFunction pwa = enumerate_regions(net, domain, march_options(cfg));
  Json j;
  j["regions"] = pwa.regions.size();
  Json fps = Json::array();
  for (const auto& fp : find_fixed_points(pwa)) fps.push_back(to_json(fp));
  j["fixed_points"] = std::move(fps);
  emit(cfg, j);
  return 0;
}

int cmd_check_homeo(const JobConfig& cfg) {
  const ReluNetwork net = load_network(cfg.network_path);
  const Polyhedron domain = parse_domain(cfg, net.input_dim());
  const PwaFunction pwa = enumerate_regions(net, domain, march_options(cfg));
  Json j = to_json(check_homeomorphism(pwa));
  j["regions"] = pwa.regions.size();
  emit(cfg, j);
  return 0;
}

int cmd_roa(const JobConfig& cfg) {
  const ReluNetwork net = load_network(cfg.network_path);
  const Polyhedron domain = parse_domain(cfg, net.input_dim());
  const MarchOptions mopts = march_options(cfg);
  const PwaFunction pwa = enumerate_regions(net, domain, mopts);
  const HomeoCertificate cert = check_homeomorphism(pwa);
  if (cfg.connected && !cert.is_homeomorphism)
    throw InvalidInputError("--connected: network failed the homeomorphism check");

  Json j;
  j["regions"] = pwa.regions.size();
  j["homeomorphism"] = to_json(cert);
  Json out_fps = Json::array();
  std::vector<Polyhedron> final_polys;

  RoaOptions ropts;
  ropts.use_connected = cfg.connected;
  ropts.tol = mopts.tol;
  ropts.limits = mopts.limits;
  for (const auto& fp : find_fixed_points(pwa)) {
    Json jf = to_json(fp);
    if (fp.stable) {
      const Region& region = pwa.regions[static_cast<size_t>(fp.region_index)];
      const Polyhedron seed = seed_roa(fp, region);
      const RoaResult roa = grow_roa(net, pwa, fp, seed, cfg.steps, ropts);
      jf["seed"] = to_json(seed);
      jf["roa"] = to_json(roa.roa);
      jf["union_size_per_step"] = roa.region_counts_per_step;
      for (const auto& m : roa.roa.members()) final_polys.push_back(m);
    }
    out_fps.push_back(std::move(jf));
  }
  j["fixed_points"] = std::move(out_fps);
  emit(cfg, j);
  maybe_svg(cfg, final_polys, domain);
  return 0;
}

int cmd_invariant(const JobConfig& cfg) {
  const ReluNetwork net = load_network(cfg.network_path);
  if (net.output_dim() >= net.input_dim())
    throw InvalidInputError("invariant: network must map (x,u) to x");
  const Polyhedron domain_xu = parse_domain(cfg, net.input_dim());
  const PwaFunction pwa = enumerate_regions(net, domain_xu, march_options(cfg));
  PolyUnion domain_union(domain_xu.dim());
  domain_union.add(domain_xu);
  const InvariantSetResult res =
      control_invariant_set(pwa, domain_union, cfg.max_iters);
  Json j;
  j["invariant_set"] = to_json(res.invariant_set);
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  emit(cfg, j);
  return 0;
}

}  // namespace

int run_job(const JobConfig& cfg) {
  try {
    if (cfg.command == "decompose") return cmd_decompose(cfg);
    if (cfg.command == "forward") return cmd_forward(cfg);
    if (cfg.command == "backward") return cmd_backward(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "fixed-points") return cmd_fixed_points(cfg);
    if (cfg.command == "roa") return cmd_roa(cfg);
    if (cfg.command == "invariant") return cmd_invariant(cfg);
    if (cfg.command == "check-homeo") return cmd_check_homeo(cfg);
    std::cerr << "unknown command: " << cfg.command << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace pwareach
