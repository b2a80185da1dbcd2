#include <CLI11.hpp>

#include "pwareach/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "pwareach: exact piecewise-affine decomposition, reachability, and "
      "stability analysis for ReLU networks"};
  app.require_subcommand(1);

  pwareach::JobConfig cfg;

  auto add_common = [&](CLI::App* sub, bool needs_network = true) {
    if (needs_network)
      sub->add_option("--network", cfg.network_path, "network JSON file")
          ->required();
    sub->add_option("--domain-box", cfg.domain_box,
                    "axis-aligned domain, \"lo,hi;lo,hi;...\"");
    sub->add_option("--domain", cfg.domain_poly_path, "domain polytope JSON file");
    sub->add_option("--out", cfg.out_path, "result JSON path (stdout if omitted)");
    sub->add_option("--svg", cfg.svg_path, "2-D tessellation/set plot path");
    sub->add_option("--seed", cfg.seed, "RNG seed for interior-point sampling");
    sub->add_option("--seed-point", cfg.seed_point,
                    "marching start point \"x1,x2,...\" (sampled if omitted)");
    sub->add_option("--parallel", cfg.parallel, "worker threads for marching");
    sub->add_option("--tol-feas", cfg.tol_feas, "feasibility tolerance override");
    sub->add_option("--region-cap", cfg.region_cap, "region enumeration cap");
  };

  auto* decompose = app.add_subcommand(
      "decompose", "enumerate the explicit piecewise-affine representation");
  add_common(decompose);

  auto* forward = app.add_subcommand("forward", "exact forward reachable set");
  add_common(forward);

  auto* backward = app.add_subcommand("backward", "exact backward reachable sets");
  add_common(backward);
  backward->add_option("--target", cfg.target_paths, "output-space polytope JSON")
      ->required();
  backward->add_option("--steps", cfg.steps, "self-composition depth");
  backward->add_flag("--early-stop", cfg.early_stop,
                     "return at the first nonempty intersection");
  backward->add_flag("--connected", cfg.connected,
                     "restrict marching to the connected preimage component");

  auto* verify = app.add_subcommand(
      "verify", "safety check: exit 0 SAFE, 1 UNSAFE (witness in JSON), 2 error");
  add_common(verify);
  verify->add_option("--target", cfg.target_paths, "unsafe output set JSON")
      ->required();
  verify->add_option("--steps", cfg.steps, "self-composition depth");
  verify->add_flag("--early-stop", cfg.early_stop,
                   "stop at the first counterexample region");
  verify->add_flag("--connected", cfg.connected,
                   "restrict marching to the connected preimage component");

  auto* fps = app.add_subcommand("fixed-points",
                                 "fixed points and stability of x+ = F(x)");
  add_common(fps);

  auto* roa = app.add_subcommand(
      "roa", "regions of attraction via iterated backward reachability");
  add_common(roa);
  roa->add_option("--steps", cfg.steps, "growth steps");
  roa->add_flag("--connected", cfg.connected,
                "use connected-restricted marching (homeomorphic nets)");

  auto* inv = app.add_subcommand(
      "invariant", "control invariant set for x+ = F(x,u) over an (x,u) domain");
  add_common(inv);
  inv->add_option("--max-iters", cfg.max_iters, "recursion iteration cap");

  auto* homeo = app.add_subcommand("check-homeo",
                                   "certify the network as a homeomorphism");
  add_common(homeo);

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : {decompose, forward, backward, verify, fps, roa, inv, homeo})
    if (sub->parsed()) cfg.command = sub->get_name();
  return pwareach::run_job(cfg);
}
