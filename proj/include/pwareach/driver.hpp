#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwareach/types.hpp"

namespace pwareach {

/// A fully described CLI job. `run_job` is the single entry point shared by
/// the command-line binary and the tests.
struct JobConfig {
  std::string command;  // decompose|forward|backward|verify|fixed-points|roa|invariant|check-homeo
  std::string network_path;
  std::string domain_box;         // "lo,hi;lo,hi;..." per input dimension
  std::string domain_poly_path;   // alternative: polytope JSON file
  std::vector<std::string> target_paths;
  int steps = 1;          // backward/verify: composition depth; roa: growth steps
  int max_iters = 50;     // invariant: recursion cap
  bool early_stop = false;
  bool connected = false;
  int parallel = 1;
  std::string out_path;   // result JSON (stdout when empty)
  std::string svg_path;
  std::string seed_point;  // "x,y,..." marching start; sampled when empty
  std::uint64_t seed = 20240;
  double tol_feas = -1.0;  // negative keeps the library default
  long region_cap = -1;
};

/// Exit code: 0 success/SAFE, 1 UNSAFE (verify only), 2 error.
int run_job(const JobConfig& cfg);

}  // namespace pwareach
