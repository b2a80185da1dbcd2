#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace pwareach {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Numerical tolerances and resource caps used across the library.
/// Defaults are library-wide; callers may override per call.
struct Tolerances {
  double feas = 1e-8;        // primal feasibility slack
  double obj = 1e-7;         // objective accuracy of LP optima
  double dup = 1e-7;         // componentwise match for duplicate constraints
  double red = 1e-8;         // redundancy margin in essentiality tests
  double norm = 1e-9;        // below this a constraint normal counts as zero
  double stab = 1e-9;        // spectral-radius margin for stability
  double det = 1e-12;        // minor determinants below this count as zero
  double cond_max = 1e10;    // condition-number cutoff for direct inversion
  double box_margin = 1e-6;  // soundness margin for interval prefiltering
};

/// Resource caps for the set-operation and marching loops.
struct Limits {
  long fm_constraint_cap = 10000;  // intermediate rows during elimination
  long region_cap = 1000000;       // regions enumerated per marching run
  long union_cap = 50000;          // members per polyhedral union
};

/// The LP kernel could not certify optimal/infeasible/unbounded.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A configured cap (constraint count, region count, union size) was hit.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

/// Inputs violate a documented precondition (dimension mismatch etc.).
class InvalidInputError : public std::invalid_argument {
 public:
  explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace pwareach
