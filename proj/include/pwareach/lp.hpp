#pragma once

#include "pwareach/types.hpp"

namespace pwareach {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Result of maximizing an objective over {x | Ax <= b} with free variables.
/// `value` and `point` are meaningful only when status == Optimal.
struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Vec point;
};

/// Maximize objective.dot(x) subject to A x <= b, x unrestricted in sign.
///
/// Dense two-phase simplex. The pivot rule is Dantzig's with a fixed
/// tie-break, falling back to Bland's rule after a pivot budget to rule out
/// cycling, so identical problems always yield identical outcomes. Throws
/// NumericalError if no status can be certified within the iteration cap.
LpOutcome solve_lp(const Vec& objective, const Mat& A, const Vec& b,
                   const Tolerances& tol = {});

struct FeasibleOutcome {
  bool feasible = false;
  Vec point;
};

/// Feasibility probe for {x | Ax <= b}; agrees with solve_lp on a zero
/// objective but skips the optimization phase.
FeasibleOutcome find_feasible(const Mat& A, const Vec& b, const Tolerances& tol = {});

}  // namespace pwareach
