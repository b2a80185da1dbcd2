#include "pwareach/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace pwareach {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;

// Dense tableau for max c_ext'y s.t. By = rhs, y >= 0.
// Rows 0..m-1 hold B^-1[B | rhs]; row m holds reduced costs and the
// current objective value in the rhs cell.
struct Tableau {
  Mat t;                    // (m+1) x (ncols+1)
  std::vector<int> basis;   // basic column per row
  int m = 0;
  int ncols = 0;

  double& at(int r, int c) { return t(r, c); }
  double rhs(int r) const { return t(r, ncols); }

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int r = 0; r <= m; ++r) {
      if (r == row) continue;
      const double f = t(r, col);
      if (f != 0.0) t.row(r) -= f * t.row(row);
    }
    basis[row] = col;
  }

  // Rebuild the reduced-cost row for objective c_ext from the current basis.
  void set_costs(const Vec& c_ext) {
    t.row(m).setZero();
    t.row(m).head(ncols) = -c_ext.transpose();
    for (int r = 0; r < m; ++r) {
      const double cb = c_ext(basis[r]);
      if (cb != 0.0) t.row(m) += cb * t.row(r);
    }
  }
};

enum class PhaseResult { Converged, Unbounded, IterationLimit };

// Runs simplex pivots until optimality for a maximization tableau.
// `allowed` limits which columns may enter (used to fence off artificials).
PhaseResult run_phase(Tableau& tab, int allowed_cols, long max_iters) {
  long iters = 0;
  const long bland_after = max_iters / 4;
  while (true) {
    if (++iters > max_iters) return PhaseResult::IterationLimit;
    const bool bland = iters > bland_after;

    int enter = -1;
    double best = -kCostTol;
    for (int j = 0; j < allowed_cols; ++j) {
      const double cj = tab.at(tab.m, j);
      if (cj < -kCostTol) {
        if (bland) { enter = j; break; }
        if (cj < best) { best = cj; enter = j; }
      }
    }
    if (enter < 0) return PhaseResult::Converged;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < tab.m; ++r) {
      const double a = tab.at(r, enter);
      if (a > kPivotTol) {
        const double ratio = tab.rhs(r) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leave >= 0 &&
             tab.basis[r] < tab.basis[leave])) {
          best_ratio = ratio;
          leave = r;
        }
      }
    }
    if (leave < 0) return PhaseResult::Unbounded;
    tab.pivot(leave, enter);
  }
}

struct Standardized {
  Tableau tab;
  Mat orig;             // constraint matrix before any pivoting
  Vec orig_rhs;
  int n = 0;            // original variable count
  int m = 0;
  int art_begin = 0;    // first artificial column; ncols if none
};

// Standard form: x = u - v with u, v >= 0, slack per row, artificials for
// rows whose rhs had to be sign-flipped.
Standardized build(const Mat& A, const Vec& b) {
  Standardized s;
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  s.n = n;
  s.m = m;

  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (b(i) < 0.0) art_rows.push_back(i);
  const int k = static_cast<int>(art_rows.size());
  const int ncols = 2 * n + m + k;
  s.art_begin = 2 * n + m;

  Tableau& tab = s.tab;
  tab.m = m;
  tab.ncols = ncols;
  tab.t = Mat::Zero(m + 1, ncols + 1);
  tab.basis.assign(m, -1);

  int next_art = s.art_begin;
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    tab.t.block(i, 0, 1, n) = sign * A.row(i);
    tab.t.block(i, n, 1, n) = -sign * A.row(i);
    tab.t(i, 2 * n + i) = sign;  // slack
    tab.t(i, ncols) = sign * b(i);
    if (sign < 0.0) {
      tab.t(i, next_art) = 1.0;
      tab.basis[i] = next_art++;
    } else {
      tab.basis[i] = 2 * n + i;
    }
  }
  s.orig = tab.t.topLeftCorner(m, ncols);
  s.orig_rhs = tab.t.col(ncols).head(m);
  return s;
}

// Phase 1: drive the artificials to zero. Returns false if infeasible.
// On success no artificial remains basic: each is pivoted out, or its row
// (then redundant) is zeroed so later pivots cannot lift it off zero.
bool phase_one(Standardized& s, const Tolerances& tol) {
  const int k = s.tab.ncols - s.art_begin;
  if (k == 0) return true;
  Vec c1 = Vec::Zero(s.tab.ncols);
  c1.segment(s.art_begin, k).setConstant(-1.0);
  s.tab.set_costs(c1);
  const long cap = 2000 + 60L * (s.tab.m + s.tab.ncols);
  const PhaseResult r = run_phase(s.tab, s.tab.ncols, cap);
  if (r == PhaseResult::IterationLimit)
    throw NumericalError("lp: phase-1 iteration limit reached");
  // Unbounded cannot occur: the phase-1 objective is bounded above by zero.
  if (r == PhaseResult::Unbounded)
    throw NumericalError("lp: phase-1 reported unbounded");
  const double art_sum = -s.tab.rhs(s.tab.m);
  if (art_sum > tol.feas * 10.0) return false;

  for (int row = 0; row < s.m; ++row) {
    if (s.tab.basis[row] < s.art_begin) continue;
    int enter = -1;
    double best = kPivotTol;
    for (int j = 0; j < s.art_begin; ++j) {
      const double a = std::abs(s.tab.at(row, j));
      if (a > best) {
        best = a;
        enter = j;
      }
    }
    if (enter >= 0)
      s.tab.pivot(row, enter);  // degenerate pivot, rhs stays at zero
    else
      s.tab.t.row(row).setZero();  // redundant constraint row
  }
  return true;
}

Vec extract_point(const Standardized& s) {
  // Re-solve the final basis system from the unpivoted data; this removes
  // roundoff accumulated across pivots on near-degenerate problems.
  Mat B(s.m, s.m);
  for (int r = 0; r < s.m; ++r) B.col(r) = s.orig.col(s.tab.basis[r]);
  Vec xb = B.colPivHouseholderQr().solve(s.orig_rhs);
  if (!xb.allFinite() || xb.minCoeff() < -1e-9 ||
      (B * xb - s.orig_rhs).lpNorm<Eigen::Infinity>() >
          1e-9 * (1.0 + s.orig_rhs.lpNorm<Eigen::Infinity>())) {
    for (int r = 0; r < s.m; ++r) xb(r) = s.tab.rhs(r);  // keep tableau values
  }
  Vec x = Vec::Zero(s.n);
  for (int r = 0; r < s.m; ++r) {
    const int col = s.tab.basis[r];
    if (col < s.n)
      x(col) += xb(r);
    else if (col < 2 * s.n)
      x(col - s.n) -= xb(r);
  }
  return x;
}

void check_dims(const Vec& objective, const Mat& A, const Vec& b) {
  if (A.rows() != b.size())
    throw InvalidInputError("lp: constraint matrix rows != rhs length");
  if (objective.size() != A.cols())
    throw InvalidInputError("lp: objective length != constraint columns");
}

}  // namespace

LpOutcome solve_lp(const Vec& objective, const Mat& A, const Vec& b,
                   const Tolerances& tol) {
  check_dims(objective, A, b);
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());

  if (m == 0) {
    LpOutcome out;
    if (objective.size() == 0 || objective.lpNorm<Eigen::Infinity>() <= tol.norm) {
      out.status = LpStatus::Optimal;
      out.value = 0.0;
      out.point = Vec::Zero(n);
    } else {
      out.status = LpStatus::Unbounded;
    }
    return out;
  }

  Standardized s = build(A, b);
  if (!phase_one(s, tol)) return {LpStatus::Infeasible, 0.0, {}};

  Vec c2 = Vec::Zero(s.tab.ncols);
  c2.head(n) = objective;
  c2.segment(n, n) = -objective;
  s.tab.set_costs(c2);
  const long cap = 4000 + 120L * (s.tab.m + s.tab.ncols);
  // Artificials are fenced out of the entering-column scan in phase 2.
  const PhaseResult r = run_phase(s.tab, s.art_begin, cap);
  if (r == PhaseResult::IterationLimit)
    throw NumericalError("lp: phase-2 iteration limit reached");
  if (r == PhaseResult::Unbounded) return {LpStatus::Unbounded, 0.0, {}};

  LpOutcome out;
  out.status = LpStatus::Optimal;
  out.point = extract_point(s);
  out.value = objective.dot(out.point);

  const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  const double viol = m > 0 ? (A * out.point - b).maxCoeff() : 0.0;
  if (viol > tol.feas * scale)
    throw NumericalError("lp: optimal point violates feasibility beyond tolerance");
  return out;
}

FeasibleOutcome find_feasible(const Mat& A, const Vec& b, const Tolerances& tol) {
  if (A.rows() != b.size())
    throw InvalidInputError("lp: constraint matrix rows != rhs length");
  const int n = static_cast<int>(A.cols());
  if (A.rows() == 0) return {true, Vec::Zero(n)};

  Standardized s = build(A, b);
  if (!phase_one(s, tol)) return {false, {}};
  FeasibleOutcome out;
  out.feasible = true;
  out.point = extract_point(s);
  const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  const double viol = (A * out.point - b).maxCoeff();
  if (viol > tol.feas * scale)
    throw NumericalError("lp: feasible point violates constraints beyond tolerance");
  return out;
}

}  // namespace pwareach
