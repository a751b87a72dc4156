#pragma once

#include "nashapprox/core.hpp"
#include "nashapprox/polynomial.hpp"

#include <string>
#include <vector>

namespace nashapprox {

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIterations };

std::string to_string(SolveStatus s);

// Convex polynomial constraint p(x) <= rhs.
struct ConvexConstraint {
  Polynomial p;
  double rhs = 0.0;
};

// min  objective(x) + linear·x  s.t.  eq x = eq_rhs,  ineq x <= ineq_rhs,  convex constraints.
struct NlpProblem {
  std::size_t dim = 0;
  Polynomial objective;  // may be empty (zero)
  Vec linear;            // may be empty (zero)
  Mat eq;
  Vec eq_rhs;
  Mat ineq;
  Vec ineq_rhs;
  std::vector<ConvexConstraint> convex;

  explicit NlpProblem(std::size_t n = 0);
  double eval_objective(const Vec& x) const;
  Vec objective_gradient(const Vec& x) const;
  double max_violation(const Vec& x) const;
};

// Multipliers follow the Lagrangian  f + ineq_multipliers·(Ax-b) + eq_multipliers·(Ex-d) + convex_multipliers·(p-r).
struct NlpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  Vec x;
  double value = 0.0;
  double dual_value = 0.0;  // certified lower bound on the optimal value
  Vec eq_multipliers;
  Vec ineq_multipliers;
  Vec convex_multipliers;
  double kkt_residual = 0.0;
  int iterations = 0;
};

struct NlpOptions {
  double gap_tol = 1e-10;
  double barrier_factor = 0.2;
  int newton_per_stage = 200;
  int max_stages = 60;
};

// Dense two-phase simplex. Solves  min c·x  s.t.  A x <= b,  E x = d  (x free).
NlpSolution lp_solve(const Vec& c, const Mat& A, const Vec& b, const Mat& E = Mat(), const Vec& d = Vec());

// Log-barrier interior point method for convex problems; linear implicit equalities are detected and
// eliminated beforehand.
NlpSolution nlp_solve(const NlpProblem& p, const NlpOptions& opts = {});

// Outer linearization for a linear objective over linear and convex constraints; the LP value is a
// valid lower bound (dual_value) and x satisfies the convex constraints up to `tol`.
NlpSolution cutting_plane_solve(const NlpProblem& p, const std::vector<Vec>& seeds, double tol = 1e-9,
                                int max_iter = 500);

struct RelativeInterior {
  bool feasible = false;
  Vec point;
  std::vector<bool> implicit;  // per row of A: tight on the whole feasible set
};

// Relative interior point of {A x <= b, E x = d} and its implicit equalities.
RelativeInterior relative_interior(const Mat& A, const Vec& b, const Mat& E = Mat(), const Vec& d = Vec());

}  // namespace nashapprox
