#pragma once

#include "nashapprox/game.hpp"
#include "nashapprox/geometry.hpp"

#include <vector>

namespace nashapprox {

// (x_{-i}, -x_{-i}, f_i(x)) without the feasibility check; preimage seeds may lie outside the strategy set.
Vec image_point(const Game& g, std::size_t i, const Vec& x);

struct Scalarization {
  SolveStatus status = SolveStatus::Infeasible;
  Vec x;
  double z = 0.0;
  Vec w;             // cut normal, last component 1
  double gap = 0.0;  // primal minus certified dual value of the slice problem
  // The cut {y : w.y >= offset} contains every feasible image.
  double offset = 0.0;
};

// Smallest shift z with v + z e_m in the upper image: z = min{f_i(x) : x in domain, x_{-i} = v_{1:a}} - v_m.
Scalarization pascoletti_serafini(const Game& g, std::size_t i, const Vec& v, const FeasibleSet& domain);
Scalarization pascoletti_serafini(const Game& g, std::size_t i, const Vec& v);

struct UpperImageApprox {
  std::size_t player = 0;
  SliceIndex slice;
  double eps1 = 0.0;
  FeasibleSet domain;              // feasible set of the scalarizations
  std::vector<Halfspace> cuts;     // outer approximation, halfspace form
  Polytope outer;                  // both representations
  std::vector<Vec> preimages;
  std::vector<Vec> images;
  Polytope inner;                  // conv(images) + nonnegative orthant
  int iterations = 0;
  int scalarizations = 0;
  double max_z = 0.0;              // largest z over the current outer vertices
  bool converged = false;

  struct Solved {
    Vec v;
    double z;
  };
  std::vector<Solved> solved;
};

// Supporting halfspaces from weighted sums, the subspace cut y_{1:a} = -y_{a+1:2a}, and the cut bounding
// y_{1:a} to the projection of the strategy polytope. Vertices of the strategy polytope seed the preimages.
UpperImageApprox initialize(const Game& g, std::size_t i, double eps1);

// Polyhedral outer approximation of the other players' sets from support values in `dirs` directions.
Polytope outer_approx_others(const Game& g, std::size_t i, int dirs);

// Variant for independent convex player sets: the strategy polytope is replaced by the player's own set
// times an outer approximation of the others' sets.
UpperImageApprox initialize_independent(const Game& g, std::size_t i, double eps1, int outer_dirs = 0);

// One Benson iteration: solves the scalarization at every new outer vertex and cuts off those further than
// eps1 from the upper image. Returns true once all vertices are within eps1.
bool refine_step(UpperImageApprox& ua, const Game& g);

// Runs refine_step until convergence; throws an iteration budget error otherwise.
void refine(UpperImageApprox& ua, const Game& g, int max_iterations = 400);

// Vertical distance t >= 0 with v + t e_m in the inner approximation (infinity when no such t exists).
double vertical_distance(const Polytope& inner, const Vec& v);

// Rebuilds the inner approximation from the preimages.
void update_inner(UpperImageApprox& ua, const Game& g);

}  // namespace nashapprox
