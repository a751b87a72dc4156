#pragma once

#include "nashapprox/core.hpp"
#include "nashapprox/geometry.hpp"
#include "nashapprox/polynomial.hpp"
#include "nashapprox/solver.hpp"

#include <string>
#include <variant>
#include <vector>

namespace nashapprox {

// Player set {x_i : g(x_i) <= 0} ∩ box, in the player's own coordinates.
struct PlayerSet {
  Polynomial g;
  Polytope box;
};

struct SharedPolytope {
  Polytope set;
};

struct IndependentConvex {
  std::vector<PlayerSet> players;
};

using ConstraintSet = std::variant<SharedPolytope, IndependentConvex>;

struct SliceIndex {
  std::size_t player = 0;
  std::size_t a = 0;  // number of coordinates controlled by the other players
  std::size_t m = 0;  // 2a + 1
};

// Linear and convex polynomial constraints on the joint strategy.
struct FeasibleSet {
  Mat A;
  Vec b;
  std::vector<ConvexConstraint> convex;

  bool contains(const Vec& x, double tol = kGeoTol) const;
};

class Game {
 public:
  Game(std::vector<std::size_t> dims, std::vector<Polynomial> costs, ConstraintSet constraint, double lipschitz);

  std::size_t n_players() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim() const { return total_; }
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  const std::vector<Polynomial>& costs() const { return costs_; }
  const Polynomial& cost(std::size_t i) const { return costs_.at(i); }
  const ConstraintSet& constraint() const { return constraint_; }
  // The constraint exactly as passed to the constructor, before completion of representations.
  const ConstraintSet& input_constraint() const { return input_; }
  bool shared() const { return std::holds_alternative<SharedPolytope>(constraint_); }
  double lipschitz() const { return lipschitz_; }

  SliceIndex slice(std::size_t i) const;
  // Coordinates of player i, and of all other players in ascending player order.
  std::vector<std::size_t> own(std::size_t i) const;
  std::vector<std::size_t> others(std::size_t i) const;
  Vec minus(std::size_t i, const Vec& x) const;

  // The true strategy set.
  const FeasibleSet& feasible_set() const { return feasible_; }
  // Shared mode: the strategy polytope. Independent mode: the product of the boxes.
  const Polytope& hull() const { return hull_; }
  bool feasible(const Vec& x, double tol = kGeoTol) const { return feasible_.contains(x, tol); }

  Game with_costs(std::vector<Polynomial> costs) const;

 private:
  std::vector<std::size_t> dims_, offsets_;
  std::size_t total_ = 0;
  std::vector<Polynomial> costs_;
  ConstraintSet constraint_, input_;
  double lipschitz_ = 0.0;
  FeasibleSet feasible_;
  Polytope hull_;
};

// (x_{-i}, -x_{-i}, f_i(x)).
Vec objective_image(const Game& g, std::size_t i, const Vec& x);

// Points of a regular grid over the bounding box of the strategy set (plus its vertices) that are feasible.
std::vector<Vec> feasible_grid(const Game& g, int per_axis);

// Largest ||grad f_i||_inf over feasible grid points of all resolutions up to `grid_density`.
double estimate_lipschitz(const Game& g, int grid_density);

// Players whose cost has a sampled Hessian that is not positive semidefinite.
std::vector<std::string> convexity_warnings(const Game& g, int grid_density = 7);

// Adds beta_i * sum_{j != i} ||x_j||^2 to costs that are convex in the player's own variables but not jointly
// convex at the sampled points. Best responses, and hence the equilibrium sets for every epsilon, are unchanged.
struct Convexification {
  std::vector<double> beta;
  bool changed = false;
};
Convexification convexify(const Game& g, Game* out, int grid_density = 7);

// Strictly feasible point of a player set; throws an assumption error when the set has empty interior.
Vec interior_point(const PlayerSet& s);

}  // namespace nashapprox
