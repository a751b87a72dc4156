#pragma once

#include "nashapprox/benson.hpp"
#include "nashapprox/faces.hpp"
#include "nashapprox/game.hpp"
#include "nashapprox/projection.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nashapprox {

// Finite union of polytopes in strategy space. With independent player sets, the convex constraints of the
// strategy set are kept as `clip` instead of being polyhedral.
struct RegionUnion {
  std::size_t dim = 0;
  std::vector<Polytope> pieces;  // bounded, nonempty, both representations
  double eps_certified = 0.0;
  std::vector<ConvexConstraint> clip;

  bool empty() const { return pieces.empty(); }
  bool contains(const Vec& x, double tol = kGeoTol) const;
};

struct PlayerReport {
  std::size_t player = 0;
  int faces = 0;
  int preimages = 0;
  int benson_iterations = 0;
  int scalarizations = 0;
  int projection_iterations = 0;
  int support_steps = 0;
  double certified_eps2 = 0.0;  // largest certified projection error over the faces
  int pieces = 0;
  double seconds_benson = 0.0;
  double seconds_faces = 0.0;
  double seconds_projection = 0.0;
};

struct RunReport {
  std::vector<PlayerReport> players;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double lipschitz = 0.0;
  double eps = 0.0;  // eps1 + 2 L eps2
  double seconds_players = 0.0;
  double seconds_intersection = 0.0;
  double seconds_total = 0.0;
  std::size_t pieces = 0;
  std::vector<double> convexify_beta;  // empty when the costs were used unchanged
  std::vector<std::string> warnings;
};

struct SolveOptions {
  int threads = 0;  // 0: NASHAPPROX_THREADS, else the hardware concurrency
  bool convexify = true;
  int outer_dirs = 0;
  int benson_max_iterations = 400;
  int projection_max_iterations = 300;
};

// Everything computed for one player, kept for inspection by tests.
struct PlayerRun {
  UpperImageApprox ua;
  std::vector<EfficientFace> faces;
  std::vector<ProjectionInstance> instances;
  std::vector<ProjectionResult> projections;
  RegionUnion region;
  PlayerReport report;
};

PlayerRun run_player(const Game& g, std::size_t i, double eps1, double eps2, const SolveOptions& opts = {});
RegionUnion player_region(const Game& g, std::size_t i, double eps1, double eps2);

// Pieces are the nonempty intersections over all tuples of pieces; pieces inside another piece are dropped.
RegionUnion intersect_regions(const std::vector<RegionUnion>& regions);

// Sorts vertices and halfspaces of every piece and then the pieces, for reproducible output.
void canonicalize(RegionUnion& r);

// Groups of pieces connected through pairwise intersections (touching counts), each sorted.
std::vector<std::vector<std::size_t>> connected_groups(const RegionUnion& r, double tol = kGeoTol);

// Points drawn from the pieces: a piece uniformly at random, then rejection sampling in its bounding box with
// a Dirichlet combination of its vertices as fallback for thin pieces.
std::vector<Vec> sample_region(const RegionUnion& r, int count, std::uint64_t seed = 1);

// Per-player f_i(x) minus the minimum of f_i over the slice of the strategy set through x.
std::vector<double> ne_gaps(const Game& g, const Vec& x);
bool epsilon_ne_oracle(const Game& g, const Vec& x, double eps);

// Points of a per_axis^n grid over the bounding box of the strategy set that lie in the set.
std::vector<Vec> strategy_grid(const Game& g, int per_axis);
std::vector<Vec> brute_force_ne(const Game& g, int per_axis, double eps);

// The game restricted to the finite strategy set `grid`: its eps-equilibria by best-response enumeration, and
// the grid points that are eps-Pareto optimal (direction e_m) for the image problem of every player.
std::vector<std::size_t> grid_game_ne(const Game& g, const std::vector<Vec>& grid, double eps);
std::vector<std::size_t> grid_pareto(const Game& g, std::size_t i, const std::vector<Vec>& grid, double eps);
std::vector<std::size_t> grid_pareto_intersection(const Game& g, const std::vector<Vec>& grid, double eps);

// The game the pipeline works on: costs that are convex in the player's own variables but not jointly convex
// get the convexifying term (beta receives its weights, empty when nothing changed).
Game pipeline_game(const Game& g, std::vector<double>* beta = nullptr);

std::pair<RegionUnion, RunReport> solve(const Game& g, double eps1, double eps2, const SolveOptions& opts = {});

// Value of NASHAPPROX_THREADS, else the hardware concurrency (at least 1).
int default_threads();

}  // namespace nashapprox
