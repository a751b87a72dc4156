#include <doctest.h>

#include "nashapprox/equilibrium.hpp"
#include "nashapprox/fixtures.hpp"
#include "nashapprox/projection.hpp"
#include "test_helpers.hpp"

#include <random>

using namespace nashapprox;
using namespace testing_helpers;

namespace {

ProjectionInstance point_instance(const Game& g, std::size_t i, const Vec& x, double eps2) {
  ProjectionInstance pi;
  pi.game = &g;
  pi.player = i;
  pi.domain = g.feasible_set();
  pi.face_images = {objective_image(g, i, x)};
  pi.face_preimages = {x};
  pi.eps2 = eps2;
  return pi;
}

}  // namespace

TEST_CASE("support_step examples") {
  const Game g = make_fixture("ex51").game;

  SUBCASE("face at the equilibrium image is a single point") {
    const ProjectionInstance pi = point_instance(g, 0, vec({0.25, -0.25}), 0.001);
    for (double s : {1.0, -1.0}) {
      const SupportStep st = support_step(pi, vec({s, 0}));
      CHECK(st.x(0) == doctest::Approx(0.25).epsilon(1e-4));
      CHECK(st.x(1) == doctest::Approx(-0.25).epsilon(1e-9));
      CHECK(st.cut.slack(st.x) >= -1e-9);
    }
  }

  SUBCASE("single point face recovers the slice segment") {
    // f_1(x_1, 1/2) = x_1^2 / 2 - x_1 + 1/4 <= 1/4  <=>  x_1 in [0, 2], clipped to [0, 1].
    const ProjectionInstance pi = point_instance(g, 0, vec({0, 0.5}), 0.001);
    const SupportStep lo = support_step(pi, vec({1, 0}));
    const SupportStep hi = support_step(pi, vec({-1, 0}));
    CHECK(lo.x(0) == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(hi.x(0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(lo.x(1) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(in_shadow(pi, lo.x, 1e-8));
    CHECK(in_shadow(pi, hi.x, 1e-8));
    CHECK_FALSE(in_shadow(pi, vec({0.5, 0.4}), 1e-8));
  }
}

TEST_CASE("approximate_projection examples") {
  SUBCASE("linear cost gives an exact polyhedral projection") {
    const Game g({1, 1}, {poly(2, {{1, {1, 0}}, {1, {0, 1}}}), poly(2, {{1, {0, 1}}, {0.5, {1, 0}}})},
                 SharedPolytope{Polytope::box(vec({0, 0}), vec({1, 1}))}, 1.5);
    const PlayerRun run = run_player(g, 0, 0.01, 0.001);
    REQUIRE_FALSE(run.projections.empty());
    for (const auto& pr : run.projections) CHECK(pr.certified_eps <= 1e-8);
  }

  SUBCASE("loose tolerance stops after the seeds") {
    const Game g = make_fixture("ex51").game;
    const ProjectionInstance pi = point_instance(g, 0, vec({0, 0.5}), 10.0);
    const ProjectionResult pr = approximate_projection(pi);
    CHECK(pr.iterations == 0);
    CHECK(pr.certified_eps <= 10.0);
    CHECK(pr.support_steps <= 4);
  }

  SUBCASE("union of the pieces of the pollution game samples to eps-equilibria of each player") {
    const Fixture f = make_fixture("ex54");
    for (std::size_t i = 0; i < 2; ++i) {
      const RegionUnion r = player_region(f.game, i, f.eps1, f.eps2);
      for (const auto& x : sample_region(r, 200, 5 + i))
        CHECK(ne_gaps(f.game, x)[i] <= f.eps1 + 2 * f.game.lipschitz() * f.eps2 + kReportTol);
    }
  }
}

TEST_CASE("property: projection contract on every fixture face") {
  std::mt19937 rng(13);
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    const Fixture f = make_fixture(name);
    const Game g = pipeline_game(f.game);
    const auto [lo, hi] = g.hull().bounding_box();
    for (std::size_t i = 0; i < g.n_players(); ++i) {
      const PlayerRun run = run_player(g, i, f.eps1, f.eps2);
      REQUIRE(run.projections.size() == run.faces.size());
      for (std::size_t j = 0; j < run.projections.size(); ++j) {
        const ProjectionInstance& pi = run.instances[j];
        const ProjectionResult& pr = run.projections[j];
        // Left inclusion: every collected point lies in the shadow.
        for (const auto& x : pr.inner_points) {
          CHECK(g.feasible(x, 1e-8));
          CHECK(in_shadow(pi, x, kKktTol));
        }
        // Right inclusion: certified at every outer vertex.
        CHECK(pr.certified_eps <= f.eps2);
        for (const auto& u : pr.outer_vertices) CHECK(l1_distance_to_polytope(u, pr.inner_hull) <= pr.certified_eps + 1e-9);
        // The outer set contains the shadow.
        for (int s = 0; s < 200; ++s) {
          const Vec x = uniform(rng, lo, hi);
          if (!g.feasible(x) || !in_shadow(pi, x, 0.0)) continue;
          for (const auto& h : pr.outer) CHECK(h.slack(x) >= -1e-7);
        }
      }

      // Per-player sandwich: known equilibria are covered, inner hull points are eps1-optimal in their slice.
      for (const auto& x : f.known_ne) CHECK(run.region.contains(x));
      RegionUnion inner;
      inner.dim = g.dim();
      for (const auto& pr : run.projections) inner.pieces.push_back(pr.inner_hull);
      for (const auto& x : sample_region(inner, 1000 / static_cast<int>(g.n_players()), 17 + i))
        CHECK(ne_gaps(g, x)[i] <= f.eps1 + kReportTol);
    }
  }
}
