#include <doctest.h>

#include "nashapprox/benson.hpp"
#include "nashapprox/fixtures.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace nashapprox;
using namespace testing_helpers;

namespace {

std::vector<Vec> feasible_samples(const Game& g, int count, unsigned seed) {
  std::mt19937 rng(seed);
  const auto [lo, hi] = g.hull().bounding_box();
  std::vector<Vec> out;
  while (static_cast<int>(out.size()) < count) {
    const Vec x = uniform(rng, lo, hi);
    if (g.feasible(x)) out.push_back(x);
  }
  return out;
}

bool near_any(const std::vector<Vec>& pts, const Vec& x, double tol = 1e-9) {
  for (const auto& p : pts)
    if ((p - x).cwiseAbs().maxCoeff() <= tol) return true;
  return false;
}

}  // namespace

TEST_CASE("pascoletti_serafini examples") {
  const Game g51 = make_fixture("ex51").game;
  const Scalarization s = pascoletti_serafini(g51, 0, vec({-0.25, 0.25, 0}));
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.z == doctest::Approx(1.0 / 32).epsilon(1e-8));
  CHECK(s.x(0) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(s.x(1) == doctest::Approx(-0.25));
  CHECK(s.w(2) == 1.0);
  CHECK(s.w.minCoeff() >= 0.0);

  const Scalarization on = pascoletti_serafini(g51, 0, vec({-0.25, 0.25, 1.0 / 32}));
  CHECK(std::abs(on.z) < 1e-8);

  const Game g53 = make_fixture("ex53").game;
  const Scalarization s53 = pascoletti_serafini(g53, 1, vec({1, -1, -1}));
  REQUIRE(s53.status == SolveStatus::Optimal);
  CHECK(s53.z == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::abs(s53.x(1)) < 1e-6);
}

TEST_CASE("property: scalarization cuts contain every feasible image") {
  std::mt19937 rng(7);
  for (const auto& name : {"ex51", "ex53", "search", "ex54", "ex55"}) {
    const Game g = make_fixture(name).game;
    const auto pts = feasible_samples(g, 200, 3);
    for (int trial = 0; trial < 10; ++trial) {
      for (std::size_t i = 0; i < g.n_players(); ++i) {
        const Vec ref = pts[static_cast<std::size_t>(trial * 17 % 200)];
        Vec v = image_point(g, i, ref);
        v(v.size() - 1) -= 0.5 * (trial % 3);
        const Scalarization s = pascoletti_serafini(g, i, v);
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(s.z <= g.cost(i).eval(ref) - v(v.size() - 1) + 1e-8);
        for (const auto& x : pts) CHECK(s.w.dot(image_point(g, i, x)) >= s.offset - kKktTol);
      }
    }
  }
}

TEST_CASE("initialize on the unit square game") {
  const Game g = make_fixture("ex51").game;
  const UpperImageApprox ua = initialize(g, 0, 0.01);
  for (const auto& c : {vec({1, 1}), vec({1, -1}), vec({-1, 1}), vec({-1, -1})}) CHECK(near_any(ua.preimages, c));
  for (const auto& v : ua.outer.vertices()) {
    CHECK(std::abs(v(0) + v(1)) < 1e-9);
    CHECK(v(0) >= -1 - 1e-9);
    CHECK(v(0) <= 1 + 1e-9);
  }
  for (const auto& x : g.hull().vertices()) CHECK(ua.outer.contains(objective_image(g, 0, x)));
  CHECK_THROWS_AS(initialize(g, 0, 0.0), Error);
}

TEST_CASE("refine on the unit square game") {
  const Game g = make_fixture("ex51").game;
  UpperImageApprox ua = initialize(g, 0, 0.01);
  refine(ua, g);
  CHECK(ua.converged);
  for (const auto& x : feasible_samples(g, 10000, 9))
    CHECK(vertical_distance(ua.inner, image_point(g, 0, x)) <= 0.01 + kGeoTol);

  UpperImageApprox loose = initialize(g, 0, 10.0);
  refine(loose, g);
  CHECK(loose.iterations == 0);

  const Game lin = g.with_costs({poly(2, {{1, {1, 0}}, {-2, {0, 1}}}), poly(2, {{1, {0, 1}}})});
  UpperImageApprox ul = initialize(lin, 0, 1e-6);
  refine(ul, lin);
  // The slice minima of a linear cost form a polyhedral boundary: one round of cuts makes it exact.
  CHECK(ul.iterations <= 1);
  CHECK(ul.max_z < 1e-8);
}

TEST_CASE("property: Benson invariants on the fixtures") {
  for (const auto& name : {"ex51", "ex52_y15", "ex53", "search", "ex54", "ex55"}) {
    const Fixture fx = make_fixture(name);
    Game g = fx.game;
    convexify(fx.game, &g);
    const auto pts = feasible_samples(g, 2000, 5);
    for (std::size_t i = 0; i < g.n_players(); ++i) {
      UpperImageApprox ua = initialize(g, i, fx.eps1);
      std::vector<Halfspace> prev;
      for (;;) {
        // Monotonicity: every new vertex satisfies the previous cuts.
        for (const auto& v : ua.outer.vertices())
          for (const auto& h : prev) CHECK(h.slack(v) >= -1e-9);
        prev = ua.cuts;
        if (refine_step(ua, g)) break;
        CHECK(ua.max_z >= -1e-8);
        REQUIRE(ua.iterations < 400);
      }
      for (const auto& y : ua.inner.vertices()) CHECK(near_any(ua.images, y, 1e-9));
      for (const auto& x : pts) {
        const Vec y = image_point(g, i, x);
        for (const auto& h : ua.cuts) CHECK(h.slack(y) >= -1e-8);
      }
      for (const auto& v : ua.outer.vertices()) CHECK(vertical_distance(ua.inner, v) <= fx.eps1 + kGeoTol);
      std::vector<Vec> proj;
      for (const auto& x : ua.preimages) proj.push_back(g.minus(i, x));
      const Polytope hull = to_hrep(Polytope::from_vertices(proj));
      for (const auto& x : pts) CHECK(hull.contains(g.minus(i, x), 1e-9));
    }
  }
}

TEST_CASE("independent mode") {
  SUBCASE("unit intervals reproduce the shared initialization") {
    PlayerSet unit{Polynomial(1), Polytope::box(vec({0}), vec({1}))};
    const Fixture fx = make_fixture("ex52_y05");
    const Game ind({1, 1}, fx.game.costs(), IndependentConvex{{unit, unit}}, fx.game.lipschitz());
    for (std::size_t i = 0; i < 2; ++i) {
      const UpperImageApprox a = initialize(fx.game, i, 0.01);
      const UpperImageApprox b = initialize_independent(ind, i, 0.01);
      REQUIRE(a.outer.vertices().size() == b.outer.vertices().size());
      for (const auto& v : a.outer.vertices()) CHECK(near_any(b.outer.vertices(), v, 1e-8));
    }
  }
  SUBCASE("disc outer approximation is a circumscribed octagon") {
    const Polynomial disc = poly(2, {{1, {2, 0}}, {1, {0, 2}}, {-1, {0, 0}}});
    PlayerSet p1{Polynomial(1), Polytope::box(vec({0}), vec({1}))};
    PlayerSet p2{disc, Polytope::box(vec({-2, -2}), vec({2, 2}))};
    const Polynomial f = poly(3, {{1, {2, 0, 0}}, {1, {1, 1, 0}}, {1, {0, 2, 0}}, {1, {0, 0, 2}}});
    const Game g({1, 2}, {f, f}, IndependentConvex{{p1, p2}}, 5.0);
    const Polytope oct = outer_approx_others(g, 0, 8);
    REQUIRE(oct.vertices().size() == 8);
    const double r = 1.0 / std::cos(std::numbers::pi / 8);
    for (const auto& v : oct.vertices()) CHECK(v.norm() == doctest::Approx(r).epsilon(1e-7));
    UpperImageApprox ua = initialize_independent(g, 0, 0.01, 8);
    // Seeds (x_1, p) with p an octagon vertex lie outside the disc.
    int outside = 0;
    for (const auto& x : ua.preimages) outside += g.feasible(x) ? 0 : 1;
    CHECK(outside >= 8);
    refine(ua, g);
    for (const auto& v : ua.outer.vertices()) CHECK(vertical_distance(ua.inner, v) <= 0.01 + kGeoTol);
  }
  SUBCASE("empty interior is rejected") {
    PlayerSet p1{Polynomial(1), Polytope::box(vec({0}), vec({1}))};
    PlayerSet p2{poly(1, {{1, {2}}}), Polytope::box(vec({-1}), vec({1}))};
    const Polynomial f = poly(2, {{1, {2, 0}}});
    CHECK_THROWS_AS(Game({1, 1}, {f, f}, IndependentConvex{{p1, p2}}, 1.0), Error);
  }
}
