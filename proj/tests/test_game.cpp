#include <doctest.h>

#include "nashapprox/fixtures.hpp"
#include "nashapprox/game.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <random>

using namespace nashapprox;
using namespace testing_helpers;

TEST_CASE("polynomial evaluation examples") {
  const Game g51 = make_fixture("ex51").game;
  CHECK(g51.cost(0).eval(vec({0.25, -0.25})) == doctest::Approx(1.0 / 32).epsilon(1e-14));
  const Vec gr = g51.cost(0).gradient(vec({0.25, -0.25}));
  CHECK(std::abs(gr(0)) < 1e-14);
  CHECK(gr(1) == doctest::Approx(-0.75));
  CHECK(Polynomial(3).eval(vec({1, 2, 3})) == 0.0);
  CHECK(Polynomial::constant(2, 4.0).gradient(vec({1, 2})).norm() == 0.0);
  CHECK(poly(1, {{1, {2}}}).gradient(vec({3}))(0) == doctest::Approx(6.0));
  const Game g53 = make_fixture("ex53").game;
  CHECK(g53.cost(1).eval(vec({1, 0})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(g51.cost(0).eval(vec({1, 2, 3})), Error);
}

TEST_CASE("objective image examples") {
  const Game g51 = make_fixture("ex51").game;
  const Vec y = objective_image(g51, 0, vec({0.25, -0.25}));
  REQUIRE(y.size() == 3);
  CHECK(y(0) == doctest::Approx(-0.25));
  CHECK(y(1) == doctest::Approx(0.25));
  CHECK(y(2) == doctest::Approx(1.0 / 32));
  const Game g54 = make_fixture("ex54").game;
  const Vec y2 = objective_image(g54, 1, vec({0.1, 1}));
  CHECK(y2(0) == doctest::Approx(0.1));
  CHECK(y2(1) == doctest::Approx(-0.1));
  CHECK(y2(2) == doctest::Approx(-1.395));
  CHECK_THROWS_AS(objective_image(g54, 0, vec({1, 1})), Error);
}

TEST_CASE("slice bookkeeping") {
  const Game g = make_fixture("ex55").game;
  const SliceIndex s = g.slice(1);
  CHECK(s.a == 2);
  CHECK(s.m == 5);
  CHECK(g.others(1) == std::vector<std::size_t>{0, 2});
  CHECK(g.own(2) == std::vector<std::size_t>{2});
}

TEST_CASE("property: image sign symmetry on every fixture") {
  std::mt19937 rng(11);
  for (const auto& name : fixture_names()) {
    const Game g = make_fixture(name).game;
    const auto [lo, hi] = g.hull().bounding_box();
    int hits = 0;
    for (int t = 0; t < 400 && hits < 100; ++t) {
      const Vec x = uniform(rng, lo, hi);
      if (!g.feasible(x)) continue;
      ++hits;
      for (std::size_t i = 0; i < g.n_players(); ++i) {
        const Vec y = objective_image(g, i, x);
        const auto a = static_cast<Eigen::Index>(g.slice(i).a);
        CHECK((y.head(a) + y.segment(a, a)).cwiseAbs().maxCoeff() == 0.0);
      }
    }
    CHECK(hits > 10);
  }
}

TEST_CASE("property: gradients match central differences") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> dimd(1, 3), expd(0, 2), nterm(1, 6);
  std::uniform_real_distribution<double> coef(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(dimd(rng));
    std::vector<Monomial> terms;
    for (int k = nterm(rng); k > 0; --k) {
      std::vector<int> e(n);
      int deg = 0;
      for (auto& v : e) deg += (v = std::min(expd(rng), 4 - deg));
      terms.push_back({coef(rng), e});
    }
    const Polynomial p(n, terms);
    CHECK(p.degree() <= 4);
    const Vec x = uniform(rng, Vec::Constant(static_cast<Eigen::Index>(n), -1), Vec::Constant(static_cast<Eigen::Index>(n), 1));
    const Vec gr = p.gradient(x);
    for (std::size_t k = 0; k < n; ++k) {
      const double h = 1e-5;
      Vec xp = x, xm = x;
      xp(static_cast<Eigen::Index>(k)) += h;
      xm(static_cast<Eigen::Index>(k)) -= h;
      const double fd = (p.eval(xp) - p.eval(xm)) / (2 * h);
      CHECK(std::abs(fd - gr(static_cast<Eigen::Index>(k))) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("lipschitz estimate") {
  const Game g51 = make_fixture("ex51").game;
  CHECK(estimate_lipschitz(g51, 21) == doctest::Approx(3.0));
  const Game g54 = make_fixture("ex54").game;
  const double l54 = estimate_lipschitz(g54, 21);
  CHECK(l54 <= 2.1);
  CHECK(l54 >= 1.9);
  const Game zero = g51.with_costs({Polynomial::constant(2, 1.0), Polynomial::constant(2, -3.0)});
  CHECK(estimate_lipschitz(zero, 9) == 0.0);
  for (const auto& name : fixture_names()) {
    const Fixture fx = make_fixture(name);
    double prev = 0.0;
    for (int d = 2; d <= 9; ++d) {
      const double l = estimate_lipschitz(fx.game, d);
      CHECK(l >= prev);
      CHECK(l <= fx.game.lipschitz());
      prev = l;
    }
  }
}

TEST_CASE("game validation") {
  const Polynomial f = poly(2, {{1, {2, 0}}});
  CHECK_THROWS_AS(Game({2}, {poly(2, {{1, {1, 0}}})}, SharedPolytope{Polytope::box(vec({0, 0}), vec({1, 1}))}, 1.0),
                  Error);
  CHECK_THROWS_AS(Game({1, 1}, {f, f}, SharedPolytope{Polytope::box(vec({0, 0}), vec({1, 1}))}, 0.0), Error);
  Polytope cone = Polytope::from_halfspaces(2, {{vec({-1, 0}), 0}, {vec({0, -1}), 0}});
  try {
    Game({1, 1}, {f, f}, SharedPolytope{cone}, 1.0);
    FAIL("unbounded set accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Assumption);
  }
  PlayerSet flat{Polynomial(1), Polytope::box(vec({0}), vec({0}))};
  PlayerSet ok{Polynomial(1), Polytope::box(vec({0}), vec({1}))};
  CHECK_THROWS_AS(Game({1, 1}, {f, f}, IndependentConvex{{ok, flat}}, 1.0), Error);
}

TEST_CASE("independent constraint sets") {
  // Disc of radius 1 for player 2, interval for player 1.
  const Polynomial disc = poly(2, {{1, {2, 0}}, {1, {0, 2}}, {-1, {0, 0}}});
  PlayerSet p1{Polynomial(1), Polytope::box(vec({0}), vec({1}))};
  PlayerSet p2{disc, Polytope::box(vec({-1, -1}), vec({1, 1}))};
  const Polynomial f = poly(3, {{1, {2, 0, 0}}, {1, {0, 1, 0}}});
  const Game g({1, 2}, {f, f}, IndependentConvex{{p1, p2}}, 3.0);
  CHECK(g.feasible(vec({0.5, 0.5, 0.5})));
  CHECK_FALSE(g.feasible(vec({0.5, 0.9, 0.9})));
  CHECK(g.hull().vertices().size() == 8);
  const Vec ip = interior_point(p2);
  CHECK(disc.eval(ip) < 0);
  PlayerSet tangent{poly(1, {{1, {2}}}), Polytope::box(vec({-1}), vec({1}))};
  CHECK_THROWS_AS(interior_point(tangent), Error);
}

TEST_CASE("convexification") {
  const Fixture fx = make_fixture("ex52_y15");
  CHECK_FALSE(convexity_warnings(fx.game).empty());
  Game cg = fx.game;
  const Convexification c = convexify(fx.game, &cg);
  CHECK(c.changed);
  CHECK(c.beta[0] > 0);
  CHECK(c.beta[1] == 0.0);
  CHECK(convexity_warnings(cg).empty());
  // Added terms depend only on the other player, so own-variable differences are preserved.
  std::mt19937 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Vec x = uniform(rng, vec({0, 0}), vec({1, 1}));
    Vec x2 = x;
    x2(0) = uniform(rng, vec({0}), vec({1}))(0);
    CHECK((cg.cost(0).eval(x) - cg.cost(0).eval(x2)) ==
          doctest::Approx(fx.game.cost(0).eval(x) - fx.game.cost(0).eval(x2)));
  }
  Game same = fx.game;
  CHECK_FALSE(convexify(make_fixture("ex51").game, &same).changed);
}
