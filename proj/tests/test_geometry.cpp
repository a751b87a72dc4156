#include <doctest.h>

#include "nashapprox/geometry.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <random>

using namespace nashapprox;
using namespace testing_helpers;

namespace {

Polytope square() { return Polytope::box(vec({0, 0}), vec({1, 1})); }

bool has_vertex(const Polytope& p, const Vec& v) {
  for (const auto& w : p.vertices())
    if ((w - v).cwiseAbs().maxCoeff() <= 1e-9) return true;
  return false;
}

bool hrep_contains(const std::vector<Halfspace>& hs, const Vec& y, double tol = 1e-9) {
  for (const auto& h : hs)
    if (h.slack(y) < -tol) return false;
  return true;
}

// Membership in conv(V) + cone(R) via a brute-force check independent of any representation conversion: a
// point is inside iff its L1 distance is zero; in 2D we check against all triangles of generators.
double support(const Polytope& p, const Vec& d) {
  double h = -1e300;
  for (const auto& v : p.vertices()) h = std::max(h, d.dot(v));
  return h;
}

Polytope random_polytope(std::mt19937& rng, int n, int k) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec> pts;
  for (int i = 0; i < k; ++i) {
    Vec x(n);
    for (int j = 0; j < n; ++j) x(j) = g(rng);
    pts.push_back(x);
  }
  return to_hrep(Polytope::from_vertices(pts));
}

}  // namespace

TEST_CASE("to_hrep examples") {
  SUBCASE("unit square") {
    auto p = to_hrep(Polytope::from_vertices({vec({0, 0}), vec({1, 0}), vec({0, 1}), vec({1, 1})}));
    CHECK(p.halfspaces().size() == 4);
    CHECK(p.vertices().size() == 4);
  }
  SUBCASE("simplex plus orthant") {
    auto p = to_hrep(Polytope::from_vertices({vec({0, 1}), vec({1, 0})}, {vec({1, 0}), vec({0, 1})}));
    CHECK(p.halfspaces().size() == 3);
    // Grid membership agrees with the generator description: y in P iff y1,y2 >= 0 and y1 + y2 >= 1.
    for (double a = -1; a <= 3; a += 0.25)
      for (double b = -1; b <= 3; b += 0.25) {
        const bool truth = a >= -1e-12 && b >= -1e-12 && a + b >= 1 - 1e-12;
        CHECK(hrep_contains(p.halfspaces(), vec({a, b})) == truth);
      }
    CHECK_FALSE(hrep_contains(p.halfspaces(), vec({2, -1})));
  }
  SUBCASE("single point") {
    auto p = to_hrep(Polytope::from_vertices({vec({3})}));
    REQUIRE(p.halfspaces().size() == 2);
    CHECK(hrep_contains(p.halfspaces(), vec({3})));
    CHECK_FALSE(hrep_contains(p.halfspaces(), vec({3.001})));
    CHECK_FALSE(hrep_contains(p.halfspaces(), vec({2.999})));
  }
  SUBCASE("interior points are dropped") {
    auto p = to_hrep(Polytope::from_vertices({vec({0, 0}), vec({2, 0}), vec({0, 2}), vec({0.5, 0.5}), vec({1, 0})}));
    CHECK(p.vertices().size() == 3);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(to_hrep(Polytope::from_vertices({vec({0, 0}), vec({1, 0, 0})})), Error);
  }
  SUBCASE("idempotent") {
    auto p = to_hrep(Polytope::from_vertices({vec({0, 0}), vec({2, 0}), vec({0, 2})}));
    auto q = to_hrep(p);
    CHECK(q.halfspaces().size() == p.halfspaces().size());
    CHECK(q.vertices().size() == p.vertices().size());
  }
}

TEST_CASE("to_vrep examples") {
  SUBCASE("unit square") {
    auto p = to_vrep(square());
    CHECK(p.vertices().size() == 4);
    CHECK(p.rays().empty());
  }
  SUBCASE("orthant") {
    auto p = to_vrep(Polytope::from_halfspaces(2, {{vec({-1, 0}), 0}, {vec({0, -1}), 0}}));
    REQUIRE(p.vertices().size() == 1);
    CHECK(p.vertices()[0].norm() == doctest::Approx(0.0));
    CHECK(p.rays().size() == 2);
  }
  SUBCASE("box [-1,1]^2") {
    auto p = to_vrep(Polytope::box(vec({-1, -1}), vec({1, 1})));
    CHECK(p.vertices().size() == 4);
    for (double a : {-1.0, 1.0})
      for (double b : {-1.0, 1.0}) CHECK(has_vertex(p, vec({a, b})));
  }
  SUBCASE("empty") {
    auto p = to_vrep(Polytope::from_halfspaces(1, {{vec({1}), 0}, {vec({-1}), -1}}));
    CHECK(p.is_empty());
  }
  SUBCASE("line is rejected") {
    CHECK_THROWS_AS(to_vrep(Polytope::from_halfspaces(2, {{vec({1, 0}), 1}})), Error);
  }
  SUBCASE("segment in 3D via equality pair") {
    std::vector<Halfspace> hs = {{vec({0, 1, 0}), 0.0}, {vec({0, -1, 0}), 0.0}, {vec({0, 0, 1}), 1.0},
                                 {vec({0, 0, -1}), -1.0}, {vec({1, 0, 0}), 2.0}, {vec({-1, 0, 0}), 0.0}};
    auto p = to_vrep(Polytope::from_halfspaces(3, hs));
    CHECK(p.vertices().size() == 2);
    auto q = to_hrep(p);
    CHECK(q.vertices().size() == 2);
    CHECK(q.contains(vec({1, 0, 1})));
    CHECK_FALSE(q.contains(vec({1, 1e-6, 1})));
  }
}

TEST_CASE("round trip membership agreement") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    Polytope p = random_polytope(rng, n, 6 + trial % 7);
    Polytope q = to_hrep(to_vrep(Polytope::from_halfspaces(p.dim, p.halfspaces())));
    for (int s = 0; s < 1000; ++s) {
      Vec x = uniform(rng, Vec::Constant(n, -3), Vec::Constant(n, 3));
      bool a = hrep_contains(p.halfspaces(), x, 0), b = hrep_contains(q.halfspaces(), x, 0);
      // Disagreement only allowed within tolerance of the boundary.
      if (a != b) {
        double m = 1e300;
        for (const auto& h : p.halfspaces()) m = std::min(m, std::abs(h.slack(x)));
        CHECK(m <= 1e-9);
      }
    }
  }
}

TEST_CASE("faces examples") {
  SUBCASE("triangle") {
    auto f = faces(Polytope::from_vertices({vec({0, 0}), vec({1, 0}), vec({0, 1})}));
    int edges = 0, verts = 0;
    for (const auto& d : f) (d.vertices.size() == 2 ? edges : verts)++;
    CHECK(edges == 3);
    CHECK(verts == 3);
  }
  SUBCASE("square") {
    auto f = faces(square());
    CHECK(f.size() == 8);
  }
  SUBCASE("simplex plus orthant") {
    auto p = complete(Polytope::from_vertices({vec({0, 1}), vec({1, 0})}, {vec({1, 0}), vec({0, 1})}));
    auto f = faces(p);
    int bounded_edge = 0, unbounded = 0, points = 0;
    for (const auto& d : f) {
      if (d.vertices.size() == 2 && d.rays.empty()) ++bounded_edge;
      if (d.rays.size() == 1 && d.vertices.size() == 1) ++unbounded;
      if (d.rays.empty() && d.vertices.size() == 1) ++points;
    }
    CHECK(bounded_edge == 1);
    CHECK(unbounded == 2);
    CHECK(points == 2);
    CHECK(f.size() == 5);
  }
}

TEST_CASE("faces properties") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Polytope p = random_polytope(rng, 3, 8);
    auto f = faces(p);
    for (const auto& d : f) {
      CHECK(d.rays.empty());
      CHECK_FALSE(d.active.empty());
      for (auto a : d.active)
        for (auto v : d.vertices) CHECK(std::abs(p.halfspaces()[a].slack(p.vertices()[v])) <= 1e-9);
    }
    // Euler characteristic of a 3-polytope boundary: V - E + F = 2.
    int V = 0, E = 0, F = 0;
    for (const auto& d : f) {
      int dim = face_polytope(p, d).affine_dim();
      (dim == 0 ? V : dim == 1 ? E : F)++;
    }
    CHECK(V - E + F == 2);
  }
}

TEST_CASE("intersect examples and properties") {
  SUBCASE("boxes") {
    auto r = intersect(square(), Polytope::box(vec({0.5, 0.5}), vec({2, 2})));
    REQUIRE(r);
    CHECK(r->vertices().size() == 4);
    CHECK(has_vertex(*r, vec({0.5, 0.5})));
    CHECK(has_vertex(*r, vec({1, 1})));
  }
  SUBCASE("disjoint") { CHECK_FALSE(intersect(square(), Polytope::box(vec({2, 2}), vec({3, 3})))); }
  SUBCASE("triangle with halfplane") {
    auto t = Polytope::from_vertices({vec({0, 0}), vec({2, 0}), vec({0, 2})});
    auto r = intersect(t, Polytope::from_halfspaces(2, {{vec({-1, 0}), -1}}));
    REQUIRE(r);
    CHECK(r->vertices().size() == 3);
    CHECK(has_vertex(*r, vec({1, 0})));
    CHECK(has_vertex(*r, vec({2, 0})));
    CHECK(has_vertex(*r, vec({1, 1})));
    CHECK(r->halfspaces().size() == 3);
  }
  SUBCASE("commutative and associative") {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
      auto a = random_polytope(rng, 2, 6), b = random_polytope(rng, 2, 6), c = random_polytope(rng, 2, 6);
      auto ab = intersect(a, b), ba = intersect(b, a);
      REQUIRE(ab.has_value() == ba.has_value());
      std::optional<Polytope> l, r;
      if (ab) l = intersect(*ab, c);
      auto bc = intersect(b, c);
      if (bc) r = intersect(a, *bc);
      REQUIRE(l.has_value() == r.has_value());
      for (int s = 0; s < 300; ++s) {
        Vec x = uniform(rng, Vec::Constant(2, -2), Vec::Constant(2, 2));
        if (ab) CHECK(ab->contains(x, 1e-7) == ba->contains(x, 1e-7));
        if (l) {
          if (l->contains(x, -1e-8)) CHECK(r->contains(x, 0));
          if (!l->contains(x, 1e-8)) CHECK_FALSE(r->contains(x, 0));
        }
      }
    }
  }
}

TEST_CASE("minkowski_l1_ball") {
  SUBCASE("point") {
    auto p = minkowski_l1_ball(Polytope::from_vertices({vec({0, 0})}), 1.0);
    CHECK(p.vertices().size() == 4);
    for (auto v : {vec({1, 0}), vec({-1, 0}), vec({0, 1}), vec({0, -1})}) CHECK(has_vertex(p, v));
  }
  SUBCASE("zero radius is identity") {
    auto t = Polytope::from_vertices({vec({0, 0}), vec({2, 0}), vec({0, 2})});
    auto p = minkowski_l1_ball(t, 0.0);
    CHECK(p.vertices().size() == 3);
  }
  SUBCASE("segment hexagon with support-function check") {
    auto p = minkowski_l1_ball(Polytope::from_vertices({vec({0, 0}), vec({1, 0})}), 0.5);
    CHECK(p.vertices().size() == 6);
    for (auto v : {vec({-0.5, 0}), vec({0, 0.5}), vec({1, 0.5}), vec({1.5, 0}), vec({1, -0.5}), vec({0, -0.5})})
      CHECK(has_vertex(p, v));
    for (int k = 0; k < 360; ++k) {
      const double th = k * M_PI / 180.0;
      Vec d = vec({std::cos(th), std::sin(th)});
      const double expect = std::max(0.0, d(0)) + 0.5 * d.cwiseAbs().maxCoeff();
      CHECK(support(p, d) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("negative radius") { CHECK_THROWS_AS(minkowski_l1_ball(square(), -1.0), Error); }
  SUBCASE("dual norm identity on random polytopes") {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
      auto p = random_polytope(rng, 3, 7);
      auto q = minkowski_l1_ball(p, 0.3);
      for (int s = 0; s < 100; ++s) {
        Vec d = uniform(rng, Vec::Constant(3, -1), Vec::Constant(3, 1));
        CHECK(std::abs(support(q, d) - support(p, d) - 0.3 * d.cwiseAbs().maxCoeff()) <= 1e-9);
      }
    }
  }
}

TEST_CASE("l1 distance") {
  CHECK(l1_distance_to_polytope(vec({0, 0}), to_vrep(square())) == doctest::Approx(0.0));
  CHECK(l1_distance_to_polytope(vec({2, 0}), to_vrep(square())) == doctest::Approx(1.0));
  CHECK(l1_distance_to_polytope(vec({2, 2}), to_vrep(square())) == doctest::Approx(2.0));
  CHECK(l1_distance_to_polytope(vec({2, 2}), square()) == doctest::Approx(2.0));
  CHECK_THROWS_AS(l1_distance_to_polytope(vec({0, 0}), Polytope::empty(2)), Error);

  // Grid brute force and separating direction certificate.
  std::mt19937 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_polytope(rng, 2, 5);
    Vec q = uniform(rng, Vec::Constant(2, -4), Vec::Constant(2, 4));
    auto d = l1_distance(q, p);
    double brute = 1e300;
    const int G = 400;
    auto [lo, hi] = p.bounding_box();
    for (int i = 0; i <= G; ++i)
      for (int j = 0; j <= G; ++j) {
        Vec x = lo + (hi - lo).cwiseProduct(vec({i / double(G), j / double(G)}));
        if (p.contains(x, 0)) brute = std::min(brute, (x - q).lpNorm<1>());
      }
    CHECK(d.distance <= brute + 1e-12);
    CHECK(d.distance >= brute - 0.02);
    CHECK(d.direction.cwiseAbs().maxCoeff() <= 1 + 1e-9);
    for (const auto& v : p.vertices()) CHECK(d.direction.dot(v - q) >= d.distance - 1e-9);
  }
}

TEST_CASE("plot cycles") {
  auto p = to_hrep(Polytope::from_vertices({vec({1, 1}), vec({0, 0}), vec({1, 0}), vec({0, 1})}));
  auto c = polygon_cycle(p);
  REQUIRE(c.size() == 4);
  double area = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Vec& a = p.vertices()[c[k]];
    const Vec& b = p.vertices()[c[(k + 1) % c.size()]];
    area += a(0) * b(1) - a(1) * b(0);
  }
  CHECK(area / 2 == doctest::Approx(1.0));
  auto cube = complete(Polytope::box(vec({0, 0, 0}), vec({1, 1, 1})));
  auto f = facet_cycles(cube);
  CHECK(f.size() == 6);
  for (const auto& cyc : f) CHECK(cyc.size() == 4);
}

TEST_CASE("l1_distance on nearly duplicate vertices") {
  const std::vector<Vec> V = {
      vec({1.1024179022682759, 5.9448939673240996e-12}), vec({1.1875000000306635, -2.1028548476408773e-17}),
      vec({1.1024179022682759, -2.8113056270552607e-17}), vec({1.1441906845487846, 0.0015789828133134674}),
      vec({1.1656630413280828, 0.0011836015508941242}), vec({1.123118835356443, 0.0011853999537664907})};
  const Vec q = vec({1.1335312670150961, 0.0015789833231523837});
  const L1Distance d = l1_distance(q, Polytope::from_vertices(V));
  CHECK(d.distance >= 0.0);
  CHECK(d.distance < 1e-3);
  // Brute force over a fine mesh of the hull edges and interior samples gives an upper bound.
  std::mt19937 rng(1);
  double best = 1e300;
  for (int t = 0; t < 200000; ++t) {
    Vec w = uniform(rng, Vec::Zero(6), Vec::Ones(6)).array().pow(8);
    w /= w.sum();
    Vec x = Vec::Zero(2);
    for (int k = 0; k < 6; ++k) x += w(k) * V[static_cast<std::size_t>(k)];
    best = std::min(best, (x - q).cwiseAbs().sum());
  }
  CHECK(d.distance <= best + 1e-12);
}
