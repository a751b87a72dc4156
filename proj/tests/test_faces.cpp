#include <doctest.h>

#include "nashapprox/faces.hpp"
#include "nashapprox/solver.hpp"
#include "face_oracles.hpp"
#include "test_helpers.hpp"

#include <random>

using namespace nashapprox;
using namespace testing_helpers;

using face_oracles::exit_time;
using face_oracles::improvement;
using face_oracles::upper;

TEST_CASE("is_efficient examples") {
  const Polytope p = upper({vec({0, 1}), vec({1, 0})});
  const Incidence inc(p);
  int bounded_edges = 0;
  for (const auto& f : faces(p)) {
    const auto w = is_efficient(f, p);
    if (f.vertices.size() == 2 && f.rays.empty()) {
      ++bounded_edges;
      REQUIRE(w);
      CHECK((*w)(0) == doctest::Approx((*w)(1)));
      CHECK(w->minCoeff() >= 1 - 1e-9);
    }
    if (f.vertices.size() == 1 && !f.rays.empty()) CHECK_FALSE(w);
  }
  CHECK(bounded_edges == 1);

  const Polytope single = upper({vec({0, 0, 0}), vec({1, 2, 0.5}), vec({0.3, 0.1, 0.4})});
  for (const auto& f : faces(single))
    if (f.vertices.size() == 1 && f.rays.empty() && single.vertices()[f.vertices[0]].norm() == 0.0)
      CHECK(is_efficient(f, single));
}

TEST_CASE("maximal_efficient_faces examples") {
  auto r1 = maximal_efficient_faces(upper({vec({0, 1}), vec({1, 0}), vec({1, 1})}));
  REQUIRE(r1.size() == 1);
  CHECK(r1[0].polytope.vertices().size() == 2);
  CHECK(r1[0].polytope.contains(vec({0.5, 0.5})));

  auto r2 = maximal_efficient_faces(upper({vec({0, 0})}));
  REQUIRE(r2.size() == 1);
  CHECK(r2[0].polytope.vertices().size() == 1);

  // (1,1) lies on the segment between the other two points, so a single edge is efficient.
  auto r3 = maximal_efficient_faces(upper({vec({0, 2}), vec({1, 1}), vec({2, 0})}));
  REQUIRE(r3.size() == 1);
  CHECK(r3[0].polytope.vertices().size() == 2);
  CHECK(r3[0].polytope.contains(vec({1, 1})));

  auto r4 = maximal_efficient_faces(upper({vec({0, 2}), vec({0.8, 0.8}), vec({2, 0})}));
  REQUIRE(r4.size() == 2);
  for (const auto& f : r4) {
    CHECK(f.polytope.vertices().size() == 2);
    CHECK(f.polytope.contains(vec({0.8, 0.8})));
  }
}

TEST_CASE("property: efficient faces cover exactly the minimal points") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> md(2, 4), vd(1, 12), style(0, 2);
  std::uniform_real_distribution<double> u(0, 1);
  int minimal_hits = 0, weak_hits = 0;
  for (int inst = 0; inst < 80; ++inst) {
    const int m = md(rng), nv = vd(rng), st = style(rng);
    std::vector<Vec> V;
    for (int k = 0; k < nv; ++k) {
      Vec v = uniform(rng, Vec::Zero(m), Vec::Ones(m));
      if (st == 1) v /= v.sum();                       // all on one hyperplane with positive normal
      if (st == 2) v = (v * 2).array().round() / 2;    // grid points produce weakly efficient facets
      V.push_back(v);
    }
    const Polytope p = upper(V);
    const auto eff = maximal_efficient_faces(p);
    REQUIRE_FALSE(eff.empty());
    for (const auto& f : eff) {
      CHECK(f.polytope.rays().empty());
      CHECK(f.face.rays.empty());
      // Certificate replay: the weight attains its minimum over the vertices exactly on the face.
      double best = 1e300;
      for (const auto& v : p.vertices()) best = std::min(best, f.weight.dot(v));
      for (std::size_t j = 0; j < p.vertices().size(); ++j) {
        const bool on = std::find(f.face.vertices.begin(), f.face.vertices.end(), j) != f.face.vertices.end();
        const double gap = f.weight.dot(p.vertices()[j]) - best;
        CHECK((on ? gap <= 1e-8 : gap > 1e-8));
      }
    }
    for (std::size_t i = 0; i < eff.size(); ++i)
      for (std::size_t j = 0; j < eff.size(); ++j)
        if (i != j)
          CHECK_FALSE(std::includes(eff[j].face.vertices.begin(), eff[j].face.vertices.end(),
                                    eff[i].face.vertices.begin(), eff[i].face.vertices.end()));
    for (int s = 0; s < 25; ++s) {
      Vec lam = uniform(rng, Vec::Zero(nv), Vec::Ones(nv));
      lam /= lam.sum();
      Vec q = Vec::Zero(m);
      for (int k = 0; k < nv; ++k) q += lam(k) * V[static_cast<std::size_t>(k)];
      q += uniform(rng, Vec::Zero(m), Vec::Ones(m));
      Vec d = s % 2 ? Vec(Vec::Unit(m, m - 1)) : Vec(uniform(rng, Vec::Zero(m), Vec::Ones(m)));
      if (s % 5 == 0) d = Vec::Unit(m, s % m);
      const double t = exit_time(V, q, d);
      REQUIRE_FALSE(std::isnan(t));
      const Vec b = q - t * d;
      const double imp = improvement(V, b);
      REQUIRE_FALSE(std::isnan(imp));
      bool covered = false;
      for (const auto& f : eff) covered = covered || f.polytope.contains(b, 1e-7);
      if (imp <= 1e-9) {
        ++minimal_hits;
        CHECK(covered);
      } else if (imp > 1e-5) {
        ++weak_hits;
        CHECK_FALSE(covered);
      }
    }
  }
  CHECK(minimal_hits > 100);
  CHECK(weak_hits > 100);
}
