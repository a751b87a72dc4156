#include "nashapprox/fixtures.hpp"

#include <algorithm>
#include <cmath>

namespace nashapprox {

namespace {

Polynomial poly(std::size_t dim, std::vector<Monomial> terms) { return Polynomial(dim, std::move(terms)); }

Polytope shared_set(std::size_t dim, const std::vector<std::pair<std::vector<double>, double>>& rows) {
  std::vector<Halfspace> hs;
  for (const auto& [a, b] : rows) hs.push_back({to_vec(a), b});
  return Polytope::from_halfspaces(dim, hs);
}

Polytope unit_box(std::size_t dim, double lo, double hi) {
  return Polytope::box(Vec::Constant(static_cast<Eigen::Index>(dim), lo), Vec::Constant(static_cast<Eigen::Index>(dim), hi));
}

std::vector<Vec> segment(const Vec& a, const Vec& b, int count) {
  std::vector<Vec> out;
  for (int k = 0; k < count; ++k) out.push_back(a + (b - a) * (k / static_cast<double>(count - 1)));
  return out;
}

Fixture ex51() {
  std::vector<Polynomial> f = {
      poly(2, {{0.5, {2, 0}}, {-1, {1, 1}}, {-0.5, {1, 0}}, {1, {0, 2}}}),
      poly(2, {{0.5, {0, 2}}, {1, {1, 1}}, {1, {2, 0}}}),
  };
  Fixture fx{"ex51", "two-player quadratic game on [-1,1]^2 with a unique equilibrium",
             Game({1, 1}, f, SharedPolytope{unit_box(2, -1, 1)}, 3.0), 0.01, 0.001, 0.0, {to_vec({0.25, -0.25})}};
  return fx;
}

Fixture ex52(double y, const std::string& name) {
  std::vector<Polynomial> f = {
      poly(2, {{1, {2, 0}}, {-2 * y, {1, 1}}, {1, {0, 2}}}),
      poly(2, {{1, {2, 0}}, {-2, {1, 1}}, {1, {0, 2}}}),
  };
  const double L = std::max(4.0, 2.0 + 2.0 * (y * y + 1e-4));
  std::vector<Vec> ne;
  if (y < 1) ne = {to_vec({0, 0})};
  else if (y > 1) ne = {to_vec({0, 0}), to_vec({1, 1})};
  else ne = segment(to_vec({0, 0}), to_vec({1, 1}), 20);
  const double stated = y > 1 ? 0.027 : 0.018;
  return Fixture{name, "coordination game on [0,1]^2, y = " + std::to_string(y).substr(0, 3),
                 Game({1, 1}, f, SharedPolytope{unit_box(2, 0, 1)}, L), 0.001, 0.001, stated, ne};
}

Fixture ex53() {
  std::vector<Polynomial> f = {
      poly(2, {{0.5, {2, 0}}, {-1, {1, 1}}, {1, {0, 2}}}),
      poly(2, {{1, {0, 2}}, {1, {1, 1}}, {1, {2, 0}}}),
  };
  Polytope X = shared_set(2, {{{-1, -1}, -1}, {{-1, 0}, 0}, {{0, -1}, 0}, {{1, 0}, 2}, {{0, 1}, 2}});
  return Fixture{"ex53", "game on {x >= 0, x1 + x2 >= 1} truncated to [0,2]^2, with a segment of equilibria",
                 Game({1, 1}, f, SharedPolytope{X}, 8.0), 0.01, 0.001, 0.027,
                 segment(to_vec({0.5, 0.5}), to_vec({1.0, 0.0}), 11)};
}

Fixture search() {
  std::vector<Polynomial> f = {
      poly(2, {{1, {3, 0}}, {-0.5, {1, 1}}, {2, {0, 2}}}),
      poly(2, {{1, {0, 3}}, {-0.5, {1, 1}}, {2, {2, 0}}}),
  };
  return Fixture{"search", "two-player search model with cubic cost, regularized by 2 x_j^2",
                 Game({1, 1}, f, SharedPolytope{unit_box(2, 0, 1)}, 7.0), 0.01, 0.01, 0.0,
                 {to_vec({0, 0}), to_vec({1.0 / 6, 1.0 / 6})}};
}

Fixture ex54() {
  std::vector<Polynomial> f = {
      poly(2, {{0.5, {2, 0}}, {1, {1, 1}}, {0.5, {0, 2}}, {-1.1, {1, 0}}}),
      poly(2, {{0.5, {2, 0}}, {1, {1, 1}}, {0.5, {0, 2}}, {-2, {0, 1}}}),
  };
  Polytope X = shared_set(2, {{{1, 0.4}, 1}, {{-1, 0}, 0}, {{0, -1}, 0}, {{1, 0}, 1}, {{0, 1}, 1}});
  std::vector<Vec> ne = {to_vec({0.1, 1})};
  for (double t : {14.0 / 15, 0.95, 0.9667, 0.9833, 1.0}) ne.push_back(to_vec({t, 2.5 * (1 - t)}));
  return Fixture{"ex54", "two-player pollution game with a joint emission cap",
                 Game({1, 1}, f, SharedPolytope{X}, 2.1), 0.01, 0.01, 0.0, ne};
}

Fixture ex55() {
  const double beta[3] = {1.1, 1.3, 3.2};
  std::vector<Polynomial> f;
  for (int i = 0; i < 3; ++i) {
    std::vector<Monomial> t = {{0.5, {2, 0, 0}}, {0.5, {0, 2, 0}}, {0.5, {0, 0, 2}},
                               {1, {1, 1, 0}},   {1, {1, 0, 1}},   {1, {0, 1, 1}}};
    std::vector<int> e(3, 0);
    e[static_cast<std::size_t>(i)] = 1;
    t.push_back({-beta[i], e});
    f.push_back(poly(3, t));
  }
  Polytope X = shared_set(3, {{{1, 0.6, 0.4}, 1},
                              {{-1, 0, 0}, 0},
                              {{0, -1, 0}, 0},
                              {{0, 0, -1}, 0},
                              {{1, 0, 0}, 1},
                              {{0, 1, 0}, 1},
                              {{0, 0, 1}, 1}});
  return Fixture{"ex55", "three-player pollution game with a joint emission cap",
                 Game({1, 1, 1}, f, SharedPolytope{X}, 9.8), 0.01, 0.01, 0.0, {}};
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"ex51", "ex52_y05", "ex52_y10", "ex52_y15", "ex53", "search", "ex54", "ex55"};
}

Fixture make_fixture(const std::string& name) {
  if (name == "ex51") return ex51();
  if (name == "ex52_y05") return ex52(0.5, name);
  if (name == "ex52_y10") return ex52(1.0, name);
  if (name == "ex52_y15") return ex52(1.5, name);
  if (name == "ex53") return ex53();
  if (name == "search") return search();
  if (name == "ex54") return ex54();
  if (name == "ex55") return ex55();
  fail(ErrorKind::Invalid, "unknown fixture: " + name);
}

}  // namespace nashapprox
