#pragma once

#include "nashapprox/game.hpp"

#include <string>
#include <vector>

namespace nashapprox {

// Built-in example games with their default tolerances and known equilibria.
struct Fixture {
  std::string name;
  std::string description;
  Game game;
  double eps1 = 0.0;
  double eps2 = 0.0;
  // Tolerance printed alongside the example when it is looser than eps1 + 2 L eps2, else 0.
  double stated_eps = 0.0;
  std::vector<Vec> known_ne;
};

std::vector<std::string> fixture_names();
Fixture make_fixture(const std::string& name);

}  // namespace nashapprox
