#pragma once

#include "nashapprox/equilibrium.hpp"
#include "nashapprox/fixtures.hpp"
#include "nashapprox/game.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nashapprox {

inline constexpr const char* kGameSchema = "nashapprox-game/1";
inline constexpr const char* kRegionSchema = "nashapprox-region/1";

// A game definition together with its default tolerances. Numbers are JSON numbers, written with the
// shortest representation that reads back to the same double.
struct GameFile {
  std::string name;
  std::string description;
  Game game;
  double eps1 = 0.0;  // 0 when the file gives none
  double eps2 = 0.0;
  std::vector<Vec> known_ne;
};

GameFile parse_game(const std::string& text);
std::string emit_game(const GameFile& gf);
GameFile read_game_file(const std::string& path);
GameFile game_file_from_fixture(const Fixture& f);

// FNV-1a over the compact emission of dimensions, costs, constraint and L.
std::uint64_t game_hash(const Game& g);
std::string hex64(std::uint64_t h);

struct RegionFile {
  std::string game_name;
  std::string game_hash;
  RunReport report;
  RegionUnion region;
};

RegionFile parse_region(const std::string& text);
std::string emit_region(const RegionFile& rf);

// Plot view of a region: counter-clockwise vertex cycles for 2D pieces, vertices and facet cycles for 3D
// pieces. Lower-dimensional pieces are emitted as their vertex list. Throws a dimension error above 3.
enum class PlotFormat { Csv, Json };
std::string plot_data(const RegionUnion& r, PlotFormat format);

// "x1,x2;y1,y2" -> points.
std::vector<Vec> parse_points(const std::string& text);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace nashapprox
