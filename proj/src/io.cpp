#include "nashapprox/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nashapprox {

using json = nlohmann::json;
using Index = Eigen::Index;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { fail(ErrorKind::Parse, what); }

double num(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size()) return v;
  }
  parse_fail(std::string("expected a number for ") + what);
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(v(k) + 0.0);  // no negative zeros
  return a;
}

Vec vec_from(const json& j, const char* what) {
  if (!j.is_array()) parse_fail(std::string("expected an array for ") + what);
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Index>(k)) = num(j[k], what);
  return v;
}

std::vector<Vec> points_from(const json& j, const char* what) {
  if (!j.is_array()) parse_fail(std::string("expected a list of points for ") + what);
  std::vector<Vec> out;
  for (const auto& p : j) out.push_back(vec_from(p, what));
  return out;
}

json points_json(const std::vector<Vec>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(vec_json(p));
  return a;
}

// Terms as [coefficient, [exponents]].
json poly_json(const Polynomial& p) {
  json a = json::array();
  for (const auto& t : p.terms()) a.push_back(json::array({t.coeff, t.exps}));
  return a;
}

Polynomial poly_from(const json& j, std::size_t dim, const char* what) {
  if (!j.is_array()) parse_fail(std::string("expected a term list for ") + what);
  std::vector<Monomial> terms;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 2 || !t[1].is_array()) parse_fail(std::string("malformed term in ") + what);
    Monomial m;
    m.coeff = num(t[0], what);
    for (const auto& e : t[1]) {
      if (!e.is_number_integer() || e.get<int>() < 0) parse_fail(std::string("exponents must be nonnegative integers in ") + what);
      m.exps.push_back(e.get<int>());
    }
    if (m.exps.size() != dim) parse_fail(std::string("exponent vector has wrong length in ") + what);
    terms.push_back(std::move(m));
  }
  return Polynomial(dim, std::move(terms));
}

json halfspaces_json(const std::vector<Halfspace>& hs) {
  json a = json::array();
  for (const auto& h : hs) a.push_back({{"normal", vec_json(h.normal)}, {"offset", h.offset}});
  return a;
}

std::vector<Halfspace> halfspaces_from(const json& j, std::size_t dim) {
  if (!j.is_array()) parse_fail("expected a list of halfspaces");
  std::vector<Halfspace> hs;
  for (const auto& h : j) {
    Halfspace x{vec_from(field(h, "normal"), "normal"), num(field(h, "offset"), "offset")};
    if (static_cast<std::size_t>(x.normal.size()) != dim) parse_fail("halfspace normal has wrong length");
    hs.push_back(std::move(x));
  }
  return hs;
}

json polytope_json(const Polytope& p) {
  json o;
  if (p.hrep) o["hrep"] = halfspaces_json(*p.hrep);
  else o["vertices"] = points_json(p.vertices());
  return o;
}

Polytope polytope_from(const json& j, std::size_t dim) {
  if (j.contains("lower") || j.contains("upper")) {
    const Vec lo = vec_from(field(j, "lower"), "lower"), hi = vec_from(field(j, "upper"), "upper");
    if (static_cast<std::size_t>(lo.size()) != dim || static_cast<std::size_t>(hi.size()) != dim)
      parse_fail("box bounds have wrong length");
    return Polytope::box(lo, hi);
  }
  if (j.contains("hrep")) return Polytope::from_halfspaces(dim, halfspaces_from(j.at("hrep"), dim));
  if (j.contains("vertices")) {
    auto pts = points_from(j.at("vertices"), "vertices");
    if (pts.empty()) parse_fail("polytope without vertices");
    for (const auto& p : pts)
      if (static_cast<std::size_t>(p.size()) != dim) parse_fail("vertex has wrong length");
    return Polytope::from_vertices(std::move(pts));
  }
  parse_fail("polytope needs 'hrep', 'vertices' or 'lower'/'upper'");
}

json game_core(const Game& g) {
  json o;
  o["players"] = g.dims();
  json costs = json::array();
  for (const auto& c : g.costs()) costs.push_back(poly_json(c));
  o["costs"] = costs;
  if (const auto* sp = std::get_if<SharedPolytope>(&g.input_constraint())) {
    o["constraint"] = polytope_json(sp->set);
    o["constraint"]["type"] = "shared";
  } else {
    json ps = json::array();
    for (const auto& p : std::get<IndependentConvex>(g.input_constraint()).players)
      ps.push_back({{"g", poly_json(p.g)}, {"box", polytope_json(p.box)}});
    o["constraint"] = {{"type", "independent"}, {"players", ps}};
  }
  o["lipschitz"] = g.lipschitz();
  return o;
}

bool is_flat(const json& j);

// A small object of scalars and flat arrays, such as a halfspace.
bool is_leaf_object(const json& j) {
  if (!j.is_object() || j.size() > 3) return false;
  for (const auto& e : j)
    if (e.is_object() || (e.is_array() && std::any_of(e.begin(), e.end(), [](const json& x) { return x.is_structured(); })))
      return false;
  return true;
}

bool is_flat(const json& j) {
  if (!j.is_array()) return !j.is_object() || is_leaf_object(j);
  for (const auto& e : j)
    if (e.is_object() || (e.is_array() && !std::all_of(e.begin(), e.end(), [](const json& x) { return !x.is_structured() || (x.is_array() && std::none_of(x.begin(), x.end(), [](const json& y) { return y.is_structured(); })); })))
      return false;
  return true;
}

// Objects one key per line; arrays without objects on one line.
void pretty(const json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object() && !is_leaf_object(j)) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad + "  " + json(it.key()).dump() + ": ";
      pretty(it.value(), indent + 2, out);
    }
    out += "\n" + pad + "}";
  } else if (j.is_array() && !is_flat(j)) {
    out += "[\n";
    for (std::size_t k = 0; k < j.size(); ++k) {
      out += pad + "  ";
      pretty(j[k], indent + 2, out);
      if (k + 1 < j.size()) out += ",";
      out += "\n";
    }
    out += pad + "]";
  } else {
    std::string flat = j.dump();
    bool in_string = false;
    for (std::size_t k = 0; k + 1 < flat.size(); ++k) {
      if (flat[k] == '"' && (k == 0 || flat[k - 1] != '\\')) in_string = !in_string;
      if (!in_string && (flat[k] == ',' || flat[k] == ':') && flat[k + 1] != ' ') flat.insert(k + 1, " ");
    }
    out += flat;
  }
}

std::string pretty(const json& j) {
  std::string out;
  pretty(j, 0, out);
  return out + "\n";
}

json convex_json(const std::vector<ConvexConstraint>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back({{"dim", c.p.dim()}, {"terms", poly_json(c.p)}, {"rhs", c.rhs}});
  return a;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    parse_fail(std::string("invalid JSON: ") + e.what());
  }
}

void check_schema(const json& j, const char* schema) {
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != schema)
    parse_fail(std::string("expected schema '") + schema + "'");
}

}  // namespace

GameFile parse_game(const std::string& text) {
  const json j = parse_json(text);
  check_schema(j, kGameSchema);
  try {
    const json& pl = field(j, "players");
    if (!pl.is_array()) parse_fail("'players' must list the strategy dimension of each player");
    std::vector<std::size_t> dims;
    for (const auto& d : pl) {
      if (!d.is_number_integer() || d.get<long>() <= 0) parse_fail("player dimensions must be positive integers");
      dims.push_back(d.get<std::size_t>());
    }
    std::size_t n = 0;
    for (auto d : dims) n += d;
    const json& cj = field(j, "costs");
    if (!cj.is_array()) parse_fail("'costs' must be a list");
    std::vector<Polynomial> costs;
    for (const auto& c : cj) costs.push_back(poly_from(c, n, "costs"));
    const json& con = field(j, "constraint");
    const std::string type = field(con, "type").get<std::string>();
    ConstraintSet cs;
    if (type == "shared") {
      cs = SharedPolytope{polytope_from(con, n)};
    } else if (type == "independent") {
      const json& ps = field(con, "players");
      if (!ps.is_array() || ps.size() != dims.size()) parse_fail("one player set per player is required");
      IndependentConvex ic;
      for (std::size_t i = 0; i < dims.size(); ++i) {
        PlayerSet s;
        s.g = ps[i].contains("g") ? poly_from(ps[i].at("g"), dims[i], "g") : Polynomial(dims[i]);
        s.box = polytope_from(field(ps[i], "box"), dims[i]);
        ic.players.push_back(std::move(s));
      }
      cs = std::move(ic);
    } else {
      parse_fail("constraint type must be 'shared' or 'independent'");
    }
    GameFile gf{j.value("name", std::string()), j.value("description", std::string()),
                Game(dims, std::move(costs), std::move(cs), num(field(j, "lipschitz"), "lipschitz")), 0.0, 0.0, {}};
    if (j.contains("eps1")) gf.eps1 = num(j.at("eps1"), "eps1");
    if (j.contains("eps2")) gf.eps2 = num(j.at("eps2"), "eps2");
    if (j.contains("known_ne")) gf.known_ne = points_from(j.at("known_ne"), "known_ne");
    for (const auto& x : gf.known_ne)
      if (static_cast<std::size_t>(x.size()) != n) parse_fail("known equilibrium has wrong length");
    return gf;
  } catch (const json::exception& e) {
    parse_fail(std::string("malformed game file: ") + e.what());
  }
}

std::string emit_game(const GameFile& gf) {
  json o;
  o["schema"] = kGameSchema;
  if (!gf.name.empty()) o["name"] = gf.name;
  if (!gf.description.empty()) o["description"] = gf.description;
  o.update(game_core(gf.game));
  if (gf.eps1 > 0) o["eps1"] = gf.eps1;
  if (gf.eps2 > 0) o["eps2"] = gf.eps2;
  if (!gf.known_ne.empty()) o["known_ne"] = points_json(gf.known_ne);
  return pretty(o);
}

GameFile read_game_file(const std::string& path) { return parse_game(read_text(path)); }

GameFile game_file_from_fixture(const Fixture& f) {
  return GameFile{f.name, f.description, f.game, f.eps1, f.eps2, f.known_ne};
}

std::uint64_t game_hash(const Game& g) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : game_core(g).dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string emit_region(const RegionFile& rf) {
  const RunReport& r = rf.report;
  json players = json::array();
  for (const auto& p : r.players)
    players.push_back({{"player", p.player},
                       {"faces", p.faces},
                       {"preimages", p.preimages},
                       {"benson_iterations", p.benson_iterations},
                       {"scalarizations", p.scalarizations},
                       {"projection_iterations", p.projection_iterations},
                       {"support_steps", p.support_steps},
                       {"certified_eps2", p.certified_eps2},
                       {"pieces", p.pieces},
                       {"seconds_benson", p.seconds_benson},
                       {"seconds_faces", p.seconds_faces},
                       {"seconds_projection", p.seconds_projection}});
  json meta = {{"game", rf.game_name},
               {"game_hash", rf.game_hash},
               {"eps1", r.eps1},
               {"eps2", r.eps2},
               {"lipschitz", r.lipschitz},
               {"eps", r.eps},
               {"eps_certified", rf.region.eps_certified},
               {"seconds_players", r.seconds_players},
               {"seconds_intersection", r.seconds_intersection},
               {"seconds_total", r.seconds_total},
               {"convexify_beta", r.convexify_beta},
               {"warnings", r.warnings},
               {"players", players}};
  json pieces = json::array();
  for (const auto& p : rf.region.pieces)
    pieces.push_back({{"vertices", points_json(p.vertices())}, {"hrep", halfspaces_json(p.halfspaces())}});
  json o = {{"schema", kRegionSchema}, {"metadata", meta}, {"dim", rf.region.dim}, {"pieces", pieces}};
  if (!rf.region.clip.empty()) o["clip"] = convex_json(rf.region.clip);
  return pretty(o);
}

RegionFile parse_region(const std::string& text) {
  const json j = parse_json(text);
  check_schema(j, kRegionSchema);
  try {
    RegionFile rf;
    const json& m = field(j, "metadata");
    rf.game_name = m.value("game", std::string());
    rf.game_hash = m.value("game_hash", std::string());
    RunReport& r = rf.report;
    r.eps1 = num(field(m, "eps1"), "eps1");
    r.eps2 = num(field(m, "eps2"), "eps2");
    r.lipschitz = num(field(m, "lipschitz"), "lipschitz");
    r.eps = num(field(m, "eps"), "eps");
    r.seconds_players = m.value("seconds_players", 0.0);
    r.seconds_intersection = m.value("seconds_intersection", 0.0);
    r.seconds_total = m.value("seconds_total", 0.0);
    r.convexify_beta = m.value("convexify_beta", std::vector<double>());
    r.warnings = m.value("warnings", std::vector<std::string>());
    for (const auto& p : m.value("players", json::array())) {
      PlayerReport pr;
      pr.player = p.value("player", std::size_t{0});
      pr.faces = p.value("faces", 0);
      pr.preimages = p.value("preimages", 0);
      pr.benson_iterations = p.value("benson_iterations", 0);
      pr.scalarizations = p.value("scalarizations", 0);
      pr.projection_iterations = p.value("projection_iterations", 0);
      pr.support_steps = p.value("support_steps", 0);
      pr.certified_eps2 = p.value("certified_eps2", 0.0);
      pr.pieces = p.value("pieces", 0);
      pr.seconds_benson = p.value("seconds_benson", 0.0);
      pr.seconds_faces = p.value("seconds_faces", 0.0);
      pr.seconds_projection = p.value("seconds_projection", 0.0);
      r.players.push_back(pr);
    }
    const json& dj = field(j, "dim");
    if (!dj.is_number_integer() || dj.get<long>() <= 0) parse_fail("'dim' must be a positive integer");
    rf.region.dim = dj.get<std::size_t>();
    rf.region.eps_certified = m.value("eps_certified", r.eps);
    r.pieces = 0;
    for (const auto& pj : field(j, "pieces")) {
      Polytope p;
      p.dim = rf.region.dim;
      p.vrep = VRep{points_from(field(pj, "vertices"), "vertices"), {}};
      p.hrep = halfspaces_from(field(pj, "hrep"), rf.region.dim);
      if (p.vrep->vertices.empty()) parse_fail("region piece without vertices");
      for (const auto& v : p.vrep->vertices) {
        if (static_cast<std::size_t>(v.size()) != p.dim) parse_fail("region vertex has wrong length");
        if (!p.contains(v, 1e-7)) parse_fail("region piece is inconsistent: a vertex violates its halfspaces");
      }
      rf.region.pieces.push_back(std::move(p));
      ++r.pieces;
    }
    if (j.contains("clip"))
      for (const auto& c : j.at("clip")) {
        const std::size_t d = field(c, "dim").get<std::size_t>();
        rf.region.clip.push_back({poly_from(field(c, "terms"), d, "clip"), num(field(c, "rhs"), "rhs")});
      }
    return rf;
  } catch (const json::exception& e) {
    parse_fail(std::string("malformed region file: ") + e.what());
  }
}

std::string plot_data(const RegionUnion& r, PlotFormat format) {
  if (r.dim > 3) fail(ErrorKind::Dimension, "plot data needs a region of dimension at most 3");
  std::ostringstream csv;
  csv << std::setprecision(17);
  json pieces = json::array();
  if (format == PlotFormat::Csv) {
    if (r.dim == 3) csv << "piece,facet,order,x1,x2,x3\n";
    else {
      csv << "piece,order";
      for (std::size_t k = 0; k < r.dim; ++k) csv << ",x" << k + 1;
      csv << "\n";
    }
  }
  for (std::size_t k = 0; k < r.pieces.size(); ++k) {
    const Polytope& p = r.pieces[k];
    const auto& V = p.vertices();
    std::vector<std::vector<std::size_t>> cycles;
    if (r.dim == 2 && p.affine_dim() == 2) cycles.push_back(polygon_cycle(p));
    else if (r.dim == 3 && p.affine_dim() == 3) cycles = facet_cycles(p);
    else if (r.dim == 2 && V.size() == 2) cycles.push_back({0, 1});
    else {
      std::vector<std::size_t> all(V.size());
      for (std::size_t v = 0; v < V.size(); ++v) all[v] = v;
      cycles.push_back(all);
    }
    if (format == PlotFormat::Json) {
      json o = {{"vertices", points_json(V)}};
      if (r.dim == 3) o["facets"] = cycles;
      else o["cycle"] = cycles.front();
      pieces.push_back(o);
      continue;
    }
    for (std::size_t f = 0; f < cycles.size(); ++f)
      for (std::size_t o = 0; o < cycles[f].size(); ++o) {
        csv << k << ',';
        if (r.dim == 3) csv << f << ',';
        csv << o;
        const Vec& x = V[cycles[f][o]];
        for (Index c = 0; c < x.size(); ++c) csv << ',' << x(c);
        csv << '\n';
      }
  }
  if (format == PlotFormat::Json) return pretty(json({{"dim", r.dim}, {"pieces", pieces}}));
  return csv.str();
}

std::vector<Vec> parse_points(const std::string& text) {
  std::vector<Vec> out;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> v;
    std::stringstream one(item);
    std::string c;
    while (std::getline(one, c, ',')) {
      char* end = nullptr;
      const double x = std::strtod(c.c_str(), &end);
      if (end == c.c_str()) parse_fail("cannot read point coordinate '" + c + "'");
      while (*end == ' ' || *end == '\t') ++end;
      if (*end != '\0') parse_fail("cannot read point coordinate '" + c + "'");
      v.push_back(x);
    }
    out.push_back(to_vec(v));
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Invalid, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::Invalid, "cannot write " + path);
}

}  // namespace nashapprox
