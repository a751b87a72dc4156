#include "nashapprox/equilibrium.hpp"
#include "nashapprox/fixtures.hpp"
#include "nashapprox/io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace nashapprox;

namespace {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Invalid: return "invalid";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Assumption: return "assumption";
    case ErrorKind::IterationBudget: return "iteration_budget";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Dimension: return "dimension";
  }
  return "invalid";
}

py::dict player_dict(const PlayerReport& p) {
  py::dict d;
  d["player"] = p.player;
  d["faces"] = p.faces;
  d["preimages"] = p.preimages;
  d["benson_iterations"] = p.benson_iterations;
  d["scalarizations"] = p.scalarizations;
  d["projection_iterations"] = p.projection_iterations;
  d["support_steps"] = p.support_steps;
  d["certified_eps2"] = p.certified_eps2;
  d["pieces"] = p.pieces;
  d["seconds"] = p.seconds_benson + p.seconds_faces + p.seconds_projection;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Polyhedral approximation of Nash equilibrium sets of convex polynomial games";

  // Kept alive for the lifetime of the interpreter.
  static const py::handle error = py::exception<Error>(m, "Error", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error(std::string(kind_name(e.kind())) + ": " + e.what());
      exc.attr("kind") = kind_name(e.kind());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<Game>(m, "Game")
      .def_property_readonly("n_players", &Game::n_players)
      .def_property_readonly("dims", &Game::dims)
      .def_property_readonly("dim", &Game::dim)
      .def_property_readonly("lipschitz", &Game::lipschitz)
      .def_property_readonly("shared", &Game::shared)
      .def("cost", [](const Game& g, std::size_t i, const Vec& x) { return g.cost(i).eval(x); }, py::arg("player"),
           py::arg("x"))
      .def("feasible", &Game::feasible, py::arg("x"), py::arg("tol") = kGeoTol)
      .def("hash", [](const Game& g) { return hex64(game_hash(g)); });

  py::class_<GameFile>(m, "GameFile")
      .def_readonly("name", &GameFile::name)
      .def_readonly("description", &GameFile::description)
      .def_readonly("game", &GameFile::game)
      .def_readonly("eps1", &GameFile::eps1)
      .def_readonly("eps2", &GameFile::eps2)
      .def_readonly("known_ne", &GameFile::known_ne)
      .def("to_json", &emit_game);

  py::class_<RunReport>(m, "Report")
      .def_readonly("eps1", &RunReport::eps1)
      .def_readonly("eps2", &RunReport::eps2)
      .def_readonly("lipschitz", &RunReport::lipschitz)
      .def_readonly("eps", &RunReport::eps)
      .def_readonly("pieces", &RunReport::pieces)
      .def_readonly("seconds_total", &RunReport::seconds_total)
      .def_readonly("convexify_beta", &RunReport::convexify_beta)
      .def_readonly("warnings", &RunReport::warnings)
      .def_property_readonly("players", [](const RunReport& r) {
        py::list l;
        for (const auto& p : r.players) l.append(player_dict(p));
        return l;
      });

  py::class_<RegionUnion>(m, "Region")
      .def_readonly("dim", &RegionUnion::dim)
      .def_readonly("eps_certified", &RegionUnion::eps_certified)
      .def("__len__", [](const RegionUnion& r) { return r.pieces.size(); })
      .def_property_readonly("pieces",
                             [](const RegionUnion& r) {
                               std::vector<std::vector<Vec>> out;
                               for (const auto& p : r.pieces) out.push_back(p.vertices());
                               return out;
                             })
      .def("contains", &RegionUnion::contains, py::arg("x"), py::arg("tol") = kGeoTol)
      .def("sample", &sample_region, py::arg("count"), py::arg("seed") = 1)
      .def("groups", [](const RegionUnion& r) { return connected_groups(r); })
      .def("plot_data", [](const RegionUnion& r, const std::string& format) {
        if (format != "csv" && format != "json") fail(ErrorKind::Invalid, "format must be 'csv' or 'json'");
        return plot_data(r, format == "json" ? PlotFormat::Json : PlotFormat::Csv);
      }, py::arg("format") = "csv");

  m.def("fixture_names", &fixture_names);
  m.def("fixture", [](const std::string& name) { return game_file_from_fixture(make_fixture(name)); }, py::arg("name"));
  m.def("parse_game", &parse_game, py::arg("text"));
  m.def("load_game", &read_game_file, py::arg("path"));

  m.def(
      "solve",
      [](const Game& g, double eps1, double eps2, int threads, bool convexify) {
        SolveOptions opts;
        opts.threads = threads;
        opts.convexify = convexify;
        py::gil_scoped_release release;
        return solve(g, eps1, eps2, opts);
      },
      py::arg("game"), py::arg("eps1"), py::arg("eps2"), py::arg("threads") = 0, py::arg("convexify") = true,
      "Returns (region, report) with NE inside the region inside eps-NE, eps = eps1 + 2 L eps2.");

  m.def("ne_gaps", &ne_gaps, py::arg("game"), py::arg("x"));
  m.def("is_epsilon_ne", &epsilon_ne_oracle, py::arg("game"), py::arg("x"), py::arg("eps"));

  m.def(
      "region_to_json",
      [](const RegionUnion& r, const RunReport& rep, const Game& g, const std::string& name) {
        return emit_region(RegionFile{name, hex64(game_hash(g)), rep, r});
      },
      py::arg("region"), py::arg("report"), py::arg("game"), py::arg("name") = "");
  m.def(
      "region_from_json",
      [](const std::string& text) {
        RegionFile rf = parse_region(text);
        return std::make_pair(rf.region, rf.report);
      },
      py::arg("text"));
}
