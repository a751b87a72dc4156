#include "nashapprox/equilibrium.hpp"
#include "nashapprox/fixtures.hpp"
#include "nashapprox/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

using namespace nashapprox;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kParse = 2, kAssumption = 3, kBudget = 4, kDimension = 5 };

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Parse:
    case ErrorKind::Invalid:
    case ErrorKind::Dimension:
      return kParse;
    case ErrorKind::Assumption:
      return kAssumption;
    case ErrorKind::IterationBudget:
      return kBudget;
    case ErrorKind::Infeasible:
      return kCheckFailed;
  }
  return kCheckFailed;
}

void print_summary(std::ostream& os, const std::string& name, const RunReport& r, const RegionUnion& X) {
  os << "game " << name << ": " << X.pieces.size() << " pieces in dimension " << X.dim << "\n";
  os << "eps1 " << r.eps1 << ", eps2 " << r.eps2 << ", L " << r.lipschitz << ", eps = eps1 + 2 L eps2 = " << r.eps
     << "\n";
  for (const auto& p : r.players)
    os << "  player " << p.player + 1 << ": " << p.faces << " efficient faces, " << p.preimages << " preimages, "
       << p.benson_iterations << " Benson iterations, projection error " << p.certified_eps2 << ", "
       << p.seconds_benson + p.seconds_faces + p.seconds_projection << " s\n";
  os << "intersection " << r.seconds_intersection << " s, total " << r.seconds_total << " s\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
}

struct SolveArgs {
  std::string game;
  std::optional<double> eps1, eps2;
  std::string out;
  std::string mode;
  int threads = 0;
  bool no_convexify = false;
};

int cmd_solve(const SolveArgs& a) {
  const GameFile gf = read_game_file(a.game);
  const double eps1 = a.eps1.value_or(gf.eps1);
  const double eps2 = a.eps2.value_or(gf.eps2);
  if (!(eps1 > 0) || !(eps2 > 0)) fail(ErrorKind::Invalid, "eps1 and eps2 must be positive (give --eps1/--eps2)");
  if (!a.mode.empty() && (a.mode == "shared") != gf.game.shared())
    fail(ErrorKind::Invalid, "--mode " + a.mode + " does not match the constraint of the game file");
  SolveOptions opts;
  opts.threads = a.threads;
  opts.convexify = !a.no_convexify;
  const auto [X, rep] = solve(gf.game, eps1, eps2, opts);
  const std::string name = gf.name.empty() ? std::filesystem::path(a.game).stem().string() : gf.name;
  const std::string out = a.out.empty() ? std::filesystem::path(a.game).replace_extension(".region.json").string() : a.out;
  write_text(out, emit_region(RegionFile{name, hex64(game_hash(gf.game)), rep, X}));
  print_summary(std::cout, name, rep, X);
  std::cout << "region written to " << out << "\n";
  return kOk;
}

struct CheckArgs {
  std::string game, region, known_ne;
  int samples = 1000;
  std::optional<double> eps;
  unsigned seed = 1;
};

int cmd_check(const CheckArgs& a) {
  const GameFile gf = read_game_file(a.game);
  const RegionFile rf = parse_region(read_text(a.region));
  if (rf.region.dim != gf.game.dim()) fail(ErrorKind::Dimension, "region and game dimensions differ");
  if (!rf.game_hash.empty() && rf.game_hash != hex64(game_hash(gf.game)))
    std::cout << "warning: region was computed for a different game (hash " << rf.game_hash << ")\n";
  const double eps = a.eps ? *a.eps : rf.report.eps;
  int failures = 0;
  if (!a.known_ne.empty()) {
    int inside = 0;
    const auto pts = parse_points(a.known_ne);
    for (const auto& x : pts) {
      if (static_cast<std::size_t>(x.size()) != rf.region.dim) fail(ErrorKind::Parse, "--known-ne point has wrong dimension");
      if (rf.region.contains(x)) ++inside;
      else std::cout << "not contained: " << x.transpose() << "\n";
    }
    std::cout << "containment: " << inside << "/" << pts.size() << " known equilibria inside the region\n";
    failures += static_cast<int>(pts.size()) - inside;
  }
  int pass = 0;
  double worst = 0;
  const auto samples = sample_region(rf.region, a.samples, a.seed);
  for (const auto& x : samples) {
    double gap = 0;
    for (double g : ne_gaps(gf.game, x)) gap = std::max(gap, g);
    worst = std::max(worst, gap);
    if (gap <= eps + kKktTol) ++pass;
  }
  std::cout << "eps-NE: " << pass << "/" << samples.size() << " samples pass at eps " << eps << " (largest gap " << worst
            << ")\n";
  failures += static_cast<int>(samples.size()) - pass;
  return failures ? kCheckFailed : kOk;
}

int cmd_plotdata(const std::string& region, const std::string& format, const std::string& out) {
  const RegionFile rf = parse_region(read_text(region));
  if (rf.region.dim > 3) {
    std::cerr << "error: plot data needs dimension at most 3, region has " << rf.region.dim << "\n";
    return kDimension;
  }
  const std::string data = plot_data(rf.region, format == "json" ? PlotFormat::Json : PlotFormat::Csv);
  if (out.empty()) std::cout << data;
  else write_text(out, data);
  return kOk;
}

int cmd_fixtures(bool list, const std::string& write_dir, const std::vector<std::string>& run, int threads) {
  if (list || (write_dir.empty() && run.empty()))
    for (const auto& n : fixture_names()) std::cout << n << "  " << make_fixture(n).description << "\n";
  if (!write_dir.empty()) {
    std::filesystem::create_directories(write_dir);
    for (const auto& n : fixture_names()) {
      const auto path = std::filesystem::path(write_dir) / (n + ".game");
      write_text(path.string(), emit_game(game_file_from_fixture(make_fixture(n))));
      std::cout << "wrote " << path.string() << "\n";
    }
  }
  int code = kOk;
  for (const auto& n : run) {
    const Fixture f = make_fixture(n);
    SolveOptions opts;
    opts.threads = threads;
    const auto [X, rep] = solve(f.game, f.eps1, f.eps2, opts);
    print_summary(std::cout, n, rep, X);
    int inside = 0;
    for (const auto& x : f.known_ne) inside += X.contains(x);
    int pass = 0;
    const auto samples = sample_region(X, 1000, 1);
    for (const auto& x : samples) pass += epsilon_ne_oracle(f.game, x, rep.eps + kReportTol);
    std::cout << "  known equilibria inside: " << inside << "/" << f.known_ne.size() << ", samples passing eps "
              << rep.eps << ": " << pass << "/" << samples.size() << "\n";
    if (inside != static_cast<int>(f.known_ne.size()) || pass != static_cast<int>(samples.size())) code = kCheckFailed;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate the set of Nash equilibria of convex games by a finite union of polytopes"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "compute a region X with NE inside X inside eps-NE");
  solve_cmd->add_option("game", sa.game, "game file")->required();
  solve_cmd->add_option("--eps1", sa.eps1, "upper image tolerance (default: from the game file)");
  solve_cmd->add_option("--eps2", sa.eps2, "projection tolerance (default: from the game file)");
  solve_cmd->add_option("--out", sa.out, "region file (default: <game>.region.json)");
  solve_cmd->add_option("--mode", sa.mode, "constraint mode")->check(CLI::IsMember({"shared", "independent"}));
  solve_cmd->add_option("--threads", sa.threads, "players solved in parallel (default: NASHAPPROX_THREADS or all cores)");
  solve_cmd->add_flag("--no-convexify", sa.no_convexify, "use the costs unchanged even if not jointly convex");

  CheckArgs ca;
  double check_eps = 0;
  auto* check_cmd = app.add_subcommand("check", "verify a region against the game by sampling");
  check_cmd->add_option("game", ca.game, "game file")->required();
  check_cmd->add_option("region", ca.region, "region file")->required();
  check_cmd->add_option("--samples", ca.samples, "number of sampled points")->check(CLI::NonNegativeNumber);
  auto* eps_opt = check_cmd->add_option("--eps", check_eps, "tolerance (default: eps of the region file)");
  check_cmd->add_option("--known-ne", ca.known_ne, "points that must be inside, as \"x1,x2;y1,y2\"");
  check_cmd->add_option("--seed", ca.seed, "sampling seed");

  std::string pd_region, pd_format = "csv", pd_out;
  auto* plot_cmd = app.add_subcommand("plotdata", "emit vertex cycles of the pieces for plotting");
  plot_cmd->add_option("region", pd_region, "region file")->required();
  plot_cmd->add_option("--format", pd_format, "output format")->check(CLI::IsMember({"csv", "json"}));
  plot_cmd->add_option("--out", pd_out, "output file (default: standard output)");

  bool fx_list = false;
  std::string fx_write;
  std::vector<std::string> fx_run;
  int fx_threads = 0;
  auto* fx_cmd = app.add_subcommand("fixtures", "list, write or run the built-in example games");
  fx_cmd->add_flag("--list", fx_list, "list the fixtures");
  fx_cmd->add_option("--write", fx_write, "write every fixture as a game file into this directory");
  fx_cmd->add_option("--run", fx_run, "solve these fixtures with their default tolerances and check the result")->delimiter(',');
  fx_cmd->add_option("--threads", fx_threads, "players solved in parallel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*solve_cmd) return cmd_solve(sa);
    if (*check_cmd) {
      if (*eps_opt) ca.eps = check_eps;
      return cmd_check(ca);
    }
    if (*plot_cmd) return cmd_plotdata(pd_region, pd_format, pd_out);
    if (*fx_cmd) return cmd_fixtures(fx_list, fx_write, fx_run, fx_threads);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kOk;
}
