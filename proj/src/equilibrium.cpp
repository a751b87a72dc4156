#include "nashapprox/equilibrium.hpp"

#include "nashapprox/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace nashapprox {

using Index = Eigen::Index;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Lexicographic order that treats coordinates within 1e-12 as equal, so rounding noise does not reorder.
bool lex_less(const Vec& a, const Vec& b) {
  for (Index k = 0; k < std::min(a.size(), b.size()); ++k) {
    if (a(k) < b(k) - 1e-12) return true;
    if (b(k) < a(k) - 1e-12) return false;
  }
  return a.size() < b.size();
}

bool clip_ok(const std::vector<ConvexConstraint>& clip, const Vec& x, double tol) {
  for (const auto& c : clip)
    if (c.p.eval(x) > c.rhs + tol) return false;
  return true;
}

bool boxes_overlap(const std::pair<Vec, Vec>& a, const std::pair<Vec, Vec>& b, double tol) {
  for (Index k = 0; k < a.first.size(); ++k)
    if (a.first(k) > b.second(k) + tol || b.first(k) > a.second(k) + tol) return false;
  return true;
}

bool inside(const Polytope& outer, const Polytope& inner, double tol) {
  for (const auto& v : inner.vertices())
    if (!outer.contains(v, tol)) return false;
  return true;
}

// Drops pieces contained in another piece; of two equal pieces the first is kept.
void prune_subsumed(std::vector<Polytope>& pieces) {
  std::vector<std::pair<Vec, Vec>> box;
  for (const auto& p : pieces) box.push_back(p.bounding_box());
  std::vector<bool> gone(pieces.size(), false);
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    if (gone[a]) continue;
    for (std::size_t b = 0; b < pieces.size(); ++b) {
      if (a == b || gone[b] || !boxes_overlap(box[a], box[b], 1e-12)) continue;
      if (inside(pieces[b], pieces[a], 1e-12) && (b < a || !inside(pieces[a], pieces[b], 1e-12))) {
        gone[a] = true;
        break;
      }
    }
  }
  std::vector<Polytope> kept;
  for (std::size_t a = 0; a < pieces.size(); ++a)
    if (!gone[a]) kept.push_back(std::move(pieces[a]));
  pieces = std::move(kept);
}

[[noreturn]] void rethrow_annotated(const Error& e, std::size_t i, const char* stage) {
  throw Error(e.kind(), "player " + std::to_string(i + 1) + ", " + stage + ": " + e.what());
}

}  // namespace

bool RegionUnion::contains(const Vec& x, double tol) const {
  if (!clip_ok(clip, x, tol)) return false;
  for (const auto& p : pieces)
    if (p.contains(x, tol)) return true;
  return false;
}

PlayerRun run_player(const Game& g, std::size_t i, double eps1, double eps2, const SolveOptions& opts) {
  if (!(eps1 > 0) || !(eps2 > 0)) fail(ErrorKind::Invalid, "eps1 and eps2 must be positive");
  PlayerRun run;
  run.report.player = i;
  auto t0 = Clock::now();
  try {
    run.ua = g.shared() ? initialize(g, i, eps1) : initialize_independent(g, i, eps1, opts.outer_dirs);
    refine(run.ua, g, opts.benson_max_iterations);
  } catch (const Error& e) {
    rethrow_annotated(e, i, "upper image");
  }
  run.report.seconds_benson = since(t0);
  run.report.preimages = static_cast<int>(run.ua.preimages.size());
  run.report.benson_iterations = run.ua.iterations;
  run.report.scalarizations = run.ua.scalarizations;

  t0 = Clock::now();
  try {
    run.faces = maximal_efficient_faces(run.ua.inner);
  } catch (const Error& e) {
    rethrow_annotated(e, i, "efficient faces");
  }
  run.report.seconds_faces = since(t0);
  run.report.faces = static_cast<int>(run.faces.size());

  t0 = Clock::now();
  run.region.dim = g.dim();
  if (!g.shared()) run.region.clip = g.feasible_set().convex;
  try {
    for (const auto& face : run.faces) {
      run.instances.push_back(make_instance(g, run.ua, face, eps2));
      run.projections.push_back(approximate_projection(run.instances.back(), opts.projection_max_iterations));
      const ProjectionResult& pr = run.projections.back();
      run.report.projection_iterations += pr.iterations;
      run.report.support_steps += pr.support_steps;
      run.report.certified_eps2 = std::max(run.report.certified_eps2, pr.certified_eps);
      if (auto piece = intersect(minkowski_l1_ball(pr.inner_hull, eps2), g.hull()))
        run.region.pieces.push_back(complete(*piece));
    }
  } catch (const Error& e) {
    rethrow_annotated(e, i, "projection");
  }
  prune_subsumed(run.region.pieces);
  canonicalize(run.region);
  run.region.eps_certified = eps1 + 2 * g.lipschitz() * eps2;
  run.report.seconds_projection = since(t0);
  run.report.pieces = static_cast<int>(run.region.pieces.size());
  return run;
}

RegionUnion player_region(const Game& g, std::size_t i, double eps1, double eps2) {
  return run_player(g, i, eps1, eps2).region;
}

RegionUnion intersect_regions(const std::vector<RegionUnion>& regions) {
  if (regions.empty()) fail(ErrorKind::Invalid, "intersect_regions: no regions");
  RegionUnion acc = regions.front();
  for (std::size_t r = 1; r < regions.size(); ++r) {
    const RegionUnion& next = regions[r];
    if (next.dim != acc.dim) fail(ErrorKind::Dimension, "intersect_regions: dimensions differ");
    std::vector<std::pair<Vec, Vec>> box_next;
    for (const auto& q : next.pieces) box_next.push_back(q.bounding_box());
    std::vector<Polytope> out;
    for (const auto& p : acc.pieces) {
      const auto bp = p.bounding_box();
      for (std::size_t k = 0; k < next.pieces.size(); ++k) {
        if (!boxes_overlap(bp, box_next[k], kGeoTol)) continue;
        if (auto q = intersect(p, next.pieces[k])) out.push_back(complete(*q));
      }
    }
    prune_subsumed(out);
    acc.pieces = std::move(out);
    for (const auto& c : next.clip)
      if (std::find_if(acc.clip.begin(), acc.clip.end(), [&](const ConvexConstraint& d) {
            return d.rhs == c.rhs && d.p == c.p;
          }) == acc.clip.end())
        acc.clip.push_back(c);
    acc.eps_certified = std::max(acc.eps_certified, next.eps_certified);
  }
  canonicalize(acc);
  return acc;
}

void canonicalize(RegionUnion& r) {
  for (auto& p : r.pieces) {
    if (p.vrep) std::sort(p.vrep->vertices.begin(), p.vrep->vertices.end(), lex_less);
    if (p.hrep)
      std::sort(p.hrep->begin(), p.hrep->end(), [](const Halfspace& a, const Halfspace& b) {
        if (a.normal != b.normal) return lex_less(a.normal, b.normal);
        return a.offset < b.offset;
      });
  }
  std::sort(r.pieces.begin(), r.pieces.end(), [](const Polytope& a, const Polytope& b) {
    const auto& va = a.vertices();
    const auto& vb = b.vertices();
    for (std::size_t k = 0; k < std::min(va.size(), vb.size()); ++k) {
      if (lex_less(va[k], vb[k])) return true;
      if (lex_less(vb[k], va[k])) return false;
    }
    return va.size() < vb.size();
  });
}

std::vector<std::vector<std::size_t>> connected_groups(const RegionUnion& r, double tol) {
  const std::size_t n = r.pieces.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<std::pair<Vec, Vec>> box;
  for (const auto& p : r.pieces) box.push_back(p.bounding_box());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      if (find(a) == find(b) || !boxes_overlap(box[a], box[b], tol)) continue;
      const Polytope& p = r.pieces[a];
      const Polytope& q = r.pieces[b];
      Mat A(p.A().rows() + q.A().rows(), static_cast<Index>(r.dim));
      A << p.A(), q.A();
      Vec bb(A.rows());
      bb << p.b(), q.b();
      bb.array() += tol;
      if (lp_solve(Vec::Zero(static_cast<Index>(r.dim)), A, bb).status == SolveStatus::Optimal)
        parent[find(a)] = find(b);
    }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<long> slot(n, -1);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t root = find(a);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[root])].push_back(a);
  }
  return groups;
}

std::vector<Vec> sample_region(const RegionUnion& r, int count, std::uint64_t seed) {
  std::vector<Vec> out;
  if (r.pieces.empty() || count <= 0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, r.pieces.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::exponential_distribution<double> ex(1.0);
  std::vector<std::pair<Vec, Vec>> box;
  for (const auto& p : r.pieces) box.push_back(p.bounding_box());
  int misses = 0;
  while (static_cast<int>(out.size()) < count) {
    const std::size_t k = pick(rng);
    const Polytope& p = r.pieces[k];
    const auto& [lo, hi] = box[k];
    bool done = false;
    for (int attempt = 0; attempt < 200 && !done; ++attempt) {
      Vec x(lo.size());
      for (Index j = 0; j < x.size(); ++j) x(j) = lo(j) + (hi(j) - lo(j)) * u(rng);
      if (p.contains(x, 0.0) && clip_ok(r.clip, x, 0.0)) {
        out.push_back(x);
        done = true;
      }
    }
    for (int attempt = 0; attempt < 50 && !done; ++attempt) {
      const auto& V = p.vertices();
      Vec w(static_cast<Index>(V.size()));
      for (Index j = 0; j < w.size(); ++j) w(j) = ex(rng);
      w /= w.sum();
      Vec x = Vec::Zero(static_cast<Index>(r.dim));
      for (std::size_t j = 0; j < V.size(); ++j) x += w(static_cast<Index>(j)) * V[j];
      if (clip_ok(r.clip, x, 0.0)) {
        out.push_back(x);
        done = true;
      }
    }
    if (!done && ++misses > 100 * count) fail(ErrorKind::Infeasible, "sample_region: no admissible points found");
  }
  return out;
}

std::vector<double> ne_gaps(const Game& g, const Vec& x) {
  if (static_cast<std::size_t>(x.size()) != g.dim()) fail(ErrorKind::Dimension, "ne_gaps: point has wrong dimension");
  if (!g.feasible(x, 1e-8)) fail(ErrorKind::Infeasible, "ne_gaps: point is not in the strategy set");
  const FeasibleSet& fs = g.feasible_set();
  std::vector<double> gaps;
  for (std::size_t i = 0; i < g.n_players(); ++i) {
    const auto own = g.own(i);
    const auto oth = g.others(i);
    const Index n = static_cast<Index>(own.size());
    NlpProblem p(own.size());
    p.objective = g.cost(i).restrict_to(own, x);
    std::vector<Index> rows;
    Mat Ao(fs.A.rows(), n);
    Vec bo = fs.b;
    for (Index r = 0; r < fs.A.rows(); ++r) {
      for (Index j = 0; j < n; ++j) Ao(r, j) = fs.A(r, static_cast<Index>(own[static_cast<std::size_t>(j)]));
      for (auto k : oth) bo(r) -= fs.A(r, static_cast<Index>(k)) * x(static_cast<Index>(k));
      // Rows of the other players (up to rounding) do not constrain the slice.
      if (Ao.row(r).cwiseAbs().maxCoeff() > 1e-12 * fs.A.row(r).cwiseAbs().maxCoeff()) rows.push_back(r);
    }
    p.ineq.resize(static_cast<Index>(rows.size()), n);
    p.ineq_rhs.resize(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      p.ineq.row(static_cast<Index>(r)) = Ao.row(rows[r]);
      p.ineq_rhs(static_cast<Index>(r)) = bo(rows[r]) + kGeoTol;
    }
    for (const auto& c : fs.convex) p.convex.push_back({c.p.restrict_to(own, x), c.rhs + kGeoTol});
    const NlpSolution s = nlp_solve(p);
    if (s.status != SolveStatus::Optimal)
      fail(ErrorKind::Infeasible, "ne_gaps: slice problem of player " + std::to_string(i + 1) + " failed (" +
                                      to_string(s.status) + ")");
    gaps.push_back(g.cost(i).eval(x) - s.value);
  }
  return gaps;
}

bool epsilon_ne_oracle(const Game& g, const Vec& x, double eps) {
  for (double gap : ne_gaps(g, x))
    if (gap > eps + kKktTol) return false;
  return true;
}

std::vector<Vec> strategy_grid(const Game& g, int per_axis) {
  if (per_axis < 2) fail(ErrorKind::Invalid, "strategy_grid: need at least 2 points per axis");
  const auto [lo, hi] = g.hull().bounding_box();
  const Index n = lo.size();
  std::vector<Vec> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    Vec x(n);
    for (Index k = 0; k < n; ++k)
      x(k) = lo(k) + (hi(k) - lo(k)) * idx[static_cast<std::size_t>(k)] / static_cast<double>(per_axis - 1);
    if (g.feasible(x)) out.push_back(x);
    Index k = 0;
    while (k < n && ++idx[static_cast<std::size_t>(k)] == per_axis) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == n) break;
  }
  return out;
}

std::vector<Vec> brute_force_ne(const Game& g, int per_axis, double eps) {
  if (g.dim() > 3 || per_axis > 201) fail(ErrorKind::Invalid, "brute_force_ne: at most 3 dimensions and 201 points per axis");
  std::vector<Vec> out;
  for (const auto& x : strategy_grid(g, per_axis))
    if (epsilon_ne_oracle(g, x, eps)) out.push_back(x);
  return out;
}

std::vector<std::size_t> grid_game_ne(const Game& g, const std::vector<Vec>& grid, double eps) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    bool ok = true;
    for (std::size_t i = 0; i < g.n_players() && ok; ++i) {
      const Vec xa = g.minus(i, grid[a]);
      const double threshold = g.cost(i).eval(grid[a]) - eps;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : grid)
        if (g.minus(i, y) == xa) best = std::min(best, g.cost(i).eval(y));
      ok = best >= threshold;
    }
    if (ok) out.push_back(a);
  }
  return out;
}

std::vector<std::size_t> grid_pareto(const Game& g, std::size_t i, const std::vector<Vec>& grid, double eps) {
  std::vector<Vec> img;
  for (const auto& x : grid) img.push_back(objective_image(g, i, x));
  const Index m = static_cast<Index>(g.slice(i).m);
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    Vec shifted = img[a];
    shifted(m - 1) -= eps;
    bool dominated = false;
    for (std::size_t b = 0; b < grid.size() && !dominated; ++b) {
      const Vec& y = img[b];
      dominated = (y.array() <= shifted.array()).all() && (y.array() < shifted.array()).any();
    }
    if (!dominated) out.push_back(a);
  }
  return out;
}

std::vector<std::size_t> grid_pareto_intersection(const Game& g, const std::vector<Vec>& grid, double eps) {
  std::vector<std::size_t> acc = grid_pareto(g, 0, grid, eps);
  for (std::size_t i = 1; i < g.n_players(); ++i) {
    const auto next = grid_pareto(g, i, grid, eps);
    std::vector<std::size_t> both;
    std::set_intersection(acc.begin(), acc.end(), next.begin(), next.end(), std::back_inserter(both));
    acc = std::move(both);
  }
  return acc;
}

Game pipeline_game(const Game& g, std::vector<double>* beta) {
  if (beta) beta->clear();
  if (convexity_warnings(g).empty()) return g;
  Game out = g;
  const Convexification c = convexify(g, &out);
  if (c.changed && beta) *beta = c.beta;
  return c.changed ? out : g;
}

int default_threads() {
  if (const char* s = std::getenv("NASHAPPROX_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0) return n;
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

std::pair<RegionUnion, RunReport> solve(const Game& g, double eps1, double eps2, const SolveOptions& opts) {
  if (!(eps1 > 0) || !(eps2 > 0)) fail(ErrorKind::Invalid, "eps1 and eps2 must be positive");
  const auto t0 = Clock::now();
  RunReport report;
  report.eps1 = eps1;
  report.eps2 = eps2;
  report.lipschitz = g.lipschitz();
  report.eps = eps1 + 2 * g.lipschitz() * eps2;
  report.warnings = convexity_warnings(g);

  std::vector<double> beta;
  const Game work = opts.convexify ? pipeline_game(g, &beta) : g;
  if (!beta.empty()) {
    report.convexify_beta = beta;
    report.warnings.push_back("costs convexified in the other players' variables; best responses are unchanged");
  }

  const std::size_t N = g.n_players();
  std::vector<PlayerRun> runs(N);
  std::vector<std::exception_ptr> errors(N);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < N;) {
      try {
        runs[i] = run_player(work, i, eps1, eps2, opts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(opts.threads > 0 ? opts.threads : default_threads(), static_cast<int>(N));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  report.seconds_players = since(t0);

  const auto t1 = Clock::now();
  std::vector<RegionUnion> regions;
  for (auto& r : runs) {
    report.players.push_back(r.report);
    regions.push_back(std::move(r.region));
  }
  RegionUnion X = intersect_regions(regions);
  X.eps_certified = report.eps;
  report.seconds_intersection = since(t1);
  report.pieces = X.pieces.size();
  report.seconds_total = since(t0);
  return {std::move(X), std::move(report)};
}

}  // namespace nashapprox
