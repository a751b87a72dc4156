#include "nashapprox/benson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nashapprox {

using Index = Eigen::Index;

namespace {

Mat selection(const std::vector<std::size_t>& idx, std::size_t n) {
  Mat E = Mat::Zero(static_cast<Index>(idx.size()), static_cast<Index>(n));
  for (std::size_t k = 0; k < idx.size(); ++k) E(static_cast<Index>(k), static_cast<Index>(idx[k])) = 1.0;
  return E;
}

double l1_diameter(const Polytope& p) {
  const auto [lo, hi] = p.bounding_box();
  return (hi - lo).sum();
}

// Sum of the multiplier-weighted slacks and the stationarity residual scaled by the diameter: the amount by
// which an inexact KKT point can overstate the supporting cut.
double kkt_slop(const NlpProblem& p, const NlpSolution& s, double diam) {
  Vec r = p.objective_gradient(s.x);
  double slop = 0.0;
  if (p.ineq.rows()) {
    r += p.ineq.transpose() * s.ineq_multipliers;
    slop += s.ineq_multipliers.dot((p.ineq_rhs - p.ineq * s.x).cwiseMax(0.0));
  }
  if (p.eq.rows()) r += p.eq.transpose() * s.eq_multipliers;
  for (std::size_t k = 0; k < p.convex.size(); ++k) {
    const double nu = s.convex_multipliers(static_cast<Index>(k));
    r += nu * p.convex[k].p.gradient(s.x);
    slop += nu * std::max(0.0, p.convex[k].rhs - p.convex[k].p.eval(s.x));
  }
  return slop + r.cwiseAbs().maxCoeff() * diam;
}

NlpProblem domain_problem(std::size_t n, const FeasibleSet& domain) {
  NlpProblem p(n);
  p.ineq = domain.A;
  p.ineq_rhs = domain.b;
  p.convex = domain.convex;
  return p;
}

void add_unique(std::vector<Vec>& pts, const Vec& x) {
  for (const auto& q : pts)
    if ((q - x).cwiseAbs().maxCoeff() <= 1e-12) return;
  pts.push_back(x);
}

Halfspace lift(const Halfspace& h, std::size_t m) {
  Vec nrm = Vec::Zero(static_cast<Index>(m));
  nrm.head(h.normal.size()) = h.normal;
  return {nrm, h.offset};
}

void add_common_cuts(UpperImageApprox& ua, const Polytope& proj) {
  const auto a = static_cast<Index>(ua.slice.a);
  const auto m = ua.slice.m;
  for (Index k = 0; k < a; ++k) {
    Vec nrm = Vec::Zero(static_cast<Index>(m));
    nrm(k) = 1.0;
    nrm(a + k) = 1.0;
    ua.cuts.push_back({nrm, 0.0});
    ua.cuts.push_back({-nrm, 0.0});
  }
  for (const auto& h : proj.halfspaces()) ua.cuts.push_back(lift(h, m));
}

void rebuild_outer(UpperImageApprox& ua) {
  ua.outer = to_vrep(Polytope::from_halfspaces(ua.slice.m, ua.cuts));
  if (ua.outer.is_empty()) fail(ErrorKind::Infeasible, "outer approximation became empty");
}

Polytope unit_orthant_generators(std::vector<Vec> points, std::size_t m) {
  std::vector<Vec> rays;
  for (std::size_t k = 0; k < m; ++k) rays.push_back(Vec::Unit(static_cast<Index>(m), static_cast<Index>(k)));
  return complete(Polytope::from_vertices(std::move(points), std::move(rays)));
}

// Weighted-sum supports for the unit directions e_m and the all-ones vector, which both reduce to min f_i.
void add_cost_support(UpperImageApprox& ua, const Game& g) {
  NlpProblem p = domain_problem(g.dim(), ua.domain);
  p.objective = g.cost(ua.player);
  const NlpSolution s = nlp_solve(p);
  if (s.status != SolveStatus::Optimal)
    fail(ErrorKind::Infeasible, "cost minimization failed: " + to_string(s.status));
  ++ua.scalarizations;
  const auto m = static_cast<Index>(ua.slice.m);
  const double lb = s.dual_value - kkt_slop(p, s, l1_diameter(g.hull()));
  ua.cuts.push_back({-Vec::Unit(m, m - 1), -lb});
  ua.cuts.push_back({-Vec::Ones(m), -lb});
  add_unique(ua.preimages, s.x);
}

}  // namespace

Vec image_point(const Game& g, std::size_t i, const Vec& x) {
  const SliceIndex s = g.slice(i);
  const Vec xm = g.minus(i, x);
  Vec y(static_cast<Index>(s.m));
  y.head(static_cast<Index>(s.a)) = xm;
  y.segment(static_cast<Index>(s.a), static_cast<Index>(s.a)) = -xm;
  y(static_cast<Index>(s.m - 1)) = g.cost(i).eval(x);
  return y;
}

Scalarization pascoletti_serafini(const Game& g, std::size_t i, const Vec& v, const FeasibleSet& domain) {
  const SliceIndex sl = g.slice(i);
  const auto a = static_cast<Index>(sl.a);
  const auto m = static_cast<Index>(sl.m);
  if (v.size() != m) fail(ErrorKind::Dimension, "reference point has wrong dimension");
  NlpProblem p = domain_problem(g.dim(), domain);
  p.objective = g.cost(i);
  p.eq = selection(g.others(i), g.dim());
  p.eq_rhs = v.head(a);
  const NlpSolution s = nlp_solve(p);
  Scalarization r;
  r.status = s.status;
  if (s.status == SolveStatus::Optimal && p.max_violation(s.x) > 1e-7) r.status = SolveStatus::MaxIterations;
  if (r.status != SolveStatus::Optimal) return r;
  r.x = s.x;
  r.z = s.value - v(m - 1);
  r.gap = std::max(0.0, s.value - s.dual_value) + kkt_slop(p, s, l1_diameter(g.hull()));
  const Vec& lam = s.eq_multipliers;
  r.w = Vec::Zero(m);
  r.w.head(a) = lam.cwiseMax(0.0);
  r.w.segment(a, a) = (-lam).cwiseMax(0.0);
  r.w(m - 1) = 1.0;
  // f(x) + lam.x_{-i} >= value - gap on the domain; w.y equals the left side on images.
  r.offset = lam.dot(v.head(a)) + s.value - r.gap;
  return r;
}

Scalarization pascoletti_serafini(const Game& g, std::size_t i, const Vec& v) {
  return pascoletti_serafini(g, i, v, g.feasible_set());
}

UpperImageApprox initialize(const Game& g, std::size_t i, double eps1) {
  if (!g.shared()) fail(ErrorKind::Invalid, "initialize needs a shared strategy polytope");
  if (!(eps1 > 0)) fail(ErrorKind::Invalid, "eps1 must be positive");
  UpperImageApprox ua;
  ua.player = i;
  ua.slice = g.slice(i);
  ua.eps1 = eps1;
  ua.domain = g.feasible_set();
  const auto a = static_cast<Index>(ua.slice.a);
  const auto m = static_cast<Index>(ua.slice.m);
  const auto oth = g.others(i);

  std::vector<Vec> proj;
  for (const auto& x : g.hull().vertices()) {
    add_unique(ua.preimages, x);
    proj.push_back(g.minus(i, x));
  }
  // Weighted sums along the first 2a unit vectors are linear programs over the polytope.
  for (Index k = 0; k < a; ++k) {
    for (double sgn : {1.0, -1.0}) {
      Vec c = Vec::Zero(static_cast<Index>(g.dim()));
      c(static_cast<Index>(oth[static_cast<std::size_t>(k)])) = sgn;
      const NlpSolution s = lp_solve(c, ua.domain.A, ua.domain.b);
      if (s.status != SolveStatus::Optimal) fail(ErrorKind::Infeasible, "weighted-sum LP failed");
      const Index row = sgn > 0 ? k : a + k;
      ua.cuts.push_back({-Vec::Unit(m, row), -s.value});
      add_unique(ua.preimages, s.x);
    }
  }
  add_cost_support(ua, g);
  add_common_cuts(ua, to_hrep(Polytope::from_vertices(proj)));
  rebuild_outer(ua);
  return ua;
}

Polytope outer_approx_others(const Game& g, std::size_t i, int dirs) {
  const auto* ic = std::get_if<IndependentConvex>(&g.constraint());
  if (!ic) fail(ErrorKind::Invalid, "outer_approx_others needs independent player sets");
  const std::size_t a = g.dim() - g.dims()[i];
  const auto A = static_cast<Index>(a);
  if (dirs <= 0) dirs = static_cast<int>(4 * a);

  std::vector<Vec> D;
  if (a == 2) {
    for (int k = 0; k < dirs; ++k) {
      const double t = 2 * std::numbers::pi * k / dirs;
      D.push_back(Vec{{std::cos(t), std::sin(t)}});
    }
  } else {
    for (Index k = 0; k < A; ++k) {
      D.push_back(Vec::Unit(A, k));
      D.push_back(-Vec::Unit(A, k));
    }
    for (Index k = 0; A > 1 && static_cast<int>(D.size()) < dirs; k = (k + 1) % A) {
      Vec d = Vec::Unit(A, k) + Vec::Unit(A, (k + 1) % A) * (1 + static_cast<double>(D.size()) / (4.0 * A));
      d.normalize();
      D.push_back(d);
      D.push_back(-d);
    }
  }

  // The others' sets in x_{-i} coordinates.
  FeasibleSet others;
  std::vector<Halfspace> box_rows;
  std::size_t pos = 0;
  for (std::size_t j = 0; j < g.n_players(); ++j) {
    if (j == i) continue;
    const PlayerSet& ps = ic->players[j];
    std::vector<std::size_t> map;
    for (std::size_t k = 0; k < g.dims()[j]; ++k) map.push_back(pos + k);
    for (const auto& h : ps.box.halfspaces()) {
      Vec nrm = Vec::Zero(A);
      for (std::size_t k = 0; k < map.size(); ++k) nrm(static_cast<Index>(map[k])) = h.normal(static_cast<Index>(k));
      box_rows.push_back({nrm, h.offset});
    }
    if (!ps.g.is_zero()) others.convex.push_back({ps.g.embed(a, map), 0.0});
    pos += g.dims()[j];
  }
  const Polytope boxes = Polytope::from_halfspaces(a, box_rows);
  others.A = boxes.A();
  others.b = boxes.b();

  std::vector<Halfspace> hs = box_rows;
  if (!others.convex.empty()) {
    for (const auto& d : D) {
      NlpProblem p = domain_problem(a, others);
      p.linear = -d;
      const NlpSolution s = nlp_solve(p);
      if (s.status != SolveStatus::Optimal) fail(ErrorKind::Infeasible, "support function evaluation failed");
      hs.push_back({d, -s.dual_value + kkt_slop(p, s, 2.0 * A)});
    }
  }
  return complete(Polytope::from_halfspaces(a, hs));
}

UpperImageApprox initialize_independent(const Game& g, std::size_t i, double eps1, int outer_dirs) {
  const auto* ic = std::get_if<IndependentConvex>(&g.constraint());
  if (!ic) fail(ErrorKind::Invalid, "initialize_independent needs independent player sets");
  if (!(eps1 > 0)) fail(ErrorKind::Invalid, "eps1 must be positive");
  UpperImageApprox ua;
  ua.player = i;
  ua.slice = g.slice(i);
  ua.eps1 = eps1;
  const auto a = static_cast<Index>(ua.slice.a);
  const auto m = static_cast<Index>(ua.slice.m);
  const auto n = static_cast<Index>(g.dim());
  const auto own = g.own(i);
  const auto oth = g.others(i);

  const Polytope pout = outer_approx_others(g, i, outer_dirs);
  const PlayerSet& mine = ic->players[i];
  std::vector<Halfspace> rows;
  for (const auto& h : mine.box.halfspaces()) {
    Vec nrm = Vec::Zero(n);
    for (std::size_t k = 0; k < own.size(); ++k) nrm(static_cast<Index>(own[k])) = h.normal(static_cast<Index>(k));
    rows.push_back({nrm, h.offset});
  }
  for (const auto& h : pout.halfspaces()) {
    Vec nrm = Vec::Zero(n);
    for (std::size_t k = 0; k < oth.size(); ++k) nrm(static_cast<Index>(oth[k])) = h.normal(static_cast<Index>(k));
    rows.push_back({nrm, h.offset});
  }
  const Polytope dom = Polytope::from_halfspaces(g.dim(), rows);
  ua.domain.A = dom.A();
  ua.domain.b = dom.b();
  if (!mine.g.is_zero()) ua.domain.convex.push_back({mine.g.embed(g.dim(), own), 0.0});

  const Vec xi = interior_point(mine);
  for (const auto& p : pout.vertices()) {
    Vec x(n);
    for (std::size_t k = 0; k < own.size(); ++k) x(static_cast<Index>(own[k])) = xi(static_cast<Index>(k));
    for (std::size_t k = 0; k < oth.size(); ++k) x(static_cast<Index>(oth[k])) = p(static_cast<Index>(k));
    add_unique(ua.preimages, x);
  }
  const auto [lo, hi] = pout.bounding_box();
  for (Index k = 0; k < a; ++k) {
    ua.cuts.push_back({-Vec::Unit(m, k), -lo(k)});
    ua.cuts.push_back({-Vec::Unit(m, a + k), hi(k)});
  }
  add_cost_support(ua, g);
  add_common_cuts(ua, pout);
  rebuild_outer(ua);
  return ua;
}

bool refine_step(UpperImageApprox& ua, const Game& g) {
  struct Pending {
    double z;
    Scalarization s;
  };
  std::vector<Pending> cut;
  double max_z = -std::numeric_limits<double>::infinity();
  for (const auto& v : ua.outer.vertices()) {
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    auto hit = std::find_if(ua.solved.begin(), ua.solved.end(), [&](const UpperImageApprox::Solved& s) {
      return (s.v - v).cwiseAbs().maxCoeff() <= 1e-10 * scale;
    });
    if (hit != ua.solved.end()) {
      max_z = std::max(max_z, hit->z);
      continue;
    }
    Scalarization s = pascoletti_serafini(g, ua.player, v, ua.domain);
    ++ua.scalarizations;
    if (s.status != SolveStatus::Optimal) {
      std::ostringstream os;
      os << "scalarization for player " << ua.player + 1 << " at outer vertex (" << v.transpose()
         << ") failed: " << to_string(s.status);
      fail(ErrorKind::Infeasible, os.str());
    }
    add_unique(ua.preimages, s.x);
    ua.solved.push_back({v, s.z});
    max_z = std::max(max_z, s.z);
    if (s.z > ua.eps1) cut.push_back({s.z, std::move(s)});
  }
  ua.max_z = max_z;
  if (cut.empty() && max_z > ua.eps1)
    fail(ErrorKind::Infeasible, "a Benson cut failed to separate its outer vertex for player " +
                                    std::to_string(ua.player + 1));
  if (cut.empty()) {
    ua.converged = true;
    update_inner(ua, g);
    return true;
  }
  std::stable_sort(cut.begin(), cut.end(), [](const Pending& l, const Pending& r) { return l.z > r.z; });
  for (const auto& c : cut) ua.cuts.push_back({-c.s.w, -c.s.offset});
  rebuild_outer(ua);
  ++ua.iterations;
  return false;
}

void refine(UpperImageApprox& ua, const Game& g, int max_iterations) {
  for (int it = 0; it <= max_iterations; ++it)
    if (refine_step(ua, g)) return;
  update_inner(ua, g);
  std::ostringstream os;
  os << "Benson iteration budget exhausted for player " << ua.player + 1 << " (achieved eps1 " << ua.max_z << ")";
  fail(ErrorKind::IterationBudget, os.str());
}

void update_inner(UpperImageApprox& ua, const Game& g) {
  ua.images.clear();
  for (const auto& x : ua.preimages) ua.images.push_back(image_point(g, ua.player, x));
  ua.inner = unit_orthant_generators(ua.images, ua.slice.m);
}

double vertical_distance(const Polytope& inner, const Vec& v) {
  const Index m = v.size();
  double t = 0.0;
  for (const auto& h : inner.halfspaces()) {
    const double am = h.normal(m - 1);
    const double s = h.slack(v);
    if (s >= -kGeoTol) continue;
    if (am < -1e-12) t = std::max(t, s / am);
    else return std::numeric_limits<double>::infinity();
  }
  return t;
}

}  // namespace nashapprox
