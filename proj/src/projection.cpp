#include "nashapprox/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nashapprox {

using Index = Eigen::Index;

ProjectionInstance make_instance(const Game& g, const UpperImageApprox& ua, const EfficientFace& face,
                                 double eps2) {
  if (!(eps2 > 0)) fail(ErrorKind::Invalid, "eps2 must be positive");
  ProjectionInstance pi;
  pi.game = &g;
  pi.player = ua.player;
  pi.domain = ua.domain;
  pi.eps2 = eps2;
  for (const auto& y : face.polytope.vertices()) {
    std::size_t best = 0;
    double err = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ua.images.size(); ++j) {
      const double e = (ua.images[j] - y).cwiseAbs().maxCoeff();
      if (e < err) {
        err = e;
        best = j;
      }
    }
    if (err > 1e-8) fail(ErrorKind::Invalid, "face vertex is not the image of a preimage point");
    pi.face_images.push_back(ua.images[best]);
    pi.face_preimages.push_back(ua.preimages[best]);
  }
  return pi;
}

namespace {

struct Lifted {
  NlpProblem p;
  Index n = 0, k = 0;
};

// Variables (x, mu).
Lifted lifted_problem(const ProjectionInstance& pi) {
  const Game& g = *pi.game;
  Lifted L;
  L.n = static_cast<Index>(g.dim());
  L.k = static_cast<Index>(pi.face_images.size());
  const Index n = L.n, k = L.k, N = n + k;
  const auto oth = g.others(pi.player);
  const Index a = static_cast<Index>(oth.size());
  NlpProblem& p = L.p;
  p = NlpProblem(static_cast<std::size_t>(N));
  const Index md = pi.domain.A.rows();
  p.ineq = Mat::Zero(md + k, N);
  p.ineq.topLeftCorner(md, n) = pi.domain.A;
  p.ineq.bottomRightCorner(k, k) = -Mat::Identity(k, k);
  p.ineq_rhs = Vec::Zero(md + k);
  p.ineq_rhs.head(md) = pi.domain.b;
  p.eq = Mat::Zero(a + 1, N);
  p.eq_rhs = Vec::Zero(a + 1);
  for (Index r = 0; r < a; ++r) {
    p.eq(r, static_cast<Index>(oth[static_cast<std::size_t>(r)])) = 1.0;
    for (Index j = 0; j < k; ++j) p.eq(r, n + j) = -pi.face_images[static_cast<std::size_t>(j)](r);
  }
  p.eq.row(a).tail(k).setOnes();
  p.eq_rhs(a) = 1.0;
  std::vector<std::size_t> ident(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) ident[static_cast<std::size_t>(r)] = static_cast<std::size_t>(r);
  Vec ym = Vec::Zero(N);
  for (Index j = 0; j < k; ++j) ym(n + j) = pi.face_images[static_cast<std::size_t>(j)](2 * a);
  p.convex.push_back({g.cost(pi.player).embed(static_cast<std::size_t>(N), ident) - Polynomial::linear(ym), 0.0});
  for (const auto& c : pi.domain.convex) p.convex.push_back({c.p.embed(static_cast<std::size_t>(N), ident), c.rhs});
  return L;
}

double worst_convex(const NlpProblem& p, const Vec& z) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& c : p.convex) v = std::max(v, c.p.eval(z) - c.rhs);
  return v;
}

}  // namespace

SupportStep support_step(const ProjectionInstance& pi, const Vec& d) {
  Lifted L = lifted_problem(pi);
  const Index n = L.n, k = L.k;
  L.p.linear = Vec::Zero(n + k);
  L.p.linear.head(n) = d;
  std::vector<Vec> seeds;
  for (Index j = 0; j < k; ++j) {
    Vec z = Vec::Zero(n + k);
    z.head(n) = pi.face_preimages[static_cast<std::size_t>(j)];
    z(n + j) = 1.0;
    seeds.push_back(z);
  }
  const NlpSolution s = cutting_plane_solve(L.p, seeds, 1e-9, 2000);
  if (s.status == SolveStatus::Infeasible) fail(ErrorKind::Infeasible, "projection support problem is infeasible");
  if (s.status != SolveStatus::Optimal && s.x.size() == 0)
    fail(ErrorKind::IterationBudget, "projection support problem did not converge");

  SupportStep out;
  out.iterations = s.iterations;
  out.cut = {-d, -s.dual_value};
  // Convex combination of the preimages with the LP weights is feasible; pull the LP point back toward it.
  Vec mu = s.x.tail(k).cwiseMax(0.0);
  mu /= mu.sum();
  Vec zc = Vec::Zero(n + k);
  for (Index j = 0; j < k; ++j) zc.head(n) += mu(j) * pi.face_preimages[static_cast<std::size_t>(j)];
  zc.tail(k) = mu;
  Vec zl = s.x;
  zl.tail(k) = mu;
  double lo = 0.0, hi = 1.0;
  if (worst_convex(L.p, zl) > 0.0) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (worst_convex(L.p, zc + mid * (zl - zc)) <= 0.0 ? lo : hi) = mid;
    }
  } else {
    lo = 1.0;
  }
  const Vec z = zc + lo * (zl - zc);
  out.x = z.head(n);
  out.mu = mu;
  return out;
}

bool in_shadow(const ProjectionInstance& pi, const Vec& x, double tol) {
  const Game& g = *pi.game;
  if (!pi.domain.contains(x, tol)) return false;
  const auto oth = g.others(pi.player);
  const Index a = static_cast<Index>(oth.size());
  const Index k = static_cast<Index>(pi.face_images.size());
  // max Y_m.mu  s.t. Y_{1:a} mu = x_{-i}, mu in the simplex.
  Mat E(a + 1, k);
  Vec e(a + 1);
  Vec c(k);
  for (Index j = 0; j < k; ++j) {
    const Vec& y = pi.face_images[static_cast<std::size_t>(j)];
    E.col(j).head(a) = y.head(a);
    E(a, j) = 1.0;
    c(j) = -y(2 * a);
  }
  e.head(a) = g.minus(pi.player, x);
  e(a) = 1.0;
  // Equalities are relaxed by tol so that rounding in x does not decide membership.
  Mat A(2 * (a + 1) + k, k);
  Vec b(2 * (a + 1) + k);
  A << E, -E, -Mat::Identity(k, k);
  b << e.array() + tol, -e.array() + tol, Vec::Zero(k);
  const NlpSolution s = lp_solve(c, A, b);
  if (s.status != SolveStatus::Optimal) return false;
  return g.cost(pi.player).eval(x) <= -s.value + tol;
}

ProjectionResult approximate_projection(const ProjectionInstance& pi, int max_iterations) {
  const Game& g = *pi.game;
  const Index n = static_cast<Index>(g.dim());
  ProjectionResult res;

  // Outer seed: the domain, with x_{-i} restricted to the hull of the face's first a image components.
  const Polytope dom = Polytope::from_halfspaces(g.dim(), [&] {
    std::vector<Halfspace> hs;
    for (Index r = 0; r < pi.domain.A.rows(); ++r) hs.push_back({pi.domain.A.row(r).transpose(), pi.domain.b(r)});
    return hs;
  }());
  res.outer = dom.halfspaces();
  {
    const auto oth = g.others(pi.player);
    const Index a = static_cast<Index>(oth.size());
    std::vector<Vec> proj;
    for (const auto& y : pi.face_images) proj.push_back(y.head(a));
    const Polytope ph = to_hrep(Polytope::from_vertices(proj));
    for (const auto& h : ph.halfspaces()) {
      Vec nrm = Vec::Zero(n);
      for (Index r = 0; r < a; ++r) nrm(static_cast<Index>(oth[static_cast<std::size_t>(r)])) = h.normal(r);
      res.outer.push_back({nrm, h.offset});
    }
  }

  auto add_step = [&](const Vec& dir) {
    const SupportStep s = support_step(pi, dir);
    ++res.support_steps;
    res.inner_points.push_back(s.x);
    res.outer.push_back(s.cut);
  };
  for (Index r = 0; r < n; ++r) {
    add_step(Vec::Unit(n, r));
    add_step(-Vec::Unit(n, r));
  }

  struct Cached {
    Vec u;
    double bound;
  };
  std::vector<Cached> cache;
  for (;; ++res.iterations) {
    const Polytope outer = to_vrep(Polytope::from_halfspaces(g.dim(), res.outer));
    if (outer.is_empty()) fail(ErrorKind::Infeasible, "projection outer approximation became empty");
    const Polytope inner = Polytope::from_vertices(res.inner_points);
    std::vector<Cached> next;
    std::vector<Vec> dirs;
    double worst = 0.0;
    for (const auto& u : outer.vertices()) {
      double bound = std::numeric_limits<double>::infinity();
      for (const auto& c : cache)
        if ((c.u - u).cwiseAbs().maxCoeff() <= 1e-12) bound = c.bound;
      if (bound > pi.eps2) {
        const L1Distance dist = l1_distance(u, inner);
        bound = dist.distance;
        if (bound > pi.eps2) {
          Vec d = dist.direction;
          if (d.norm() > 0) dirs.push_back(d / d.norm());
        }
      }
      worst = std::max(worst, bound);
      next.push_back({u, bound});
    }
    cache = std::move(next);
    res.certified_eps = worst;
    if (dirs.empty()) {
      for (const auto& u : outer.vertices()) res.outer_vertices.push_back(u);
      break;
    }
    if (res.iterations >= max_iterations) {
      std::ostringstream os;
      os << "projection iteration budget exhausted for player " << pi.player + 1 << " (achieved eps2 " << worst << ")";
      fail(ErrorKind::IterationBudget, os.str());
    }
    // Skip near-duplicate directions within one round.
    std::vector<Vec> used;
    for (const auto& d : dirs) {
      bool dup = false;
      for (const auto& e : used) dup = dup || (d - e).cwiseAbs().maxCoeff() < 1e-9;
      if (dup) continue;
      used.push_back(d);
      add_step(d);
    }
  }
  res.inner_hull = complete(Polytope::from_vertices(res.inner_points));
  return res;
}

}  // namespace nashapprox
