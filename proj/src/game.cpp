#include "nashapprox/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nashapprox {

using Index = Eigen::Index;

bool FeasibleSet::contains(const Vec& x, double tol) const {
  if (A.rows() && (A * x - b).maxCoeff() > tol) return false;
  for (const auto& c : convex)
    if (c.p.eval(x) - c.rhs > tol) return false;
  return true;
}

Vec interior_point(const PlayerSet& s) {
  const Index n = static_cast<Index>(s.box.dim);
  const Polytope box = s.box.hrep ? s.box : to_hrep(s.box);
  const Mat A = box.A();
  const Vec b = box.b();
  RelativeInterior ri = relative_interior(A, b);
  if (!ri.feasible) fail(ErrorKind::Assumption, "player set box is empty");
  for (bool imp : ri.implicit)
    if (imp) fail(ErrorKind::Assumption, "player set box has empty interior");
  if (s.g.is_zero()) return ri.point;
  NlpProblem p(static_cast<std::size_t>(n + 1));
  p.linear = Vec::Zero(n + 1);
  p.linear(n) = 1.0;
  p.ineq = Mat::Zero(A.rows() + 1, n + 1);
  p.ineq.topLeftCorner(A.rows(), n) = A;
  p.ineq(A.rows(), n) = -1.0;
  p.ineq_rhs.resize(A.rows() + 1);
  p.ineq_rhs.head(A.rows()) = b;
  p.ineq_rhs(A.rows()) = 1.0;
  std::vector<std::size_t> map(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) map[static_cast<std::size_t>(k)] = static_cast<std::size_t>(k);
  p.convex.push_back({s.g.embed(static_cast<std::size_t>(n + 1), map) - Polynomial::variable(static_cast<std::size_t>(n + 1), static_cast<std::size_t>(n)), 0.0});
  NlpSolution sol = nlp_solve(p);
  if (sol.status == SolveStatus::Infeasible || sol.x.size() != n + 1 || sol.x(n) > -1e-9)
    fail(ErrorKind::Assumption, "player set has empty interior");
  return sol.x.head(n);
}

Game::Game(std::vector<std::size_t> dims, std::vector<Polynomial> costs, ConstraintSet constraint, double lipschitz)
    : dims_(std::move(dims)), costs_(std::move(costs)), constraint_(constraint), input_(std::move(constraint)),
      lipschitz_(lipschitz) {
  if (dims_.size() < 2) fail(ErrorKind::Assumption, "a game needs at least two players");
  for (auto d : dims_) {
    if (d == 0) fail(ErrorKind::Invalid, "player dimension must be positive");
    offsets_.push_back(total_);
    total_ += d;
  }
  if (costs_.size() != dims_.size()) fail(ErrorKind::Invalid, "one cost function per player is required");
  for (const auto& c : costs_)
    if (c.dim() != total_) fail(ErrorKind::Dimension, "cost dimension must equal the joint strategy dimension");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_)) fail(ErrorKind::Invalid, "Lipschitz constant must be positive");

  const Index n = static_cast<Index>(total_);
  if (auto* sp = std::get_if<SharedPolytope>(&constraint_)) {
    if (sp->set.dim != total_) fail(ErrorKind::Dimension, "strategy polytope has wrong dimension");
    sp->set = complete(sp->set);
    if (sp->set.is_empty()) fail(ErrorKind::Assumption, "strategy polytope is empty");
    if (!sp->set.bounded()) fail(ErrorKind::Assumption, "strategy polytope is unbounded");
    hull_ = sp->set;
    feasible_.A = hull_.A();
    feasible_.b = hull_.b();
  } else {
    auto& ic = std::get<IndependentConvex>(constraint_);
    if (ic.players.size() != dims_.size()) fail(ErrorKind::Invalid, "one player set per player is required");
    std::vector<Halfspace> hs;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      auto& ps = ic.players[i];
      if (ps.box.dim != dims_[i] || (!ps.g.is_zero() && ps.g.dim() != dims_[i]))
        fail(ErrorKind::Dimension, "player set has wrong dimension");
      if (ps.g.is_zero()) ps.g = Polynomial(dims_[i]);
      ps.box = complete(ps.box);
      if (ps.box.is_empty() || !ps.box.bounded()) fail(ErrorKind::Assumption, "player box must be bounded and nonempty");
      interior_point(ps);
      std::vector<std::size_t> map = own(i);
      for (const auto& h : ps.box.halfspaces()) {
        Vec nrm = Vec::Zero(n);
        for (std::size_t k = 0; k < map.size(); ++k) nrm(static_cast<Index>(map[k])) = h.normal(static_cast<Index>(k));
        hs.push_back({nrm, h.offset});
      }
      if (!ps.g.is_zero()) feasible_.convex.push_back({ps.g.embed(total_, map), 0.0});
    }
    hull_ = complete(Polytope::from_halfspaces(total_, hs));
    feasible_.A = hull_.A();
    feasible_.b = hull_.b();
  }
}

SliceIndex Game::slice(std::size_t i) const {
  if (i >= n_players()) fail(ErrorKind::Invalid, "player index out of range");
  SliceIndex s;
  s.player = i;
  s.a = total_ - dims_[i];
  s.m = 2 * s.a + 1;
  return s;
}

std::vector<std::size_t> Game::own(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < dims_.at(i); ++k) out.push_back(offsets_[i] + k);
  return out;
}

std::vector<std::size_t> Game::others(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_players(); ++j)
    if (j != i)
      for (std::size_t k = 0; k < dims_[j]; ++k) out.push_back(offsets_[j] + k);
  return out;
}

Vec Game::minus(std::size_t i, const Vec& x) const {
  const auto o = others(i);
  Vec v(static_cast<Index>(o.size()));
  for (std::size_t k = 0; k < o.size(); ++k) v(static_cast<Index>(k)) = x(static_cast<Index>(o[k]));
  return v;
}

Game Game::with_costs(std::vector<Polynomial> costs) const {
  Game g = *this;
  if (costs.size() != costs_.size()) fail(ErrorKind::Invalid, "one cost function per player is required");
  for (const auto& c : costs)
    if (c.dim() != total_) fail(ErrorKind::Dimension, "cost dimension must equal the joint strategy dimension");
  g.costs_ = std::move(costs);
  return g;
}

Vec objective_image(const Game& g, std::size_t i, const Vec& x) {
  if (static_cast<std::size_t>(x.size()) != g.dim()) fail(ErrorKind::Dimension, "strategy has wrong dimension");
  if (!g.feasible(x)) fail(ErrorKind::Infeasible, "objective_image: infeasible strategy");
  const SliceIndex s = g.slice(i);
  const Vec xm = g.minus(i, x);
  Vec y(static_cast<Index>(s.m));
  y.head(static_cast<Index>(s.a)) = xm;
  y.segment(static_cast<Index>(s.a), static_cast<Index>(s.a)) = -xm;
  y(static_cast<Index>(s.m - 1)) = g.cost(i).eval(x);
  return y;
}

std::vector<Vec> feasible_grid(const Game& g, int per_axis) {
  const auto [lo, hi] = g.hull().bounding_box();
  const Index n = lo.size();
  std::vector<Vec> out;
  for (const auto& v : g.hull().vertices())
    if (g.feasible(v)) out.push_back(v);
  if (per_axis < 2) return out;
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

double estimate_lipschitz(const Game& g, int grid_density) {
  double best = 0.0;
  for (int d = 2; d <= std::max(2, grid_density); ++d)
    for (const auto& x : feasible_grid(g, d))
      for (const auto& f : g.costs()) best = std::max(best, f.gradient(x).cwiseAbs().maxCoeff());
  return best;
}

std::vector<std::string> convexity_warnings(const Game& g, int grid_density) {
  std::vector<std::string> out;
  const auto pts = feasible_grid(g, grid_density);
  for (std::size_t i = 0; i < g.n_players(); ++i) {
    double worst = 0.0;
    Vec at;
    for (const auto& x : pts) {
      Eigen::SelfAdjointEigenSolver<Mat> es(g.cost(i).hessian(x));
      if (es.eigenvalues().minCoeff() < worst) {
        worst = es.eigenvalues().minCoeff();
        at = x;
      }
    }
    if (worst < -1e-10) {
      std::ostringstream os;
      os << "cost of player " << i + 1 << " is not convex: Hessian eigenvalue " << worst << " at (" << at.transpose()
         << ")";
      out.push_back(os.str());
    }
  }
  return out;
}

Convexification convexify(const Game& g, Game* out, int grid_density) {
  Convexification c;
  c.beta.assign(g.n_players(), 0.0);
  const auto pts = feasible_grid(g, grid_density);
  std::vector<Polynomial> costs = g.costs();
  for (std::size_t i = 0; i < g.n_players(); ++i) {
    const auto oth = g.others(i);
    Mat D = Mat::Zero(static_cast<Index>(g.dim()), static_cast<Index>(g.dim()));
    for (auto k : oth) D(static_cast<Index>(k), static_cast<Index>(k)) = 2.0;
    auto min_eig = [&](const Mat& H, double beta) {
      Eigen::SelfAdjointEigenSolver<Mat> es(H + beta * D);
      return es.eigenvalues().minCoeff();
    };
    double need = 0.0;
    bool possible = true;
    for (const auto& x : pts) {
      const Mat H = g.cost(i).hessian(x);
      if (min_eig(H, need) >= -1e-12) continue;
      double hi = std::max(1.0, 2 * need);
      while (min_eig(H, hi) < -1e-12 && hi < 1e8) hi *= 2;
      if (hi >= 1e8) {
        possible = false;
        break;
      }
      double lo = need;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (min_eig(H, mid) < -1e-12 ? lo : hi) = mid;
      }
      need = hi;
    }
    if (!possible || need <= 0.0) continue;
    const double beta = 1.1 * need;
    c.beta[i] = beta;
    c.changed = true;
    Polynomial add(g.dim());
    for (auto k : oth) add = add + Polynomial::variable(g.dim(), k) * Polynomial::variable(g.dim(), k) * beta;
    costs[i] = costs[i] + add;
  }
  if (out) *out = g.with_costs(costs);
  return c;
}

}  // namespace nashapprox
