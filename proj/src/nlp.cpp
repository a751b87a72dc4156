#include "nashapprox/solver.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace nashapprox {

using Index = Eigen::Index;

NlpProblem::NlpProblem(std::size_t n)
    : dim(n),
      objective(n),
      linear(Vec::Zero(static_cast<Index>(n))),
      eq(0, static_cast<Index>(n)),
      eq_rhs(0),
      ineq(0, static_cast<Index>(n)),
      ineq_rhs(0) {}

double NlpProblem::eval_objective(const Vec& x) const {
  double v = objective.is_zero() ? 0.0 : objective.eval(x);
  if (linear.size()) v += linear.dot(x);
  return v;
}

Vec NlpProblem::objective_gradient(const Vec& x) const {
  Vec g = objective.is_zero() ? Vec::Zero(x.size()) : objective.gradient(x);
  if (linear.size()) g += linear;
  return g;
}

double NlpProblem::max_violation(const Vec& x) const {
  double v = 0.0;
  if (ineq.rows()) v = std::max(v, (ineq * x - ineq_rhs).maxCoeff());
  if (eq.rows()) v = std::max(v, (eq * x - eq_rhs).cwiseAbs().maxCoeff());
  for (const auto& c : convex) v = std::max(v, c.p.eval(x) - c.rhs);
  return v;
}

RelativeInterior relative_interior(const Mat& A, const Vec& b, const Mat& E, const Vec& d) {
  const Index n = A.size() ? A.cols() : E.cols();
  const Index m = A.size() ? A.rows() : 0;
  const Index me = E.size() ? E.rows() : 0;
  RelativeInterior out;
  out.implicit.assign(static_cast<std::size_t>(m), false);

  Mat An(m, n);
  Vec bn(m);
  std::vector<int> state(static_cast<std::size_t>(m), 0);  // 0 undecided, 1 strict somewhere, 2 implicit
  for (Index k = 0; k < m; ++k) {
    const double nr = A.row(k).norm();
    if (nr <= 1e-14) {
      if (b(k) < -kGeoTol) return out;
      state[static_cast<std::size_t>(k)] = b(k) > kGeoTol ? 1 : 2;
      An.row(k).setZero();
      bn(k) = 0.0;
    } else {
      An.row(k) = A.row(k) / nr;
      bn(k) = b(k) / nr;
    }
  }

  std::vector<Vec> points;
  Vec last;
  for (;;) {
    std::vector<Index> cand;
    for (Index k = 0; k < m; ++k)
      if (state[static_cast<std::size_t>(k)] == 0) cand.push_back(k);
    const Index c = static_cast<Index>(cand.size());
    const Index nv = n + c;
    Mat Al(m + 2 * c, nv);
    Vec bl(m + 2 * c);
    Al.setZero();
    Index r = 0;
    for (Index k = 0; k < m; ++k, ++r) {
      Al.row(r).head(n) = An.row(k);
      bl(r) = bn(k);
    }
    for (Index j = 0; j < c; ++j) {
      Al(cand[static_cast<std::size_t>(j)], n + j) = 1.0;
      Al(r, n + j) = 1.0;
      bl(r++) = 1.0;
      Al(r, n + j) = -1.0;
      bl(r++) = 0.0;
    }
    Mat El(me, nv);
    El.setZero();
    if (me) El.leftCols(n) = E;
    Vec cost = Vec::Zero(nv);
    cost.tail(c).setConstant(-1.0);
    NlpSolution s = lp_solve(cost, Al, bl, El, me ? d : Vec());
    if (s.status != SolveStatus::Optimal) return out;
    last = s.x.head(n);
    bool progress = false;
    for (Index j = 0; j < c; ++j)
      if (s.x(n + j) > 1e-9) {
        state[static_cast<std::size_t>(cand[static_cast<std::size_t>(j)])] = 1;
        progress = true;
      }
    if (progress || points.empty()) points.push_back(last);
    if (!progress) {
      for (auto k : cand) state[static_cast<std::size_t>(k)] = 2;
      break;
    }
  }
  Vec avg = Vec::Zero(n);
  for (const auto& p : points) avg += p;
  avg /= static_cast<double>(points.size());
  out.feasible = true;
  out.point = avg;
  for (Index k = 0; k < m; ++k) out.implicit[static_cast<std::size_t>(k)] = state[static_cast<std::size_t>(k)] == 2;
  return out;
}

namespace {

// Smooth convex function of the reduced variables: value, gradient, Hessian.
struct SmoothFn {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
};

struct BarrierProblem {
  Index k = 0;
  SmoothFn objective;
  Mat G;  // linear constraints G t <= h
  Vec h;
  std::vector<SmoothFn> convex;  // c_j(t) <= 0
};

struct BarrierResult {
  SolveStatus status = SolveStatus::Optimal;
  Vec t;
  double tau = 1.0;
  int iterations = 0;
  bool stopped_early = false;
};

bool strictly_feasible(const BarrierProblem& bp, const Vec& t) {
  if (bp.G.rows() && (bp.h - bp.G * t).minCoeff() <= 0.0) return false;
  for (const auto& c : bp.convex)
    if (!(c.value(t) < 0.0)) return false;
  return true;
}

double barrier_value(const BarrierProblem& bp, const Vec& t, double tau) {
  double v = tau * bp.objective.value(t);
  if (bp.G.rows()) {
    const Vec s = bp.h - bp.G * t;
    for (Index i = 0; i < s.size(); ++i) v -= std::log(s(i));
  }
  for (const auto& c : bp.convex) v -= std::log(-c.value(t));
  return v;
}

BarrierResult barrier_minimize(const BarrierProblem& bp, Vec t, const NlpOptions& opts,
                               const std::function<bool(const Vec&)>& early_stop = {}) {
  BarrierResult out;
  const Index k = bp.k;
  const double m = static_cast<double>(bp.G.rows() + static_cast<Index>(bp.convex.size()));
  double tau = 1.0;
  if (m == 0) tau = 1e12;
  for (int stage = 0; stage < opts.max_stages; ++stage) {
    int newton = 0;
    for (; newton < opts.newton_per_stage; ++newton) {
      Vec g = tau * bp.objective.grad(t);
      Mat H = tau * bp.objective.hess(t);
      if (bp.G.rows()) {
        const Vec s = bp.h - bp.G * t;
        const Vec inv = s.cwiseInverse();
        g += bp.G.transpose() * inv;
        H += bp.G.transpose() * inv.cwiseAbs2().asDiagonal() * bp.G;
      }
      for (const auto& c : bp.convex) {
        const double cv = -c.value(t);
        const Vec cg = c.grad(t);
        g += cg / cv;
        H += c.hess(t) / cv + cg * cg.transpose() / (cv * cv);
      }
      Vec dx;
      Eigen::LDLT<Mat> ldlt(H);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) dx = -ldlt.solve(g);
      if (!dx.allFinite() || dx.size() != k) {
        const double reg = 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
        dx = -(H + reg * Mat::Identity(k, k)).ldlt().solve(g);
      }
      const double dec = -g.dot(dx);
      if (!(dec > 1e-10) || !dx.allFinite()) break;
      double alpha = 1.0;
      for (int ls = 0; ls < 80 && !strictly_feasible(bp, t + alpha * dx); ++ls) alpha *= 0.5;
      const double f0 = barrier_value(bp, t, tau);
      const double slack = 1e-13 * std::max(1.0, std::abs(f0));
      // Near the minimizer the value comparison is dominated by rounding; the full step is safe there.
      const bool quadratic = dec < 1e-6 && strictly_feasible(bp, t + alpha * dx);
      while (!quadratic && alpha > 1e-12) {
        const Vec tn = t + alpha * dx;
        if (strictly_feasible(bp, tn) && barrier_value(bp, tn, tau) <= f0 - 0.25 * alpha * dec + slack) break;
        alpha *= 0.5;
      }
      ++out.iterations;
      if (alpha <= 1e-12) break;
      const bool tiny = alpha * dx.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, t.cwiseAbs().maxCoeff());
      t += alpha * dx;
      if (!t.allFinite() || t.cwiseAbs().maxCoeff() > 1e12) {
        out.status = SolveStatus::Unbounded;
        out.t = t;
        out.tau = tau;
        return out;
      }
      if (tiny) break;
      if (early_stop && early_stop(t)) {
        out.t = t;
        out.tau = tau;
        out.stopped_early = true;
        return out;
      }
    }
    if (newton >= opts.newton_per_stage) {
      out.status = SolveStatus::MaxIterations;
      out.t = t;
      out.tau = tau;
      return out;
    }
    const double phi = bp.objective.value(t);
    if (m == 0 || m / tau <= opts.gap_tol * std::max(1.0, std::abs(phi))) break;
    tau /= opts.barrier_factor;
  }
  out.t = t;
  out.tau = tau;
  return out;
}

// Nullspace basis of Q; `shift` receives the truncated least-squares correction for Q x = q at x.
Mat nullspace(const Mat& Q, Index n, Index* rank, const Vec& residual, Vec* shift) {
  *shift = Vec::Zero(n);
  if (Q.rows() == 0) {
    *rank = 0;
    return Mat::Identity(n, n);
  }
  Eigen::JacobiSVD<Mat> svd(Q, Eigen::ComputeFullV | Eigen::ComputeFullU);
  const Vec& s = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  *rank = r;
  const Vec coef = (svd.matrixU().leftCols(r).transpose() * residual).cwiseQuotient(s.head(r));
  *shift = svd.matrixV().leftCols(r) * coef;
  return svd.matrixV().rightCols(n - r);
}

}  // namespace

NlpSolution nlp_solve(const NlpProblem& p, const NlpOptions& opts) {
  const Index n = static_cast<Index>(p.dim);
  const Index m = p.ineq.rows();
  const Index me = p.eq.rows();
  NlpSolution sol;
  sol.ineq_multipliers = Vec::Zero(m);
  sol.eq_multipliers = Vec::Zero(me);
  sol.convex_multipliers = Vec::Zero(static_cast<Index>(p.convex.size()));

  RelativeInterior ri = relative_interior(m ? p.ineq : Mat(0, n), p.ineq_rhs, me ? p.eq : Mat(0, n), p.eq_rhs);
  if (!ri.feasible) {
    sol.status = SolveStatus::Infeasible;
    return sol;
  }
  std::vector<Index> strict_rows, implicit_rows;
  for (Index k = 0; k < m; ++k) (ri.implicit[static_cast<std::size_t>(k)] ? implicit_rows : strict_rows).push_back(k);

  const Index mi = static_cast<Index>(implicit_rows.size());
  Mat Q(me + mi, n);
  Vec q(me + mi);
  if (me) {
    Q.topRows(me) = p.eq;
    q.head(me) = p.eq_rhs;
  }
  for (Index j = 0; j < mi; ++j) {
    Q.row(me + j) = p.ineq.row(implicit_rows[static_cast<std::size_t>(j)]);
    q(me + j) = p.ineq_rhs(implicit_rows[static_cast<std::size_t>(j)]);
  }
  Vec x0 = ri.point;
  Index rank = 0;
  Vec shift;
  const Mat Z = nullspace(Q, n, &rank, Q.rows() ? Vec(Q * x0 - q) : Vec(), &shift);
  x0 -= shift;
  const Index k = Z.cols();

  const Index ms = static_cast<Index>(strict_rows.size());
  Mat G(ms, k);
  Vec h(ms);
  for (Index j = 0; j < ms; ++j) {
    const Index r = strict_rows[static_cast<std::size_t>(j)];
    G.row(j) = p.ineq.row(r) * Z;
    h(j) = p.ineq_rhs(r) - p.ineq.row(r).dot(x0);
  }
  auto X = [&](const Vec& t) -> Vec { return x0 + Z * t; };

  BarrierProblem bp;
  bp.k = k;
  bp.G = G;
  bp.h = h;
  bp.objective = {[&](const Vec& t) { return p.eval_objective(X(t)); },
                  [&](const Vec& t) -> Vec { return Z.transpose() * p.objective_gradient(X(t)); },
                  [&](const Vec& t) -> Mat {
                    if (p.objective.is_zero()) return Mat::Zero(k, k);
                    return Z.transpose() * p.objective.hessian(X(t)) * Z;
                  }};
  for (const auto& c : p.convex) {
    const ConvexConstraint* cc = &c;
    bp.convex.push_back({[=, &X](const Vec& t) { return cc->p.eval(X(t)) - cc->rhs; },
                         [=, &X, &Z](const Vec& t) -> Vec { return Z.transpose() * cc->p.gradient(X(t)); },
                         [=, &X, &Z](const Vec& t) -> Mat { return Z.transpose() * cc->p.hessian(X(t)) * Z; }});
  }

  Vec t = Vec::Zero(k);
  double tau = 1.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::Optimal;
  if (k > 0) {
    if (ms && h.minCoeff() <= 0.0) {
      // The averaged relative interior point can sit numerically on a strict row; nudge it inward.
      BarrierProblem lin;
      lin.k = k;
      lin.G = G;
      lin.h = h.array() + 1e-9;
      lin.objective = {[](const Vec&) { return 0.0; }, [k](const Vec&) -> Vec { return Vec::Zero(k); },
                       [k](const Vec&) -> Mat { return Mat::Zero(k, k); }};
      NlpOptions o = opts;
      o.max_stages = 1;
      t = barrier_minimize(lin, t, o).t;
    }
    double viol = -std::numeric_limits<double>::infinity();
    for (const auto& c : bp.convex) viol = std::max(viol, c.value(t));
    if (!bp.convex.empty() && viol >= -1e-12) {
      // Phase I on (t, s): min s  s.t.  G t <= h,  c_j(t) <= s.
      BarrierProblem ph;
      ph.k = k + 1;
      // The lower bound on s keeps phase I bounded.
      ph.G = Mat::Zero(ms + 1, k + 1);
      ph.G.topLeftCorner(ms, k) = G;
      ph.G(ms, k) = -1.0;
      ph.h.resize(ms + 1);
      ph.h.head(ms) = h;
      ph.objective = {[k](const Vec& ts) { return ts(k); },
                      [k](const Vec&) -> Vec {
                        Vec g = Vec::Zero(k + 1);
                        g(k) = 1.0;
                        return g;
                      },
                      [k](const Vec&) -> Mat { return Mat::Zero(k + 1, k + 1); }};
      double rscale = 1.0;
      for (const auto& c : p.convex) rscale = std::max(rscale, std::abs(c.rhs));
      for (const auto& c : bp.convex)
        ph.convex.push_back({[c, k](const Vec& ts) { return c.value(ts.head(k)) - ts(k); },
                             [c, k](const Vec& ts) -> Vec {
                               Vec g(k + 1);
                               g.head(k) = c.grad(ts.head(k));
                               g(k) = -1.0;
                               return g;
                             },
                             [c, k](const Vec& ts) -> Mat {
                               Mat H = Mat::Zero(k + 1, k + 1);
                               H.topLeftCorner(k, k) = c.hess(ts.head(k));
                               return H;
                             }});
      Vec ts(k + 1);
      ts.head(k) = t;
      ts(k) = viol + 1.0;
      const double margin = 1e-4 * rscale;
      ph.h(ms) = 1.0 * rscale;
      BarrierResult r1 = barrier_minimize(ph, ts, opts, [&](const Vec& v) { return v(k) < -margin; });
      iterations += r1.iterations;
      const double s = r1.t(k);
      if (s > 1e-9 * rscale) {
        sol.status = SolveStatus::Infeasible;
        sol.x = X(r1.t.head(k));
        sol.iterations = iterations;
        return sol;
      }
      if (s >= 0.0) {
        // No Slater point: fall back to outer linearization when the objective is linear.
        if (p.objective.degree() <= 1) {
          NlpSolution cp = cutting_plane_solve(p, {X(r1.t.head(k))});
          cp.iterations += iterations;
          return cp;
        }
        sol.status = SolveStatus::Infeasible;
        sol.x = X(r1.t.head(k));
        return sol;
      }
      t = r1.t.head(k);
    }
    BarrierResult r = barrier_minimize(bp, t, opts);
    iterations += r.iterations;
    t = r.t;
    tau = r.tau;
    status = r.status;
  } else {
    for (const auto& c : bp.convex)
      if (c.value(t) > kKktTol) {
        sol.status = SolveStatus::Infeasible;
        sol.x = x0;
        return sol;
      }
  }

  const Vec x = X(t);
  sol.status = status;
  sol.x = x;
  sol.iterations = iterations;
  sol.value = p.eval_objective(x);

  // Multipliers: an L1 stationarity fit over all constraints, with inactive constraints priced by their
  // slack so that complementarity is enforced. Barrier estimates only enter the reported gap.
  double mcount = static_cast<double>(ms + static_cast<Index>(p.convex.size()));
  Vec resid = p.objective_gradient(x);
  {
    const Index mc = static_cast<Index>(p.convex.size());
    const Index nm = me + m + mc;
    Mat Mcols(n, nm);
    Vec price = Vec::Zero(nm);
    if (me) Mcols.leftCols(me) = p.eq.transpose();
    for (Index r = 0; r < m; ++r) {
      Mcols.col(me + r) = p.ineq.row(r).transpose();
      price(me + r) = std::max(0.0, p.ineq_rhs(r) - p.ineq.row(r).dot(x)) / std::max(1e-300, p.ineq.row(r).norm());
    }
    for (Index j = 0; j < mc; ++j) {
      const auto& cc = p.convex[static_cast<std::size_t>(j)];
      Mcols.col(me + m + j) = cc.p.gradient(x);
      price(me + m + j) = std::max(0.0, cc.rhs - cc.p.eval(x));
    }
    if (nm > 0) {
      const Index nv = nm + n;
      Mat A = Mat::Zero(2 * n + m + mc, nv);
      Vec b = Vec::Zero(2 * n + m + mc);
      A.block(0, 0, n, nm) = Mcols;
      A.block(0, nm, n, n) = -Mat::Identity(n, n);
      b.head(n) = -resid;
      A.block(n, 0, n, nm) = -Mcols;
      A.block(n, nm, n, n) = -Mat::Identity(n, n);
      b.segment(n, n) = resid;
      for (Index j = 0; j < m + mc; ++j) A(2 * n + j, me + j) = -1.0;
      Vec c = Vec::Zero(nv);
      c.head(nm) = price;
      c.tail(n).setOnes();
      NlpSolution ls = lp_solve(c, A, b);
      if (ls.status == SolveStatus::Optimal) {
        if (me) sol.eq_multipliers = ls.x.head(me);
        for (Index r = 0; r < m; ++r) sol.ineq_multipliers(r) = std::max(0.0, ls.x(me + r));
        for (Index j = 0; j < mc; ++j) sol.convex_multipliers(j) = std::max(0.0, ls.x(me + m + j));
        resid += Mcols * ls.x.head(nm);
      }
    }
  }
  sol.kkt_residual = resid.size() ? resid.cwiseAbs().maxCoeff() : 0.0;
  sol.dual_value = sol.value - (k > 0 ? mcount / tau : 0.0);
  return sol;
}

NlpSolution cutting_plane_solve(const NlpProblem& p, const std::vector<Vec>& seeds, double tol, int max_iter) {
  const Index n = static_cast<Index>(p.dim);
  if (p.objective.degree() > 1) fail(ErrorKind::Invalid, "cutting_plane_solve requires a linear objective");
  Vec c = p.linear.size() ? p.linear : Vec::Zero(n);
  if (!p.objective.is_zero()) c += p.objective.gradient(Vec::Zero(n));

  std::vector<Vec> rows;
  std::vector<double> rhs;
  std::vector<Index> owner;
  auto add_cut = [&](std::size_t j, const Vec& at) {
    const auto& cc = p.convex[j];
    const Vec g = cc.p.gradient(at);
    if (g.cwiseAbs().maxCoeff() <= 1e-300) return;
    rows.push_back(g);
    rhs.push_back(cc.rhs - cc.p.eval(at) + g.dot(at));
    owner.push_back(static_cast<Index>(j));
  };
  for (const auto& s : seeds)
    for (std::size_t j = 0; j < p.convex.size(); ++j) add_cut(j, s);

  NlpSolution sol;
  sol.convex_multipliers = Vec::Zero(static_cast<Index>(p.convex.size()));
  const Index m = p.ineq.rows();
  for (int it = 0; it < max_iter; ++it) {
    const Index nc = static_cast<Index>(rows.size());
    Mat A(m + nc, n);
    Vec b(m + nc);
    if (m) {
      A.topRows(m) = p.ineq;
      b.head(m) = p.ineq_rhs;
    }
    for (Index j = 0; j < nc; ++j) {
      A.row(m + j) = rows[static_cast<std::size_t>(j)].transpose();
      b(m + j) = rhs[static_cast<std::size_t>(j)];
    }
    NlpSolution lp = lp_solve(c, A, b, p.eq.rows() ? p.eq : Mat(), p.eq_rhs);
    sol.iterations = it + 1;
    if (lp.status != SolveStatus::Optimal) {
      sol.status = lp.status;
      return sol;
    }
    sol.x = lp.x;
    sol.value = p.eval_objective(lp.x);
    sol.dual_value = lp.value + (p.objective.is_zero() ? 0.0 : p.objective.eval(Vec::Zero(n)));
    sol.ineq_multipliers = lp.ineq_multipliers.head(m);
    sol.eq_multipliers = lp.eq_multipliers;
    sol.convex_multipliers.setZero();
    for (Index j = 0; j < nc; ++j) sol.convex_multipliers(owner[static_cast<std::size_t>(j)]) += lp.ineq_multipliers(m + j);
    sol.kkt_residual = lp.kkt_residual;
    bool done = true;
    for (std::size_t j = 0; j < p.convex.size(); ++j) {
      const double v = p.convex[j].p.eval(lp.x) - p.convex[j].rhs;
      if (v > tol * std::max(1.0, std::abs(p.convex[j].rhs))) {
        done = false;
        add_cut(j, lp.x);
      }
    }
    if (done) {
      sol.status = SolveStatus::Optimal;
      return sol;
    }
  }
  sol.status = SolveStatus::MaxIterations;
  return sol;
}

}  // namespace nashapprox
