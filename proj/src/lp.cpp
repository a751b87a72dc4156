#include "nashapprox/solver.hpp"

#include <cmath>
#include <limits>

namespace nashapprox {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIterations: return "max-iterations";
  }
  return "unknown";
}

namespace {

using Index = Eigen::Index;

struct StandardResult {
  SolveStatus status = SolveStatus::Infeasible;
  Vec z;
  Vec y;
};

// min cost·z  s.t.  M z = r,  z >= 0.  Returns primal z and row multipliers y (M^T y <= cost).
class Simplex {
 public:
  Simplex(const Mat& M, const Vec& r, const Vec& cost) : p_(M.rows()), n_(M.cols()), cost_(cost) {
    M_ = M;
    r_ = r;
    sign_ = Vec::Ones(p_);
    for (Index i = 0; i < p_; ++i)
      if (r_(i) < 0) {
        M_.row(i) *= -1.0;
        r_(i) = -r_(i);
        sign_(i) = -1.0;
      }
    T_ = Mat::Zero(p_, n_ + p_ + 1);
    T_.leftCols(n_) = M_;
    T_.block(0, n_, p_, p_).setIdentity();
    T_.col(n_ + p_) = r_;
    basis_.resize(static_cast<std::size_t>(p_));
    for (Index i = 0; i < p_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
    scale_ = std::max(1.0, r_.size() ? r_.cwiseAbs().maxCoeff() : 0.0);
  }

  StandardResult run() {
    StandardResult out;
    Vec phase1 = Vec::Zero(n_ + p_);
    phase1.tail(p_).setOnes();
    if (iterate(phase1, n_ + p_) == SolveStatus::MaxIterations) {
      out.status = SolveStatus::MaxIterations;
      return out;
    }
    reinvert();
    double infeas = 0.0;
    for (Index i = 0; i < p_; ++i)
      if (basis_[static_cast<std::size_t>(i)] >= n_) infeas += T_(i, n_ + p_);
    if (infeas > 1e-9 * scale_) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    drive_out_artificials();
    Vec phase2 = Vec::Zero(n_ + p_);
    phase2.head(n_) = cost_;
    SolveStatus s = iterate(phase2, n_);
    if (s != SolveStatus::Optimal) {
      out.status = s;
      return out;
    }
    out.status = SolveStatus::Optimal;
    extract(out);
    return out;
  }

 private:
  SolveStatus iterate(const Vec& obj, Index allowed) {
    const Index w = n_ + p_;
    Vec d = obj;
    for (Index i = 0; i < p_; ++i) d -= obj(basis_[static_cast<std::size_t>(i)]) * T_.row(i).head(w).transpose();
    const double ctol = 1e-10 * std::max(1.0, obj.cwiseAbs().maxCoeff());
    int degenerate_streak = 0;
    const long max_iter = 50 * (n_ + p_) + 1000;
    for (long it = 0; it < max_iter; ++it) {
      const bool bland = degenerate_streak > 20;
      Index q = -1;
      double best = -ctol;
      for (Index j = 0; j < allowed; ++j) {
        if (d(j) < best) {
          q = j;
          if (bland) break;
          best = d(j);
        }
      }
      if (q < 0) return SolveStatus::Optimal;
      // Harris ratio test: bound the step with a small feasibility relaxation, then take the largest pivot.
      Index row = -1;
      double bound = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < p_; ++i) {
        const double a = T_(i, q);
        if (a > kPivotTol) bound = std::min(bound, (std::max(0.0, T_(i, w)) + kHarrisTol) / a);
      }
      double ratio = 0.0, pivot_size = 0.0;
      for (Index i = 0; i < p_; ++i) {
        const double a = T_(i, q);
        if (a <= kPivotTol) continue;
        const double rt = std::max(0.0, T_(i, w)) / a;
        if (rt <= bound && a > pivot_size) {
          pivot_size = a;
          ratio = rt;
          row = i;
        }
      }
      if (row < 0) return SolveStatus::Unbounded;
      degenerate_streak = ratio <= 1e-12 ? degenerate_streak + 1 : 0;
      pivot(row, q);
      if (++since_reinvert_ >= 40) {
        reinvert();
        d = obj;
        for (Index i = 0; i < p_; ++i) d -= obj(basis_[static_cast<std::size_t>(i)]) * T_.row(i).head(w).transpose();
      } else {
        d -= d(q) * T_.row(row).head(w).transpose();
      }
      for (Index i = 0; i < p_; ++i) d(basis_[static_cast<std::size_t>(i)]) = 0.0;
    }
    return SolveStatus::MaxIterations;
  }

  // Recomputes the tableau from the original data for the current basis, discarding accumulated rounding.
  void reinvert() {
    since_reinvert_ = 0;
    const Index w = n_ + p_;
    Mat B(p_, p_);
    for (Index i = 0; i < p_; ++i) {
      const Index b = basis_[static_cast<std::size_t>(i)];
      B.col(i) = b < n_ ? Vec(M_.col(b)) : Vec(Vec::Unit(p_, b - n_));
    }
    Eigen::PartialPivLU<Mat> lu(B);
    Mat full(p_, w + 1);
    full.leftCols(n_) = M_;
    full.block(0, n_, p_, p_).setIdentity();
    full.col(w) = r_;
    Mat T = lu.solve(full);
    if (!T.allFinite()) return;
    for (Index i = 0; i < p_; ++i) {
      if (T(i, w) < 0.0 && T(i, w) > -1e-9 * scale_) T(i, w) = 0.0;
      T(i, basis_[static_cast<std::size_t>(i)]) = 1.0;
    }
    T_ = std::move(T);
  }

  void pivot(Index row, Index q) {
    T_.row(row) /= T_(row, q);
    for (Index i = 0; i < p_; ++i) {
      if (i == row) continue;
      const double f = T_(i, q);
      if (f != 0.0) T_.row(i) -= f * T_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = q;
  }

  void drive_out_artificials() {
    for (Index i = 0; i < p_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_) continue;
      Index q = -1;
      double best = 1e-9;
      for (Index j = 0; j < n_; ++j) {
        bool basic = false;
        for (auto b : basis_) basic = basic || b == j;
        if (!basic && std::abs(T_(i, j)) > best) {
          best = std::abs(T_(i, j));
          q = j;
        }
      }
      if (q >= 0) pivot(i, q);
    }
  }

  void extract(StandardResult& out) {
    const Index w = n_ + p_;
    out.z = Vec::Zero(n_);
    Mat B = Mat::Zero(p_, p_);
    Vec cb = Vec::Zero(p_);
    for (Index i = 0; i < p_; ++i) {
      const Index b = basis_[static_cast<std::size_t>(i)];
      if (b < n_) {
        out.z(b) = T_(i, w);
        B.col(i) = M_.col(b);
        cb(i) = cost_(b);
      } else {
        B(b - n_, i) = 1.0;
      }
    }
    Vec y = Vec::Zero(p_);
    if (p_ > 0) {
      Eigen::PartialPivLU<Mat> lu(B);
      const Vec zb = lu.solve(r_);
      y = lu.transpose().solve(cb);
      const bool sane = zb.allFinite() && y.allFinite() && (B * zb - r_).cwiseAbs().maxCoeff() <= 1e-9 * scale_;
      if (sane) {
        for (Index i = 0; i < p_; ++i) {
          const Index b = basis_[static_cast<std::size_t>(i)];
          if (b < n_) out.z(b) = std::max(0.0, zb(i));
        }
      } else {
        // Fall back to reduced costs from the tableau: y_i = -(reduced cost of slack i) is not tracked, so
        // recompute from a least-squares solve on the basic columns.
        y = B.transpose().colPivHouseholderQr().solve(cb);
      }
    }
    out.y = sign_.cwiseProduct(y);
  }

  Index p_, n_;
  Mat M_, T_;
  Vec r_, sign_, cost_;
  std::vector<Index> basis_;
  double scale_ = 1.0;
  int since_reinvert_ = 0;
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kHarrisTol = 1e-11;
};

StandardResult solve_standard(const Mat& M, const Vec& r, const Vec& cost) {
  Simplex s(M, r, cost);
  return s.run();
}

}  // namespace

NlpSolution lp_solve(const Vec& c, const Mat& A, const Vec& b, const Mat& E, const Vec& d) {
  const Index n = c.size();
  const Index m1 = A.size() ? A.rows() : 0;
  const Index m2 = E.size() ? E.rows() : 0;
  if ((m1 && A.cols() != n) || b.size() != m1 || (m2 && E.cols() != n) || d.size() != m2)
    fail(ErrorKind::Dimension, "lp_solve: inconsistent dimensions");

  NlpSolution sol;
  sol.ineq_multipliers = Vec::Zero(m1);
  sol.eq_multipliers = Vec::Zero(m2);
  if (n == 0) {
    const bool ok = (m1 == 0 || b.minCoeff() >= -kGeoTol) && (m2 == 0 || d.cwiseAbs().maxCoeff() <= kGeoTol);
    sol.status = ok ? SolveStatus::Optimal : SolveStatus::Infeasible;
    sol.x = Vec();
    return sol;
  }

  // The dual in standard form: z = (u, l+, l-) >= 0, A^T u + E^T (l+ - l-) = -c, min b·u + d·(l+ - l-).
  const Index cols = m1 + 2 * m2;
  Mat M(n, cols);
  Vec cost(cols);
  if (m1) {
    M.leftCols(m1) = A.transpose();
    cost.head(m1) = b;
  }
  if (m2) {
    M.middleCols(m1, m2) = E.transpose();
    M.rightCols(m2) = -E.transpose();
    cost.segment(m1, m2) = d;
    cost.tail(m2) = -d;
  }
  StandardResult r = solve_standard(M, -c, cost);
  if (r.status == SolveStatus::MaxIterations) {
    sol.status = SolveStatus::MaxIterations;
    return sol;
  }
  if (r.status == SolveStatus::Unbounded) {
    sol.status = SolveStatus::Infeasible;
    return sol;
  }
  if (r.status == SolveStatus::Infeasible) {
    StandardResult f = solve_standard(M, Vec::Zero(n), cost);
    sol.status = f.status == SolveStatus::Optimal ? SolveStatus::Unbounded : SolveStatus::Infeasible;
    if (f.status == SolveStatus::Optimal) sol.x = f.y;
    return sol;
  }
  sol.status = SolveStatus::Optimal;
  sol.x = r.y;
  if (m1) sol.ineq_multipliers = r.z.head(m1);
  if (m2) sol.eq_multipliers = r.z.segment(m1, m2) - r.z.tail(m2);
  sol.value = c.dot(sol.x);
  sol.dual_value = -(cost.dot(r.z));
  Vec stat = c;
  if (m1) stat += A.transpose() * sol.ineq_multipliers;
  if (m2) stat += E.transpose() * sol.eq_multipliers;
  sol.kkt_residual = stat.size() ? stat.cwiseAbs().maxCoeff() : 0.0;
  return sol;
}

}  // namespace nashapprox
