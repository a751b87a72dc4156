#pragma once

#include "nashapprox/geometry.hpp"
#include "nashapprox/solver.hpp"

#include <cmath>
#include <limits>
#include <vector>

// Brute-force LPs over conv(V) + R^m_+ in generator form, independent of the face enumeration.
namespace face_oracles {

using nashapprox::Mat;
using nashapprox::Vec;

inline nashapprox::Polytope upper(std::vector<Vec> V) {
  const auto m = V.front().size();
  std::vector<Vec> R;
  for (Eigen::Index k = 0; k < m; ++k) R.push_back(Vec::Unit(m, k));
  return nashapprox::complete(nashapprox::Polytope::from_vertices(std::move(V), std::move(R)));
}

// y = V lambda + mu, lambda in the simplex, mu >= 0. Returns max sum(b - y) over y <= b, NaN if the LP fails.
inline double improvement(const std::vector<Vec>& V, const Vec& b) {
  const Eigen::Index m = b.size(), nv = static_cast<Eigen::Index>(V.size()), n = nv + m;
  Mat Vm(m, nv);
  for (Eigen::Index j = 0; j < nv; ++j) Vm.col(j) = V[static_cast<std::size_t>(j)];
  // y = Vm l + mu <= b, l >= 0, mu >= 0, sum l = 1; maximize sum(b - y) = minimize sum(y).
  Mat A(m + n, n);
  Vec rhs(m + n);
  A << Vm, Mat::Identity(m, m), -Mat::Identity(n, n);
  rhs << b, Vec::Zero(n);
  Mat E = Mat::Zero(1, n);
  E.leftCols(nv).setOnes();
  Vec c(n);
  c << Vm.colwise().sum().transpose(), Vec::Ones(m);
  const auto s = nashapprox::lp_solve(c, A, rhs, E, Vec::Ones(1));
  if (s.status != nashapprox::SolveStatus::Optimal) return std::numeric_limits<double>::quiet_NaN();
  return b.sum() - s.value;
}

// Largest t with q - t d in conv(V) + R^m_+, NaN if the LP fails.
inline double exit_time(const std::vector<Vec>& V, const Vec& q, const Vec& d) {
  const Eigen::Index m = q.size(), nv = static_cast<Eigen::Index>(V.size()), n = nv + m + 1;
  // Variables (l, mu, t): V l + mu + t d = q.
  Mat E = Mat::Zero(m + 1, n);
  for (Eigen::Index j = 0; j < nv; ++j) E.block(0, j, m, 1) = V[static_cast<std::size_t>(j)];
  E.block(0, nv, m, m) = Mat::Identity(m, m);
  E.block(0, n - 1, m, 1) = d;
  E.block(m, 0, 1, nv).setOnes();
  Vec f(m + 1);
  f << q, 1.0;
  Mat A = -Mat::Identity(n, n);
  Vec c = Vec::Zero(n);
  c(n - 1) = -1;
  const auto s = nashapprox::lp_solve(c, A, Vec::Zero(n), E, f);
  if (s.status != nashapprox::SolveStatus::Optimal) return std::numeric_limits<double>::quiet_NaN();
  return s.x(n - 1);
}

}  // namespace face_oracles
