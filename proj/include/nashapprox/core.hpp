#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace nashapprox {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Tightness and membership tolerance for polyhedral computations.
inline constexpr double kGeoTol = 1e-9;
// Optimality tolerance of the scalar solvers.
inline constexpr double kKktTol = 1e-8;
// Slack granted to sampled equilibrium checks on top of the theoretical epsilon.
inline constexpr double kReportTol = 1e-6;

enum class ErrorKind { Invalid, Parse, Assumption, IterationBudget, Infeasible, Dimension };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace nashapprox
