#pragma once

#include "nashapprox/core.hpp"

#include <cstddef>
#include <vector>

namespace nashapprox {

struct Monomial {
  double coeff = 0.0;
  std::vector<int> exps;

  bool operator==(const Monomial&) const = default;
};

// Sparse multivariate polynomial. Terms are kept merged and sorted by exponent vector.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::size_t dim) : dim_(dim) {}
  Polynomial(std::size_t dim, std::vector<Monomial> terms);

  static Polynomial constant(std::size_t dim, double c);
  static Polynomial variable(std::size_t dim, std::size_t k);
  static Polynomial linear(const Vec& c, double c0 = 0.0);

  std::size_t dim() const { return dim_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  double eval(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  // Re-indexes variables into a space of dimension `dim`; variable k maps to `target[k]`.
  Polynomial embed(std::size_t dim, const std::vector<std::size_t>& target) const;
  // Substitutes variables by fixed values, keeping only the listed free variables (in order).
  Polynomial restrict_to(const std::vector<std::size_t>& free, const Vec& fixed) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial operator*(const Polynomial& o) const;
  bool operator==(const Polynomial& o) const = default;

 private:
  void check(const Vec& x) const;
  void normalize();

  std::size_t dim_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace nashapprox
