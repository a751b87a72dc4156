#include "nashapprox/polynomial.hpp"

#include <algorithm>
#include <map>

namespace nashapprox {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= x;
  return r;
}

}  // namespace

Polynomial::Polynomial(std::size_t dim, std::vector<Monomial> terms) : dim_(dim), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.exps.size() != dim_) fail(ErrorKind::Dimension, "monomial exponent vector has wrong length");
    for (int e : t.exps)
      if (e < 0) fail(ErrorKind::Invalid, "negative exponent");
  }
  normalize();
}

Polynomial Polynomial::constant(std::size_t dim, double c) {
  return Polynomial(dim, {Monomial{c, std::vector<int>(dim, 0)}});
}

Polynomial Polynomial::variable(std::size_t dim, std::size_t k) {
  std::vector<int> e(dim, 0);
  e.at(k) = 1;
  return Polynomial(dim, {Monomial{1.0, e}});
}

Polynomial Polynomial::linear(const Vec& c, double c0) {
  const auto n = static_cast<std::size_t>(c.size());
  std::vector<Monomial> terms;
  terms.push_back({c0, std::vector<int>(n, 0)});
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<int> e(n, 0);
    e[k] = 1;
    terms.push_back({c(static_cast<Eigen::Index>(k)), e});
  }
  return Polynomial(n, std::move(terms));
}

void Polynomial::normalize() {
  std::map<std::vector<int>, double> merged;
  for (const auto& t : terms_) merged[t.exps] += t.coeff;
  terms_.clear();
  for (auto& [e, c] : merged)
    if (c != 0.0) terms_.push_back({c, e});
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exps) s += e;
    d = std::max(d, s);
  }
  return d;
}

void Polynomial::check(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_) fail(ErrorKind::Dimension, "point dimension does not match polynomial");
}

double Polynomial::eval(const Vec& x) const {
  check(x);
  double s = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (std::size_t k = 0; k < dim_; ++k) v *= ipow(x(static_cast<Eigen::Index>(k)), t.exps[k]);
    s += v;
  }
  return s;
}

Vec Polynomial::gradient(const Vec& x) const {
  check(x);
  Vec g = Vec::Zero(static_cast<Eigen::Index>(dim_));
  for (const auto& t : terms_) {
    for (std::size_t j = 0; j < dim_; ++j) {
      if (t.exps[j] == 0) continue;
      double v = t.coeff * t.exps[j];
      for (std::size_t k = 0; k < dim_; ++k) v *= ipow(x(static_cast<Eigen::Index>(k)), k == j ? t.exps[k] - 1 : t.exps[k]);
      g(static_cast<Eigen::Index>(j)) += v;
    }
  }
  return g;
}

Mat Polynomial::hessian(const Vec& x) const {
  check(x);
  const auto n = static_cast<Eigen::Index>(dim_);
  Mat h = Mat::Zero(n, n);
  std::vector<int> e;
  for (const auto& t : terms_) {
    for (std::size_t i = 0; i < dim_; ++i) {
      if (t.exps[i] == 0) continue;
      for (std::size_t j = i; j < dim_; ++j) {
        e = t.exps;
        double c = t.coeff * e[i];
        --e[i];
        if (e[j] == 0) continue;
        c *= e[j];
        --e[j];
        for (std::size_t k = 0; k < dim_; ++k) c *= ipow(x(static_cast<Eigen::Index>(k)), e[k]);
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += c;
        if (i != j) h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) += c;
      }
    }
  }
  return h;
}

Polynomial Polynomial::embed(std::size_t dim, const std::vector<std::size_t>& target) const {
  if (target.size() != dim_) fail(ErrorKind::Dimension, "embedding map has wrong length");
  std::vector<Monomial> terms;
  for (const auto& t : terms_) {
    std::vector<int> e(dim, 0);
    for (std::size_t k = 0; k < dim_; ++k) e.at(target[k]) += t.exps[k];
    terms.push_back({t.coeff, e});
  }
  return Polynomial(dim, std::move(terms));
}

Polynomial Polynomial::restrict_to(const std::vector<std::size_t>& free, const Vec& fixed) const {
  check(fixed);
  std::vector<bool> is_free(dim_, false);
  for (auto k : free) is_free.at(k) = true;
  std::vector<Monomial> terms;
  for (const auto& t : terms_) {
    double c = t.coeff;
    std::vector<int> e(free.size(), 0);
    for (std::size_t k = 0; k < dim_; ++k)
      if (!is_free[k]) c *= ipow(fixed(static_cast<Eigen::Index>(k)), t.exps[k]);
    for (std::size_t j = 0; j < free.size(); ++j) e[j] = t.exps[free[j]];
    terms.push_back({c, e});
  }
  return Polynomial(free.size(), std::move(terms));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (o.dim_ != dim_) fail(ErrorKind::Dimension, "polynomial dimensions differ");
  auto terms = terms_;
  terms.insert(terms.end(), o.terms_.begin(), o.terms_.end());
  return Polynomial(dim_, std::move(terms));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(double s) const {
  auto terms = terms_;
  for (auto& t : terms) t.coeff *= s;
  return Polynomial(dim_, std::move(terms));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (o.dim_ != dim_) fail(ErrorKind::Dimension, "polynomial dimensions differ");
  std::vector<Monomial> terms;
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) {
      std::vector<int> e(dim_);
      for (std::size_t k = 0; k < dim_; ++k) e[k] = a.exps[k] + b.exps[k];
      terms.push_back({a.coeff * b.coeff, e});
    }
  return Polynomial(dim_, std::move(terms));
}

}  // namespace nashapprox
