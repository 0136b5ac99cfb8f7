#pragma once

#include <cvf/types.hpp>

namespace cvf {

// Dense multivariate polynomial as a term list. Small by construction (inline
// scenario fields, catalog data), so no attempt at sparse cleverness.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, double c);
  static Polynomial variable(int nvars, int i);

  int nvars() const { return nvars_; }
  bool empty() const { return terms_.empty(); }

  void add_term(double coeff, std::vector<int> exp);

  double eval(const Vector& x) const;
  Vector grad(const Vector& x) const;
  Matrix hess(const Vector& x) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(double k) const;

  const std::vector<std::pair<double, std::vector<int>>>& terms() const { return terms_; }

 private:
  int nvars_ = 0;
  std::vector<std::pair<double, std::vector<int>>> terms_;
};

// p/q with exact pointwise jets via the quotient rule. q defaults to 1.
struct Rational {
  Polynomial num;
  Polynomial den;

  Rational() = default;
  Rational(Polynomial p) : num(std::move(p)) {}
  Rational(Polynomial p, Polynomial q) : num(std::move(p)), den(std::move(q)) {}

  bool has_den() const { return !den.empty(); }
  double eval(const Vector& x) const;
  Vector grad(const Vector& x) const;
  Matrix hess(const Vector& x) const;
};

// Exact-jet SmoothMap whose components are rational functions.
SmoothMap map_from_rationals(std::vector<Rational> comps, int nvars);

}  // namespace cvf
