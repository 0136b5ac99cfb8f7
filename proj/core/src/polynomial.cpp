#include <cvf/polynomial.hpp>

#include <cmath>
#include <map>
#include <memory>

namespace cvf {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  if (c != 0.0) p.add_term(c, std::vector<int>(nvars, 0));
  return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
  Polynomial p(nvars);
  std::vector<int> e(nvars, 0);
  e[i] = 1;
  p.add_term(1.0, std::move(e));
  return p;
}

void Polynomial::add_term(double coeff, std::vector<int> exp) {
  if (static_cast<int>(exp.size()) != nvars_)
    throw ConfigError("polynomial term exponent count does not match variable count");
  for (int e : exp)
    if (e < 0) throw ConfigError("polynomial exponents must be non-negative");
  terms_.emplace_back(coeff, std::move(exp));
}

double Polynomial::eval(const Vector& x) const {
  double v = 0;
  for (const auto& [c, e] : terms_) {
    double t = c;
    for (int i = 0; i < nvars_; ++i) t *= ipow(x[i], e[i]);
    v += t;
  }
  return v;
}

Vector Polynomial::grad(const Vector& x) const {
  Vector g = Vector::Zero(nvars_);
  for (const auto& [c, e] : terms_)
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      double t = c * e[i] * ipow(x[i], e[i] - 1);
      for (int j = 0; j < nvars_; ++j)
        if (j != i) t *= ipow(x[j], e[j]);
      g[i] += t;
    }
  return g;
}

Matrix Polynomial::hess(const Vector& x) const {
  Matrix h = Matrix::Zero(nvars_, nvars_);
  for (const auto& [c, e] : terms_)
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      // diagonal
      if (e[i] >= 2) {
        double t = c * e[i] * (e[i] - 1) * ipow(x[i], e[i] - 2);
        for (int j = 0; j < nvars_; ++j)
          if (j != i) t *= ipow(x[j], e[j]);
        h(i, i) += t;
      }
      for (int j = i + 1; j < nvars_; ++j) {
        if (e[j] == 0) continue;
        double t = c * e[i] * e[j] * ipow(x[i], e[i] - 1) * ipow(x[j], e[j] - 1);
        for (int k = 0; k < nvars_; ++k)
          if (k != i && k != j) t *= ipow(x[k], e[k]);
        h(i, j) += t;
        h(j, i) += t;
      }
    }
  return h;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial p = *this;
  for (const auto& [c, e] : o.terms_) p.terms_.emplace_back(c, e);
  return p;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  std::map<std::vector<int>, double> acc;
  for (const auto& [c1, e1] : terms_)
    for (const auto& [c2, e2] : o.terms_) {
      std::vector<int> e(nvars_);
      for (int i = 0; i < nvars_; ++i) e[i] = e1[i] + e2[i];
      acc[e] += c1 * c2;
    }
  Polynomial p(nvars_);
  for (auto& [e, c] : acc)
    if (c != 0.0) p.terms_.emplace_back(c, e);
  return p;
}

Polynomial Polynomial::scaled(double k) const {
  Polynomial p = *this;
  for (auto& t : p.terms_) t.first *= k;
  return p;
}

double Rational::eval(const Vector& x) const {
  double v = num.eval(x);
  if (!has_den()) return v;
  double q = den.eval(x);
  if (q == 0.0) throw DomainViolation("rational denominator vanishes at the evaluation point");
  return v / q;
}

Vector Rational::grad(const Vector& x) const {
  if (!has_den()) return num.grad(x);
  double q = den.eval(x);
  if (q == 0.0) throw DomainViolation("rational denominator vanishes at the evaluation point");
  double r = num.eval(x) / q;
  return (num.grad(x) - r * den.grad(x)) / q;
}

Matrix Rational::hess(const Vector& x) const {
  if (!has_den()) return num.hess(x);
  double q = den.eval(x);
  if (q == 0.0) throw DomainViolation("rational denominator vanishes at the evaluation point");
  double r = num.eval(x) / q;
  Vector dq = den.grad(x);
  Vector dr = (num.grad(x) - r * dq) / q;
  Matrix h = num.hess(x) - dr * dq.transpose() - dq * dr.transpose() - r * den.hess(x);
  return h / q;
}

SmoothMap map_from_rationals(std::vector<Rational> comps, int nvars) {
  SmoothMap f;
  f.dim_in = nvars;
  f.dim_out = static_cast<int>(comps.size());
  auto data = std::make_shared<std::vector<Rational>>(std::move(comps));
  f.eval = [data, nvars](const Vector& x) {
    Vector v(data->size());
    for (size_t i = 0; i < data->size(); ++i) v[i] = (*data)[i].eval(x);
    return v;
  };
  f.jacobian = [data, nvars](const Vector& x) {
    Matrix j(data->size(), nvars);
    for (size_t i = 0; i < data->size(); ++i) j.row(i) = (*data)[i].grad(x).transpose();
    return j;
  };
  f.hessian = [data](const Vector& x) {
    std::vector<Matrix> h;
    h.reserve(data->size());
    for (const auto& r : *data) h.push_back(r.hess(x));
    return h;
  };
  return f;
}

}  // namespace cvf
