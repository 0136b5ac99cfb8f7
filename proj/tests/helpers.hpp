#pragma once

#include <cvf/polynomial.hpp>
#include <cvf/types.hpp>

#include <initializer_list>
#include <vector>

// Builders shared by the test suites. Everything routes through
// map_from_rationals so the fields carry exact jets unless stripped.
namespace cvftest {

using namespace cvf;

inline Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<int>(v.size()));
  int i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

inline Polynomial pconst(int n, double c) { return Polynomial::constant(n, c); }

inline Polynomial pvar(int n, int i) { return Polynomial::variable(n, i); }

inline Polynomial pmono(int n, double c, std::vector<int> e) {
  Polynomial p(n);
  p.add_term(c, std::move(e));
  return p;
}

inline MetricField metric_from(std::vector<Rational> entries, int n) {
  MetricField a;
  a.components = map_from_rationals(std::move(entries), n);
  return a;
}

inline MetricField flat_metric(int n) {
  std::vector<Rational> entries;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) entries.emplace_back(pconst(n, i == j ? 1.0 : 0.0));
  return metric_from(std::move(entries), n);
}

// diag(d_0, ..., d_{n-1}) with polynomial diagonal entries
inline MetricField diag_metric(std::vector<Polynomial> diag) {
  const int n = static_cast<int>(diag.size());
  std::vector<Rational> entries;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      entries.emplace_back(i == j ? Rational(diag[i]) : Rational(pconst(n, 0.0)));
  return metric_from(std::move(entries), n);
}

inline OneFormField oneform_from(std::vector<Rational> entries, int n) {
  OneFormField b;
  b.components = map_from_rationals(std::move(entries), n);
  return b;
}

inline OneFormField const_oneform(const Vector& b0) {
  const int n = static_cast<int>(b0.size());
  std::vector<Rational> entries;
  for (int i = 0; i < n; ++i) entries.emplace_back(pconst(n, b0[i]));
  return oneform_from(std::move(entries), n);
}

inline VectorFieldOnM field_from(std::vector<Rational> entries, int n) {
  VectorFieldOnM v;
  v.components = map_from_rationals(std::move(entries), n);
  return v;
}

// V = lambda x + Q x + a0
inline VectorFieldOnM linear_field(int n, double lambda, const Matrix& Q, const Vector& a0) {
  std::vector<Rational> entries;
  for (int i = 0; i < n; ++i) {
    Polynomial p(n);
    for (int j = 0; j < n; ++j) {
      const double c = (i == j ? lambda : 0.0) + Q(i, j);
      if (c != 0.0) {
        std::vector<int> e(n, 0);
        e[j] = 1;
        p.add_term(c, e);
      }
    }
    if (a0[i] != 0.0) p.add_term(a0[i], std::vector<int>(n, 0));
    entries.emplace_back(std::move(p));
  }
  return field_from(std::move(entries), n);
}

inline VectorFieldOnM dilation_field(int n, double lambda) {
  return linear_field(n, lambda, Matrix::Zero(n, n), Vector::Zero(n));
}

// V^i = 2 <x,k> x^i - |x|^2 k^i
inline VectorFieldOnM moebius_field(const Vector& k) {
  const int n = static_cast<int>(k.size());
  std::vector<Rational> entries;
  for (int i = 0; i < n; ++i) {
    Polynomial p(n);
    for (int j = 0; j < n; ++j) {
      if (k[j] == 0.0) continue;
      std::vector<int> e(n, 0);
      e[j] += 1;
      e[i] += 1;
      p.add_term(2.0 * k[j], e);
    }
    if (k[i] != 0.0)
      for (int j = 0; j < n; ++j) {
        std::vector<int> e(n, 0);
        e[j] = 2;
        p.add_term(-k[i], e);
      }
    entries.emplace_back(std::move(p));
  }
  return field_from(std::move(entries), n);
}

// Drops analytic derivatives so jets must come from finite differences.
inline SmoothMap strip_jets(const SmoothMap& f) {
  SmoothMap g;
  g.dim_in = f.dim_in;
  g.dim_out = f.dim_out;
  g.eval = f.eval;
  return g;
}

inline MetricField strip_jets(const MetricField& a) {
  MetricField b;
  b.components = strip_jets(a.components);
  return b;
}

inline OneFormField strip_jets(const OneFormField& w) {
  OneFormField b;
  b.components = strip_jets(w.components);
  return b;
}

inline VectorFieldOnM strip_jets(const VectorFieldOnM& v) {
  VectorFieldOnM b;
  b.components = strip_jets(v.components);
  return b;
}

}  // namespace cvftest
