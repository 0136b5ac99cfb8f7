#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, unknown names, inconsistent dimensions.
struct ConfigError : Error {
  using Error::Error;
};

// Caller violated a documented precondition; message names the precondition.
struct PreconditionError : Error {
  using Error::Error;
};

// Point or ray outside the admissible domain (box margin, singular locus).
struct DomainViolation : Error {
  using Error::Error;
};

// Non-finite values, failed factorizations, lost positive definiteness.
struct NumericError : Error {
  using Error::Error;
};

struct DomainBox {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }

  static DomainBox cube(int n, double half_width) {
    DomainBox b;
    b.lower = Vector::Constant(n, -half_width);
    b.upper = Vector::Constant(n, half_width);
    return b;
  }

  bool contains(const Vector& x, double margin = 0.0) const {
    if (x.size() != lower.size()) return false;
    for (int i = 0; i < x.size(); ++i)
      if (x[i] < lower[i] + margin || x[i] > upper[i] - margin) return false;
    return true;
  }

  void require_interior(const Vector& x, double margin) const {
    if (!contains(x, margin))
      throw DomainViolation("point too close to the domain boundary (margin " +
                            std::to_string(margin) + ")");
  }

  Vector center() const { return 0.5 * (lower + upper); }

  DomainBox shrunk(double factor) const {
    DomainBox b;
    Vector c = center(), h = 0.5 * (upper - lower) * factor;
    b.lower = c - h;
    b.upper = c + h;
    return b;
  }
};

enum class Scheme {
  Central2,                // 2nd order finite differences, ignores analytic jets
  Central4,                // 4th order finite differences, ignores analytic jets
  AnalyticWhenAvailable,   // analytic jets if the map carries them, else Central4
};

struct DiffConfig {
  Scheme scheme = Scheme::AnalyticWhenAvailable;
  double h1 = 1e-5;      // base step, first derivatives
  double h2 = 1e-4;      // base step, second derivatives
  double jet_tol = 1e-6; // analytic-vs-FD agreement tolerance

  double first_step(double xi) const { return h1 * std::max(1.0, std::abs(xi)); }
  double second_step(double xi) const { return h2 * std::max(1.0, std::abs(xi)); }
};

// A map R^n -> R^m given by an evaluator plus optional exact derivatives.
// jacobian(x)(c,k) = d f_c / d x_k; hessian(x)[c](k,l) = d^2 f_c / d x_k d x_l.
struct SmoothMap {
  int dim_in = 0;
  int dim_out = 0;
  std::function<Vector(const Vector&)> eval;
  std::function<Matrix(const Vector&)> jacobian;
  std::function<std::vector<Matrix>(const Vector&)> hessian;

  bool has_jacobian() const { return static_cast<bool>(jacobian); }
  bool has_hessian() const { return static_cast<bool>(hessian); }
};

// Riemannian metric a_ij(x), components flattened row-major into a SmoothMap
// with dim_out = n*n. Values are symmetrized on read; positive definiteness
// is checked where an inverse is taken.
struct MetricField {
  SmoothMap components;

  int dim() const { return components.dim_in; }

  Matrix value(const Vector& x) const;
};

struct OneFormField {
  SmoothMap components;

  int dim() const { return components.dim_in; }

  Vector value(const Vector& x) const { return components.eval(x); }
};

struct VectorFieldOnM {
  SmoothMap components;

  int dim() const { return components.dim_in; }

  Vector value(const Vector& x) const { return components.eval(x); }
};

struct TangentSample {
  Vector x;
  Vector y;
};

inline void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) throw NumericError(std::string("non-finite evaluation: ") + what);
}

}  // namespace cvf
