#pragma once

#include <cvf/diffgeo.hpp>
#include <cvf/types.hpp>

#include <optional>
#include <utility>

namespace cvf {

// Generator function phi(s) of an (alpha,beta)-metric F = alpha*phi(beta/alpha).
// The concrete families carry their singular-domain rule for beta along a ray:
//   m-Kropina, non-integer m : beta > 0
//   m-Kropina, integer m     : beta != 0
//   exp family               : beta != 0
// Randers and General carry no rule; F > 0 is checked at evaluation.
class PhiFamily {
 public:
  enum class Kind { Randers, MKropina, MKropinaType, ExpType, General };

  static PhiFamily randers();
  static PhiFamily m_kropina(double m);               // phi(s) = s^m, m not in {0,1}
  static PhiFamily kropina() { return m_kropina(-1.0); }
  static PhiFamily m_kropina_type(double m, double k);  // phi(s) = (1+k s^2)^((1-m)/2) s^m
  static PhiFamily exp_type(int eps);                 // phi(s) = s exp(eps/s^2), eps = +-1
  static PhiFamily general(std::function<double(double)> phi,
                           std::function<double(double)> dphi);

  Kind kind() const { return kind_; }
  double m() const { return m_; }
  double k() const { return k_; }
  int eps() const { return eps_; }
  bool has_integer_m() const;

  double value(double s) const;
  double deriv(double s) const;

  // Strict admissibility of a ray with the given beta value.
  bool beta_admissible(double beta) const;

  std::string name() const;

 private:
  PhiFamily() = default;
  Kind kind_ = Kind::Randers;
  double m_ = 0, k_ = 0;
  int eps_ = +1;
  std::function<double(double)> phi_, dphi_;
};

struct AlphaBetaMetric {
  MetricField a;
  OneFormField b;
  PhiFamily phi;

  int dim() const { return a.dim(); }
};

// Norm alpha(x,y); throws NumericError if a(x) is not positive definite.
double eval_alpha(const MetricField& a, const Vector& x, const Vector& y);

// F(x,y). Closed forms are used for the singular families so negative or
// large |beta/alpha| never routes through pow of a negative base.
// Throws DomainViolation (singular rule) or NumericError (F <= 0, non-finite).
double eval_F(const AlphaBetaMetric& fm, const Vector& x, const Vector& y);

// Rescales (a, b) for an m-Kropina metric so the one-form has unit alpha-norm:
// a -> |b|^{2m} a, b -> |b|^{m-1} b with |b| the pointwise alpha-norm of b.
// F is unchanged. The returned fields carry no analytic derivatives.
std::pair<MetricField, OneFormField> kropina_normalize(const MetricField& a,
                                                       const OneFormField& b, double m);

// Deformation data (u, v, w) as functions of t = b^2, with derivatives.
struct DeformationTriple {
  std::function<double(double)> u, v, w;
  std::function<double(double)> du, dv, dw;
  int eps = +1;

  // u = 1, v = 1 - 1/t, w = exp(-eps/t); solves the compatibility ODE.
  static DeformationTriple special(int eps);
  // u = w = 1, v = 0; deliberately not a solution (control case).
  static DeformationTriple identity(int eps);
};

// Residuals of the compatibility ODE at t:
//   res_u = u' - (u w'/w - eps u / t^2)
//   res_v = v' - (v w'/w - (eps v - u) / t^2)
std::pair<double, double> deformation_ode_residual(const DeformationTriple& d, double t);

struct DeformedPoint {
  Matrix a;   // u a_ij + v b_i b_j
  Vector b;   // w b_i
  double t;   // b^2 of the undeformed pair
};

// Pointwise deformation; checks the deformed metric stays positive definite.
DeformedPoint deform_pair(const MetricField& a, const OneFormField& b,
                          const DeformationTriple& d, const Vector& x);

// The deformed pair as first-class fields; b^2 is recomputed at every
// evaluation point. No analytic derivatives are attached.
std::pair<MetricField, OneFormField> deform_fields(const MetricField& a, const OneFormField& b,
                                                   const DeformationTriple& d);

}  // namespace cvf
