#pragma once

#include <cvf/metrics.hpp>

#include <optional>

namespace cvf {

// Tensors entering the conformal characterizations:
//   S_ij = V_{i|j} + V_{j|i},   M_i = V^j b_{i|j} + b^j V_{j|i}
// so that V^c(alpha^2) = S_ij y^i y^j and V^c(beta) = M_i y^i.
struct LieData {
  Matrix S;
  Vector M;
};

LieData lie_data(const MetricField& a, const OneFormField& b, const VectorFieldOnM& v,
                 const Vector& x, const DiffConfig& cfg);

// Scalar function on tangent vectors with optional exact gradients.
struct PhaseFunction {
  std::function<double(const Vector& x, const Vector& y)> eval;
  std::function<Vector(const Vector& x, const Vector& y)> grad_x;
  std::function<Vector(const Vector& x, const Vector& y)> grad_y;
};

// V^c(f)(x,y) = V^i df/dx^i + y^i (dV^j/dx^i) df/dy^j
double complete_lift_apply(const VectorFieldOnM& v, const PhaseFunction& f,
                           const TangentSample& sample, const DiffConfig& cfg);

// Tensor-level conformal characterizations, per model:
//   Generic / KropinaUnitB : S = 4c a,              M = 2c b
//   ExpType                : S = 2t a + e(2c-t) bb, M = t b
//   MKropinaType           : S = 2t a - 2k(2c-t)/m bb, M = (t + (2c-t)/m) b
// (t = tau, e = eps, bb = b (x) b). KropinaUnitB additionally requires the
// one-form to have unit alpha-norm at x.
struct FitFamily {
  enum class Model { Generic, KropinaUnitB, ExpType, MKropinaType };
  Model model = Model::Generic;
  double m = 0, k = 0;
  int eps = +1;

  static FitFamily generic() { return {}; }
  static FitFamily kropina_unit_b() { return {Model::KropinaUnitB}; }
  static FitFamily exp_type(int eps);
  static FitFamily m_kropina_type(double m, double k);

  bool two_parameter() const { return model == Model::ExpType || model == Model::MKropinaType; }
  std::string name() const;
};

struct ConformalFit {
  double c_hat = 0;
  std::optional<double> tau_hat;
  double residual_S = 0;  // ||S - model||_F / ||a||_F
  double residual_M = 0;  // |M - model|_2 / max(1, |b|_2)
  bool conformal = false;
  // The least-squares system lost rank (e.g. b = 0 leaves c undetermined);
  // the minimum-norm solution is reported.
  bool reduced_rank = false;
};

ConformalFit fit_conformal(const FitFamily& fam, const MetricField& a, const OneFormField& b,
                           const VectorFieldOnM& v, const Vector& x, const DiffConfig& cfg,
                           double tol);

struct RayFit {
  double c_hat = 0;
  double defect = 0;  // ||lift - 4 c F^2||_2 / ||4 F^2||_2 over the rays
  int rays = 0;
};

// Model-free check of V^c(F^2) = 4c F^2 over a bundle of rays at x.
// Needs at least dim+1 rays, all admissible for the metric's phi family.
RayFit direct_defect(const AlphaBetaMetric& fm, const VectorFieldOnM& v, const Vector& x,
                     const std::vector<Vector>& rays, const DiffConfig& cfg);

// Fitted conformal factors collected over base points.
struct FactorField {
  std::vector<Vector> points;
  std::vector<double> values;

  void add(const Vector& x, double c);
  int size() const { return static_cast<int>(values.size()); }
  double mean() const;
  double spread() const;          // max - min
  double max_pair_slope() const;  // max |dc| / |dx| over point pairs
};

enum class HomothetyVerdict { Homothetic, NonHomothetic, Inconclusive };

struct HomothetyReport {
  HomothetyVerdict verdict = HomothetyVerdict::Inconclusive;
  bool killing = false;  // homothetic with factor 0
  double mean = 0, spread = 0, slope = 0;
  int n = 0;
};

// Inconclusive below 10 samples. Homothetic iff spread <= tol * max(1, |mean|).
HomothetyReport homothety_test(const FactorField& f, double tol);

struct FactorGapReport {
  bool applicable = false;  // all hypothesis residuals <= tol
  double hyp_S = 0;         // max ||S - sigma a|| / ||a||
  double hyp_M = 0;         // max |M - tau b| / max(1, |b|)
  double hyp_beta = 0;      // max ||r - rho a|| / ||a||
  double gap_mean = 0;      // mean of tau - sigma
  double gap_spread = 0;
  bool conclusion_holds = false;
  std::vector<double> sigma, tau, rho;
};

// For fields with S = sigma(x) a, M = tau(x) b and a conformal one-form
// (r = rho a), the gap tau - sigma must be constant. Hypothesis scalars are
// fitted pointwise; the conclusion is only meaningful when applicable.
FactorGapReport factor_gap_test(const MetricField& a, const OneFormField& b,
                                const VectorFieldOnM& v, const std::vector<Vector>& points,
                                const DiffConfig& cfg, double tol);

// Residual of V^c(b^2) = eps (tau - 2c) b^4, with (c, tau) from the exp-family
// fit at x. PreconditionError if that fit does not pass at tol.
double lift_b2_residual(const MetricField& a, const OneFormField& b, const VectorFieldOnM& v,
                        const Vector& x, int eps, const DiffConfig& cfg, double tol);

struct DeformedLiftResult {
  // Lift of the deformed pair against the predicted multiples:
  //   V^c(A~) = [(2c+t)u + e(t-2c) b^4 u w'/w] A~,  A~ = deformed alpha^2
  //   V^c(B~) = [w t + e(t-2c) b^4 w'] beta,        B~ = deformed beta
  double res_alpha2 = 0;
  double res_beta = 0;
  // For the special triple only: residuals against 2t A~ and 2(t-c) B~.
  std::optional<double> res_alpha2_special;
  std::optional<double> res_beta_special;
};

// Preconditions: the exp-family fit passes at x (tol) and the triple solves
// the compatibility ODE at t = b^2(x) to 1e-8.
DeformedLiftResult deformed_lift_check(const MetricField& a, const OneFormField& b,
                                       const VectorFieldOnM& v, const DeformationTriple& d,
                                       const Vector& x, const std::vector<Vector>& rays,
                                       const DiffConfig& cfg, double tol);

}  // namespace cvf
