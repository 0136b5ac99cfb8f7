#pragma once

#include <cvf/types.hpp>

namespace cvf {

// Derivatives of a SmoothMap at a point.
//   value:  m
//   first:  m x n,  first(c,k) = d f_c / d x_k
//   second: m matrices n x n (present only for order 2), symmetric
struct Jet {
  Vector value;
  Matrix first;
  std::vector<Matrix> second;
};

// order in {0,1,2}. Analytic derivatives are used only under
// Scheme::AnalyticWhenAvailable; the central schemes always difference the
// evaluator so they can serve as an independent cross-check.
Jet jet(const SmoothMap& f, const Vector& x, int order, const DiffConfig& cfg);

// Max relative disagreement between the analytic derivatives carried by f and
// a Central4 finite-difference jet. Orders without analytic data contribute 0.
double jet_disagreement(const SmoothMap& f, const Vector& x, const DiffConfig& cfg);

Matrix spd_inverse(const Matrix& a);

// G[i](j,k) = Gamma^i_{jk}, symmetric in (j,k).
std::vector<Matrix> christoffel(const MetricField& a, const Vector& x, const DiffConfig& cfg);

// C(i,j) = w_{i|j} = d_j w_i - Gamma^k_{ji} w_k
Matrix covderiv_oneform(const MetricField& a, const OneFormField& w, const Vector& x,
                        const DiffConfig& cfg);

// C(i,j) = V_{i|j} for the lowered field V_i = a_{ik} V^k. The lowering is
// differentiated by the product rule, so no derived evaluator is involved.
Matrix covderiv_vector(const MetricField& a, const VectorFieldOnM& v, const Vector& x,
                       const DiffConfig& cfg);

struct BetaInvariants {
  Matrix cov;    // b_{i|j}
  Matrix r;      // symmetric part
  Matrix s;      // antisymmetric part
  Vector s_vec;  // s_j = b^i s_{ij}
  Vector b_up;   // b^i = a^{ij} b_j
  double b2 = 0; // squared alpha-norm of beta
};

BetaInvariants beta_invariants(const MetricField& a, const OneFormField& b, const Vector& x,
                               const DiffConfig& cfg);

struct RicciResult {
  Matrix value;
  // Second derivatives of the metric came from nested finite differences
  // rather than analytic data; curvature accuracy drops accordingly.
  bool low_confidence = false;
};

RicciResult ricci(const MetricField& a, const Vector& x, const DiffConfig& cfg);

}  // namespace cvf
