#pragma once

#include <cvf/diffgeo.hpp>

#include <optional>

namespace cvf {

struct ClassReport {
  std::string condition;
  double residual = 0;
  std::optional<double> fitted;  // proportionality scalar when the condition carries one
  bool holds = false;
  bool low_confidence = false;   // curvature from nested finite differences
};

// max_{i,j} |d_i b_j - d_j b_i|; zero iff the one-form is closed at x.
ClassReport closedness_residual(const OneFormField& b, const Vector& x, const DiffConfig& cfg,
                                double tol);

// Kropina Douglas condition s_ij = (b_i s_j - b_j s_i) / b^2, normalized by
// ||b_{i|j}|| so rescaling b by a constant leaves the residual unchanged
// (0/0 counts as 0: a parallel one-form satisfies the condition).
ClassReport douglas_kropina_residual(const MetricField& a, const OneFormField& b, const Vector& x,
                                     const DiffConfig& cfg, double tol);

// Landsberg/Douglas conditions for an m-Kropina metric:
//   s_ij = (b_i s_j - b_j s_i)/b^2
//   r_ij = 2 tau {m b^2 a_ij - (m+1) b_i b_j} - (m+1)/((m-1) b^2) (b_i s_j + b_j s_i)
// tau is fitted by least squares; residual is the max defect of the two
// equations over ||a||. Requires m outside {0, 1} and b != 0 at x.
ClassReport mkropina_bd_residual(const MetricField& a, const OneFormField& b, const Vector& x,
                                 double m, const DiffConfig& cfg, double tol);

// Same for the exp family:
//   s_ij = (b_i s_j - b_j s_i)/b^2
//   r_ij = sigma [(eps b^2/2 - 1) b_i b_j + b^2 a_ij] + (eps - 1/b^2)(b_i s_j + b_j s_i)
ClassReport exp_bd_residual(const MetricField& a, const OneFormField& b, const Vector& x, int eps,
                            const DiffConfig& cfg, double tol);

// ||r|| / ||a||; zero iff the one-form is Killing at x.
ClassReport killing_residual(const MetricField& a, const OneFormField& b, const Vector& x,
                             const DiffConfig& cfg, double tol);

// ||Ric - (tr_a Ric / n) a|| / max(1, ||Ric||); fitted = tr_a Ric / n.
ClassReport einstein_residual(const MetricField& a, const Vector& x, const DiffConfig& cfg,
                              double tol);

}  // namespace cvf
