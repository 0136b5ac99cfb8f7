#include <cvf/classify.hpp>

#include <cmath>

namespace cvf {

namespace {

ClassReport make(std::string cond, double residual, double tol) {
  ClassReport rep;
  rep.condition = std::move(cond);
  rep.residual = residual;
  rep.holds = residual <= tol;
  return rep;
}

void require_nonzero_b(double b2) {
  if (b2 <= 1e-20)
    throw DomainViolation("one-form vanishes at the evaluation point; condition undefined");
}

}  // namespace

ClassReport closedness_residual(const OneFormField& b, const Vector& x, const DiffConfig& cfg,
                                double tol) {
  Jet j = jet(b.components, x, 1, cfg);
  Matrix anti = j.first - j.first.transpose();
  return make("closed", anti.cwiseAbs().maxCoeff(), tol);
}

ClassReport douglas_kropina_residual(const MetricField& a, const OneFormField& b, const Vector& x,
                                     const DiffConfig& cfg, double tol) {
  BetaInvariants inv = beta_invariants(a, b, x, cfg);
  require_nonzero_b(inv.b2);
  Vector bv = b.value(x);
  Matrix model = (bv * inv.s_vec.transpose() - inv.s_vec * bv.transpose()) / inv.b2;
  const double scale = inv.cov.norm();
  const double defect = (inv.s - model).norm();
  return make("douglas-kropina", scale == 0.0 ? 0.0 : defect / scale, tol);
}

namespace {

// Shared s-equation of the two Landsberg/Douglas characterizations.
Matrix s_defect(const BetaInvariants& inv, const Vector& bv) {
  return inv.s - (bv * inv.s_vec.transpose() - inv.s_vec * bv.transpose()) / inv.b2;
}

}  // namespace

ClassReport mkropina_bd_residual(const MetricField& a, const OneFormField& b, const Vector& x,
                                 double m, const DiffConfig& cfg, double tol) {
  if (m == 0.0 || m == 1.0)
    throw PreconditionError("m-Kropina condition needs m outside {0, 1}");
  BetaInvariants inv = beta_invariants(a, b, x, cfg);
  require_nonzero_b(inv.b2);
  Matrix av = a.value(x);
  Vector bv = b.value(x);

  Matrix sym_bs = bv * inv.s_vec.transpose() + inv.s_vec * bv.transpose();
  Matrix lhs = inv.r + (m + 1.0) / ((m - 1.0) * inv.b2) * sym_bs;
  Matrix G = 2.0 * (m * inv.b2 * av - (m + 1.0) * bv * bv.transpose());

  const double gg = G.squaredNorm();
  const double tau = gg == 0.0 ? 0.0 : (lhs.array() * G.array()).sum() / gg;

  const double defect =
      std::max((lhs - tau * G).norm(), s_defect(inv, bv).norm()) / av.norm();
  ClassReport rep = make("mkropina-bd", defect, tol);
  rep.fitted = tau;
  return rep;
}

ClassReport exp_bd_residual(const MetricField& a, const OneFormField& b, const Vector& x, int eps,
                            const DiffConfig& cfg, double tol) {
  if (eps != 1 && eps != -1) throw PreconditionError("exp-family sign must be +1 or -1");
  BetaInvariants inv = beta_invariants(a, b, x, cfg);
  require_nonzero_b(inv.b2);
  Matrix av = a.value(x);
  Vector bv = b.value(x);

  Matrix sym_bs = bv * inv.s_vec.transpose() + inv.s_vec * bv.transpose();
  Matrix lhs = inv.r - (eps - 1.0 / inv.b2) * sym_bs;
  Matrix G = (0.5 * eps * inv.b2 - 1.0) * bv * bv.transpose() + inv.b2 * av;

  const double gg = G.squaredNorm();
  const double sigma = gg == 0.0 ? 0.0 : (lhs.array() * G.array()).sum() / gg;

  const double defect =
      std::max((lhs - sigma * G).norm(), s_defect(inv, bv).norm()) / av.norm();
  ClassReport rep = make("exp-bd", defect, tol);
  rep.fitted = sigma;
  return rep;
}

ClassReport killing_residual(const MetricField& a, const OneFormField& b, const Vector& x,
                             const DiffConfig& cfg, double tol) {
  BetaInvariants inv = beta_invariants(a, b, x, cfg);
  return make("killing", inv.r.norm() / a.value(x).norm(), tol);
}

ClassReport einstein_residual(const MetricField& a, const Vector& x, const DiffConfig& cfg,
                              double tol) {
  RicciResult ric = ricci(a, x, cfg);
  Matrix av = a.value(x);
  const int n = a.dim();
  const double trace = (spd_inverse(av) * ric.value).trace();
  const double kappa = trace / n;
  ClassReport rep = make("einstein",
                         (ric.value - kappa * av).norm() / std::max(1.0, ric.value.norm()), tol);
  rep.fitted = kappa;
  rep.low_confidence = ric.low_confidence;
  return rep;
}

}  // namespace cvf
