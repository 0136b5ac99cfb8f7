#include <cvf/conformal.hpp>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace cvf {

LieData lie_data(const MetricField& a, const OneFormField& b, const VectorFieldOnM& v,
                 const Vector& x, const DiffConfig& cfg) {
  Matrix vcov = covderiv_vector(a, v, x, cfg);
  Matrix bcov = covderiv_oneform(a, b, x, cfg);
  Vector vval = v.value(x);
  Vector b_up = spd_inverse(a.value(x)) * b.value(x);

  LieData out;
  out.S = vcov + vcov.transpose();
  out.M = bcov * vval + vcov.transpose() * b_up;
  return out;
}

namespace {

Vector fd_grad_scalar(const std::function<double(const Vector&)>& g, const Vector& p,
                      const DiffConfig& cfg) {
  const int n = static_cast<int>(p.size());
  const bool fourth = cfg.scheme != Scheme::Central2;
  Vector out(n);
  for (int i = 0; i < n; ++i) {
    const double h = cfg.first_step(p[i]);
    Vector z = p;
    auto at = [&](double dx) {
      z[i] = p[i] + dx;
      double val = g(z);
      if (!std::isfinite(val)) throw NumericError("non-finite evaluation: phase function");
      return val;
    };
    out[i] = fourth ? (at(-2 * h) - 8 * at(-h) + 8 * at(h) - at(2 * h)) / (12 * h)
                    : (at(h) - at(-h)) / (2 * h);
  }
  return out;
}

}  // namespace

double complete_lift_apply(const VectorFieldOnM& v, const PhaseFunction& f,
                           const TangentSample& sample, const DiffConfig& cfg) {
  const bool analytic = cfg.scheme == Scheme::AnalyticWhenAvailable;
  const Vector &x = sample.x, &y = sample.y;

  Vector dfx = (analytic && f.grad_x)
                   ? f.grad_x(x, y)
                   : fd_grad_scalar([&](const Vector& p) { return f.eval(p, y); }, x, cfg);
  Vector dfy = (analytic && f.grad_y)
                   ? f.grad_y(x, y)
                   : fd_grad_scalar([&](const Vector& p) { return f.eval(x, p); }, y, cfg);
  require_finite(dfx, "phase gradient in x");
  require_finite(dfy, "phase gradient in y");

  Jet jv = jet(v.components, x, 1, cfg);
  return dfx.dot(jv.value) + dfy.dot(jv.first * y);
}

FitFamily FitFamily::exp_type(int eps) {
  if (eps != 1 && eps != -1) throw ConfigError("exp-family sign must be +1 or -1");
  FitFamily f;
  f.model = Model::ExpType;
  f.eps = eps;
  return f;
}

FitFamily FitFamily::m_kropina_type(double m, double k) {
  if (m == 0.0 || m == 1.0)
    throw PreconditionError("m-Kropina-type fit needs m outside {0, 1}");
  FitFamily f;
  f.model = Model::MKropinaType;
  f.m = m;
  f.k = k;
  return f;
}

std::string FitFamily::name() const {
  switch (model) {
    case Model::Generic:
      return "generic";
    case Model::KropinaUnitB:
      return "kropina-unit-b";
    case Model::ExpType:
      return eps > 0 ? "exp(+)" : "exp(-)";
    case Model::MKropinaType:
      return "m-kropina-type";
  }
  return "?";
}

namespace {

Vector flatten(const Matrix& m) {
  Vector out(m.size());
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i * n + j] = m(i, j);
  return out;
}

}  // namespace

ConformalFit fit_conformal(const FitFamily& fam, const MetricField& a, const OneFormField& b,
                           const VectorFieldOnM& v, const Vector& x, const DiffConfig& cfg,
                           double tol) {
  const int n = a.dim();
  Matrix av = a.value(x);
  Vector bv = b.value(x);
  LieData ld = lie_data(a, b, v, x, cfg);

  const double b2 = bv.dot(spd_inverse(av) * bv);
  if (fam.model == FitFamily::Model::KropinaUnitB && std::abs(b2 - 1.0) > 1e-6)
    throw PreconditionError(
        "kropina-unit-b fit requires a unit-norm one-form (|b|^2 - 1 = " +
        std::to_string(b2 - 1.0) + "); apply kropina_normalize first");

  Matrix bb = bv * bv.transpose();
  const int params = fam.two_parameter() ? 2 : 1;

  // Columns are the model tensors per parameter, stacked as [S-block; M-block].
  Matrix A = Matrix::Zero(n * n + n, params);
  Vector rhs(n * n + n);
  rhs.head(n * n) = flatten(ld.S);
  rhs.tail(n) = ld.M;

  switch (fam.model) {
    case FitFamily::Model::Generic:
    case FitFamily::Model::KropinaUnitB:
      A.col(0).head(n * n) = flatten(4.0 * av);
      A.col(0).tail(n) = 2.0 * bv;
      break;
    case FitFamily::Model::ExpType:
      A.col(0).head(n * n) = flatten(2.0 * fam.eps * bb);
      A.col(1).head(n * n) = flatten(2.0 * av - fam.eps * bb);
      A.col(1).tail(n) = bv;
      break;
    case FitFamily::Model::MKropinaType:
      A.col(0).head(n * n) = flatten((-4.0 * fam.k / fam.m) * bb);
      A.col(0).tail(n) = (2.0 / fam.m) * bv;
      A.col(1).head(n * n) = flatten(2.0 * av + (2.0 * fam.k / fam.m) * bb);
      A.col(1).tail(n) = (1.0 - 1.0 / fam.m) * bv;
      break;
  }

  // Rows are weighted so the two residual norms are minimized on equal
  // footing; residuals are then reported in their own normalizations.
  const double wS = 1.0 / av.norm();
  const double wM = 1.0 / std::max(1.0, bv.norm());
  Matrix Aw = A;
  Vector rw = rhs;
  Aw.topRows(n * n) *= wS;
  rw.head(n * n) *= wS;
  Aw.bottomRows(n) *= wM;
  rw.tail(n) *= wM;

  Eigen::JacobiSVD<Matrix> svd(Aw, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  Vector sol = svd.solve(rw);

  ConformalFit fit;
  fit.reduced_rank = svd.rank() < params;
  fit.c_hat = sol[0];
  if (fam.two_parameter()) fit.tau_hat = sol[1];

  Vector pred = A * sol;
  fit.residual_S = (rhs.head(n * n) - pred.head(n * n)).norm() / av.norm();
  fit.residual_M = (rhs.tail(n) - pred.tail(n)).norm() / std::max(1.0, bv.norm());
  fit.conformal = std::max(fit.residual_S, fit.residual_M) <= tol;
  return fit;
}

RayFit direct_defect(const AlphaBetaMetric& fm, const VectorFieldOnM& v, const Vector& x,
                     const std::vector<Vector>& rays, const DiffConfig& cfg) {
  const int n = fm.dim();
  if (static_cast<int>(rays.size()) < n + 1)
    throw PreconditionError("direct_defect needs at least dim+1 rays per base point");

  PhaseFunction f2;
  f2.eval = [&fm](const Vector& px, const Vector& py) {
    const double F = eval_F(fm, px, py);
    return F * F;
  };

  const int nr = static_cast<int>(rays.size());
  Vector lift(nr), g(nr);
  for (int r = 0; r < nr; ++r) {
    TangentSample s{x, rays[r]};
    const double F = eval_F(fm, x, rays[r]);
    g[r] = 4.0 * F * F;
    lift[r] = complete_lift_apply(v, f2, s, cfg);
  }

  RayFit out;
  out.rays = nr;
  out.c_hat = lift.dot(g) / g.squaredNorm();
  out.defect = (lift - out.c_hat * g).norm() / g.norm();
  return out;
}

void FactorField::add(const Vector& x, double c) {
  points.push_back(x);
  values.push_back(c);
}

double FactorField::mean() const {
  if (values.empty()) return 0;
  double s = 0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double FactorField::spread() const {
  if (values.empty()) return 0;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

double FactorField::max_pair_slope() const {
  double worst = 0;
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j) {
      const double dx = (points[i] - points[j]).norm();
      if (dx < 1e-12) continue;
      worst = std::max(worst, std::abs(values[i] - values[j]) / dx);
    }
  return worst;
}

HomothetyReport homothety_test(const FactorField& f, double tol) {
  HomothetyReport rep;
  rep.n = f.size();
  rep.mean = f.mean();
  rep.spread = f.spread();
  rep.slope = f.max_pair_slope();
  if (rep.n < 10) {
    rep.verdict = HomothetyVerdict::Inconclusive;
    return rep;
  }
  const bool homothetic = rep.spread <= tol * std::max(1.0, std::abs(rep.mean));
  rep.verdict = homothetic ? HomothetyVerdict::Homothetic : HomothetyVerdict::NonHomothetic;
  rep.killing = homothetic && std::abs(rep.mean) <= tol;
  return rep;
}

FactorGapReport factor_gap_test(const MetricField& a, const OneFormField& b,
                                const VectorFieldOnM& v, const std::vector<Vector>& points,
                                const DiffConfig& cfg, double tol) {
  if (points.empty()) throw PreconditionError("factor_gap_test needs at least one point");
  FactorGapReport rep;

  for (const Vector& x : points) {
    Matrix av = a.value(x);
    Vector bv = b.value(x);
    if (bv.norm() < 1e-14)
      throw DomainViolation("one-form vanishes; the proportionality scalar tau is undefined");

    LieData ld = lie_data(a, b, v, x, cfg);
    BetaInvariants inv = beta_invariants(a, b, x, cfg);

    const double an2 = av.squaredNorm();
    const double sigma = (ld.S.array() * av.array()).sum() / an2;
    const double tau = ld.M.dot(bv) / bv.squaredNorm();
    const double rho = (inv.r.array() * av.array()).sum() / an2;

    rep.hyp_S = std::max(rep.hyp_S, (ld.S - sigma * av).norm() / av.norm());
    rep.hyp_M = std::max(rep.hyp_M, (ld.M - tau * bv).norm() / std::max(1.0, bv.norm()));
    rep.hyp_beta = std::max(rep.hyp_beta, (inv.r - rho * av).norm() / av.norm());

    rep.sigma.push_back(sigma);
    rep.tau.push_back(tau);
    rep.rho.push_back(rho);
  }

  rep.applicable = std::max({rep.hyp_S, rep.hyp_M, rep.hyp_beta}) <= tol;

  double lo = rep.tau[0] - rep.sigma[0], hi = lo, sum = 0;
  for (size_t i = 0; i < rep.tau.size(); ++i) {
    const double gap = rep.tau[i] - rep.sigma[i];
    lo = std::min(lo, gap);
    hi = std::max(hi, gap);
    sum += gap;
  }
  rep.gap_mean = sum / static_cast<double>(rep.tau.size());
  rep.gap_spread = hi - lo;
  rep.conclusion_holds =
      rep.applicable && rep.gap_spread <= tol * std::max(1.0, std::abs(rep.gap_mean));
  return rep;
}

double lift_b2_residual(const MetricField& a, const OneFormField& b, const VectorFieldOnM& v,
                        const Vector& x, int eps, const DiffConfig& cfg, double tol) {
  ConformalFit fit = fit_conformal(FitFamily::exp_type(eps), a, b, v, x, cfg, tol);
  if (!fit.conformal)
    throw PreconditionError("exp-family conformal fit does not pass at the base point "
                            "(residuals " + std::to_string(fit.residual_S) + ", " +
                            std::to_string(fit.residual_M) + ")");

  BetaInvariants inv = beta_invariants(a, b, x, cfg);
  // V(b^2) = 2 V^j b^i b_{i|j} by metric compatibility.
  const double lift = 2.0 * inv.b_up.dot(inv.cov * v.value(x));
  const double b4 = inv.b2 * inv.b2;
  const double rhs = eps * (*fit.tau_hat - 2.0 * fit.c_hat) * b4;
  return std::abs(lift - rhs) / std::max(1.0, b4);
}

DeformedLiftResult deformed_lift_check(const MetricField& a, const OneFormField& b,
                                       const VectorFieldOnM& v, const DeformationTriple& d,
                                       const Vector& x, const std::vector<Vector>& rays,
                                       const DiffConfig& cfg, double tol) {
  if (rays.empty()) throw PreconditionError("deformed_lift_check needs at least one ray");

  ConformalFit fit = fit_conformal(FitFamily::exp_type(d.eps), a, b, v, x, cfg, tol);
  if (!fit.conformal)
    throw PreconditionError("exp-family conformal fit does not pass at the base point "
                            "(residuals " + std::to_string(fit.residual_S) + ", " +
                            std::to_string(fit.residual_M) + ")");
  const double c = fit.c_hat, tau = *fit.tau_hat;

  Matrix av = a.value(x);
  Vector bv = b.value(x);
  const double t = bv.dot(spd_inverse(av) * bv);

  auto [ru, rv] = deformation_ode_residual(d, t);
  if (std::max(std::abs(ru), std::abs(rv)) > 1e-8)
    throw PreconditionError("deformation triple does not solve the compatibility ODE at t = " +
                            std::to_string(t));

  const double u = d.u(t), w = d.w(t), dw = d.dw(t);
  const double mult_a = (2.0 * c + tau) * u + d.eps * (tau - 2.0 * c) * t * t * u * dw / w;
  const double mult_b = w * tau + d.eps * (tau - 2.0 * c) * t * t * dw;

  const bool special = std::abs(d.u(t) - 1.0) <= 1e-12 &&
                       std::abs(d.v(t) - (1.0 - 1.0 / t)) <= 1e-12 &&
                       std::abs(d.w(t) - std::exp(-d.eps / t)) <= 1e-12;

  auto [adef, bdef] = deform_fields(a, b, d);

  PhaseFunction fa2;
  fa2.eval = [&adef](const Vector& px, const Vector& py) {
    return py.dot(adef.value(px) * py);
  };
  PhaseFunction fb;
  fb.eval = [&bdef](const Vector& px, const Vector& py) { return bdef.value(px).dot(py); };

  DeformedLiftResult out;
  if (special) {
    out.res_alpha2_special = 0.0;
    out.res_beta_special = 0.0;
  }
  for (const Vector& y : rays) {
    TangentSample smp{x, y};
    const double a2t = fa2.eval(x, y);
    const double bt = fb.eval(x, y);
    const double beta = bv.dot(y);

    const double lift_a2 = complete_lift_apply(v, fa2, smp, cfg);
    const double lift_b = complete_lift_apply(v, fb, smp, cfg);

    out.res_alpha2 = std::max(out.res_alpha2,
                              std::abs(lift_a2 - mult_a * a2t) / std::max(1.0, std::abs(a2t)));
    out.res_beta =
        std::max(out.res_beta, std::abs(lift_b - mult_b * beta) / std::max(1.0, std::abs(bt)));

    if (special) {
      out.res_alpha2_special =
          std::max(*out.res_alpha2_special,
                   std::abs(lift_a2 - 2.0 * tau * a2t) / std::max(1.0, std::abs(a2t)));
      out.res_beta_special =
          std::max(*out.res_beta_special,
                   std::abs(lift_b - 2.0 * (tau - c) * bt) / std::max(1.0, std::abs(bt)));
    }
  }
  return out;
}

}  // namespace cvf
