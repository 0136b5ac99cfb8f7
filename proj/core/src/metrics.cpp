#include <cvf/metrics.hpp>

#include <cmath>

namespace cvf {

PhiFamily PhiFamily::randers() {
  PhiFamily p;
  p.kind_ = Kind::Randers;
  return p;
}

PhiFamily PhiFamily::m_kropina(double m) {
  if (m == 0.0 || m == 1.0)
    throw ConfigError("m-Kropina exponent m must avoid 0 and 1");
  PhiFamily p;
  p.kind_ = Kind::MKropina;
  p.m_ = m;
  return p;
}

PhiFamily PhiFamily::m_kropina_type(double m, double k) {
  if (m == 0.0 || m == 1.0)
    throw ConfigError("m-Kropina-type exponent m must avoid 0 and 1");
  PhiFamily p;
  p.kind_ = Kind::MKropinaType;
  p.m_ = m;
  p.k_ = k;
  return p;
}

PhiFamily PhiFamily::exp_type(int eps) {
  if (eps != 1 && eps != -1) throw ConfigError("exp-family sign must be +1 or -1");
  PhiFamily p;
  p.kind_ = Kind::ExpType;
  p.eps_ = eps;
  return p;
}

PhiFamily PhiFamily::general(std::function<double(double)> phi,
                             std::function<double(double)> dphi) {
  if (!phi || !dphi) throw ConfigError("general phi family needs phi and its derivative");
  PhiFamily p;
  p.kind_ = Kind::General;
  p.phi_ = std::move(phi);
  p.dphi_ = std::move(dphi);
  return p;
}

bool PhiFamily::has_integer_m() const {
  return (kind_ == Kind::MKropina || kind_ == Kind::MKropinaType) &&
         m_ == std::floor(m_);
}

double PhiFamily::value(double s) const {
  switch (kind_) {
    case Kind::Randers:
      return 1.0 + s;
    case Kind::MKropina:
      return std::pow(s, m_);  // admissibility checked by the caller
    case Kind::MKropinaType:
      return std::pow(1.0 + k_ * s * s, 0.5 * (1.0 - m_)) * std::pow(s, m_);
    case Kind::ExpType:
      return s * std::exp(eps_ / (s * s));
    case Kind::General:
      return phi_(s);
  }
  throw Error("unreachable");
}

double PhiFamily::deriv(double s) const {
  switch (kind_) {
    case Kind::Randers:
      return 1.0;
    case Kind::MKropina:
      return m_ * std::pow(s, m_ - 1.0);
    case Kind::MKropinaType: {
      const double q = 1.0 + k_ * s * s;
      return std::pow(q, -0.5 * (1.0 + m_)) * std::pow(s, m_ - 1.0) *
             (m_ + k_ * s * s);
    }
    case Kind::ExpType:
      return std::exp(eps_ / (s * s)) * (1.0 - 2.0 * eps_ / (s * s));
    case Kind::General:
      return dphi_(s);
  }
  throw Error("unreachable");
}

bool PhiFamily::beta_admissible(double beta) const {
  switch (kind_) {
    case Kind::MKropina:
    case Kind::MKropinaType:
      return has_integer_m() ? beta != 0.0 : beta > 0.0;
    case Kind::ExpType:
      return beta != 0.0;
    default:
      return true;
  }
}

std::string PhiFamily::name() const {
  switch (kind_) {
    case Kind::Randers:
      return "randers";
    case Kind::MKropina:
      return m_ == -1.0 ? "kropina" : "m-kropina(m=" + std::to_string(m_) + ")";
    case Kind::MKropinaType:
      return "m-kropina-type(m=" + std::to_string(m_) + ",k=" + std::to_string(k_) + ")";
    case Kind::ExpType:
      return eps_ > 0 ? "exp(+)" : "exp(-)";
    case Kind::General:
      return "general";
  }
  return "?";
}

double eval_alpha(const MetricField& a, const Vector& x, const Vector& y) {
  Matrix av = a.value(x);
  spd_inverse(av);  // positive definiteness check
  double q = y.dot(av * y);
  if (q < 0) throw NumericError("metric not positive definite at the evaluation point");
  return std::sqrt(q);
}

namespace {

double int_pow(double b, long e) {
  if (e < 0) return 1.0 / int_pow(b, -e);
  double r = 1.0;
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

double eval_F(const AlphaBetaMetric& fm, const Vector& x, const Vector& y) {
  if (y.isZero(0.0)) throw PreconditionError("F is evaluated on nonzero tangent vectors");
  const double alpha = eval_alpha(fm.a, x, y);
  const double beta = fm.b.value(x).dot(y);
  if (!fm.phi.beta_admissible(beta))
    throw DomainViolation("ray violates the singular-domain rule of " + fm.phi.name());

  double F;
  switch (fm.phi.kind()) {
    case PhiFamily::Kind::MKropina: {
      const double m = fm.phi.m();
      F = fm.phi.has_integer_m()
              ? std::pow(alpha, 1.0 - m) * int_pow(beta, static_cast<long>(m))
              : std::pow(alpha, 1.0 - m) * std::pow(beta, m);
      break;
    }
    case PhiFamily::Kind::ExpType:
      F = beta * std::exp(fm.phi.eps() * alpha * alpha / (beta * beta));
      break;
    default:
      F = alpha * fm.phi.value(beta / alpha);
      break;
  }
  if (!std::isfinite(F)) throw NumericError("non-finite evaluation: F");
  if (F <= 0) throw NumericError("non-positive metric value F");
  return F;
}

std::pair<MetricField, OneFormField> kropina_normalize(const MetricField& a,
                                                       const OneFormField& b, double m) {
  if (m == 0.0 || m == 1.0)
    throw ConfigError("m-Kropina exponent m must avoid 0 and 1");
  const int n = a.dim();
  auto a_map = a.components;
  auto b_map = b.components;

  auto norm_at = [a_map, b_map, n](const Vector& x) {
    MetricField af{a_map};
    Matrix av = af.value(x);
    Vector bv = b_map.eval(x);
    double b2 = bv.dot(spd_inverse(av) * bv);
    if (b2 <= 0) throw DomainViolation("one-form norm vanishes; normalization undefined");
    return std::sqrt(b2);
  };

  MetricField an;
  an.components.dim_in = n;
  an.components.dim_out = n * n;
  an.components.eval = [a_map, norm_at, m](const Vector& x) -> Vector {
    return std::pow(norm_at(x), 2.0 * m) * a_map.eval(x);
  };

  OneFormField bn;
  bn.components.dim_in = n;
  bn.components.dim_out = n;
  bn.components.eval = [b_map, norm_at, m](const Vector& x) -> Vector {
    return std::pow(norm_at(x), m - 1.0) * b_map.eval(x);
  };
  return {an, bn};
}

DeformationTriple DeformationTriple::special(int eps) {
  if (eps != 1 && eps != -1) throw ConfigError("deformation sign must be +1 or -1");
  DeformationTriple d;
  d.eps = eps;
  d.u = [](double) { return 1.0; };
  d.du = [](double) { return 0.0; };
  d.v = [](double t) { return 1.0 - 1.0 / t; };
  d.dv = [](double t) { return 1.0 / (t * t); };
  d.w = [eps](double t) { return std::exp(-eps / t); };
  d.dw = [eps](double t) { return std::exp(-eps / t) * eps / (t * t); };
  return d;
}

DeformationTriple DeformationTriple::identity(int eps) {
  DeformationTriple d;
  d.eps = eps;
  d.u = d.w = [](double) { return 1.0; };
  d.v = [](double) { return 0.0; };
  d.du = d.dv = d.dw = [](double) { return 0.0; };
  return d;
}

std::pair<double, double> deformation_ode_residual(const DeformationTriple& d, double t) {
  if (t == 0.0) throw DomainViolation("ODE residual undefined at t = 0");
  const double u = d.u(t), v = d.v(t), w = d.w(t);
  if (w == 0.0) throw DomainViolation("deformation requires w != 0");
  const double lw = d.dw(t) / w, it2 = 1.0 / (t * t);
  const double res_u = d.du(t) - (u * lw - d.eps * it2 * u);
  const double res_v = d.dv(t) - (v * lw - it2 * (d.eps * v - u));
  if (!std::isfinite(res_u) || !std::isfinite(res_v))
    throw NumericError("non-finite evaluation: deformation ODE residual");
  return {res_u, res_v};
}

DeformedPoint deform_pair(const MetricField& a, const OneFormField& b,
                          const DeformationTriple& d, const Vector& x) {
  Matrix av = a.value(x);
  Vector bv = b.value(x);
  const double t = bv.dot(spd_inverse(av) * bv);
  DeformedPoint out;
  out.t = t;
  const double u = d.u(t), v = d.v(t), w = d.w(t);
  if (!std::isfinite(u) || !std::isfinite(v) || !std::isfinite(w))
    throw NumericError("non-finite evaluation: deformation data");
  if (u == 0.0 || w == 0.0) throw DomainViolation("deformation requires u != 0 and w != 0");
  out.a = u * av + v * bv * bv.transpose();
  out.b = w * bv;
  Eigen::LLT<Matrix> llt(out.a);
  if (llt.info() != Eigen::Success)
    throw NumericError("deformed metric not positive definite at the evaluation point");
  return out;
}

std::pair<MetricField, OneFormField> deform_fields(const MetricField& a, const OneFormField& b,
                                                   const DeformationTriple& d) {
  const int n = a.dim();
  auto a_map = a.components;
  auto b_map = b.components;

  MetricField an;
  an.components.dim_in = n;
  an.components.dim_out = n * n;
  an.components.eval = [a_map, b_map, d](const Vector& x) -> Vector {
    MetricField af{a_map};
    OneFormField bf{b_map};
    DeformedPoint p = deform_pair(af, bf, d, x);
    Vector flat(p.a.size());
    const int nn = static_cast<int>(p.a.rows());
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < nn; ++j) flat[i * nn + j] = p.a(i, j);
    return flat;
  };

  OneFormField bn;
  bn.components.dim_in = n;
  bn.components.dim_out = n;
  bn.components.eval = [a_map, b_map, d](const Vector& x) -> Vector {
    MetricField af{a_map};
    OneFormField bf{b_map};
    return deform_pair(af, bf, d, x).b;
  };
  return {an, bn};
}

}  // namespace cvf
