#include <cvf/catalog.hpp>

#include <cmath>
#include <memory>
#include <random>

namespace cvf {

namespace {

Polynomial poly_const(int n, double c) { return Polynomial::constant(n, c); }

MetricField metric_from(std::vector<Rational> entries, int n) {
  MetricField a;
  a.components = map_from_rationals(std::move(entries), n);
  return a;
}

MetricField flat_metric(int n) {
  std::vector<Rational> entries;
  entries.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) entries.emplace_back(poly_const(n, i == j ? 1.0 : 0.0));
  return metric_from(std::move(entries), n);
}

Polynomial norm2_poly(int n) {
  Polynomial p(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 2;
    p.add_term(1.0, e);
  }
  return p;
}

// a_ij = 4 delta_ij / (1 + mu |x|^2)^2
MetricField spaceform_metric(int n, double mu) {
  Polynomial P = poly_const(n, 1.0) + norm2_poly(n).scaled(mu);
  Polynomial P2 = P * P;
  std::vector<Rational> entries;
  entries.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      entries.emplace_back(poly_const(n, i == j ? 4.0 : 0.0), P2);
  return metric_from(std::move(entries), n);
}

OneFormField const_oneform(const Vector& b0) {
  const int n = static_cast<int>(b0.size());
  std::vector<Rational> entries;
  entries.reserve(n);
  for (int i = 0; i < n; ++i) entries.emplace_back(poly_const(n, b0[i]));
  OneFormField b;
  b.components = map_from_rationals(std::move(entries), n);
  return b;
}

VectorFieldOnM field_from(std::vector<Rational> entries, int n) {
  VectorFieldOnM v;
  v.components = map_from_rationals(std::move(entries), n);
  return v;
}

// V = lambda x + Q x + a0
VectorFieldOnM linear_field(int n, double lambda, const Matrix& Q, const Vector& a0) {
  std::vector<Rational> entries;
  for (int i = 0; i < n; ++i) {
    Polynomial p(n);
    for (int j = 0; j < n; ++j) {
      const double coeff = (i == j ? lambda : 0.0) + Q(i, j);
      if (coeff != 0.0) {
        std::vector<int> e(n, 0);
        e[j] = 1;
        p.add_term(coeff, e);
      }
    }
    if (a0[i] != 0.0) p.add_term(a0[i], std::vector<int>(n, 0));
    entries.emplace_back(std::move(p));
  }
  return field_from(std::move(entries), n);
}

// V^i = 2 <x,k> x^i - |x|^2 k^i
VectorFieldOnM moebius_field(const Vector& k) {
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
    if (k[i] != 0.0) {
      for (int j = 0; j < n; ++j) {
        std::vector<int> e(n, 0);
        e[j] = 2;
        p.add_term(-k[i], e);
      }
    }
    entries.emplace_back(std::move(p));
  }
  return field_from(std::move(entries), n);
}

VectorFieldOnM zero_field(int n) {
  return linear_field(n, 0.0, Matrix::Zero(n, n), Vector::Zero(n));
}

void require_antisymmetric(const Matrix& Q) {
  if ((Q + Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Q.cwiseAbs().maxCoeff()))
    throw ConfigError("generator matrix Q must be antisymmetric");
}

// Shrinks the box until pred holds on a probe grid; pred failures name the
// condition via the message.
DomainBox shrink_until(DomainBox box, const std::function<bool(const Vector&)>& pred,
                       const std::string& condition) {
  const int n = box.dim();
  const int per_axis = n <= 2 ? 7 : 5;
  for (int iter = 0; iter < 60; ++iter) {
    bool ok = true;
    std::vector<int> idx(n, 0);
    while (true) {
      Vector x(n);
      for (int i = 0; i < n; ++i)
        x[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * idx[i] / (per_axis - 1.0);
      if (!pred(x)) {
        ok = false;
        break;
      }
      int axis = 0;
      while (axis < n && ++idx[axis] == per_axis) idx[axis++] = 0;
      if (axis == n) break;
    }
    if (ok) return box;
    box = box.shrunk(0.8);
  }
  throw DomainViolation("no admissible domain around the box center: " + condition +
                        " cannot be satisfied with margin");
}

}  // namespace

// --- Example 1 ---------------------------------------------------------

namespace {

struct Ex1Data {
  int n;
  double mu, tau;
  Vector gamma, eta, w;  // w = mu gamma + eta
  double K = 0;          // <eta, gamma> + mu |gamma|^2
  bool complement = false;
  double R = 0;  // complement: boundary radius 1/sqrt(-mu)
  Vector p;      // complement: boundary point R gamma/|gamma|
  Example1Params::Variant variant;
};

double ex1_P(const Ex1Data& d, const Vector& x) { return 1.0 + d.mu * x.squaredNorm(); }

double ex1_c(const Ex1Data& d, const Vector& x) {
  return (d.tau * (1.0 - d.mu * x.squaredNorm()) + d.w.dot(x)) / ex1_P(d, x);
}

Vector ex1_dc(const Ex1Data& d, const Vector& x, double c, double P) {
  return (-2.0 * d.tau * d.mu * x + d.w - 2.0 * d.mu * c * x) / P;
}

Matrix ex1_ddc(const Ex1Data& d, const Vector& x, double c, double P, const Vector& dc) {
  Matrix h = -2.0 * d.mu *
             ((d.tau + c) * Matrix::Identity(d.n, d.n) + x * dc.transpose() + dc * x.transpose());
  return h / P;
}

// Closed-form f and f' of the variant; c must be admissible.
void ex1_f(const Ex1Data& d, double c, double& f, double& df) {
  if (d.variant == Example1Params::Variant::A) {
    if (c == 0.0) throw DomainViolation("variant A needs a nonvanishing conformal factor");
    f = 1.0 / (std::sqrt(-d.mu) * std::abs(c));
    df = -f / c;
  } else {
    const double D = d.mu * (d.K - 2.0 * c * c);
    if (D <= 0.0)
      throw DomainViolation("variant B factor outside the admissible range (f^2 <= 0)");
    f = std::sqrt(2.0 / D);
    df = 2.0 * d.mu * c * f / D;
  }
}

Ex1Data make_data(const Example1Params& p) {
  Ex1Data d;
  d.n = p.n;
  d.mu = p.mu;
  d.tau = p.tau;
  d.gamma = p.gamma;
  d.eta = p.eta;
  d.variant = p.variant;
  d.w = p.mu * p.gamma + p.eta;
  d.K = p.eta.dot(p.gamma) + p.mu * p.gamma.squaredNorm();
  d.complement = (p.eta + p.mu * p.gamma).cwiseAbs().maxCoeff() <=
                 1e-12 * std::max(1.0, p.eta.cwiseAbs().maxCoeff());
  if (d.complement && d.mu < 0) {
    d.R = 1.0 / std::sqrt(-d.mu);
    d.p = d.R * d.gamma / d.gamma.norm();
  }
  return d;
}

void validate(const Example1Params& p, const Ex1Data& d) {
  if (p.n < 2) throw ConfigError("construction needs dimension >= 2");
  if (p.mu == 0.0) throw ConfigError("curvature parameter mu must be nonzero");
  if (p.gamma.size() != p.n || p.eta.size() != p.n || p.Q.rows() != p.n || p.Q.cols() != p.n)
    throw ConfigError("gamma, eta, Q must match the stated dimension");
  require_antisymmetric(p.Q);

  const double scale = 1.0 + std::abs(p.mu) + p.gamma.squaredNorm() + p.eta.squaredNorm() +
                       p.tau * p.tau;
  const double ctol = 1e-9 * scale;

  if (d.complement) {
    if (p.mu >= 0)
      throw ConfigError("degenerate branch eta = -mu gamma needs mu < 0 (defect mu = " +
                        std::to_string(p.mu) + ")");
    if (p.gamma.norm() == 0.0)
      throw ConfigError("degenerate branch eta = -mu gamma needs gamma != 0");
    if (p.Q.cwiseAbs().maxCoeff() > 1e-14)
      throw ConfigError("degenerate branch is implemented for Q = 0 only (defect |Q| = " +
                        std::to_string(p.Q.cwiseAbs().maxCoeff()) + ")");
    if (std::abs(p.tau) > 1e-12)
      throw ConfigError("degenerate branch forces tau = 0 (defect " + std::to_string(p.tau) + ")");
    return;
  }

  const double d1 = (p.Q * p.eta + p.mu * (4.0 * p.tau * p.gamma + p.Q * p.gamma))
                        .cwiseAbs()
                        .maxCoeff();
  if (d1 > ctol)
    throw ConfigError("coupling condition Q eta = -mu (4 tau gamma + Q gamma) fails (defect " +
                      std::to_string(d1) + ")");
  const double d2 = std::abs(p.eta.squaredNorm() -
                             p.mu * (p.mu * p.gamma.squaredNorm() - 4.0 * p.tau * p.tau));
  if (d2 > ctol)
    throw ConfigError("norm condition |eta|^2 = mu (mu |gamma|^2 - 4 tau^2) fails (defect " +
                      std::to_string(d2) + ")");

  if (p.variant == Example1Params::Variant::A) {
    if (p.mu >= 0) throw ConfigError("variant A needs mu < 0");
    const double d3 = std::abs(p.eta.dot(p.gamma) + p.mu * p.gamma.squaredNorm());
    if (d3 > ctol)
      throw ConfigError("orthogonality condition <eta,gamma> = -mu |gamma|^2 fails (defect " +
                        std::to_string(d3) + ")");
  } else {
    if (std::abs(p.tau) > ctol)
      throw ConfigError("variant B requires tau = 0 (defect " + std::to_string(p.tau) + ")");
  }
}

OneFormField ex1_oneform(std::shared_ptr<const Ex1Data> d) {
  OneFormField b;
  b.components.dim_in = d->n;
  b.components.dim_out = d->n;

  if (d->complement) {
    // b = dB for B = R log(|x-p|^2 / (R^2 - |x|^2)); closed by construction
    // and of exact unit alpha-norm.
    b.components.eval = [d](const Vector& x) -> Vector {
      const Vector q = x - d->p;
      const double q2 = q.squaredNorm(), r2 = d->R * d->R - x.squaredNorm();
      if (q2 == 0.0 || r2 <= 0.0)
        throw DomainViolation("boundary potential undefined at the evaluation point");
      return d->R * (2.0 / q2 * q + 2.0 / r2 * x);
    };
    b.components.jacobian = [d](const Vector& x) -> Matrix {
      const Vector q = x - d->p;
      const double q2 = q.squaredNorm(), r2 = d->R * d->R - x.squaredNorm();
      if (q2 == 0.0 || r2 <= 0.0)
        throw DomainViolation("boundary potential undefined at the evaluation point");
      Matrix id = Matrix::Identity(d->n, d->n);
      return d->R * (2.0 / q2 * id - 4.0 / (q2 * q2) * q * q.transpose() + 2.0 / r2 * id +
                     4.0 / (r2 * r2) * x * x.transpose());
    };
    return b;
  }

  b.components.eval = [d](const Vector& x) -> Vector {
    const double P = ex1_P(*d, x);
    if (P <= 0.0) throw DomainViolation("conformal factor of the metric degenerates (P <= 0)");
    const double c = ex1_c(*d, x);
    double f, df;
    ex1_f(*d, c, f, df);
    return f * ex1_dc(*d, x, c, P);
  };
  b.components.jacobian = [d](const Vector& x) -> Matrix {
    const double P = ex1_P(*d, x);
    if (P <= 0.0) throw DomainViolation("conformal factor of the metric degenerates (P <= 0)");
    const double c = ex1_c(*d, x);
    double f, df;
    ex1_f(*d, c, f, df);
    const Vector dc = ex1_dc(*d, x, c, P);
    const Matrix ddc = ex1_ddc(*d, x, c, P, dc);
    return df * dc * dc.transpose() + f * ddc;
  };
  return b;
}

VectorFieldOnM ex1_field(const Example1Params& p) {
  // V^i = 2 (tau + <eta,x>) x^i - |x|^2 eta^i - (Q x)^i - gamma^i; this is the
  // reflected representative of the construction's field, oriented so the
  // fitted factor comes out equal to c(x) rather than -c(x).
  const int n = p.n;
  std::vector<Rational> entries;
  for (int i = 0; i < n; ++i) {
    Polynomial poly(n);
    if (p.tau != 0.0) {
      std::vector<int> e(n, 0);
      e[i] = 1;
      poly.add_term(2.0 * p.tau, e);
    }
    for (int j = 0; j < n; ++j) {
      if (p.eta[j] != 0.0) {
        std::vector<int> e(n, 0);
        e[j] += 1;
        e[i] += 1;
        poly.add_term(2.0 * p.eta[j], e);
      }
    }
    if (p.eta[i] != 0.0)
      for (int j = 0; j < n; ++j) {
        std::vector<int> e(n, 0);
        e[j] = 2;
        poly.add_term(-p.eta[i], e);
      }
    for (int j = 0; j < n; ++j)
      if (p.Q(i, j) != 0.0) {
        std::vector<int> e(n, 0);
        e[j] = 1;
        poly.add_term(-p.Q(i, j), e);
      }
    if (p.gamma[i] != 0.0) poly.add_term(-p.gamma[i], std::vector<int>(n, 0));
    entries.emplace_back(std::move(poly));
  }
  return field_from(std::move(entries), n);
}

}  // namespace

Scenario build_example1(const Example1Params& p) {
  Ex1Data d0 = make_data(p);
  validate(p, d0);
  auto d = std::make_shared<const Ex1Data>(d0);

  Scenario sc;
  sc.name = std::string("example1-") +
            (d->complement ? "degenerate" : (p.variant == Example1Params::Variant::A ? "A" : "B")) +
            "-n" + std::to_string(p.n);
  sc.a = spaceform_metric(p.n, p.mu);
  sc.b = ex1_oneform(d);
  sc.V = ex1_field(p);
  sc.phi = PhiFamily::kropina();
  sc.example1 = p;

  auto admissible = [d](const Vector& x) {
    if (ex1_P(*d, x) < 0.1) return false;
    if (d->complement) return (x - d->p).squaredNorm() >= 0.01 * d->R * d->R;
    const double c = ex1_c(*d, x);
    if (d->variant == Example1Params::Variant::A) return std::abs(c) >= 0.1;
    return d->mu * (d->K - 2.0 * c * c) >= 0.1;
  };
  sc.domain = shrink_until(DomainBox::cube(p.n, 0.5), admissible,
                           "variant admissibility (factor range / f-domain / metric positivity)");

  sc.expected.homothetic = d->complement;
  sc.expected.killing = d->complement;
  if (d->complement) {
    sc.expected.factor = [](const Vector&) { return 0.0; };
  } else {
    sc.expected.factor = [d](const Vector& x) { return ex1_c(*d, x); };
  }
  return sc;
}

double f_ode_residual(const Example1Params& p, double c) {
  Ex1Data d = make_data(p);
  validate(p, d);
  if (d.complement)
    throw DomainViolation(
        "degenerate branch has identically vanishing factor; the ODE does not apply");

  double f, df;
  ex1_f(d, c, f, df);
  const double denom =
      2.0 * p.tau * c - 2.0 * c * c + p.mu * p.gamma.squaredNorm() + p.eta.dot(p.gamma);
  if (std::abs(denom) < 1e-14)
    throw DomainViolation("ODE right-hand side denominator vanishes at this factor value");
  const double rhs = 2.0 * (c - p.tau) * f / denom;
  return std::abs(df - rhs) / std::max(1.0, std::abs(df));
}

// --- builtin scenarios --------------------------------------------------

namespace {

Vector default_b0(int n) {
  Vector b = Vector::Zero(n);
  b[0] = 1.0;
  return b;
}

Matrix default_rotation(int n) {
  Matrix Q = Matrix::Zero(n, n);
  Q(0, 1) = 1.0;
  Q(1, 0) = -1.0;
  return Q;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"flat-euclidean",
          "constant-one-form",
          "space-form",
          "linear-field",
          "flat+const-b+dilation",
          "flat+const-b+rotation",
          "flat+const-b+dilation+rotation",
          "flat+const-b+moebius"};
}

Scenario builtin(const std::string& name, const BuiltinParams& params) {
  const int n = params.n;
  if (n < 2) throw ConfigError("builtin scenarios need dimension >= 2");
  Vector b0 = params.b0.value_or(default_b0(n));
  if (b0.size() != n) throw ConfigError("one-form coefficients must match the dimension");

  Scenario sc;
  sc.name = name;
  sc.phi = params.phi.value_or(PhiFamily::kropina());
  sc.domain = DomainBox::cube(n, 0.5);
  sc.a = flat_metric(n);
  sc.b = const_oneform(b0);

  auto expect_const_factor = [&sc](double c0) {
    sc.expected.factor = [c0](const Vector&) { return c0; };
    sc.expected.homothetic = true;
    sc.expected.killing = (c0 == 0.0);
  };

  if (name == "flat-euclidean" || name == "constant-one-form") {
    sc.V = zero_field(n);
    expect_const_factor(0.0);
    sc.expected.einstein_kappa = 0.0;
    return sc;
  }

  if (name == "space-form") {
    const double mu = params.mu;
    if (mu == 0.0) throw ConfigError("space-form needs mu != 0");
    sc.a = spaceform_metric(n, mu);
    sc.V = zero_field(n);
    sc.domain = shrink_until(sc.domain,
                             [mu](const Vector& x) { return 1.0 + mu * x.squaredNorm() >= 0.1; },
                             "metric positivity (1 + mu |x|^2 > 0)");
    expect_const_factor(0.0);
    sc.expected.einstein_kappa = (n - 1) * mu;
    return sc;
  }

  if (name == "linear-field") {
    Matrix Q = params.Q.value_or(Matrix::Zero(n, n));
    if (Q.rows() != n || Q.cols() != n) throw ConfigError("Q must be n x n");
    require_antisymmetric(Q);
    Vector a0 = params.a0.value_or(Vector::Zero(n));
    if (a0.size() != n) throw ConfigError("a0 must match the dimension");
    sc.V = linear_field(n, params.lambda, Q, a0);
    if ((Q * b0).norm() <= 1e-14) {
      expect_const_factor(params.lambda / 2.0);
      sc.expected.killing = (params.lambda == 0.0);
      sc.expected.tau = [l = params.lambda](const Vector&) { return l; };
    }
    return sc;
  }

  if (name == "flat+const-b+dilation") {
    sc.V = linear_field(n, params.lambda, Matrix::Zero(n, n), Vector::Zero(n));
    expect_const_factor(params.lambda / 2.0);
    sc.expected.tau = [l = params.lambda](const Vector&) { return l; };
    return sc;
  }

  if (name == "flat+const-b+rotation" || name == "flat+const-b+dilation+rotation") {
    if (n < 3 && !params.b0 && !params.Q)
      throw ConfigError("rotation scenarios need n >= 3 so the one-form can sit in ker Q");
    Matrix Q = params.Q.value_or(default_rotation(n));
    require_antisymmetric(Q);
    if (!params.b0 && n >= 3) {
      b0 = Vector::Zero(n);
      b0[n - 1] = 1.0;
      sc.b = const_oneform(b0);
    }
    if ((Q * b0).norm() > 1e-12)
      throw ConfigError("one-form must lie in the kernel of the rotation generator");
    const double lambda = name == "flat+const-b+rotation" ? 0.0 : params.lambda;
    sc.V = linear_field(n, lambda, Q, Vector::Zero(n));
    expect_const_factor(lambda / 2.0);
    sc.expected.tau = [lambda](const Vector&) { return lambda; };
    return sc;
  }

  if (name == "flat+const-b+moebius") {
    Vector k = params.k.value_or(Vector::Zero(n));
    if (!params.k) k[1] = 1.0;
    if (k.size() != n) throw ConfigError("moebius parameter k must match the dimension");
    sc.V = moebius_field(k);
    sc.expected.homothetic = false;  // not conformal for the singular families at all
    return sc;
  }

  std::string known;
  for (const auto& s : builtin_names()) known += (known.empty() ? "" : ", ") + s;
  throw ConfigError("unknown builtin scenario '" + name + "' (known: " + known + ")");
}

Scenario random_polynomial_scenario(int n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("random scenario needs dimension >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  // All monomials of degree <= 2.
  std::vector<std::vector<int>> monos;
  monos.push_back(std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    monos.push_back(e);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::vector<int> e(n, 0);
      e[i] += 1;
      e[j] += 1;
      monos.push_back(e);
    }

  auto rand_poly = [&](double scale) {
    Polynomial p(n);
    for (const auto& e : monos) p.add_term(scale * uni(rng), e);
    return p;
  };

  // Perturbation small enough to keep the metric positive definite on the box.
  std::vector<Polynomial> sym(n * n, Polynomial(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Polynomial p = rand_poly(0.04);
      sym[i * n + j] = p;
      sym[j * n + i] = p;
    }
  std::vector<Rational> entries;
  entries.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      entries.emplace_back(i == j ? poly_const(n, 1.0) + sym[i * n + j] : sym[i * n + j]);

  Scenario sc;
  sc.name = "random-poly(n=" + std::to_string(n) + ",seed=" + std::to_string(seed) + ")";
  sc.a = metric_from(std::move(entries), n);

  std::vector<Rational> bents, vents;
  for (int i = 0; i < n; ++i) bents.emplace_back(rand_poly(0.3) + poly_const(n, i == 0 ? 1.0 : 0.0));
  for (int i = 0; i < n; ++i) vents.emplace_back(rand_poly(0.5));
  sc.b.components = map_from_rationals(std::move(bents), n);
  sc.V.components = map_from_rationals(std::move(vents), n);
  sc.phi = PhiFamily::kropina();
  sc.domain = DomainBox::cube(n, 0.5);
  return sc;
}

}  // namespace cvf
