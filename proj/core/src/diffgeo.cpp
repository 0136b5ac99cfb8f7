#include <cvf/diffgeo.hpp>

#include <Eigen/Cholesky>
#include <cmath>

namespace cvf {

namespace {

Vector eval_checked(const SmoothMap& f, const Vector& x) {
  Vector v = f.eval(x);
  if (v.size() != f.dim_out) throw NumericError("evaluator output size mismatch");
  require_finite(v, "SmoothMap::eval");
  return v;
}

Vector shifted(const Vector& x, int i, double dx) {
  Vector z = x;
  z[i] += dx;
  return z;
}

// Central first-derivative stencils; columns of the result follow first(c,k).
Matrix fd_first(const SmoothMap& f, const Vector& x, const DiffConfig& cfg, bool fourth) {
  const int n = f.dim_in, m = f.dim_out;
  Matrix d(m, n);
  for (int k = 0; k < n; ++k) {
    const double h = cfg.first_step(x[k]);
    if (fourth) {
      d.col(k) = (eval_checked(f, shifted(x, k, -2 * h)) - 8.0 * eval_checked(f, shifted(x, k, -h)) +
                  8.0 * eval_checked(f, shifted(x, k, h)) - eval_checked(f, shifted(x, k, 2 * h))) /
                 (12.0 * h);
    } else {
      d.col(k) =
          (eval_checked(f, shifted(x, k, h)) - eval_checked(f, shifted(x, k, -h))) / (2.0 * h);
    }
  }
  return d;
}

// Pure finite-difference second derivatives of the evaluator.
std::vector<Matrix> fd_second(const SmoothMap& f, const Vector& x, const Vector& f0,
                              const DiffConfig& cfg, bool fourth) {
  const int n = f.dim_in, m = f.dim_out;
  std::vector<Matrix> out(m, Matrix::Zero(n, n));

  auto put = [&](int k, int l, const Vector& val) {
    for (int c = 0; c < m; ++c) {
      out[c](k, l) = val[c];
      out[c](l, k) = val[c];
    }
  };

  for (int k = 0; k < n; ++k) {
    const double hk = cfg.second_step(x[k]);
    Vector diag;
    if (fourth) {
      diag = (-eval_checked(f, shifted(x, k, -2 * hk)) + 16.0 * eval_checked(f, shifted(x, k, -hk)) -
              30.0 * f0 + 16.0 * eval_checked(f, shifted(x, k, hk)) -
              eval_checked(f, shifted(x, k, 2 * hk))) /
             (12.0 * hk * hk);
    } else {
      diag = (eval_checked(f, shifted(x, k, hk)) - 2.0 * f0 +
              eval_checked(f, shifted(x, k, -hk))) /
             (hk * hk);
    }
    put(k, k, diag);

    for (int l = k + 1; l < n; ++l) {
      const double hl = cfg.second_step(x[l]);
      Vector mixed = Vector::Zero(m);
      if (fourth) {
        // Tensor product of two 4-point first-derivative stencils.
        static const double w[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
        static const int off[4] = {-2, -1, 1, 2};
        for (int p = 0; p < 4; ++p)
          for (int q = 0; q < 4; ++q) {
            Vector z = x;
            z[k] += off[p] * hk;
            z[l] += off[q] * hl;
            mixed += w[p] * w[q] * eval_checked(f, z);
          }
        mixed /= hk * hl;
      } else {
        auto at = [&](int sk, int sl) {
          Vector z = x;
          z[k] += sk * hk;
          z[l] += sl * hl;
          return eval_checked(f, z);
        };
        mixed = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hk * hl);
      }
      put(k, l, mixed);
    }
  }
  return out;
}

// Second derivatives as a first-order difference of an analytic jacobian.
std::vector<Matrix> fd_of_jacobian(const SmoothMap& f, const Vector& x, const DiffConfig& cfg) {
  const int n = f.dim_in, m = f.dim_out;
  std::vector<Matrix> out(m, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    const double h = cfg.first_step(x[k]);
    Matrix dk = (f.jacobian(shifted(x, k, -2 * h)) - 8.0 * f.jacobian(shifted(x, k, -h)) +
                 8.0 * f.jacobian(shifted(x, k, h)) - f.jacobian(shifted(x, k, 2 * h))) /
                (12.0 * h);
    require_finite(dk, "SmoothMap::jacobian");
    for (int c = 0; c < m; ++c) out[c].col(k) = dk.row(c).transpose();
  }
  for (int c = 0; c < m; ++c) out[c] = 0.5 * (out[c] + out[c].transpose()).eval();
  return out;
}

}  // namespace

Jet jet(const SmoothMap& f, const Vector& x, int order, const DiffConfig& cfg) {
  if (order < 0 || order > 2) throw PreconditionError("jet order must be 0, 1 or 2");
  if (x.size() != f.dim_in) throw PreconditionError("jet: point dimension mismatch");

  Jet out;
  out.value = eval_checked(f, x);
  if (order == 0) return out;

  const bool analytic = cfg.scheme == Scheme::AnalyticWhenAvailable;
  const bool fourth = cfg.scheme != Scheme::Central2;

  if (analytic && f.has_jacobian()) {
    out.first = f.jacobian(x);
    require_finite(out.first, "SmoothMap::jacobian");
  } else {
    out.first = fd_first(f, x, cfg, fourth);
  }
  if (order == 1) return out;

  if (analytic && f.has_hessian()) {
    out.second = f.hessian(x);
    for (auto& h : out.second) require_finite(h, "SmoothMap::hessian");
  } else if (analytic && f.has_jacobian()) {
    out.second = fd_of_jacobian(f, x, cfg);
  } else {
    out.second = fd_second(f, x, out.value, cfg, fourth);
  }
  return out;
}

double jet_disagreement(const SmoothMap& f, const Vector& x, const DiffConfig& cfg) {
  DiffConfig fd = cfg;
  fd.scheme = Scheme::Central4;
  const int order = f.has_hessian() ? 2 : (f.has_jacobian() ? 1 : 0);
  if (order == 0) return 0.0;

  Jet numeric = jet(f, x, order, fd);
  double worst = 0.0;
  auto rel = [](double d, double scale) { return d / std::max(1.0, scale); };

  Matrix ja = f.jacobian(x);
  worst = std::max(worst, rel((ja - numeric.first).cwiseAbs().maxCoeff(),
                              ja.cwiseAbs().maxCoeff()));
  if (order == 2) {
    auto ha = f.hessian(x);
    for (int c = 0; c < f.dim_out; ++c)
      worst = std::max(worst, rel((ha[c] - numeric.second[c]).cwiseAbs().maxCoeff(),
                                  ha[c].cwiseAbs().maxCoeff()));
  }
  return worst;
}

Matrix MetricField::value(const Vector& x) const {
  Vector flat = components.eval(x);
  const int n = dim();
  if (flat.size() != n * n) throw NumericError("metric evaluator output size mismatch");
  require_finite(flat, "MetricField");
  Matrix a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>(flat.data(), n, n);
  return 0.5 * (a + a.transpose());
}

Matrix spd_inverse(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw NumericError("metric not positive definite at the evaluation point");
  return llt.solve(Matrix::Identity(a.rows(), a.cols()));
}

namespace {

// D1[k](i,j) = d_k a_{ij}, symmetrized in (i,j).
std::vector<Matrix> metric_first(const Jet& j, int n) {
  std::vector<Matrix> d(n, Matrix(n, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj)
        d[k](i, jj) = 0.5 * (j.first(i * n + jj, k) + j.first(jj * n + i, k));
  }
  return d;
}

Matrix metric_value(const Jet& j, int n) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) a(i, jj) = j.value[i * n + jj];
  return 0.5 * (a + a.transpose()).eval();
}

std::vector<Matrix> christoffel_from(const Matrix& ainv, const std::vector<Matrix>& da, int n) {
  std::vector<Matrix> G(n, Matrix::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double sum = 0;
        for (int l = 0; l < n; ++l)
          sum += ainv(i, l) * (da[j](l, k) + da[k](l, j) - da[l](j, k));
        G[i](j, k) = 0.5 * sum;
        G[i](k, j) = G[i](j, k);
      }
  return G;
}

}  // namespace

std::vector<Matrix> christoffel(const MetricField& a, const Vector& x, const DiffConfig& cfg) {
  const int n = a.dim();
  Jet j = jet(a.components, x, 1, cfg);
  Matrix av = metric_value(j, n);
  return christoffel_from(spd_inverse(av), metric_first(j, n), n);
}

Matrix covderiv_oneform(const MetricField& a, const OneFormField& w, const Vector& x,
                        const DiffConfig& cfg) {
  const int n = a.dim();
  auto G = christoffel(a, x, cfg);
  Jet jw = jet(w.components, x, 1, cfg);
  Matrix c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double corr = 0;
      for (int k = 0; k < n; ++k) corr += G[k](j, i) * jw.value[k];
      c(i, j) = jw.first(i, j) - corr;
    }
  return c;
}

Matrix covderiv_vector(const MetricField& a, const VectorFieldOnM& v, const Vector& x,
                       const DiffConfig& cfg) {
  const int n = a.dim();
  Jet ja = jet(a.components, x, 1, cfg);
  Matrix av = metric_value(ja, n);
  auto da = metric_first(ja, n);
  auto G = christoffel_from(spd_inverse(av), da, n);

  Jet jv = jet(v.components, x, 1, cfg);
  Vector low = av * jv.value;
  Matrix dlow(n, n);  // dlow(i,j) = d_j (a_{ik} V^k)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < n; ++k) s += da[j](i, k) * jv.value[k] + av(i, k) * jv.first(k, j);
      dlow(i, j) = s;
    }

  Matrix c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double corr = 0;
      for (int k = 0; k < n; ++k) corr += G[k](j, i) * low[k];
      c(i, j) = dlow(i, j) - corr;
    }
  return c;
}

BetaInvariants beta_invariants(const MetricField& a, const OneFormField& b, const Vector& x,
                               const DiffConfig& cfg) {
  BetaInvariants out;
  out.cov = covderiv_oneform(a, b, x, cfg);
  out.r = 0.5 * (out.cov + out.cov.transpose());
  out.s = 0.5 * (out.cov - out.cov.transpose());
  Matrix av = a.value(x);
  Vector bv = b.value(x);
  out.b_up = spd_inverse(av) * bv;
  out.s_vec = out.s.transpose() * out.b_up;
  out.b2 = bv.dot(out.b_up);
  return out;
}

RicciResult ricci(const MetricField& a, const Vector& x, const DiffConfig& cfg) {
  const int n = a.dim();
  Jet j2 = jet(a.components, x, 2, cfg);
  Matrix av = metric_value(j2, n);
  Matrix ainv = spd_inverse(av);
  auto da = metric_first(j2, n);
  auto G = christoffel_from(ainv, da, n);

  // dda[m][l](i,j) = d_m d_l a_{ij}
  std::vector<std::vector<Matrix>> dda(n, std::vector<Matrix>(n, Matrix(n, n)));
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) {
      const Matrix& hij = j2.second[i * n + jj];
      const Matrix& hji = j2.second[jj * n + i];
      for (int m = 0; m < n; ++m)
        for (int l = 0; l < n; ++l) dda[m][l](i, jj) = 0.5 * (hij(m, l) + hji(m, l));
    }

  // dG[m][i](j,k) = d_m Gamma^i_{jk}
  std::vector<Matrix> dainv(n);  // d_m a^{il} = -a^{ip} (d_m a_{pq}) a^{ql}
  for (int m = 0; m < n; ++m) dainv[m] = -ainv * da[m] * ainv;

  std::vector<std::vector<Matrix>> dG(n, std::vector<Matrix>(n, Matrix::Zero(n, n)));
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj)
        for (int k = jj; k < n; ++k) {
          double sum = 0;
          for (int l = 0; l < n; ++l) {
            const double bracket = da[jj](l, k) + da[k](l, jj) - da[l](jj, k);
            const double dbracket = dda[m][jj](l, k) + dda[m][k](l, jj) - dda[m][l](jj, k);
            sum += dainv[m](i, l) * bracket + ainv(i, l) * dbracket;
          }
          dG[m][i](jj, k) = 0.5 * sum;
          dG[m][i](k, jj) = dG[m][i](jj, k);
        }

  RicciResult res;
  res.value = Matrix::Zero(n, n);
  for (int jj = 0; jj < n; ++jj)
    for (int l = 0; l < n; ++l) {
      double v = 0;
      for (int i = 0; i < n; ++i) {
        v += dG[i][i](l, jj) - dG[l][i](i, jj);
        for (int m = 0; m < n; ++m) v += G[i](i, m) * G[m](l, jj) - G[i](l, m) * G[m](i, jj);
      }
      res.value(jj, l) = v;
    }
  res.value = 0.5 * (res.value + res.value.transpose()).eval();

  const bool analytic = cfg.scheme == Scheme::AnalyticWhenAvailable;
  res.low_confidence = !(analytic && (a.components.has_hessian() || a.components.has_jacobian()));
  return res;
}

}  // namespace cvf
