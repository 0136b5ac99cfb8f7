#include <cvf/sampling.hpp>

#include <cmath>

namespace cvf {

std::vector<Vector> sample_points(const DomainBox& box, int count, std::mt19937_64& rng,
                                  double margin) {
  const int n = box.dim();
  for (int i = 0; i < n; ++i)
    if (box.upper[i] - box.lower[i] <= 2 * margin)
      throw DomainViolation("domain box too small for the finite-difference margin");
  std::vector<Vector> pts;
  pts.reserve(count);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < count; ++k) {
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      const double lo = box.lower[i] + margin, hi = box.upper[i] - margin;
      x[i] = lo + (hi - lo) * uni(rng);
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

std::vector<Vector> sample_rays(const MetricField& a, const OneFormField& b, const PhiFamily& phi,
                                const Vector& x, int count, std::mt19937_64& rng,
                                double s_margin, int max_retries) {
  Matrix av = a.value(x);
  Vector bv = b.value(x);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vector> rays;
  rays.reserve(count);

  const bool positive_only =
      (phi.kind() == PhiFamily::Kind::MKropina || phi.kind() == PhiFamily::Kind::MKropinaType) &&
      !phi.has_integer_m();
  const bool nonzero_only = phi.kind() == PhiFamily::Kind::MKropina ||
                            phi.kind() == PhiFamily::Kind::MKropinaType ||
                            phi.kind() == PhiFamily::Kind::ExpType;

  int rejections = 0;
  while (static_cast<int>(rays.size()) < count) {
    Vector y(x.size());
    for (int i = 0; i < y.size(); ++i) y[i] = gauss(rng);
    const double len = y.norm();
    if (len < 1e-12) continue;
    y /= len;

    const double alpha = std::sqrt(y.dot(av * y));
    const double beta = bv.dot(y);
    const double s = beta / alpha;

    bool ok = phi.beta_admissible(beta);
    if (ok && nonzero_only && std::abs(s) < s_margin) ok = false;
    if (ok && positive_only && s < s_margin) ok = false;
    // F <= 0 rays belong to the singular domain even where phi itself is
    // defined (odd powers, exp family on beta < 0). The upper bound keeps
    // F^2 and its difference stencils representable: near the singular set
    // the exp family grows like e^{1/s^2} and overflows long before s = 0.
    if (ok) {
      const double p = phi.value(s);
      if (!(p > 1e-6 && p < 1e6)) ok = false;
    }

    if (!ok) {
      if (++rejections > max_retries)
        throw DomainViolation(
            "could not sample an admissible ray after " + std::to_string(max_retries) +
            " retries (singular-domain rule of " + phi.name() + ")");
      continue;
    }
    rejections = 0;
    rays.push_back(std::move(y));
  }
  return rays;
}

}  // namespace cvf
