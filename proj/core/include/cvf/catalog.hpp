#pragma once

#include <cvf/metrics.hpp>
#include <cvf/polynomial.hpp>

#include <cstdint>
#include <optional>

namespace cvf {

// Ground truth a scenario carries for itself, when known in closed form.
struct Expected {
  std::optional<bool> homothetic;
  std::optional<bool> killing;
  std::optional<double> einstein_kappa;
  std::function<double(const Vector&)> factor;  // conformal factor c(x)
  std::function<double(const Vector&)> tau;     // scalar of the two-parameter fits
};

struct Example1Params {
  enum class Variant { A, B };
  int n = 2;
  double mu = -1.0;
  double tau = 0.0;
  Vector gamma;
  Vector eta;
  Matrix Q;  // constant antisymmetric matrix
  Variant variant = Variant::A;
};

struct Scenario {
  std::string name;
  MetricField a;
  OneFormField b;
  VectorFieldOnM V;
  PhiFamily phi = PhiFamily::kropina();
  DomainBox domain;
  Expected expected;
  std::optional<Example1Params> example1;

  AlphaBetaMetric metric() const { return {a, b, phi}; }
};

// Conformally flat metric a = 4 delta / (1 + mu |x|^2)^2 with a closed unit
// one-form b = f(c) dc and the explicit conformal field of the construction.
// The conformal factor is
//   c(x) = [tau (1 - mu |x|^2) + <mu gamma + eta, x>] / (1 + mu |x|^2)
// and the parameters must satisfy the coupling condition
// Q eta = -mu (4 tau gamma + Q gamma), the norm condition
// |eta|^2 = mu (mu |gamma|^2 - 4 tau^2), plus per variant:
//   A: f^2 = -1/(mu c^2), requiring <eta, gamma> = -mu |gamma|^2 and mu < 0
//   B: f^2 = 2 / (mu (<eta,gamma> + mu |gamma|^2 - 2 c^2)), requiring tau = 0
// The degenerate branch eta = -mu gamma forces c = 0; there b is built as the
// exact unit-norm closed form of a boundary potential (mu < 0, Q = 0 only)
// and the field is Killing.
// The domain starts at |x_i| <= 0.5 and is shrunk until the admissibility
// conditions hold with margin 0.1 on a probe grid.
Scenario build_example1(const Example1Params& p);

// Relative residual of f'(c) = 2 (c - tau) f / (2 tau c - 2 c^2 +
// mu |gamma|^2 + <eta, gamma>) for the variant's closed-form f.
double f_ode_residual(const Example1Params& p, double c);

struct BuiltinParams {
  int n = 2;
  double lambda = 0.8;  // dilation coefficient
  double mu = 1.0;      // space-form curvature parameter
  int eps = +1;
  std::optional<Vector> b0;  // constant one-form, default e1
  std::optional<Matrix> Q;   // antisymmetric generator
  std::optional<Vector> k;   // moebius parameter, default e2
  std::optional<Vector> a0;  // translation part of linear-field
  std::optional<PhiFamily> phi;  // default kropina
};

// Named regression scenarios; unknown names raise ConfigError.
Scenario builtin(const std::string& name, const BuiltinParams& params = {});
std::vector<std::string> builtin_names();

// a = id + small quadratic perturbation (positive definite on the box),
// quadratic b and V, all with exact jets. Deterministic in the seed.
Scenario random_polynomial_scenario(int n, std::uint64_t seed);

}  // namespace cvf
