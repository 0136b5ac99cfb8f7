// Acceptance gate: one line per criterion with the measured quantities.
// Exit code is the number of failed criteria.

#include <cvf/catalog.hpp>
#include <cvf/classify.hpp>
#include <cvf/conformal.hpp>
#include <cvf/runner.hpp>
#include <cvf/sampling.hpp>

#include <cmath>
#include <cstdio>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

using namespace cvf;

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3le", v);
  return buf;
}

PhaseFunction alpha2_phase(const MetricField& a) {
  PhaseFunction f;
  f.eval = [a](const Vector& x, const Vector& y) { return y.dot(a.value(x) * y); };
  return f;
}

PhaseFunction beta_phase(const OneFormField& b) {
  PhaseFunction f;
  f.eval = [b](const Vector& x, const Vector& y) { return b.value(x).dot(y); };
  return f;
}

std::vector<Vector> unit_dirs(int n, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vector> out;
  while (static_cast<int>(out.size()) < count) {
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = gauss(rng);
    if (y.norm() < 1e-8) continue;
    out.push_back(y / y.norm());
  }
  return out;
}

Example1Params ex1_params(char which, int n) {
  Example1Params p;
  p.n = n;
  p.gamma = Vector::Zero(n);
  p.gamma[0] = 1.0;
  p.eta = Vector::Zero(n);
  p.Q = Matrix::Zero(n, n);
  if (which == 'A') {
    p.mu = -1.0;
    p.tau = 0.3;
    p.eta[0] = 1.0;
    p.eta[1] = 0.6;
    p.Q(0, 1) = 2.0;
    p.Q(1, 0) = -2.0;
    p.variant = Example1Params::Variant::A;
  } else if (which == 'B') {
    p.mu = 1.0;
    p.tau = 0.0;
    p.eta[1] = 1.0;
    p.variant = Example1Params::Variant::B;
  } else {  // degenerate branch: eta = -mu gamma
    p.mu = -1.0;
    p.tau = 0.0;
    p.eta[0] = 1.0;
    p.variant = Example1Params::Variant::A;
  }
  return p;
}

struct Gate {
  int failures = 0;
  int index = 0;
  void line(const std::string& label, bool ok, const std::string& detail) {
    ++index;
    std::printf("[%s] %2d  %-38s %s\n", ok ? "PASS" : "FAIL", index, label.c_str(),
                detail.c_str());
    if (!ok) ++failures;
  }
};

// 1. Complete lift of alpha^2 and beta against the tensor data S, M on
//    randomized polynomial scenarios, pure central-4 differences.
void criterion_lift_identity(Gate& g) {
  DiffConfig cfg;
  cfg.scheme = Scheme::Central4;
  double worst = 0;
  for (int i = 0; i < 5; ++i) {
    const int n = (i % 2 == 0) ? 2 : 3;
    Scenario sc = random_polynomial_scenario(n, 100 + i);
    PhaseFunction fa = alpha2_phase(sc.a);
    PhaseFunction fb = beta_phase(sc.b);
    std::mt19937_64 rng(500 + i);
    for (const Vector& x : sample_points(sc.domain, 10, rng, 0.02)) {
      LieData ld = lie_data(sc.a, sc.b, sc.V, x, cfg);
      for (const Vector& y : unit_dirs(n, 10, rng)) {
        TangentSample ts{x, y};
        const double da = std::abs(complete_lift_apply(sc.V, fa, ts, cfg) - y.dot(ld.S * y));
        const double db = std::abs(complete_lift_apply(sc.V, fb, ts, cfg) - ld.M.dot(y));
        worst = std::max({worst, da, db});
      }
    }
  }
  g.line("lift identity, 5 random scenarios", worst <= 1e-6,
         "max |V^c - tensor| = " + sci(worst) + " (tol 1e-6, 100 samples each)");
}

// 2. Dilation V = lambda x with constant unit b: every family must recover
//    c = lambda/2 (and tau = lambda) with near-exact residuals.
void criterion_positive_controls(Gate& g) {
  DiffConfig cfg;
  BuiltinParams bp;
  bp.n = 2;
  bp.lambda = 0.8;
  Scenario sc = builtin("flat+const-b+dilation", bp);
  std::mt19937_64 rng(21);
  auto points = sample_points(sc.domain, 20, rng, 0.01);

  double worst_res = 0, worst_par = 0;
  auto record = [&](const ConformalFit& f, bool has_tau) {
    worst_res = std::max({worst_res, f.residual_S, f.residual_M});
    worst_par = std::max(worst_par, std::abs(f.c_hat - 0.4));
    if (has_tau) worst_par = std::max(worst_par, std::abs(*f.tau_hat - 0.8));
  };
  for (const Vector& x : points) {
    record(fit_conformal(FitFamily::kropina_unit_b(), sc.a, sc.b, sc.V, x, cfg, 1e-9), false);
    record(fit_conformal(FitFamily::m_kropina_type(2.0, 1.0), sc.a, sc.b, sc.V, x, cfg, 1e-9),
           true);
    record(fit_conformal(FitFamily::exp_type(+1), sc.a, sc.b, sc.V, x, cfg, 1e-9), true);
    record(fit_conformal(FitFamily::exp_type(-1), sc.a, sc.b, sc.V, x, cfg, 1e-9), true);
  }
  g.line("positive controls c = lambda/2", worst_res <= 1e-9 && worst_par <= 1e-9,
         "max residual = " + sci(worst_res) + ", max parameter error = " + sci(worst_par) +
             " (tol 1e-9)");
}

// 3. Moebius field with constant b: the one-form equation must fail visibly
//    at generic points.
void criterion_negative_control(Gate& g) {
  DiffConfig cfg;
  BuiltinParams bp;
  bp.n = 2;
  Scenario sc = builtin("flat+const-b+moebius", bp);
  std::mt19937_64 rng(33);
  double min_m = 1e300;
  int kept = 0;
  for (const Vector& x : sample_points(sc.domain, 25, rng, 0.01)) {
    if (std::abs(x[0]) < 0.05) continue;  // generic points only
    ConformalFit f = fit_conformal(FitFamily::kropina_unit_b(), sc.a, sc.b, sc.V, x, cfg, 1e-6);
    min_m = std::min(min_m, f.residual_M);
    ++kept;
  }
  g.line("negative control rejects moebius", kept >= 15 && min_m >= 1e-2,
         "min residual_M = " + sci(min_m) + " over " + std::to_string(kept) +
             " generic points (needs >= 1e-2)");
}

// 4. Full reproduction of the explicit construction, both variants, both
//    dimensions, plus the degenerate branch eta = -mu gamma.
void criterion_example1(Gate& g) {
  DiffConfig cfg;
  double max_b2 = 0, max_closed = 0, max_douglas = 0, max_fit = 0, max_crel = 0;
  bool verdicts_ok = true;
  std::string verdict_note;

  struct Case {
    char which;
    int n;
  };
  for (Case cs : {Case{'A', 2}, Case{'A', 3}, Case{'B', 2}, Case{'B', 3}, Case{'D', 2},
                  Case{'D', 3}}) {
    Example1Params p = ex1_params(cs.which, cs.n);
    Scenario sc = build_example1(p);
    const bool expect_hom = (p.eta + p.mu * p.gamma).norm() == 0.0;
    std::mt19937_64 rng(61);
    FactorField ff;
    for (const Vector& x : sample_points(sc.domain, 30, rng, 0.01)) {
      BetaInvariants inv = beta_invariants(sc.a, sc.b, x, cfg);
      max_b2 = std::max(max_b2, std::abs(inv.b2 - 1.0));
      max_closed = std::max(max_closed, closedness_residual(sc.b, x, cfg, 1e-7).residual);
      max_douglas =
          std::max(max_douglas, douglas_kropina_residual(sc.a, sc.b, x, cfg, 1e-7).residual);
      ConformalFit f = fit_conformal(FitFamily::kropina_unit_b(), sc.a, sc.b, sc.V, x, cfg, 1e-5);
      max_fit = std::max({max_fit, f.residual_S, f.residual_M});
      const double c_exp = sc.expected.factor(x);
      max_crel = std::max(max_crel,
                          std::abs(f.c_hat - c_exp) / std::max(std::abs(c_exp), 1e-2));
      ff.add(x, f.c_hat);
    }
    HomothetyReport h = homothety_test(ff, 1e-6);
    const bool hom = h.verdict == HomothetyVerdict::Homothetic;
    if (h.verdict == HomothetyVerdict::Inconclusive || hom != expect_hom) {
      verdicts_ok = false;
      verdict_note += std::string(1, cs.which) + std::to_string(cs.n) + " ";
    }
  }
  const bool ok = max_b2 <= 1e-9 && max_closed <= 1e-7 && max_douglas <= 1e-7 &&
                  max_fit <= 1e-5 && max_crel <= 1e-5 && verdicts_ok;
  g.line("construction reproduced (A/B/degenerate)", ok,
         "b2 " + sci(max_b2) + ", closed " + sci(max_closed) + ", douglas " + sci(max_douglas) +
             ", fit " + sci(max_fit) + ", c rel " + sci(max_crel) +
             (verdicts_ok ? ", verdicts agree" : ", verdict mismatch: " + verdict_note));
}

// 5. Compatibility ODE: the closed-form solution satisfies it and the
//    constant triple misses by exactly -+ 1/t^2.
void criterion_ode(Gate& g) {
  double worst_special = 0, worst_identity = 0;
  for (int eps : {+1, -1}) {
    DeformationTriple sp = DeformationTriple::special(eps);
    DeformationTriple id = DeformationTriple::identity(eps);
    for (int i = 0; i < 100; ++i) {
      const double t = 0.5 + 2.5 * static_cast<double>(i) / 99.0;
      auto [su, sv] = deformation_ode_residual(sp, t);
      worst_special = std::max({worst_special, std::abs(su), std::abs(sv)});
      auto [iu, iv] = deformation_ode_residual(id, t);
      worst_identity = std::max({worst_identity, std::abs(iu - eps / (t * t)),
                                 std::abs(iv + 1.0 / (t * t))});
    }
  }
  g.line("deformation ODE", worst_special <= 1e-10 && worst_identity <= 1e-12,
         "special " + sci(worst_special) + " (tol 1e-10), identity offset " +
             sci(worst_identity) + " (tol 1e-12)");
}

// 6. Deformed lift chain on the exp-type dilation scenario.
void criterion_deformation_chain(Gate& g) {
  DiffConfig cfg;
  double worst_lift = 0, worst_b2 = 0;
  for (int eps : {+1, -1}) {
    BuiltinParams bp;
    bp.n = 2;
    bp.lambda = 0.8;
    bp.phi = PhiFamily::exp_type(eps);
    Scenario sc = builtin("flat+const-b+dilation", bp);
    DeformationTriple d = DeformationTriple::special(eps);
    std::mt19937_64 rng(47);
    for (const Vector& x : sample_points(sc.domain, 12, rng, 0.01)) {
      auto rays = sample_rays(sc.a, sc.b, sc.phi, x, 6, rng);
      DeformedLiftResult r = deformed_lift_check(sc.a, sc.b, sc.V, d, x, rays, cfg, 1e-8);
      worst_lift = std::max({worst_lift, r.res_alpha2, r.res_beta,
                             r.res_alpha2_special.value_or(0.0),
                             r.res_beta_special.value_or(0.0)});
      worst_b2 = std::max(worst_b2, lift_b2_residual(sc.a, sc.b, sc.V, x, eps, cfg, 1e-8));
    }
  }
  g.line("deformed lift chain", worst_lift <= 1e-8 && worst_b2 <= 1e-8,
         "lift " + sci(worst_lift) + ", b^2 lift " + sci(worst_b2) + " (tol 1e-8)");
}

// 7. Factor gap: constant on a scenario satisfying the hypotheses, and the
//    beta-conformality hypothesis visibly fails on the construction.
void criterion_factor_gap(Gate& g) {
  DiffConfig cfg;
  BuiltinParams bp;
  bp.n = 3;
  bp.lambda = 0.7;
  Scenario pos = builtin("flat+const-b+dilation+rotation", bp);
  std::mt19937_64 rng(71);
  auto points = sample_points(pos.domain, 50, rng, 0.01);
  FactorGapReport rep = factor_gap_test(pos.a, pos.b, pos.V, points, cfg, 1e-6);

  Scenario ex = build_example1(ex1_params('B', 2));
  auto expoints = sample_points(ex.domain, 20, rng, 0.01);
  FactorGapReport neg = factor_gap_test(ex.a, ex.b, ex.V, expoints, cfg, 1e-6);

  const bool ok = rep.applicable && rep.conclusion_holds && rep.gap_spread <= 1e-8 &&
                  !neg.applicable && neg.hyp_beta > 1e-2;
  g.line("factor gap constancy + hypothesis flag", ok,
         "gap spread " + sci(rep.gap_spread) + " over 50 points (tol 1e-8); construction beta "
         "hypothesis residual " + sci(neg.hyp_beta) + " (needs > 1e-2)");
}

// 8. Covariant-derivative classification conditions.
void criterion_classification(Gate& g) {
  DiffConfig cfg;
  const int n = 2;
  MetricField flat;
  {
    BuiltinParams bp;
    bp.n = n;
    Scenario sc = builtin("constant-one-form", bp);
    flat = sc.a;
  }
  OneFormField unit_b;
  {
    BuiltinParams bp;
    bp.n = n;
    unit_b = builtin("constant-one-form", bp).b;
  }
  // Perturbed one-form (1 + 0.1 x2) dx1: no longer parallel.
  OneFormField bent;
  {
    Polynomial p0(n);
    p0.add_term(1.0, {0, 0});
    p0.add_term(0.1, {0, 1});
    std::vector<Rational> comps;
    comps.emplace_back(std::move(p0));
    comps.emplace_back(Polynomial::constant(n, 0.0));
    bent.components = map_from_rationals(std::move(comps), n);
  }

  std::mt19937_64 rng(81);
  DomainBox box = DomainBox::cube(n, 0.5);
  double par_m = 0, par_e = 0, par_tau = 0;
  double bent_m = 1e300, bent_e = 1e300;
  for (const Vector& x : sample_points(box, 20, rng, 0.01)) {
    ClassReport m = mkropina_bd_residual(flat, unit_b, x, 2.0, cfg, 1e-9);
    ClassReport e = exp_bd_residual(flat, unit_b, x, +1, cfg, 1e-9);
    par_m = std::max(par_m, m.residual);
    par_e = std::max(par_e, e.residual);
    par_tau = std::max({par_tau, std::abs(m.fitted.value_or(0.0)),
                        std::abs(e.fitted.value_or(0.0))});
    bent_m = std::min(bent_m, mkropina_bd_residual(flat, bent, x, 2.0, cfg, 1e-3).residual);
    bent_e = std::min(bent_e, exp_bd_residual(flat, bent, x, +1, cfg, 1e-3).residual);
  }

  BuiltinParams sp;
  sp.n = 3;
  sp.mu = 1.0;
  Scenario sf = builtin("space-form", sp);
  std::mt19937_64 rng3(82);
  double sf_res = 0, flat_res = 0;
  for (const Vector& x : sample_points(sf.domain, 15, rng3, 0.01))
    sf_res = std::max(sf_res, einstein_residual(sf.a, x, cfg, 1e-4).residual);
  for (const Vector& x : sample_points(box, 15, rng3, 0.01))
    flat_res = std::max(flat_res, einstein_residual(flat, x, cfg, 1e-4).residual);

  const bool ok = par_m <= 1e-9 && par_e <= 1e-9 && par_tau <= 1e-9 && bent_m >= 1e-3 &&
                  bent_e >= 1e-3 && sf_res <= 1e-4 && flat_res <= 1e-14;
  g.line("classification conditions", ok,
         "parallel " + sci(std::max(par_m, par_e)) + " (tau " + sci(par_tau) +
             "), perturbed min " + sci(std::min(bent_m, bent_e)) + " (needs >= 1e-3), einstein " +
             sci(sf_res) + ", flat " + sci(flat_res));
}

// 9. Two runs of one config give byte-identical reports up to the timestamp.
void criterion_determinism(Gate& g) {
  RunConfig rc = parse_run_config(R"({
    "scenario": {"type": "builtin", "name": "flat+const-b+dilation", "params": {"n": 2, "lambda": 0.8}},
    "checks": ["theorem1", "lift-identity", "closed", "killing", "ode-y42"],
    "samples": 10,
    "rays": 4,
    "seed": 42
  })");
  auto strip = [](std::string s) {
    return std::regex_replace(s, std::regex("\"generated_at\": \"[^\"]*\""),
                              "\"generated_at\": \"\"");
  };
  const std::string r1 = strip(run(rc).to_json());
  const std::string r2 = strip(run(rc).to_json());
  g.line("deterministic reports", r1 == r2,
         r1 == r2 ? "two runs byte-identical modulo timestamp"
                  : "reports differ beyond the timestamp");
}

// 10. The ray-sampled defect and the tensor fit agree on every scenario above.
void criterion_oracle_agreement(Gate& g) {
  DiffConfig cfg;
  const double tol = 1e-6;
  int disagreements = 0, compared = 0;
  double worst_gap = 0;

  struct Row {
    Scenario sc;
    FitFamily fam;
    bool generic_filter = false;
  };
  std::vector<Row> rows;
  {
    BuiltinParams bp;
    bp.n = 2;
    bp.lambda = 0.8;
    rows.push_back({builtin("flat+const-b+dilation", bp), FitFamily::kropina_unit_b()});
    BuiltinParams be = bp;
    be.phi = PhiFamily::exp_type(+1);
    rows.push_back({builtin("flat+const-b+dilation", be), FitFamily::exp_type(+1)});
    BuiltinParams br;
    br.n = 3;
    rows.push_back({builtin("flat+const-b+rotation", br), FitFamily::kropina_unit_b()});
    BuiltinParams bm;
    bm.n = 2;
    rows.push_back({builtin("flat+const-b+moebius", bm), FitFamily::kropina_unit_b(), true});
    rows.push_back({build_example1(ex1_params('A', 2)), FitFamily::kropina_unit_b()});
    rows.push_back({build_example1(ex1_params('B', 2)), FitFamily::kropina_unit_b()});
  }

  std::mt19937_64 rng(91);
  for (const Row& row : rows) {
    AlphaBetaMetric fm = row.sc.metric();
    for (const Vector& x : sample_points(row.sc.domain, 8, rng, 0.01)) {
      if (row.generic_filter && std::abs(x[0]) < 0.05) continue;
      ConformalFit fit =
          fit_conformal(row.fam, row.sc.a, row.sc.b, row.sc.V, x, cfg, tol);
      auto rays = sample_rays(row.sc.a, row.sc.b, row.sc.phi, x, 8, rng);
      RayFit ray = direct_defect(fm, row.sc.V, x, rays, cfg);
      const bool ray_conformal = ray.defect <= tol;
      ++compared;
      if (fit.conformal != ray_conformal) {
        ++disagreements;
        continue;
      }
      if (fit.conformal)
        worst_gap = std::max(worst_gap, std::abs(fit.c_hat - ray.c_hat) /
                                            std::max(1.0, std::abs(fit.c_hat)));
    }
  }
  const bool ok = disagreements == 0 && worst_gap <= 1e-6 && compared >= 40;
  g.line("ray oracle agrees with tensor fits", ok,
         std::to_string(disagreements) + " verdict disagreements over " +
             std::to_string(compared) + " fits, max factor gap " + sci(worst_gap));
}

}  // namespace

int main() {
  Gate g;
  criterion_lift_identity(g);
  criterion_positive_controls(g);
  criterion_negative_control(g);
  criterion_example1(g);
  criterion_ode(g);
  criterion_deformation_chain(g);
  criterion_factor_gap(g);
  criterion_classification(g);
  criterion_determinism(g);
  criterion_oracle_agreement(g);
  std::printf("%d of %d criteria passed\n", g.index - g.failures, g.index);
  return g.failures;
}
