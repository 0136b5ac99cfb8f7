#include <cvf/runner.hpp>

#include <cvf/classify.hpp>
#include <cvf/conformal.hpp>
#include <cvf/sampling.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

namespace cvf {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

// ---------------------------------------------------------------- helpers --

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string iso_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t tag_seed(std::uint64_t seed, const std::string& tag) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return seed ^ h;
}

Matrix unflatten(const Vector& flat, int n) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(flat.data(), n, n);
}

// Plain unit directions; no singular-domain filtering, the lift identity
// involves only alpha and beta.
std::vector<Vector> sphere_dirs(int n, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<Vector> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = gauss(rng);
    const double nrm = y.norm();
    if (nrm < 1e-8) continue;
    out.push_back(y / nrm);
  }
  return out;
}

int scenario_eps(const Scenario& sc) {
  return sc.phi.kind() == PhiFamily::Kind::ExpType ? sc.phi.eps() : +1;
}

double scheme_base_tol(Scheme s) { return s == Scheme::Central2 ? 1e-4 : 1e-6; }

PhaseFunction alpha2_phase(const MetricField& a, const DiffConfig& cfg) {
  PhaseFunction f;
  f.eval = [a](const Vector& x, const Vector& y) { return y.dot(a.value(x) * y); };
  f.grad_x = [a, cfg](const Vector& x, const Vector& y) {
    Jet j = jet(a.components, x, 1, cfg);
    const int n = static_cast<int>(x.size());
    Vector g(n);
    for (int k = 0; k < n; ++k) {
      Vector col = j.first.col(k);
      g[k] = y.dot(unflatten(col, n) * y);
    }
    return g;
  };
  f.grad_y = [a](const Vector& x, const Vector& y) { return Vector(2.0 * (a.value(x) * y)); };
  return f;
}

PhaseFunction beta_phase(const OneFormField& b, const DiffConfig& cfg) {
  PhaseFunction f;
  f.eval = [b](const Vector& x, const Vector& y) { return b.value(x).dot(y); };
  f.grad_x = [b, cfg](const Vector& x, const Vector& y) {
    Jet j = jet(b.components, x, 1, cfg);
    return Vector(j.first.transpose() * y);
  };
  f.grad_y = [b](const Vector& x, const Vector&) { return b.value(x); };
  return f;
}

struct Stats {
  double mx = 0, sum = 0;
  int n = 0;
  void add(double r) {
    mx = std::max(mx, r);
    sum += r;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
};

void finish(CheckResult& res, const Stats& st) {
  res.residual_max = st.mx;
  res.residual_mean = st.mean();
  res.points = st.n;
  res.pass = res.error.empty() && st.mx <= res.tolerance;
}

void spread_metrics(CheckResult& res, const std::string& key, const std::vector<double>& v) {
  if (v.empty()) return;
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double sum = 0;
  for (double x : v) sum += x;
  res.metrics[key + "_mean"] = sum / static_cast<double>(v.size());
  res.metrics[key + "_spread"] = *hi - *lo;
}

// ----------------------------------------------------------------- checks --

void check_lift_identity(CheckResult& res, const Scenario& sc, const DiffConfig& cfg,
                         const std::vector<Vector>& points, int rays, std::mt19937_64& rng) {
  PhaseFunction fa = alpha2_phase(sc.a, cfg);
  PhaseFunction fb = beta_phase(sc.b, cfg);
  Stats st;
  double worst_a = 0, worst_b = 0;
  for (const Vector& x : points) {
    LieData ld = lie_data(sc.a, sc.b, sc.V, x, cfg);
    for (const Vector& y : sphere_dirs(sc.domain.dim(), rays, rng)) {
      TangentSample ts{x, y};
      const double la = complete_lift_apply(sc.V, fa, ts, cfg);
      const double ra = std::abs(la - y.dot(ld.S * y)) / std::max(1.0, std::abs(la));
      const double lb = complete_lift_apply(sc.V, fb, ts, cfg);
      const double rb = std::abs(lb - ld.M.dot(y));
      worst_a = std::max(worst_a, ra);
      worst_b = std::max(worst_b, rb);
      st.add(std::max(ra, rb));
    }
  }
  finish(res, st);
  res.metrics["alpha2_defect_max"] = worst_a;
  res.metrics["beta_defect_max"] = worst_b;
  res.note = "V^c(alpha^2) against S_ij y^i y^j and V^c(beta) against M_i y^i";
}

void check_fit_family(CheckResult& res, const FitFamily& fam, const Scenario& sc,
                      const DiffConfig& cfg, const std::vector<Vector>& points) {
  Stats st;
  FactorField ff;
  double worst_S = 0, worst_M = 0;
  int reduced = 0;
  for (const Vector& x : points) {
    ConformalFit f = fit_conformal(fam, sc.a, sc.b, sc.V, x, cfg, res.tolerance);
    st.add(std::max(f.residual_S, f.residual_M));
    worst_S = std::max(worst_S, f.residual_S);
    worst_M = std::max(worst_M, f.residual_M);
    res.fitted["c"].push_back(f.c_hat);
    if (f.tau_hat) res.fitted["tau"].push_back(*f.tau_hat);
    ff.add(x, f.c_hat);
    if (f.reduced_rank) ++reduced;
  }
  finish(res, st);
  res.metrics["residual_S_max"] = worst_S;
  res.metrics["residual_M_max"] = worst_M;
  spread_metrics(res, "c", res.fitted["c"]);
  if (fam.two_parameter()) spread_metrics(res, "tau", res.fitted["tau"]);
  if (reduced > 0)
    res.warnings.push_back(std::to_string(reduced) + " of " + std::to_string(st.n) +
                           " fits lost rank; minimum-norm solution reported");
  if (res.pass) {
    HomothetyReport h = homothety_test(ff, res.tolerance);
    switch (h.verdict) {
      case HomothetyVerdict::Homothetic:
        res.note = h.killing ? "Killing field (constant factor 0)"
                             : "homothetic (constant factor " + sci(h.mean) + ")";
        break;
      case HomothetyVerdict::NonHomothetic:
        res.note = "conformal with non-constant factor (spread " + sci(h.spread) + ")";
        break;
      case HomothetyVerdict::Inconclusive:
        res.note = "factor constancy not assessed (fewer than 10 points)";
        break;
    }
  } else {
    res.note = "the " + fam.name() + " model does not hold at tolerance";
  }
}

using ClassFn = std::function<ClassReport(const Vector&)>;

void check_classify(CheckResult& res, const ClassFn& fn, const std::string& fitted_key,
                    const std::vector<Vector>& points) {
  Stats st;
  int lowconf = 0;
  for (const Vector& x : points) {
    ClassReport r = fn(x);
    st.add(r.residual);
    if (r.fitted && !fitted_key.empty()) res.fitted[fitted_key].push_back(*r.fitted);
    if (r.low_confidence) ++lowconf;
  }
  finish(res, st);
  if (!fitted_key.empty() && res.fitted.count(fitted_key))
    spread_metrics(res, fitted_key, res.fitted[fitted_key]);
  if (lowconf > 0)
    res.warnings.push_back("curvature relied on nested finite differences at " +
                           std::to_string(lowconf) + " of " + std::to_string(st.n) + " points");
}

void check_lemma51(CheckResult& res, const Scenario& sc, const DiffConfig& cfg,
                   const std::vector<Vector>& points) {
  FactorGapReport g = factor_gap_test(sc.a, sc.b, sc.V, points, cfg, res.tolerance);
  res.points = static_cast<int>(points.size());
  res.fitted["sigma"] = g.sigma;
  res.fitted["tau"] = g.tau;
  res.fitted["rho"] = g.rho;
  std::vector<double> gap(g.sigma.size());
  for (size_t i = 0; i < gap.size(); ++i) gap[i] = g.tau[i] - g.sigma[i];
  res.fitted["gap"] = gap;
  res.metrics["hyp_S_max"] = g.hyp_S;
  res.metrics["hyp_M_max"] = g.hyp_M;
  res.metrics["hyp_beta_max"] = g.hyp_beta;
  res.metrics["gap_mean"] = g.gap_mean;
  res.metrics["gap_spread"] = g.gap_spread;
  res.metrics["applicable"] = g.applicable ? 1.0 : 0.0;
  res.residual_max = g.applicable ? g.gap_spread : 0.0;
  res.residual_mean = res.residual_max;
  res.pass = !g.applicable || g.conclusion_holds;
  if (g.applicable) {
    res.note = "hypotheses hold; tau - sigma has spread " + sci(g.gap_spread) + " about mean " +
               sci(g.gap_mean);
  } else {
    res.note = "hypotheses fail (S " + sci(g.hyp_S) + ", M " + sci(g.hyp_M) + ", beta conformality " +
               sci(g.hyp_beta) + "); constancy of tau - sigma not asserted";
  }
}

void check_vcb2(CheckResult& res, const Scenario& sc, const DiffConfig& cfg,
                const std::vector<Vector>& points) {
  const int eps = scenario_eps(sc);
  const double gate = std::max(res.tolerance, scheme_base_tol(cfg.scheme));
  Stats st;
  for (const Vector& x : points) st.add(lift_b2_residual(sc.a, sc.b, sc.V, x, eps, cfg, gate));
  finish(res, st);
  res.note = std::string("V(b^2) against ") + (eps > 0 ? "+" : "-") + "(tau - 2c) b^4";
}

void check_deform(CheckResult& res, const Scenario& sc, const DiffConfig& cfg,
                  const std::vector<Vector>& points, int rays, std::mt19937_64& rng) {
  const int eps = scenario_eps(sc);
  const DeformationTriple d = DeformationTriple::special(eps);
  const double gate = std::max(res.tolerance, scheme_base_tol(cfg.scheme));
  Stats st;
  double worst_a = 0, worst_b = 0, worst_sa = 0, worst_sb = 0;
  bool special_seen = false;
  for (const Vector& x : points) {
    std::vector<Vector> bundle = sample_rays(sc.a, sc.b, sc.phi, x, rays, rng);
    DeformedLiftResult r = deformed_lift_check(sc.a, sc.b, sc.V, d, x, bundle, cfg, gate);
    double worst = std::max(r.res_alpha2, r.res_beta);
    worst_a = std::max(worst_a, r.res_alpha2);
    worst_b = std::max(worst_b, r.res_beta);
    if (r.res_alpha2_special) {
      special_seen = true;
      worst_sa = std::max(worst_sa, *r.res_alpha2_special);
      worst = std::max(worst, *r.res_alpha2_special);
    }
    if (r.res_beta_special) {
      worst_sb = std::max(worst_sb, *r.res_beta_special);
      worst = std::max(worst, *r.res_beta_special);
    }
    st.add(worst);
  }
  finish(res, st);
  res.metrics["res_alpha2_max"] = worst_a;
  res.metrics["res_beta_max"] = worst_b;
  if (special_seen) {
    res.metrics["res_alpha2_special_max"] = worst_sa;
    res.metrics["res_beta_special_max"] = worst_sb;
  }
  res.note = "deformed lifts under u=1, v=1-1/t, w=exp(-eps/t)";
}

void check_ode(CheckResult& res, const Scenario& sc) {
  const int eps = scenario_eps(sc);
  const DeformationTriple d = DeformationTriple::special(eps);
  Stats st;
  double worst_u = 0, worst_v = 0;
  for (int i = 0; i < 100; ++i) {
    const double t = 0.5 + 2.5 * static_cast<double>(i) / 99.0;
    auto [ru, rv] = deformation_ode_residual(d, t);
    worst_u = std::max(worst_u, std::abs(ru));
    worst_v = std::max(worst_v, std::abs(rv));
    st.add(std::max(std::abs(ru), std::abs(rv)));
  }
  finish(res, st);
  res.metrics["res_u_max"] = worst_u;
  res.metrics["res_v_max"] = worst_v;
  res.note = "special solution on a 100-point grid over t in [0.5, 3]";
}

void check_example1_full(CheckResult& res, const Scenario& sc, const DiffConfig& cfg,
                         const std::vector<Vector>& points) {
  if (!sc.example1)
    throw PreconditionError(
        "check needs a scenario built from the explicit construction (scenario type example1)");
  Stats st;
  double max_b2 = 0, max_closed = 0, max_douglas = 0, max_fit = 0, max_crel = 0;
  FactorField ff;
  for (const Vector& x : points) {
    BetaInvariants inv = beta_invariants(sc.a, sc.b, x, cfg);
    const double d_b2 = std::abs(inv.b2 - 1.0);
    const double d_cl = closedness_residual(sc.b, x, cfg, 1e-7).residual;
    const double d_dg = douglas_kropina_residual(sc.a, sc.b, x, cfg, 1e-7).residual;
    ConformalFit f = fit_conformal(FitFamily::kropina_unit_b(), sc.a, sc.b, sc.V, x, cfg, 1e-5);
    const double d_fit = std::max(f.residual_S, f.residual_M);
    const double c_exp = sc.expected.factor(x);
    const double d_c = std::abs(f.c_hat - c_exp) / std::max(std::abs(c_exp), 1e-2);
    res.fitted["c"].push_back(f.c_hat);
    res.fitted["c_expected"].push_back(c_exp);
    ff.add(x, f.c_hat);
    max_b2 = std::max(max_b2, d_b2);
    max_closed = std::max(max_closed, d_cl);
    max_douglas = std::max(max_douglas, d_dg);
    max_fit = std::max(max_fit, d_fit);
    max_crel = std::max(max_crel, d_c);
    st.add(std::max({d_b2, d_cl, d_dg, d_fit, d_c}));
  }
  HomothetyReport h = homothety_test(ff, 1e-6);
  const bool expect_hom = sc.expected.homothetic.value_or(false);
  bool verdict_ok =
      (h.verdict == (expect_hom ? HomothetyVerdict::Homothetic : HomothetyVerdict::NonHomothetic));
  if (sc.expected.killing && h.verdict != HomothetyVerdict::Inconclusive)
    verdict_ok = verdict_ok && (h.killing == *sc.expected.killing);

  res.residual_max = st.mx;
  res.residual_mean = st.mean();
  res.points = st.n;
  res.metrics["b2_defect_max"] = max_b2;
  res.metrics["closed_max"] = max_closed;
  res.metrics["douglas_max"] = max_douglas;
  res.metrics["fit_residual_max"] = max_fit;
  res.metrics["factor_rel_err_max"] = max_crel;
  res.metrics["factor_mean"] = ff.size() ? ff.mean() : 0.0;
  res.metrics["factor_spread"] = ff.size() ? ff.spread() : 0.0;
  res.metrics["homothetic"] = h.verdict == HomothetyVerdict::Homothetic ? 1.0 : 0.0;
  res.metrics["expected_homothetic"] = expect_hom ? 1.0 : 0.0;
  res.metrics["killing"] = h.killing ? 1.0 : 0.0;
  res.pass = max_b2 <= 1e-9 && max_closed <= 1e-7 && max_douglas <= 1e-7 && max_fit <= 1e-5 &&
             max_crel <= 1e-5 && verdict_ok;
  if (h.verdict == HomothetyVerdict::Inconclusive) {
    res.note = "needs at least 10 points for the homothety verdict";
  } else {
    std::string v = h.killing ? "Killing" : (h.verdict == HomothetyVerdict::Homothetic
                                                 ? "homothetic"
                                                 : "non-homothetic");
    res.note = v + " (expected " + (expect_hom ? "homothetic" : "non-homothetic") +
               "); unit-norm, closed, Douglas, factor matches the closed form at the stated "
               "thresholds";
    if (!res.pass) res.note = v + " (expected " + (expect_hom ? "homothetic" : "non-homothetic") +
                              "); at least one sub-threshold failed, see metrics";
  }
}

CheckResult run_check(const std::string& tag, const RunConfig& rc, const DiffConfig& cfg,
                      const std::vector<Vector>& points) {
  const Scenario& sc = rc.scenario;
  CheckResult res;
  res.tag = tag;
  res.tolerance = effective_tolerance(rc, tag);
  std::mt19937_64 rng(tag_seed(rc.seed, tag));
  try {
    if (tag == "lift-identity") {
      check_lift_identity(res, sc, cfg, points, rc.rays, rng);
    } else if (tag == "theorem1") {
      check_fit_family(res, FitFamily::generic(), sc, cfg, points);
    } else if (tag == "theorem2-kropina") {
      check_fit_family(res, FitFamily::kropina_unit_b(), sc, cfg, points);
    } else if (tag == "theorem2-exp") {
      check_fit_family(res, FitFamily::exp_type(scenario_eps(sc)), sc, cfg, points);
    } else if (tag == "prop41") {
      const auto kind = sc.phi.kind();
      if (kind != PhiFamily::Kind::MKropina && kind != PhiFamily::Kind::MKropinaType)
        throw PreconditionError("the m-Kropina-type fit needs an m-Kropina or m-Kropina-type phi "
                                "family (scenario has " + sc.phi.name() + ")");
      const double k = kind == PhiFamily::Kind::MKropinaType ? sc.phi.k() : 0.0;
      check_fit_family(res, FitFamily::m_kropina_type(sc.phi.m(), k), sc, cfg, points);
    } else if (tag == "douglas-kropina") {
      check_classify(res,
                     [&](const Vector& x) {
                       return douglas_kropina_residual(sc.a, sc.b, x, cfg, res.tolerance);
                     },
                     "", points);
    } else if (tag == "mkropina-bd") {
      const auto kind = sc.phi.kind();
      if (kind != PhiFamily::Kind::MKropina && kind != PhiFamily::Kind::MKropinaType)
        throw PreconditionError("the m-Kropina Berwald-Douglas conditions need an m-Kropina phi "
                                "family (scenario has " + sc.phi.name() + ")");
      const double m = sc.phi.m();
      check_classify(res,
                     [&, m](const Vector& x) {
                       return mkropina_bd_residual(sc.a, sc.b, x, m, cfg, res.tolerance);
                     },
                     "tau", points);
    } else if (tag == "exp-bd") {
      const int eps = scenario_eps(sc);
      check_classify(res,
                     [&, eps](const Vector& x) {
                       return exp_bd_residual(sc.a, sc.b, x, eps, cfg, res.tolerance);
                     },
                     "sigma", points);
    } else if (tag == "killing") {
      check_classify(res,
                     [&](const Vector& x) { return killing_residual(sc.a, sc.b, x, cfg, res.tolerance); },
                     "", points);
    } else if (tag == "einstein") {
      check_classify(res,
                     [&](const Vector& x) { return einstein_residual(sc.a, x, cfg, res.tolerance); },
                     "kappa", points);
      if (sc.expected.einstein_kappa && res.fitted.count("kappa")) {
        double err = 0;
        for (double kap : res.fitted["kappa"])
          err = std::max(err, std::abs(kap - *sc.expected.einstein_kappa));
        res.metrics["kappa_expected"] = *sc.expected.einstein_kappa;
        res.metrics["kappa_max_err"] = err;
      }
    } else if (tag == "closed") {
      check_classify(res,
                     [&](const Vector& x) { return closedness_residual(sc.b, x, cfg, res.tolerance); },
                     "", points);
    } else if (tag == "lemma51") {
      check_lemma51(res, sc, cfg, points);
    } else if (tag == "vcb2") {
      check_vcb2(res, sc, cfg, points);
    } else if (tag == "deform") {
      check_deform(res, sc, cfg, points, rc.rays, rng);
    } else if (tag == "ode-y42") {
      check_ode(res, sc);
    } else if (tag == "example1-full") {
      check_example1_full(res, sc, cfg, points);
    } else {
      throw ConfigError("unknown check tag '" + tag + "'");
    }
  } catch (const std::exception& e) {
    res.error = e.what();
    res.pass = false;
  }
  return res;
}

// ---------------------------------------------------------------- parsing --

const json& need(const json& js, const char* key, const std::string& where) {
  auto it = js.find(key);
  if (it == js.end()) bad(where + ": missing required field '" + key + "'");
  return *it;
}

void reject_unknown(const json& js, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& item : js.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        ok = true;
        break;
      }
    if (!ok) bad(where + ": unknown field '" + item.key() + "'");
  }
}

double num(const json& js, const std::string& where) {
  if (!js.is_number()) bad(where + ": expected a number");
  return js.get<double>();
}

int integer(const json& js, const std::string& where) {
  if (!js.is_number_integer()) bad(where + ": expected an integer");
  return js.get<int>();
}

std::string str(const json& js, const std::string& where) {
  if (!js.is_string()) bad(where + ": expected a string");
  return js.get<std::string>();
}

Vector vec(const json& js, int n, const std::string& where) {
  if (!js.is_array() || static_cast<int>(js.size()) != n)
    bad(where + ": expected an array of " + std::to_string(n) + " numbers");
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = num(js[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Matrix mat(const json& js, int n, const std::string& where) {
  if (!js.is_array() || static_cast<int>(js.size()) != n)
    bad(where + ": expected an array of " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.row(i) = vec(js[i], n, where + "[" + std::to_string(i) + "]");
  return m;
}

PhiFamily parse_phi(const json& js, const std::string& where) {
  if (!js.is_object()) bad(where + ": expected an object with a 'family' field");
  reject_unknown(js, {"family", "m", "k", "eps"}, where);
  const std::string fam = str(need(js, "family", where), where + ".family");
  if (fam == "randers") return PhiFamily::randers();
  if (fam == "kropina") return PhiFamily::kropina();
  if (fam == "m-kropina") return PhiFamily::m_kropina(num(need(js, "m", where), where + ".m"));
  if (fam == "m-kropina-type")
    return PhiFamily::m_kropina_type(num(need(js, "m", where), where + ".m"),
                                     num(need(js, "k", where), where + ".k"));
  if (fam == "exp")
    return PhiFamily::exp_type(js.contains("eps") ? integer(js["eps"], where + ".eps") : +1);
  bad(where + ": unknown phi family '" + fam +
      "' (randers, kropina, m-kropina, m-kropina-type, exp)");
}

Polynomial parse_poly(const json& js, int nvars, const std::string& where) {
  if (!js.is_array()) bad(where + ": a polynomial is an array of [coefficient, exponents] terms");
  Polynomial p(nvars);
  for (size_t t = 0; t < js.size(); ++t) {
    const json& term = js[t];
    const std::string at = where + " term " + std::to_string(t);
    if (!term.is_array() || term.size() != 2 || !term[0].is_number() || !term[1].is_array())
      bad(at + ": expected [coefficient, [e1, ..., en]]");
    const json& ex = term[1];
    if (static_cast<int>(ex.size()) != nvars)
      bad(at + ": exponent list must have " + std::to_string(nvars) + " entries");
    std::vector<int> e(nvars);
    for (int i = 0; i < nvars; ++i) {
      if (!ex[i].is_number_integer() || ex[i].get<int>() < 0)
        bad(at + ": exponents must be non-negative integers");
      e[i] = ex[i].get<int>();
    }
    p.add_term(term[0].get<double>(), std::move(e));
  }
  return p;
}

Rational parse_rational(const json& js, int nvars, const std::string& where) {
  if (js.is_number()) {
    if (js.get<double>() == 0.0) return Rational(Polynomial(nvars));
    return Rational(Polynomial::constant(nvars, js.get<double>()));
  }
  if (js.is_array()) return Rational(parse_poly(js, nvars, where));
  if (js.is_object()) {
    reject_unknown(js, {"num", "den"}, where);
    Polynomial p = parse_poly(need(js, "num", where), nvars, where + ".num");
    if (js.contains("den")) return Rational(std::move(p), parse_poly(js["den"], nvars, where + ".den"));
    return Rational(std::move(p));
  }
  bad(where + ": expected a number, a term array, or an object {num, den}");
}

Scenario parse_inline(const json& js) {
  reject_unknown(js, {"type", "name", "dim", "metric", "one_form", "field", "phi", "domain"},
                 "scenario");
  const int n = integer(need(js, "dim", "scenario"), "scenario.dim");
  if (n < 2) bad("scenario.dim: dimension must be >= 2");

  const json& mj = need(js, "metric", "scenario");
  if (!mj.is_array() || static_cast<int>(mj.size()) != n)
    bad("scenario.metric: expected " + std::to_string(n) + " rows of components");
  std::vector<Rational> acomp(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const json& row = mj[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      bad("scenario.metric row " + std::to_string(i) + ": expected " + std::to_string(n) +
          " components");
    for (int j = 0; j < n; ++j)
      acomp[static_cast<size_t>(i) * n + j] = parse_rational(
          row[j], n, "scenario.metric[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }

  auto parse_covector = [&](const char* key) {
    const json& cj = need(js, key, "scenario");
    if (!cj.is_array() || static_cast<int>(cj.size()) != n)
      bad(std::string("scenario.") + key + ": expected " + std::to_string(n) + " components");
    std::vector<Rational> out(n);
    for (int i = 0; i < n; ++i)
      out[i] = parse_rational(cj[i], n, std::string("scenario.") + key + "[" + std::to_string(i) + "]");
    return out;
  };

  Scenario sc;
  sc.name = js.contains("name") ? str(js["name"], "scenario.name")
                                : "inline(n=" + std::to_string(n) + ")";
  sc.a.components = map_from_rationals(std::move(acomp), n);
  sc.b.components = map_from_rationals(parse_covector("one_form"), n);
  sc.V.components = map_from_rationals(parse_covector("field"), n);
  sc.phi = js.contains("phi") ? parse_phi(js["phi"], "scenario.phi") : PhiFamily::kropina();
  if (js.contains("domain")) {
    const json& dj = js["domain"];
    if (!dj.is_object()) bad("scenario.domain: expected an object {lower, upper}");
    reject_unknown(dj, {"lower", "upper"}, "scenario.domain");
    DomainBox box;
    box.lower = vec(need(dj, "lower", "scenario.domain"), n, "scenario.domain.lower");
    box.upper = vec(need(dj, "upper", "scenario.domain"), n, "scenario.domain.upper");
    for (int i = 0; i < n; ++i)
      if (!(box.lower[i] < box.upper[i]))
        bad("scenario.domain: lower[" + std::to_string(i) + "] must be below upper[" +
            std::to_string(i) + "]");
    sc.domain = box;
  } else {
    sc.domain = DomainBox::cube(n, 0.5);
  }
  return sc;
}

Scenario parse_example1(const json& js) {
  reject_unknown(js, {"type", "n", "mu", "tau", "gamma", "eta", "Q", "variant"}, "scenario");
  Example1Params p;
  p.n = js.contains("n") ? integer(js["n"], "scenario.n") : 2;
  p.mu = num(need(js, "mu", "scenario"), "scenario.mu");
  p.tau = js.contains("tau") ? num(js["tau"], "scenario.tau") : 0.0;
  p.gamma = vec(need(js, "gamma", "scenario"), p.n, "scenario.gamma");
  p.eta = vec(need(js, "eta", "scenario"), p.n, "scenario.eta");
  p.Q = js.contains("Q") ? mat(js["Q"], p.n, "scenario.Q") : Matrix::Zero(p.n, p.n);
  const std::string variant = str(need(js, "variant", "scenario"), "scenario.variant");
  if (variant == "A")
    p.variant = Example1Params::Variant::A;
  else if (variant == "B")
    p.variant = Example1Params::Variant::B;
  else
    bad("scenario.variant: must be 'A' or 'B'");
  return build_example1(p);
}

Scenario parse_builtin(const json& js) {
  reject_unknown(js, {"type", "name", "params"}, "scenario");
  const std::string name = str(need(js, "name", "scenario"), "scenario.name");
  BuiltinParams bp;
  if (js.contains("params")) {
    const json& pj = js["params"];
    if (!pj.is_object()) bad("scenario.params: expected an object");
    reject_unknown(pj, {"n", "lambda", "mu", "eps", "b0", "Q", "k", "a0", "phi"}, "scenario.params");
    if (pj.contains("n")) bp.n = integer(pj["n"], "scenario.params.n");
    if (pj.contains("lambda")) bp.lambda = num(pj["lambda"], "scenario.params.lambda");
    if (pj.contains("mu")) bp.mu = num(pj["mu"], "scenario.params.mu");
    if (pj.contains("eps")) bp.eps = integer(pj["eps"], "scenario.params.eps");
    if (pj.contains("b0")) bp.b0 = vec(pj["b0"], bp.n, "scenario.params.b0");
    if (pj.contains("Q")) bp.Q = mat(pj["Q"], bp.n, "scenario.params.Q");
    if (pj.contains("k")) bp.k = vec(pj["k"], bp.n, "scenario.params.k");
    if (pj.contains("a0")) bp.a0 = vec(pj["a0"], bp.n, "scenario.params.a0");
    if (pj.contains("phi")) bp.phi = parse_phi(pj["phi"], "scenario.params.phi");
  }
  return builtin(name, bp);
}

Scheme parse_scheme(const std::string& s, const std::string& where) {
  if (s == "analytic") return Scheme::AnalyticWhenAvailable;
  if (s == "central2") return Scheme::Central2;
  if (s == "central4") return Scheme::Central4;
  bad(where + ": unknown scheme '" + s + "' (analytic, central2, central4)");
}

std::string known_tags() {
  std::string out;
  for (const auto& t : check_tags()) out += (out.empty() ? "" : ", ") + t;
  return out;
}

// ------------------------------------------------------------ report JSON --

ordered_json check_to_json(const CheckResult& c) {
  ordered_json j;
  j["tag"] = c.tag;
  j["pass"] = c.pass;
  j["tolerance"] = c.tolerance;
  j["residual_max"] = c.residual_max;
  j["residual_mean"] = c.residual_mean;
  j["points"] = c.points;
  ordered_json fitted = ordered_json::object();
  for (const auto& [k, v] : c.fitted) fitted[k] = v;
  j["fitted"] = fitted;
  ordered_json metrics = ordered_json::object();
  for (const auto& [k, v] : c.metrics) metrics[k] = v;
  j["metrics"] = metrics;
  j["warnings"] = c.warnings;
  j["error"] = c.error;
  j["note"] = c.note;
  return j;
}

}  // namespace

// ------------------------------------------------------------- public API --

const std::vector<std::string>& check_tags() {
  static const std::vector<std::string> tags = {
      "closed",       "deform",       "douglas-kropina", "einstein",
      "example1-full", "exp-bd",      "killing",         "lemma51",
      "lift-identity", "mkropina-bd", "ode-y42",         "prop41",
      "theorem1",      "theorem2-exp", "theorem2-kropina", "vcb2"};
  return tags;
}

double effective_tolerance(const RunConfig& rc, const std::string& tag) {
  auto it = rc.tol_overrides.find(tag);
  if (it != rc.tol_overrides.end()) return it->second;
  if (rc.tol_default) return *rc.tol_default;
  const bool coarse = rc.scheme == Scheme::Central2;
  if (tag == "ode-y42") return 1e-10;
  if (tag == "deform" || tag == "vcb2" || tag == "lemma51") return coarse ? 1e-4 : 1e-8;
  if (tag == "einstein") return coarse ? 1e-2 : 1e-4;
  if (tag == "example1-full") return 1e-5;
  return coarse ? 1e-4 : 1e-6;
}

RunConfig parse_run_config(const std::string& json_text) {
  json js;
  try {
    js = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  if (!js.is_object()) bad("config root must be a JSON object");
  reject_unknown(js,
                 {"scenario", "checks", "samples", "rays", "seed", "scheme", "tolerance",
                  "tolerances", "report"},
                 "config");

  RunConfig rc;
  const json& sj = need(js, "scenario", "config");
  if (!sj.is_object()) bad("config.scenario: expected an object");
  const std::string type = str(need(sj, "type", "scenario"), "scenario.type");
  if (type == "builtin")
    rc.scenario = parse_builtin(sj);
  else if (type == "example1")
    rc.scenario = parse_example1(sj);
  else if (type == "inline")
    rc.scenario = parse_inline(sj);
  else
    bad("scenario.type: must be one of builtin, example1, inline");

  const json& cj = need(js, "checks", "config");
  if (!cj.is_array() || cj.empty()) bad("config.checks: expected a non-empty array of check tags");
  for (size_t i = 0; i < cj.size(); ++i) {
    const std::string tag = str(cj[i], "config.checks[" + std::to_string(i) + "]");
    if (!std::binary_search(check_tags().begin(), check_tags().end(), tag))
      bad("config.checks: unknown check tag '" + tag + "' (known: " + known_tags() + ")");
    rc.checks.push_back(tag);
  }
  std::sort(rc.checks.begin(), rc.checks.end());
  rc.checks.erase(std::unique(rc.checks.begin(), rc.checks.end()), rc.checks.end());

  if (js.contains("samples")) rc.samples = integer(js["samples"], "config.samples");
  if (rc.samples < 1) bad("config.samples: must be >= 1");
  if (js.contains("rays")) rc.rays = integer(js["rays"], "config.rays");
  if (rc.rays < 1) bad("config.rays: must be >= 1");
  if (js.contains("seed")) {
    const json& sd = js["seed"];
    if (!sd.is_number_integer() || (sd.is_number_integer() && !sd.is_number_unsigned() &&
                                    sd.get<long long>() < 0))
      bad("config.seed: must be a non-negative integer");
    rc.seed = sd.get<std::uint64_t>();
  }
  if (js.contains("scheme"))
    rc.scheme = parse_scheme(str(js["scheme"], "config.scheme"), "config.scheme");
  if (js.contains("tolerance")) {
    const double t = num(js["tolerance"], "config.tolerance");
    if (!(t > 0)) bad("config.tolerance: must be positive");
    rc.tol_default = t;
  }
  if (js.contains("tolerances")) {
    const json& tj = js["tolerances"];
    if (!tj.is_object()) bad("config.tolerances: expected an object of per-check overrides");
    for (const auto& item : tj.items()) {
      if (!std::binary_search(check_tags().begin(), check_tags().end(), item.key()))
        bad("config.tolerances: unknown check tag '" + item.key() + "' (known: " + known_tags() +
            ")");
      const double t = num(item.value(), "config.tolerances." + item.key());
      if (!(t > 0)) bad("config.tolerances." + item.key() + ": must be positive");
      rc.tol_overrides[item.key()] = t;
    }
  }
  if (js.contains("report")) rc.report_path = str(js["report"], "config.report");
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

int VerificationReport::exit_code() const {
  if (!overall_pass) return 1;
  return has_warnings ? 2 : 0;
}

std::string VerificationReport::to_json() const {
  ordered_json j;
  j["tool"] = "cvf";
  j["version"] = "0.1.0";
  j["generated_at"] = timestamp;
  ordered_json sj;
  sj["name"] = scenario_name;
  sj["dim"] = dim;
  sj["phi"] = phi_name;
  j["scenario"] = sj;
  ordered_json ej;
  ej["seed"] = seed;
  ej["samples"] = samples;
  ej["rays"] = rays;
  ej["scheme"] = scheme;
  if (tol_default)
    ej["tolerance_default"] = *tol_default;
  else
    ej["tolerance_default"] = nullptr;
  ordered_json tov = ordered_json::object();
  for (const auto& [k, v] : tol_overrides) tov[k] = v;
  ej["tolerance_overrides"] = tov;
  ej["convention"] = convention;
  j["environment"] = ej;
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks) arr.push_back(check_to_json(c));
  j["checks"] = arr;
  ordered_json ov;
  ov["pass"] = overall_pass;
  ov["warnings"] = has_warnings;
  ov["exit_code"] = exit_code();
  j["overall"] = ov;
  return j.dump(2) + "\n";
}

std::string VerificationReport::summary_text() const {
  std::ostringstream os;
  os << "scenario '" << scenario_name << "' (n=" << dim << ", phi=" << phi_name << ")\n";
  os << "seed=" << seed << " samples=" << samples << " rays=" << rays << " scheme=" << scheme;
  if (tol_default) os << " tol=" << sci(*tol_default);
  os << "\n";
  int failed = 0;
  for (const auto& c : checks) {
    if (!c.pass) ++failed;
    const char* mark = !c.pass ? "FAIL" : (c.warnings.empty() ? "PASS" : "WARN");
    std::string tag = c.tag;
    tag.resize(std::max<size_t>(tag.size(), 16), ' ');
    os << "[" << mark << "] " << tag << " max=" << sci(c.residual_max)
       << " mean=" << sci(c.residual_mean) << " tol=" << sci(c.tolerance) << "\n";
    if (!c.note.empty()) os << "       " << c.note << "\n";
    for (const auto& w : c.warnings) os << "       warning: " << w << "\n";
    if (!c.error.empty()) os << "       error: " << c.error << "\n";
  }
  if (overall_pass && !has_warnings)
    os << "overall: PASS (" << checks.size() << (checks.size() == 1 ? " check" : " checks")
       << ")\n";
  else if (overall_pass)
    os << "overall: PASS with warnings\n";
  else
    os << "overall: FAIL (" << failed << " of " << checks.size() << " checks failed)\n";
  return os.str();
}

VerificationReport run(const RunConfig& config) {
  const Scenario& sc = config.scenario;
  DiffConfig cfg;
  cfg.scheme = config.scheme;

  VerificationReport rep;
  rep.scenario_name = sc.name;
  rep.dim = sc.domain.dim();
  rep.phi_name = sc.phi.name();
  rep.seed = config.seed;
  rep.samples = config.samples;
  rep.rays = config.rays;
  rep.scheme = config.scheme == Scheme::Central2
                   ? "central2"
                   : (config.scheme == Scheme::Central4 ? "central4" : "analytic");
  rep.tol_default = config.tol_default;
  rep.tol_overrides = config.tol_overrides;
  rep.timestamp = iso_now();

  // One shared point set per seed: adding or removing checks never moves it.
  double bound = 1.0;
  for (int i = 0; i < sc.domain.dim(); ++i)
    bound = std::max({bound, std::abs(sc.domain.lower[i]), std::abs(sc.domain.upper[i])});
  const double margin = 2.0 * cfg.h2 * bound;
  std::mt19937_64 prng(config.seed);
  std::vector<Vector> points = sample_points(sc.domain, config.samples, prng, margin);

  std::vector<std::string> tags = config.checks;
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  for (const std::string& tag : tags) rep.checks.push_back(run_check(tag, config, cfg, points));

  rep.overall_pass = true;
  for (const auto& c : rep.checks) {
    rep.overall_pass = rep.overall_pass && c.pass;
    rep.has_warnings = rep.has_warnings || !c.warnings.empty();
  }
  return rep;
}

int execute(const RunConfig& config, std::ostream& out) {
  VerificationReport rep = run(config);
  out << rep.summary_text();
  if (!config.report_path.empty()) {
    std::ofstream f(config.report_path, std::ios::binary);
    if (!f) throw ConfigError("cannot open report path: " + config.report_path);
    f << rep.to_json();
  }
  return rep.exit_code();
}

}  // namespace cvf
