#include <benchmark/benchmark.h>

#include <cvf/classify.hpp>
#include <cvf/conformal.hpp>
#include <cvf/runner.hpp>
#include <cvf/sampling.hpp>

#include <random>

namespace {

using namespace cvf;

Scenario space_form3() {
  BuiltinParams p;
  p.n = 3;
  p.mu = 1.0;
  return builtin("space-form", p);
}

Scenario example1_b3() {
  Example1Params p;
  p.n = 3;
  p.mu = 1.0;
  p.tau = 0.0;
  p.gamma = Vector::Zero(3);
  p.gamma[0] = 1.0;
  p.eta = Vector::Zero(3);
  p.eta[1] = 1.0;
  p.Q = Matrix::Zero(3, 3);
  p.variant = Example1Params::Variant::B;
  return build_example1(p);
}

Vector probe(const Scenario& sc) {
  Vector x = sc.domain.center();
  for (int i = 0; i < x.size(); ++i) x[i] += 0.05 * (i + 1);
  if (!sc.domain.contains(x, 1e-3)) x = sc.domain.center();
  return x;
}

void bm_jet_metric_fd(benchmark::State& state) {
  Scenario sc = space_form3();
  DiffConfig cfg;
  cfg.scheme = Scheme::Central4;
  const Vector x = probe(sc);
  for (auto _ : state) benchmark::DoNotOptimize(jet(sc.a.components, x, 2, cfg));
}
BENCHMARK(bm_jet_metric_fd);

void bm_jet_metric_analytic(benchmark::State& state) {
  Scenario sc = space_form3();
  DiffConfig cfg;
  const Vector x = probe(sc);
  for (auto _ : state) benchmark::DoNotOptimize(jet(sc.a.components, x, 2, cfg));
}
BENCHMARK(bm_jet_metric_analytic);

void bm_christoffel(benchmark::State& state) {
  Scenario sc = space_form3();
  DiffConfig cfg;
  const Vector x = probe(sc);
  for (auto _ : state) benchmark::DoNotOptimize(christoffel(sc.a, x, cfg));
}
BENCHMARK(bm_christoffel);

void bm_ricci(benchmark::State& state) {
  Scenario sc = space_form3();
  DiffConfig cfg;
  const Vector x = probe(sc);
  for (auto _ : state) benchmark::DoNotOptimize(ricci(sc.a, x, cfg));
}
BENCHMARK(bm_ricci);

void bm_lie_data(benchmark::State& state) {
  Scenario sc = example1_b3();
  DiffConfig cfg;
  const Vector x = probe(sc);
  for (auto _ : state) benchmark::DoNotOptimize(lie_data(sc.a, sc.b, sc.V, x, cfg));
}
BENCHMARK(bm_lie_data);

void bm_fit_conformal(benchmark::State& state) {
  Scenario sc = example1_b3();
  DiffConfig cfg;
  const Vector x = probe(sc);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        fit_conformal(FitFamily::kropina_unit_b(), sc.a, sc.b, sc.V, x, cfg, 1e-5));
}
BENCHMARK(bm_fit_conformal);

void bm_direct_defect(benchmark::State& state) {
  Scenario sc = example1_b3();
  DiffConfig cfg;
  const Vector x = probe(sc);
  std::mt19937_64 rng(11);
  const auto rays = sample_rays(sc.a, sc.b, sc.phi, x, 8, rng);
  AlphaBetaMetric fm = sc.metric();
  for (auto _ : state) benchmark::DoNotOptimize(direct_defect(fm, sc.V, x, rays, cfg));
}
BENCHMARK(bm_direct_defect);

void bm_douglas_kropina(benchmark::State& state) {
  Scenario sc = example1_b3();
  DiffConfig cfg;
  const Vector x = probe(sc);
  for (auto _ : state)
    benchmark::DoNotOptimize(douglas_kropina_residual(sc.a, sc.b, x, cfg, 1e-7));
}
BENCHMARK(bm_douglas_kropina);

}  // namespace

BENCHMARK_MAIN();
