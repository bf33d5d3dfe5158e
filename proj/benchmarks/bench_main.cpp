#include <benchmark/benchmark.h>

#include <cmath>

#include "grushin/grushin_r.hpp"
#include "grushin/riemannian.hpp"
#include "grushin/singular_synthesis.hpp"

using namespace grushin;

namespace {

Profile profile_for(int64_t id) {
  auto all = builtin_profiles();
  return all[static_cast<std::size_t>(id) % all.size()];
}

void BM_Period(benchmark::State& st) {
  auto p = profile_for(st.range(0));
  double w0 = 0.7;
  for (auto _ : st) {
    benchmark::DoNotOptimize(period(p, 0.5, w0).T);
    w0 = w0 < 3.0 ? w0 * 1.01 : 0.7;
  }
  st.SetLabel(p.name());
}
BENCHMARK(BM_Period)->DenseRange(0, 3);

void BM_IntegrateCartesian(benchmark::State& st) {
  auto p = profile_for(st.range(0));
  Point q{0.8, -0.3, 0.1};
  Covector l = normalize_energy(p, q, {0.3, 0.6, 0.9});
  const double T = period(p, 0.5, std::abs(l.w0)).T;
  for (auto _ : st) benchmark::DoNotOptimize(integrate_cartesian(p, q, l, 3.0 * T).position(3.0 * T));
  st.SetLabel(p.name());
}
BENCHMARK(BM_IntegrateCartesian)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_ExpR(benchmark::State& st) {
  Point q{0.8, -0.3, 0.1};
  Covector l{0.3, 0.6, 0.9};
  double t = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(linear::exp_r(q, l, t));
    t = t < 10.0 ? t + 0.01 : 0.1;
  }
}
BENCHMARK(BM_ExpR);

void BM_DistanceFromSigma(benchmark::State& st) {
  auto p = profile_for(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(distance_from_sigma(p, {0, 0, 0}, {0.7, 0.2, 1.3}).value);
  st.SetLabel(p.name());
}
BENCHMARK(BM_DistanceFromSigma)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_DistanceR(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(linear::distance_r({1.2, -0.4, 0.3}, {-0.5, 1.1, -0.8}).value);
}
BENCHMARK(BM_DistanceR)->Unit(benchmark::kMillisecond);

void BM_FirstZeroOfD(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(linear::first_zero_of_D(0.3, 1.4, 0.7));
}
BENCHMARK(BM_FirstZeroOfD)->Unit(benchmark::kMicrosecond);

void BM_JacobianReduced(benchmark::State& st) {
  auto p = Profile::monomial(2.0);
  Point q{0.8, -0.3, 0.1};
  Covector l = normalize_energy(p, q, {0.3, 0.6, 0.9});
  for (auto _ : st) benchmark::DoNotOptimize(jacobian_reduced(p, Chart::KL, q, l, 1.3));
}
BENCHMARK(BM_JacobianReduced)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
