#include <benchmark/benchmark.h>

#include "qgi/analytic_imaging.hpp"
#include "qgi/lens_grid.hpp"
#include "qgi/numeric_propagator.hpp"
#include "qgi/permutations.hpp"
#include "qgi/speckle_ensemble.hpp"

using namespace qgi;

namespace {

constexpr auto kI = Configuration::ObjectInDegenerateArm;

void BM_BesselJ1(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j1(x));
    x = x < 40.0 ? x + 0.37 : 0.0;
  }
}
BENCHMARK(BM_BesselJ1);

void BM_DiskIntegral(benchmark::State& state) {
  double q = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(disk_integral(q, 0.01));
    q = q < 2000.0 ? q + 13.0 : 0.0;
  }
}
BENCHMARK(BM_DiskIntegral);

void BM_LensNodes(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lens_nodes(0.01, n));
}
BENCHMARK(BM_LensNodes)->Arg(64)->Arg(128);

void BM_AnalyticTwoPoint(benchmark::State& state) {
  const SourceSpec src{2, 1e-6, 1e-6};
  const auto g = focus({10, 0.001, 1.0, 0, 0.1, 0.01, {}}, src, kI);
  const TwoPointObject obj{1.0, 0.7, {3e-4, 0.0}};
  const PointDetector det{{1e-4, 0.0}};
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(amplitude_two_point_cfgI(g, src, obj, det, {x, 0.0}));
    x += 1e-9;
  }
}
BENCHMARK(BM_AnalyticTwoPoint);

void BM_NumericSamePoint(benchmark::State& state) {
  const SourceSpec src{2, 1e-6, 1e-6};
  const auto g = focus({10, 0.001, 1.0, 0, 0.1, 0.01, {}}, src, kI);
  const TwoPointObject obj{1.0, 0.7, {3e-4, 0.0}};
  QuadratureSpec q;
  q.lens_samples = static_cast<int>(state.range(0));
  q.check_convergence = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        amplitude_samepoint_numeric(g, src, ObjectModel{obj}, PointDetector{{1e-4, 0.0}}, {}, q));
  }
}
BENCHMARK(BM_NumericSamePoint)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_SpeckleMonteCarlo(benchmark::State& state) {
  const SourceSpec src{2, 1e-6, 1e-6};
  const auto g = focus({10, 0.001, 3.0, 0, 0.1, 0.01, {}}, src, kI);
  const auto obj = SampledObject::slit(std::vector<cplx>(static_cast<std::size_t>(state.range(0)), 1.0), 75e-6);
  EnsembleConfig ens;
  ens.realizations = 100;
  ens.rng_seed = 1;
  ens.bucket = BucketDetector{1e-4, Rect{{0, 0}, 1e-2, 1e-2}};
  ens.detector_samples = 32;
  const auto grid = GridSpec::line({}, 2.5e-5, 41);
  for (auto _ : state) benchmark::DoNotOptimize(mc_bucket_intensity(g, src, obj, ens, grid));
}
BENCHMARK(BM_SpeckleMonteCarlo)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PermutationTerms(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(permutation_sum_terms(n));
}
BENCHMARK(BM_PermutationTerms)->DenseRange(3, 7, 2);

}  // namespace

BENCHMARK_MAIN();
