#include <benchmark/benchmark.h>

#include "radiomap/kernels.hpp"
#include "radiomap/kriging.hpp"
#include "radiomap/random.hpp"
#include "radiomap/simulator.hpp"

using namespace radiomap;

namespace {

MeasurementSet random_measurements(int n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<Measurement> ms;
  for (int i = 0; i < n; ++i) {
    Measurement m;
    m.location = Location(uniform_vector(rng, 1, 0.0, 50.0)(0), uniform_vector(rng, 1, 0.0, 50.0)(0));
    m.value = normal_vector(rng, 1)(0);
    ms.push_back(std::move(m));
  }
  return MeasurementSet(std::move(ms), 0.1, Unit::kDb);
}

void BenchKrrFit(benchmark::State& state) {
  const MeasurementSet data = random_measurements(static_cast<int>(state.range(0)), 1);
  const Kernel kernel = rbf_kernel(5.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_krr(kernel, data, 1e-3));
  }
}
BENCHMARK(BenchKrrFit)->Arg(32)->Arg(128)->Arg(256);

void BenchKrigingFit(benchmark::State& state) {
  const MeasurementSet data = random_measurements(static_cast<int>(state.range(0)), 2);
  const CovarianceModel model =
      build_covariance({4.0, 8.0, 0.0}, {0.5, 0.0}, [](const Location&) { return 0.0; });
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_kriging(model, data));
  }
}
BENCHMARK(BenchKrigingFit)->Arg(32)->Arg(128)->Arg(256);

void BenchKrigingEvaluate(benchmark::State& state) {
  const MeasurementSet data = random_measurements(128, 3);
  const CovarianceModel model =
      build_covariance({4.0, 8.0, 0.0}, {0.5, 0.0}, [](const Location&) { return 0.0; });
  const KrigingEstimate fit = fit_kriging(model, data);
  const Location probe(25.0, 25.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit.evaluate(probe));
    benchmark::DoNotOptimize(fit.posterior_variance(probe));
  }
}
BENCHMARK(BenchKrigingEvaluate);

void BenchShadowingField(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const Grid grid(Region(Location(0.0, 0.0), Location(50.0, 50.0)), cells, cells);
  const ShadowingParams params{6.0, 8.0, 0.0};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_shadowing_field(grid, params, seed++));
  }
}
BENCHMARK(BenchShadowingField)->Arg(8)->Arg(16)->Arg(24);

}  // namespace

BENCHMARK_MAIN();
