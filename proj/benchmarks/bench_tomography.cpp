#include <benchmark/benchmark.h>

#include "radiomap/propmap.hpp"
#include "radiomap/random.hpp"

using namespace radiomap;

namespace {

void BenchLineIntegral(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const Grid grid(Region(Location(0.0, 0.0), Location(32.0, 32.0)), cells, cells);
  Rng rng = make_rng(5);
  const Slf slf(grid, uniform_vector(rng, static_cast<Eigen::Index>(grid.size()), 0.0, 1.0));
  const WeightModel piecewise{WeightModel::Kind::kPiecewiseConstant, 0.05};
  const Location a(0.7, 1.4), b(30.2, 29.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(line_integral(slf, a, b, piecewise));
  }
}
BENCHMARK(BenchLineIntegral)->Arg(16)->Arg(32)->Arg(64);

void BenchEllipseWeights(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const Grid grid(Region(Location(0.0, 0.0), Location(32.0, 32.0)), cells, cells);
  const WeightModel ellipse{WeightModel::Kind::kEllipse, 0.05};
  const Location a(0.7, 1.4), b(30.2, 29.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(link_weights(grid, a, b, ellipse));
  }
}
BENCHMARK(BenchEllipseWeights)->Arg(16)->Arg(32);

void BenchSlfEstimate(benchmark::State& state) {
  const Grid grid(Region(Location(0.0, 0.0), Location(8.0, 8.0)), 8, 8);
  const WeightModel piecewise{WeightModel::Kind::kPiecewiseConstant, 0.05};
  Rng rng = make_rng(9);
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(64);
  truth(27) = 1.0;
  const Slf slf(grid, truth);
  std::vector<Measurement> links;
  while (links.size() < 100) {
    const Eigen::VectorXd r = uniform_vector(rng, 4, 0.2, 7.8);
    Measurement m;
    m.location = Location(r(0), r(1));
    m.second_location = Location(r(2), r(3));
    if (distance(m.location, *m.second_location) < 1.0) continue;
    m.value = line_integral(slf, m.location, *m.second_location, piecewise);
    links.push_back(std::move(m));
  }
  const TomographySystem sys =
      assemble_tomography(MeasurementSet(links, 0.0, Unit::kDb), grid, piecewise);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_slf(sys, grid, 1e-3, SlfRegularizer::kRidge));
  }
}
BENCHMARK(BenchSlfEstimate);

}  // namespace
