#include <benchmark/benchmark.h>

#include <vector>

#include "rdspde/functional.hpp"
#include "rdspde/gradient.hpp"
#include "rdspde/nonlinearity.hpp"
#include "rdspde/simulator.hpp"
#include "rdspde/spectral.hpp"

using namespace rdspde;

static void BM_ToGrid(benchmark::State& state) {
  const auto basis = SpectralBasis::dealiased(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 3);
  std::vector<double> c(basis.mode_count(), 0.1), g(basis.point_count());
  for (auto _ : state) {
    basis.to_grid(c, g);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_ToGrid)->Args({1, 32})->Args({1, 128})->Args({2, 16})->Args({3, 8});

static void BM_FromGrid(benchmark::State& state) {
  const auto basis = SpectralBasis::dealiased(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 3);
  std::vector<double> c(basis.mode_count()), g(basis.point_count(), 0.1);
  for (auto _ : state) {
    basis.from_grid(g, c);
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(BM_FromGrid)->Args({1, 32})->Args({1, 128})->Args({2, 16})->Args({3, 8});

static void BM_Resolvent(benchmark::State& state) {
  const YosidaApprox y(Polynomial::negative_cubic(), 0.1);
  double r = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(y.evaluate(r));
    r = r > 3.0 ? -3.0 : r + 0.01;
  }
}
BENCHMARK(BM_Resolvent);

static void BM_Step(benchmark::State& state) {
  SimConfig cfg;
  cfg.kmax = static_cast<int>(state.range(0));
  const Simulator sim(cfg);
  PathStepper stepper(sim, cfg.dt);
  std::vector<double> x(sim.basis().mode_count(), 0.0), z(x.size(), 0.5), slopes(sim.basis().point_count());
  for (auto _ : state) {
    stepper.step(x, z, slopes);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_Step)->Arg(8)->Arg(32)->Arg(128);

static void BM_BelSample(benchmark::State& state) {
  SimConfig cfg;
  cfg.kmax = static_cast<int>(state.range(0));
  const Simulator sim(cfg);
  const SpectralField e1 = SpectralField::unit_mode(sim.basis(), {1, 1, 1});
  const auto phi = CylindricalFunctional::sine(e1);
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(bel_sample(sim, phi, e1, e1, 0.5, stream++));
}
BENCHMARK(BM_BelSample)->Arg(8)->Arg(32);
BENCHMARK_MAIN();
