#include <benchmark/benchmark.h>

#include "dscale/manybody.hpp"

using namespace dscale;

namespace {

ManyBodyState pair_state(std::size_t n, std::size_t bodies) {
  const Grid g = make_line(-8, 8, n);
  std::vector<WaveField> waves;
  for (std::size_t j = 0; j < bodies; ++j) {
    const double x = -2.5 + 5.0 * static_cast<double>(j) / static_cast<double>(bodies - 1);
    waves.push_back(gaussian_packet(g, {x, 0}, {0, 0}, 0.5, 1.0, 12.5));
  }
  return make_manybody_state(std::move(waves), PotentialSpec::spring(12.5, 4.0));
}

void hartree(benchmark::State& state) {
  auto s = pair_state(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    s = hartree_step(s, 2e-3);
    benchmark::DoNotOptimize(s.centers.data());
  }
}
BENCHMARK(hartree)->Args({1024, 2})->Args({4096, 2})->Args({1024, 4});

void delta_approx(benchmark::State& state) {
  auto s = pair_state(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    s = delta_approx_step(s, 2e-3);
    benchmark::DoNotOptimize(s.centers.data());
  }
}
BENCHMARK(delta_approx)->Arg(1024)->Arg(4096);

}  // namespace
