#include <benchmark/benchmark.h>

#include "dscale/propagator.hpp"

using namespace dscale;

namespace {

void strang_step_1d(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g = make_line(-32, 32, n);
  const SplitStepper stepper(g, 1.0, {1.0, 1.0}, PotentialSpec::harmonic({0.1, 0}).sample(g, 1.0));
  auto psi = gaussian_packet(g, {-4, 0}, {1, 0}, 1.0, 1.0, 1.0);
  std::vector<Complex> data(psi.amplitudes().begin(), psi.amplitudes().end());
  for (auto _ : state) {
    stepper.step(data, 1e-3, SplitScheme::strang);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(n));
}
BENCHMARK(strang_step_1d)->RangeMultiplier(4)->Range(256, 16384);

void strang_step_2d(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g = make_plane(-8, 8, n, -8, 8, n);
  const SplitStepper stepper(g, 1.0, {1.0, 1.0}, PotentialSpec::harmonic({1, 1}).sample(g, 1.0));
  auto psi = gaussian_packet(g, {2, 0}, {0, 1.5}, 1.0 / std::sqrt(2.0), 1.0, 1.0);
  std::vector<Complex> data(psi.amplitudes().begin(), psi.amplitudes().end());
  for (auto _ : state) {
    stepper.step(data, 1e-3, SplitScheme::strang);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(n * n));
}
BENCHMARK(strang_step_2d)->RangeMultiplier(2)->Range(64, 512);

void yoshida_step_2d(benchmark::State& state) {
  const Grid g = make_plane(-8, 8, 256, -8, 8, 256);
  const SplitStepper stepper(g, 1.0, {1.0, 1.0}, PotentialSpec::harmonic({1, 1}).sample(g, 1.0));
  auto psi = gaussian_packet(g, {2, 0}, {0, 1.5}, 1.0 / std::sqrt(2.0), 1.0, 1.0);
  std::vector<Complex> data(psi.amplitudes().begin(), psi.amplitudes().end());
  for (auto _ : state) {
    stepper.step(data, 1e-3, SplitScheme::yoshida4);
    benchmark::DoNotOptimize(data.data());
  }
}
BENCHMARK(yoshida_step_2d);

}  // namespace
