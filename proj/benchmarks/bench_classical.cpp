#include <benchmark/benchmark.h>

#include "dscale/classical.hpp"

using namespace dscale;

namespace {

void minplus(benchmark::State& state, PotentialSpec potential) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g = make_line(-8, 8, n);
  std::vector<double> s0(n);
  for (std::size_t i = 0; i < n; ++i) s0[i] = g.point(i)[0];
  for (auto _ : state) {
    auto r = minplus_action(g, s0, 1.0, potential, 1.0);
    benchmark::DoNotOptimize(r.action.data());
  }
  state.SetComplexityN(static_cast<long long>(n));
}

void minplus_free(benchmark::State& state) { minplus(state, PotentialSpec::free()); }
void minplus_harmonic(benchmark::State& state) { minplus(state, PotentialSpec::harmonic({1, 0})); }
BENCHMARK(minplus_free)->RangeMultiplier(2)->Range(256, 2048)->Complexity(benchmark::oNSquared);
BENCHMARK(minplus_harmonic)->RangeMultiplier(2)->Range(256, 2048)->Complexity(benchmark::oNSquared);

// Iterative path minimization for a kind without a closed form.
void path_action_tabulated(benchmark::State& state) {
  const Grid g = make_line(-8, 8, 1024);
  const auto tab = PotentialSpec::tabulated(g, PotentialSpec::harmonic({1, 0}).sample(g, 1.0));
  PathOptions opt;
  opt.segments = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(euler_lagrange_action({0.5, 0}, {1.0, 0}, 1.2, tab, 1.0, 1, opt));
  }
}
BENCHMARK(path_action_tabulated)->Arg(16)->Arg(64);

}  // namespace
