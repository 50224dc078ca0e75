#include <benchmark/benchmark.h>

#include <numbers>

#include "dscale/bohm.hpp"
#include "dscale/coherent.hpp"

using namespace dscale;

namespace {

const VelocityRecord& coherent_velocities() {
  static const VelocityRecord v = [] {
    CoherentParams c;
    c.x0 = {2, 0};
    c.v0 = {0, 1.5};
    const Grid g = make_plane(-8, 8, 128, -8, 8, 128);
    EvolutionOptions opt;
    opt.dt = 2 * std::numbers::pi / 2000;
    opt.steps = 500;
    opt.store_every = 4;
    opt.scheme = SplitScheme::yoshida4;
    opt.diagnostics_every = 0;
    return VelocityRecord::from(split_step_evolve(coherent_field(c, 0, g), c.potential(), opt));
  }();
  return v;
}

void dbb_ensemble(benchmark::State& state) {
  const auto& v = coherent_velocities();
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    auto e = make_ensemble(v, state.range(0), 1, 4, threads);
    benchmark::DoNotOptimize(e.trajectories.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(dbb_ensemble)->Args({1000, 1})->Args({1000, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

void initial_sampling(benchmark::State& state) {
  const auto& v = coherent_velocities();
  for (auto _ : state) {
    auto s = sample_initial(v.grid(), v.initial_density(), state.range(0), 1);
    benchmark::DoNotOptimize(s.data());
  }
}
BENCHMARK(initial_sampling)->Arg(10000);

}  // namespace
