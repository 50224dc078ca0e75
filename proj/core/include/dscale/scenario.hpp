#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dscale/bohm.hpp"
#include "dscale/config.hpp"
#include "dscale/potential.hpp"
#include "dscale/propagator.hpp"

namespace dscale {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  // "<=" or ">=": how value compares with tolerance when the check passes.
  std::string bound = "<=";
  bool passed = false;
  std::string detail;
};

bool evaluate(const CheckResult& check);

struct ScenarioOutcome {
  std::vector<CheckResult> checks;
  std::vector<std::string> advisories;

  bool passed() const;
};

// Runs the pipeline for the configured kind and writes its artifacts into
// `out_dir`, which must exist. Module errors propagate.
ScenarioOutcome execute_scenario(const ScenarioConfig& config,
                                 const std::filesystem::path& out_dir, unsigned threads = 1);

// Double slit: a packet launched along the barrier axis towards a wall with
// apertures, followed by a seeded dBB ensemble.
struct DoubleSlitSetup {
  Grid grid;
  double hbar = 1.0;
  double mass = 1.0;
  Point center{};
  Point velocity{};
  Point width{1.0, 1.0};
  BarrierParams barrier;
  EvolutionOptions evolution;
  double screen_position = 0.0;
  double peak_fraction = 0.05;
  long long count = 0;
  std::uint64_t seed = 0;
  std::size_t substeps = 4;
};

struct SlitCrossing {
  std::size_t id = 0;
  double t = 0.0;
  double coordinate = 0.0;  // along the wall
  int aperture = -1;        // -1: inside the barrier material
};

struct DoubleSlitResult {
  EvolutionRecord record;
  Ensemble ensemble;
  std::vector<double> screen_coordinates;
  std::vector<double> screen_density;  // final density on the screen line
  std::size_t maxima = 0;
  std::vector<SlitCrossing> crossings;
  std::size_t crossed = 0;        // trajectories with at least one crossing
  std::size_t outside_apertures = 0;
  std::size_t multiple_apertures = 0;  // crossings through different apertures
  std::size_t exited = 0;
  double transmitted_fraction = 0.0;  // probability past the wall at the end
};

DoubleSlitResult run_double_slit(const DoubleSlitSetup& setup, unsigned threads = 1);

// Strict interior local maxima of a profile that reach `fraction` of its
// global maximum.
std::size_t count_local_maxima(std::span<const double> profile, double fraction);

// Index of the aperture containing `coordinate`, -1 if none.
int aperture_index(const BarrierParams& barrier, double coordinate);

}  // namespace dscale
