#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dscale/madelung.hpp"
#include "dscale/propagator.hpp"

namespace dscale {

// Two-dimensional isotropic oscillator V = m omega^2 |x|^2 / 2 and the
// coherent state launched from (x0, v0).
struct CoherentParams {
  double mass = 1.0;
  double omega = 1.0;
  double hbar = 1.0;
  Point x0{};
  Point v0{};

  // sqrt(hbar / 2 m omega); not an input.
  double sigma() const;
  void validate() const;
  PotentialSpec potential() const;
};

struct PhaseSpacePoint {
  Point position{};
  Point velocity{};
};

PhaseSpacePoint classical_oscillator(const CoherentParams& params, double t);

// Integral over [0, t] of the oscillator Lagrangian, without the zero-point term.
double classical_phase(const CoherentParams& params, double t);
// classical_phase + hbar omega t.
double g_phase(const CoherentParams& params, double t);

// Psi(x, t) = (2 pi s^2)^(-1/2) exp(-|x - x(t)|^2 / 4 s^2 + i (m v(t).x - g(t)) / hbar).
// The grid must be 2D and keep a 5 sigma margin around the orbit.
WaveField coherent_field(const CoherentParams& params, double t, const Grid& grid);
PolarField coherent_polar(const CoherentParams& params, double t, const Grid& grid);

// Throws DomainError naming the first time at which the orbit comes within
// 5 sigma of a boundary.
void check_orbit_margin(const CoherentParams& params, const Grid& grid);

struct DeltaConvergenceOptions {
  // Measure the variance of a split-step evolved field instead of the
  // analytic density.
  bool evolve = false;
  double dt = 0.0;
  SplitScheme scheme = SplitScheme::strang;
};

struct DeltaConvergenceRow {
  double hbar = 0.0;
  Point variance{};
  Point expected_variance{};
  // sup |S_hbar - S| with S the hbar -> 0 action; equals hbar omega t.
  double action_offset = 0.0;
};

struct DeltaConvergenceReport {
  std::vector<DeltaConvergenceRow> rows;
  // Least-squares slope of variance against hbar, per axis; absent for a
  // single-entry list.
  std::optional<Point> variance_slope;
};

DeltaConvergenceReport delta_convergence_check(const CoherentParams& base,
                                               std::span<const double> hbars, double t,
                                               const Grid& grid,
                                               const DeltaConvergenceOptions& options = {});

}  // namespace dscale
