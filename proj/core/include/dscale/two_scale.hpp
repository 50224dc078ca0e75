#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "dscale/bohm.hpp"
#include "dscale/potential.hpp"
#include "dscale/propagator.hpp"

namespace dscale {

struct CenterOfMassCoordinates {
  Point center{};
  std::vector<Point> relative;
};

// x_G = sum m_j x_j / M and x'_j = x_j - x_G. Throws ConfigurationError on a
// nonpositive mass or an empty system.
CenterOfMassCoordinates cm_coordinates(std::span<const Point> positions,
                                       std::span<const double> masses);
std::vector<Point> from_cm_coordinates(const CenterOfMassCoordinates& coordinates);

double reduced_mass(const std::array<double, 2>& masses);

// External wave psi(x_G) in the laboratory frame and, for two 1D bodies, the
// relative wave chi(r) over r = x1 - x2 (mass mu, center-of-mass frame).
// cm_track holds the dBB path of the center of mass.
struct TwoScaleState {
  WaveField external;
  WaveField relative;
  std::array<double, 2> masses{};
  Point cm_start{};

  double total_mass() const noexcept { return masses[0] + masses[1]; }
};

TwoScaleState make_two_scale_state(WaveField external, WaveField relative,
                                   const std::array<double, 2>& masses, const Point& cm_start);

struct TwoScaleEvolution {
  EvolutionRecord external;
  EvolutionRecord relative;
  Trajectory cm_track;
  std::array<double, 2> masses{};
};

// External wave under M V_g, relative wave under U(|r|) with the reduced
// mass; the gravitational cross term x'.grad V_g is dropped.
TwoScaleEvolution evolve_two_scale(const TwoScaleState& state, const PotentialSpec& external,
                                   const PotentialSpec& pair, const EvolutionOptions& options,
                                   std::size_t substeps = 4);

struct FactorizationSample {
  double t = 0.0;
  double discrepancy = 0.0;
};

struct FactorizationReport {
  std::vector<FactorizationSample> samples;
  // || Psi0 - psi0 chi0 || on the configuration grid.
  double initial_defect = 0.0;
  bool hypothesis_violated = false;
};

// psi(x_G) chi(r) evaluated at configuration nodes by linear interpolation
// of each factor (bilinear in (x_G, r)).
std::vector<Complex> factor_product(const Grid& configuration, const WaveField& external,
                                    const WaveField& relative,
                                    const std::array<double, 2>& masses);

// Evolves Psi0 in configuration space and the two factors separately, then
// reports the L2 distance between the full solution and the product at every
// stored time.
FactorizationReport verify_factorization(const WaveField& full0, const WaveField& external0,
                                         const WaveField& relative0,
                                         const std::array<double, 2>& masses,
                                         const PotentialSpec& external, const PotentialSpec& pair,
                                         const EvolutionOptions& options);

// Phi(x) = phi(x - shift) on the same grid, frame set to laboratory. Integer
// cell shifts are exact permutations; other shifts use the Fourier shift
// theorem. Throws DomainError if the shifted support leaves the grid.
WaveField reconstruct_internal(const WaveField& relative, const Point& shift);

// Relative wave of body `body` in its own coordinate x'_j, resampled from
// chi(r) with x'_1 = (m2/M) r and x'_2 = -(m1/M) r onto `grid`.
WaveField body_relative_wave(const WaveField& relative, const std::array<double, 2>& masses,
                             int body, const Grid& grid);

}  // namespace dscale
