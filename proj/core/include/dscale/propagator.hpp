#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dscale/fourier.hpp"
#include "dscale/potential.hpp"
#include "dscale/wave_field.hpp"

namespace dscale {

enum class SplitScheme {
  // exp(-iV dt/2h) exp(-iT dt/h) exp(-iV dt/2h), second order.
  strang,
  // Triple-jump composition of three Strang steps, fourth order.
  yoshida4,
};

struct EvolutionOptions {
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t store_every = 1;
  SplitScheme scheme = SplitScheme::strang;
  // Diagnostics (norm, energy, mean, boundary band) every n steps; 0 disables
  // all but the stored steps.
  std::size_t diagnostics_every = 1;
};

struct StepDiagnostics {
  std::size_t step = 0;
  double t = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  Point mean{};
  double boundary_amplitude = 0.0;
  double boundary_mass = 0.0;
};

struct EvolutionRecord {
  std::vector<double> times;
  std::vector<WaveField> snapshots;
  std::vector<StepDiagnostics> diagnostics;
  std::vector<std::string> advisories;
  // |amplitude| >= 1e-8 seen within three cells of a boundary.
  bool boundary_warning = false;

  const Grid& grid() const { return snapshots.front().grid(); }
};

// Strang/Yoshida stepper on a fixed grid with a possibly different mass per
// axis (configuration space of several 1D particles). Kinetic and potential
// phase factors are cached per time step.
class SplitStepper {
 public:
  SplitStepper(const Grid& grid, double hbar, const Point& axis_masses,
               std::vector<double> potential);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> potential() const noexcept { return potential_; }
  void set_potential(std::vector<double> potential);

  void step(std::span<Complex> psi, double dt, SplitScheme scheme) const;

  double energy(std::span<const Complex> psi) const;
  double kinetic_energy(std::span<const Complex> psi) const;

 private:
  void strang(std::span<Complex> psi, double dt) const;
  std::span<const Complex> kinetic_phase(double dt) const;
  std::span<const Complex> potential_half_phase(double dt) const;

  Grid grid_;
  double hbar_;
  FourierTransform fft_;
  std::vector<double> kinetic_;
  std::vector<double> potential_;
  mutable std::vector<std::pair<double, std::vector<Complex>>> kinetic_cache_;
  mutable std::vector<std::pair<double, std::vector<Complex>>> potential_cache_;
};

// m dx^2 / (pi hbar), minimized over axes.
double stability_limit(const Grid& grid, double hbar, const Point& axis_masses);

double energy(const WaveField& field, const PotentialSpec& potential);

// Evolves under -hbar^2/2m Laplacian + V. Throws DivergenceError on a
// non-finite amplitude, ConfigurationError on invalid options.
EvolutionRecord split_step_evolve(const WaveField& field, const PotentialSpec& potential,
                                  const EvolutionOptions& options);
EvolutionRecord split_step_evolve(const WaveField& field, std::vector<double> potential_values,
                                  const EvolutionOptions& options);

// Two 1D particles on a 2D configuration grid (axis 0 = x1, axis 1 = x2):
//   H = sum_j p_j^2/2m_j + m_j V_g(x_j) + U(|x1 - x2|).
// Snapshots carry the total mass as their nominal mass.
EvolutionRecord evolve_full_two_body(const WaveField& psi0, const std::array<double, 2>& masses,
                                     const PotentialSpec& pair, const PotentialSpec& external,
                                     const EvolutionOptions& options);

}  // namespace dscale
