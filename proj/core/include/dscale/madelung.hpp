#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "dscale/potential.hpp"
#include "dscale/propagator.hpp"
#include "dscale/wave_field.hpp"

namespace dscale {

inline constexpr double kDefaultRhoFloor = 1e-12;  // relative to max(rho)

// Madelung variables psi = sqrt(rho) exp(i S / hbar). Action is NaN where
// invalid (rho below the floor). Each connected component of the valid set
// is unwrapped independently from its own density maximum.
struct PolarField {
  Grid grid;
  std::vector<double> rho;
  std::vector<double> action;
  std::vector<std::uint8_t> valid;
  std::vector<int> component;  // -1 off-support
  int component_count = 0;
  bool disconnected = false;
  double hbar = 1.0;
  double mass = 1.0;
};

// Scalar with an explicit validity mask; invalid values are NaN.
struct MaskedField {
  Grid grid;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;
};

struct VelocityField {
  Grid grid;
  std::vector<Point> velocity;
  std::vector<std::uint8_t> valid;
  bool disconnected = false;
};

PolarField to_polar(const WaveField& field, double rho_floor_relative = kDefaultRhoFloor);
WaveField from_polar(const PolarField& polar, Frame frame = Frame::laboratory);

// -(hbar^2 / 2m) Laplacian(sqrt rho) / sqrt rho with centered differences.
MaskedField quantum_potential(const WaveField& field,
                              double rho_floor_relative = kDefaultRhoFloor);

// grad S / m with centered differences. Differences are taken modulo
// 2 pi hbar, so they agree with the unwrapped action wherever the unwrap is
// consistent and stay finite across branch cuts.
VelocityField velocity_field(const PolarField& polar);

struct ResidualSample {
  double t = 0.0;
  double hamilton_jacobi = 0.0;  // || dS/dt + |grad S|^2/2m + V + Q ||_2
  double continuity = 0.0;       // || d rho/dt + div(rho grad S / m) ||_2
  std::size_t points = 0;
};

// Residual norms at every interior stored time; snapshots must be uniformly
// spaced. Throws PreconditionError with fewer than three snapshots.
std::vector<ResidualSample> madelung_residuals(const EvolutionRecord& record,
                                               const PotentialSpec& potential,
                                               double rho_floor_relative = kDefaultRhoFloor);

// Columns: x[, y], rho, S, valid.
void write_polar_csv(const std::filesystem::path& path, const PolarField& polar);
void write_residual_csv(const std::filesystem::path& path,
                        const std::vector<ResidualSample>& residuals);

}  // namespace dscale
