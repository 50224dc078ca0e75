#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "dscale/grid.hpp"

namespace dscale {

using Complex = std::complex<double>;

// Distinguishes laboratory-frame fields (psi, Phi) from fields expressed in
// center-of-mass coordinates (phi).
enum class Frame : std::uint8_t { laboratory = 0, center_of_mass = 1 };

// Immutable snapshot of complex amplitudes on a grid together with the
// physical constants of the equation that evolves it.
class WaveField {
 public:
  WaveField() = default;
  WaveField(Grid grid, std::vector<Complex> amplitudes, double hbar, double mass,
            Frame frame = Frame::laboratory);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const noexcept { return amplitudes_[i]; }
  double hbar() const noexcept { return hbar_; }
  double mass() const noexcept { return mass_; }
  Frame frame() const noexcept { return frame_; }

  // Same grid and constants, new amplitudes.
  WaveField with_amplitudes(std::vector<Complex> amplitudes) const;
  WaveField with_frame(Frame frame) const;

  // Riemann sum of |amplitude|^2 times the cell volume.
  double squared_norm() const noexcept;

 private:
  Grid grid_;
  std::vector<Complex> amplitudes_;
  double hbar_ = 1.0;
  double mass_ = 1.0;
  Frame frame_ = Frame::laboratory;
};

WaveField normalize(const WaveField& field);
double l2_distance(const WaveField& a, const WaveField& b);
std::vector<double> density(const WaveField& field);

// First moment of |amplitude|^2. Throws NormalizationError when the squared
// norm deviates from one by more than 1e-6.
Point expectation_position(const WaveField& field);
Point position_variance(const WaveField& field);
Point expectation_position(const Grid& grid, std::span<const double> rho);
Point position_variance(const Grid& grid, std::span<const double> rho);

// Largest |amplitude| within `cells` nodes of any boundary.
double boundary_amplitude(const WaveField& field, std::size_t cells = 3);
// Probability mass inside the same boundary band.
double boundary_mass(const WaveField& field, std::size_t cells = 3);

// Analytic value of the normalized Gaussian packet
//   prod_axes (2 pi s^2)^(-1/4) exp(-(x - x0)^2 / 4 s^2 + i m v0 x / hbar).
Complex gaussian_amplitude(const Point& x, int dim, const Point& x0, const Point& v0,
                           const Point& sigma, double hbar, double mass);

// Samples the packet on the grid and normalizes it numerically. Requires a
// 5 sigma margin to every boundary (DomainError otherwise).
WaveField gaussian_packet(const Grid& grid, const Point& x0, const Point& v0, double sigma,
                          double hbar, double mass);
WaveField gaussian_packet(const Grid& grid, const Point& x0, const Point& v0,
                          const Point& sigma, double hbar, double mass);

}  // namespace dscale
