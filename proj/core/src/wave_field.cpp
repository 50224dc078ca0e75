#include "dscale/wave_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dscale/error.hpp"

namespace dscale {

WaveField::WaveField(Grid grid, std::vector<Complex> amplitudes, double hbar, double mass,
                     Frame frame)
    : grid_(std::move(grid)),
      amplitudes_(std::move(amplitudes)),
      hbar_(hbar),
      mass_(mass),
      frame_(frame) {
  if (amplitudes_.size() != grid_.size()) {
    throw GridMismatchError("amplitude count " + std::to_string(amplitudes_.size()) +
                            " does not match grid size " + std::to_string(grid_.size()));
  }
  if (!(hbar_ > 0.0) || !(mass_ > 0.0)) {
    throw ConfigurationError("hbar and mass must be positive");
  }
}

WaveField WaveField::with_amplitudes(std::vector<Complex> amplitudes) const {
  return WaveField(grid_, std::move(amplitudes), hbar_, mass_, frame_);
}

WaveField WaveField::with_frame(Frame frame) const {
  WaveField copy = *this;
  copy.frame_ = frame;
  return copy;
}

double WaveField::squared_norm() const noexcept {
  double sum = 0.0;
  for (const auto& a : amplitudes_) sum += std::norm(a);
  return sum * grid_.cell_volume();
}

WaveField normalize(const WaveField& field) {
  const double n2 = field.squared_norm();
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw NormalizationError("cannot normalize a null field");
  const double scale = 1.0 / std::sqrt(n2);
  std::vector<Complex> out(field.amplitudes().begin(), field.amplitudes().end());
  for (auto& a : out) a *= scale;
  return field.with_amplitudes(std::move(out));
}

double l2_distance(const WaveField& a, const WaveField& b) {
  if (!(a.grid() == b.grid())) throw GridMismatchError("l2_distance: grids differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.amplitudes().size(); ++i) sum += std::norm(a[i] - b[i]);
  return std::sqrt(sum * a.grid().cell_volume());
}

std::vector<double> density(const WaveField& field) {
  std::vector<double> rho(field.amplitudes().size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(field[i]);
  return rho;
}

Point expectation_position(const Grid& grid, std::span<const double> rho) {
  Point mean{};
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const Point x = grid.point(i);
    for (int a = 0; a < grid.dim(); ++a) mean[a] += x[a] * rho[i];
  }
  for (int a = 0; a < grid.dim(); ++a) mean[a] *= grid.cell_volume();
  return mean;
}

Point position_variance(const Grid& grid, std::span<const double> rho) {
  const Point mean = expectation_position(grid, rho);
  Point var{};
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const Point x = grid.point(i);
    for (int a = 0; a < grid.dim(); ++a) var[a] += (x[a] - mean[a]) * (x[a] - mean[a]) * rho[i];
  }
  for (int a = 0; a < grid.dim(); ++a) var[a] *= grid.cell_volume();
  return var;
}

namespace {

void require_normalized(const WaveField& field) {
  const double n2 = field.squared_norm();
  if (std::abs(n2 - 1.0) > 1e-6) {
    throw NormalizationError("field norm^2 = " + std::to_string(n2) + " deviates from 1");
  }
}

bool in_boundary_band(const Grid& grid, std::size_t flat, std::size_t cells) {
  const auto idx = grid.unravel(flat);
  for (int a = 0; a < grid.dim(); ++a) {
    const std::size_t n = grid.axis(a).points;
    if (idx[a] < cells || idx[a] >= n - cells) return true;
  }
  return false;
}

}  // namespace

Point expectation_position(const WaveField& field) {
  require_normalized(field);
  return expectation_position(field.grid(), density(field));
}

Point position_variance(const WaveField& field) {
  require_normalized(field);
  return position_variance(field.grid(), density(field));
}

double boundary_amplitude(const WaveField& field, std::size_t cells) {
  double peak = 0.0;
  for (std::size_t i = 0; i < field.amplitudes().size(); ++i) {
    if (in_boundary_band(field.grid(), i, cells)) peak = std::max(peak, std::abs(field[i]));
  }
  return peak;
}

double boundary_mass(const WaveField& field, std::size_t cells) {
  double sum = 0.0;
  for (std::size_t i = 0; i < field.amplitudes().size(); ++i) {
    if (in_boundary_band(field.grid(), i, cells)) sum += std::norm(field[i]);
  }
  return sum * field.grid().cell_volume();
}

Complex gaussian_amplitude(const Point& x, int dim, const Point& x0, const Point& v0,
                           const Point& sigma, double hbar, double mass) {
  double log_modulus = 0.0;
  double phase = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double s2 = sigma[a] * sigma[a];
    const double d = x[a] - x0[a];
    log_modulus += -0.25 * std::log(2.0 * std::numbers::pi * s2) - d * d / (4.0 * s2);
    phase += mass * v0[a] * x[a] / hbar;
  }
  return std::polar(std::exp(log_modulus), phase);
}

WaveField gaussian_packet(const Grid& grid, const Point& x0, const Point& v0, const Point& sigma,
                          double hbar, double mass) {
  for (int a = 0; a < grid.dim(); ++a) {
    if (!(sigma[a] > 0.0)) throw ConfigurationError("gaussian_packet: sigma must be positive");
    const Axis& ax = grid.axis(a);
    const double margin = 5.0 * sigma[a];
    if (x0[a] - margin < ax.lower || x0[a] + margin > ax.upper) {
      throw DomainError("gaussian_packet: packet clipped by the boundary on axis " +
                        std::to_string(a) + " (needs a 5 sigma margin)");
    }
  }
  std::vector<Complex> amplitudes(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    amplitudes[i] = gaussian_amplitude(grid.point(i), grid.dim(), x0, v0, sigma, hbar, mass);
  }
  return normalize(WaveField(grid, std::move(amplitudes), hbar, mass));
}

WaveField gaussian_packet(const Grid& grid, const Point& x0, const Point& v0, double sigma,
                          double hbar, double mass) {
  return gaussian_packet(grid, x0, v0, Point{sigma, sigma}, hbar, mass);
}

}  // namespace dscale
