#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dscale/grid.hpp"
#include "dscale/wave_field.hpp"

namespace dscale {

// Unnormalized complex DFT over a row-major array of the given shape, backed
// by FFTW. Plans are created with FFTW_ESTIMATE so results are bit-for-bit
// reproducible across runs, and cached per shape. execute() is safe to call
// from several threads at once.
class FourierTransform {
 public:
  explicit FourierTransform(const Grid& grid);
  explicit FourierTransform(std::vector<std::size_t> shape);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;
  FourierTransform(FourierTransform&&) noexcept;
  FourierTransform& operator=(FourierTransform&&) noexcept;

  std::size_t size() const noexcept { return size_; }

  void forward(std::span<Complex> data) const;
  // Unnormalized; callers divide by size() when they need the inverse.
  void backward(std::span<Complex> data) const;

 private:
  struct Plans;
  std::shared_ptr<const Plans> plans_;
  std::size_t size_ = 0;
};

// Angular wavenumbers of an axis in FFT order.
std::vector<double> wavenumbers(const Axis& axis);

// Sum over modes of hbar^2 k_a^2 / (2 m_a), i.e. the kinetic energy of each
// plane-wave mode with an independent mass per axis.
std::vector<double> kinetic_spectrum(const Grid& grid, double hbar, const Point& axis_masses);

}  // namespace dscale
