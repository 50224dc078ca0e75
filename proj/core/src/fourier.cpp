#include "dscale/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>

#include "dscale/error.hpp"

namespace dscale {

struct FourierTransform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Plans() {
    std::lock_guard lock(mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }

  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }
};

FourierTransform::FourierTransform(const Grid& grid) {
  std::vector<std::size_t> shape;
  for (const Axis& a : grid.axes()) shape.push_back(a.points);
  *this = FourierTransform(std::move(shape));
}

FourierTransform::FourierTransform(std::vector<std::size_t> shape) {
  if (shape.empty()) throw ConfigurationError("FourierTransform: empty shape");
  size_ = 1;
  for (auto n : shape) size_ *= n;
  std::lock_guard lock(Plans::mutex());
  // One plan pair per shape for the life of the process.
  static std::map<std::vector<std::size_t>, std::shared_ptr<Plans>> cache;
  auto& slot = cache[shape];
  if (slot) {
    plans_ = slot;
    return;
  }
  std::vector<int> dims(shape.begin(), shape.end());
  std::vector<fftw_complex> scratch(size_);
  auto plans = std::shared_ptr<Plans>(new Plans, [](Plans* p) { delete p; });
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans->forward = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), scratch.data(),
                                 scratch.data(), FFTW_FORWARD, flags);
  plans->backward = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), scratch.data(),
                                  scratch.data(), FFTW_BACKWARD, flags);
  if (!plans->forward || !plans->backward) throw Error("FFTW plan creation failed");
  slot = plans;
  plans_ = std::move(plans);
}

FourierTransform::~FourierTransform() = default;
FourierTransform::FourierTransform(FourierTransform&&) noexcept = default;
FourierTransform& FourierTransform::operator=(FourierTransform&&) noexcept = default;

void FourierTransform::forward(std::span<Complex> data) const {
  if (data.size() != size_) throw GridMismatchError("FourierTransform: size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->forward, p, p);
}

void FourierTransform::backward(std::span<Complex> data) const {
  if (data.size() != size_) throw GridMismatchError("FourierTransform: size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->backward, p, p);
}

std::vector<double> wavenumbers(const Axis& axis) {
  const std::size_t n = axis.points;
  std::vector<double> k(n);
  const double base = 2.0 * std::numbers::pi / axis.extent();
  for (std::size_t i = 0; i < n; ++i) {
    const long long j = i < (n + 1) / 2 ? static_cast<long long>(i)
                                        : static_cast<long long>(i) - static_cast<long long>(n);
    k[i] = base * static_cast<double>(j);
  }
  return k;
}

std::vector<double> kinetic_spectrum(const Grid& grid, double hbar, const Point& axis_masses) {
  std::vector<double> out(grid.size(), 0.0);
  for (int a = 0; a < grid.dim(); ++a) {
    const auto k = wavenumbers(grid.axis(a));
    const double c = hbar * hbar / (2.0 * axis_masses[a]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto idx = grid.unravel(i);
      out[i] += c * k[idx[a]] * k[idx[a]];
    }
  }
  return out;
}

}  // namespace dscale
