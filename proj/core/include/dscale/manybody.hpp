#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dscale/potential.hpp"
#include "dscale/propagator.hpp"
#include "dscale/wave_field.hpp"

namespace dscale {

class PairConvolver;

struct OverlapEvent {
  double t = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  double overlap = 0.0;
};

// N individual waves on one shared grid, coupled pairwise by U(|x_i - x_j|).
struct ManyBodyState {
  std::vector<WaveField> waves;
  PotentialSpec coupling = PotentialSpec::free();
  std::vector<Point> centers;
  std::vector<double> overlap;  // row-major N x N
  double overlap_threshold = 1e-3;
  std::vector<OverlapEvent> overlap_events;
  double time = 0.0;
  std::size_t step = 0;
  std::shared_ptr<const PairConvolver> convolver;

  std::size_t count() const noexcept { return waves.size(); }
  double overlap_at(std::size_t i, std::size_t j) const { return overlap[i * count() + j]; }
};

ManyBodyState make_manybody_state(std::vector<WaveField> waves, PotentialSpec coupling,
                                  double overlap_threshold = 1e-3);

// O_ij = integral |phi_i| |phi_j|.
std::vector<double> overlap_matrix(std::span<const WaveField> waves);

// Linear (zero-padded) convolution of a density with U(|x - y|) on the grid.
class PairConvolver {
 public:
  PairConvolver(const Grid& grid, const PotentialSpec& coupling);
  std::vector<double> apply(std::span<const double> rho) const;

 private:
  Grid grid_;
  std::vector<std::size_t> padded_shape_;
  std::vector<Complex> kernel_hat_;
  std::unique_ptr<FourierTransform> fft_;
};

// Mean-field step: each wave feels sum_{i != j} (|phi_i|^2 * U)(x), evaluated
// at a half-step predictor (second order), then one Strang step.
ManyBodyState hartree_step(const ManyBodyState& state, double dt);

// Delta approximation: each wave feels sum_{i != j} U(|x - x_i(t)|) with
// x_i the center of wave i, evaluated at the same half-step predictor.
ManyBodyState delta_approx_step(const ManyBodyState& state, double dt);

enum class MeanFieldModel { hartree, delta };

struct ManyBodyTrack {
  std::vector<double> times;
  std::vector<std::vector<Point>> centers;  // per stored time, per wave
  std::vector<std::vector<double>> overlaps;
  std::vector<double> total_momentum;       // axis 0
  ManyBodyState final_state;
};

ManyBodyTrack run_manybody(const ManyBodyState& initial, MeanFieldModel model, double dt,
                           std::size_t steps, std::size_t store_every = 1);

// <p> along each axis, computed spectrally.
Point expectation_momentum(const WaveField& field);

// Evaluator of prod_j phi_j(x_j - X) for query tuples (x_1 .. x_N), with
// phi_j linearly interpolated on its grid.
class ProductInternal {
 public:
  ProductInternal(std::vector<WaveField> waves, const Point& cm_position);
  std::size_t count() const noexcept { return waves_.size(); }
  Complex operator()(std::span<const Point> positions) const;
  const WaveField& factor(std::size_t j) const { return waves_.at(j); }

 private:
  std::vector<WaveField> waves_;
  Point cm_;
};

ProductInternal product_internal(const ManyBodyState& state, const Point& cm_position);

// Linear interpolation of a field at an arbitrary point; zero outside the grid.
Complex interpolate(const WaveField& field, const Point& x);

// Columns t, j, x_j[, y_j] and t, i, j, O_ij.
void write_centers_csv(const std::filesystem::path& path, const ManyBodyTrack& track, int dim);
void write_overlap_csv(const std::filesystem::path& path, const ManyBodyTrack& track);

}  // namespace dscale
