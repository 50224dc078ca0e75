#include "dscale/manybody.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dscale/csv.hpp"
#include "dscale/error.hpp"
#include "dscale/fourier.hpp"

namespace dscale {
namespace {

using Potentials = std::vector<std::vector<double>>;

void refresh_observables(ManyBodyState& state) {
  state.centers.clear();
  for (const auto& w : state.waves) state.centers.push_back(expectation_position(w.grid(), density(w)));
  state.overlap = overlap_matrix(state.waves);
  const std::size_t n = state.count();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double o = state.overlap[i * n + j];
      if (o > state.overlap_threshold) state.overlap_events.push_back({state.time, i, j, o});
    }
  }
}

std::vector<Complex> advance(const WaveField& wave, std::vector<double> potential, double dt) {
  const Point masses{wave.mass(), wave.mass()};
  SplitStepper stepper(wave.grid(), wave.hbar(), masses, std::move(potential));
  std::vector<Complex> psi(wave.amplitudes().begin(), wave.amplitudes().end());
  stepper.step(psi, dt, SplitScheme::strang);
  return psi;
}

Potentials hartree_potentials(const ManyBodyState& state, std::span<const WaveField> waves) {
  const std::size_t n = waves.size();
  const Grid& grid = waves.front().grid();
  Potentials out(n, std::vector<double>(grid.size(), 0.0));
  if (n < 2 || !state.convolver) return out;
  std::vector<double> total(grid.size(), 0.0);
  Potentials own(n);
  for (std::size_t i = 0; i < n; ++i) {
    own[i] = state.convolver->apply(density(waves[i]));
    for (std::size_t x = 0; x < grid.size(); ++x) total[x] += own[i][x];
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t x = 0; x < grid.size(); ++x) out[j][x] = total[x] - own[j][x];
  }
  return out;
}

Potentials delta_potentials(const ManyBodyState& state, std::span<const WaveField> waves) {
  const std::size_t n = waves.size();
  const Grid& grid = waves.front().grid();
  Potentials out(n, std::vector<double>(grid.size(), 0.0));
  if (n < 2 || state.coupling.kind() == PotentialKind::free) return out;
  std::vector<Point> centers;
  for (const auto& w : waves) centers.push_back(expectation_position(grid, density(w)));
  for (std::size_t x = 0; x < grid.size(); ++x) {
    const Point p = grid.point(x);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d0 = p[0] - centers[i][0];
      const double d1 = grid.dim() == 2 ? p[1] - centers[i][1] : 0.0;
      u[i] = state.coupling.pair(std::hypot(d0, d1));
    }
    double total = 0.0;
    for (double v : u) total += v;
    for (std::size_t j = 0; j < n; ++j) out[j][x] = total - u[j];
  }
  return out;
}

// Second-order mean-field step: potentials from a half-step predictor, then
// one Strang step per wave from the start of the interval.
template <class Assemble>
ManyBodyState mean_field_step(const ManyBodyState& state, double dt, Assemble assemble) {
  if (!(dt > 0.0)) throw ConfigurationError("mean-field step needs dt > 0");
  const std::size_t n = state.count();
  const Potentials now = assemble(state, std::span<const WaveField>(state.waves));
  std::vector<WaveField> half;
  for (std::size_t j = 0; j < n; ++j) {
    half.push_back(state.waves[j].with_amplitudes(advance(state.waves[j], now[j], 0.5 * dt)));
  }
  const Potentials mid = assemble(state, std::span<const WaveField>(half));
  ManyBodyState next = state;
  next.step = state.step + 1;
  next.time = state.time + dt;
  for (std::size_t j = 0; j < n; ++j) {
    auto psi = advance(state.waves[j], mid[j], dt);
    for (const auto& a : psi) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw DivergenceError("non-finite amplitude in wave " + std::to_string(j) + " at step " +
                                  std::to_string(next.step),
                              next.step, j);
      }
    }
    next.waves[j] = state.waves[j].with_amplitudes(std::move(psi));
  }
  refresh_observables(next);
  return next;
}

}  // namespace

std::vector<double> overlap_matrix(std::span<const WaveField> waves) {
  const std::size_t n = waves.size();
  std::vector<double> o(n * n, 0.0);
  if (n == 0) return o;
  const Grid& grid = waves.front().grid();
  std::vector<std::vector<double>> mod(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(waves[i].grid() == grid)) throw GridMismatchError("overlap_matrix: waves on different grids");
    for (const auto& a : waves[i].amplitudes()) mod[i].push_back(std::abs(a));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t x = 0; x < grid.size(); ++x) sum += mod[i][x] * mod[j][x];
      o[i * n + j] = o[j * n + i] = sum * grid.cell_volume();
    }
  }
  return o;
}

ManyBodyState make_manybody_state(std::vector<WaveField> waves, PotentialSpec coupling,
                                  double overlap_threshold) {
  if (waves.empty()) throw ConfigurationError("many-body state needs at least one wave");
  if (!coupling.is_pair() && coupling.kind() != PotentialKind::free) {
    throw ConfigurationError("many-body coupling must be a pair potential");
  }
  const Grid& grid = waves.front().grid();
  for (std::size_t j = 0; j < waves.size(); ++j) {
    if (!(waves[j].grid() == grid)) throw GridMismatchError("many-body waves must share one grid");
    if (waves[j].hbar() != waves.front().hbar()) throw ConfigurationError("many-body waves must share hbar");
    const double n2 = waves[j].squared_norm();
    if (std::abs(n2 - 1.0) > 1e-6) {
      throw NormalizationError("wave " + std::to_string(j) + " is not normalized");
    }
  }
  ManyBodyState state;
  state.waves = std::move(waves);
  state.coupling = std::move(coupling);
  state.overlap_threshold = overlap_threshold;
  if (state.coupling.is_pair()) {
    state.convolver = std::make_shared<const PairConvolver>(grid, state.coupling);
  }
  refresh_observables(state);
  return state;
}

PairConvolver::PairConvolver(const Grid& grid, const PotentialSpec& coupling) : grid_(grid) {
  for (const Axis& a : grid.axes()) padded_shape_.push_back(2 * a.points);
  fft_ = std::make_unique<FourierTransform>(padded_shape_);
  const std::size_t padded = fft_->size();
  kernel_hat_.assign(padded, Complex{});
  const std::size_t p1 = grid.dim() == 2 ? padded_shape_[1] : 1;
  for (std::size_t i = 0; i < padded; ++i) {
    const std::size_t i0 = i / p1;
    const std::size_t i1 = i % p1;
    auto separation = [&](std::size_t idx, int a) {
      const auto n = static_cast<long long>(padded_shape_[static_cast<std::size_t>(a)]);
      const auto s = static_cast<long long>(idx);
      return static_cast<double>(s < n / 2 ? s : s - n) * grid.axis(a).spacing();
    };
    const double d0 = separation(i0, 0);
    const double d1 = grid.dim() == 2 ? separation(i1, 1) : 0.0;
    kernel_hat_[i] = coupling.pair(std::hypot(d0, d1));
  }
  fft_->forward(kernel_hat_);
  const double scale = grid.cell_volume() / static_cast<double>(padded);
  for (auto& k : kernel_hat_) k *= scale;
}

std::vector<double> PairConvolver::apply(std::span<const double> rho) const {
  if (rho.size() != grid_.size()) throw GridMismatchError("PairConvolver: density size mismatch");
  const std::size_t p1 = grid_.dim() == 2 ? padded_shape_[1] : 1;
  const std::size_t n1 = grid_.dim() == 2 ? grid_.axis(1).points : 1;
  std::vector<Complex> work(fft_->size(), Complex{});
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    work[(i / n1) * p1 + i % n1] = rho[i];
  }
  fft_->forward(work);
  for (std::size_t i = 0; i < work.size(); ++i) work[i] *= kernel_hat_[i];
  fft_->backward(work);
  std::vector<double> out(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = work[(i / n1) * p1 + i % n1].real();
  return out;
}

ManyBodyState hartree_step(const ManyBodyState& state, double dt) {
  return mean_field_step(state, dt, hartree_potentials);
}

ManyBodyState delta_approx_step(const ManyBodyState& state, double dt) {
  return mean_field_step(state, dt, delta_potentials);
}

ManyBodyTrack run_manybody(const ManyBodyState& initial, MeanFieldModel model, double dt,
                           std::size_t steps, std::size_t store_every) {
  if (store_every == 0) throw ConfigurationError("store_every must be >= 1");
  ManyBodyTrack track;
  ManyBodyState state = initial;
  auto store = [&] {
    track.times.push_back(state.time);
    track.centers.push_back(state.centers);
    track.overlaps.push_back(state.overlap);
    double p = 0.0;
    for (const auto& w : state.waves) p += expectation_momentum(w)[0];
    track.total_momentum.push_back(p);
  };
  store();
  for (std::size_t s = 1; s <= steps; ++s) {
    state = model == MeanFieldModel::hartree ? hartree_step(state, dt) : delta_approx_step(state, dt);
    if (s % store_every == 0 || s == steps) store();
  }
  track.final_state = std::move(state);
  return track;
}

Point expectation_momentum(const WaveField& field) {
  const Grid& grid = field.grid();
  std::vector<Complex> hat(field.amplitudes().begin(), field.amplitudes().end());
  FourierTransform(grid).forward(hat);
  Point p{};
  double total = 0.0;
  std::vector<std::vector<double>> k;
  for (int a = 0; a < grid.dim(); ++a) k.push_back(wavenumbers(grid.axis(a)));
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double w = std::norm(hat[i]);
    const auto idx = grid.unravel(i);
    for (int a = 0; a < grid.dim(); ++a) p[a] += k[static_cast<std::size_t>(a)][idx[a]] * w;
    total += w;
  }
  for (auto& c : p) c *= field.hbar() / total;
  return p;
}

Complex interpolate(const WaveField& field, const Point& x) {
  const Grid& grid = field.grid();
  std::array<std::size_t, kMaxDim> i{};
  Point f{};
  for (int a = 0; a < grid.dim(); ++a) {
    const Axis& ax = grid.axis(a);
    const double u = (x[a] - ax.lower) / ax.spacing();
    if (!(u >= 0.0) || !(u <= static_cast<double>(ax.points - 1))) return {};
    i[a] = std::min(static_cast<std::size_t>(u), ax.points - 2);
    f[a] = u - static_cast<double>(i[a]);
  }
  if (grid.dim() == 1) return (1.0 - f[0]) * field[i[0]] + f[0] * field[i[0] + 1];
  return (1.0 - f[0]) * ((1.0 - f[1]) * field[grid.index(i[0], i[1])] +
                         f[1] * field[grid.index(i[0], i[1] + 1)]) +
         f[0] * ((1.0 - f[1]) * field[grid.index(i[0] + 1, i[1])] +
                 f[1] * field[grid.index(i[0] + 1, i[1] + 1)]);
}

ProductInternal::ProductInternal(std::vector<WaveField> waves, const Point& cm_position)
    : waves_(std::move(waves)), cm_(cm_position) {
  if (waves_.empty()) throw ConfigurationError("product needs at least one factor");
}

Complex ProductInternal::operator()(std::span<const Point> positions) const {
  if (positions.size() != waves_.size()) {
    throw ConfigurationError("product evaluator needs one position per factor");
  }
  Complex value{1.0, 0.0};
  for (std::size_t j = 0; j < waves_.size(); ++j) {
    value *= interpolate(waves_[j], Point{positions[j][0] - cm_[0], positions[j][1] - cm_[1]});
  }
  return value;
}

ProductInternal product_internal(const ManyBodyState& state, const Point& cm_position) {
  return ProductInternal(state.waves, cm_position);
}

void write_centers_csv(const std::filesystem::path& path, const ManyBodyTrack& track, int dim) {
  CsvWriter csv(path);
  if (dim == 1) {
    csv.header({"t", "j", "x_j"});
  } else {
    csv.header({"t", "j", "x_j", "y_j"});
  }
  for (std::size_t k = 0; k < track.times.size(); ++k) {
    for (std::size_t j = 0; j < track.centers[k].size(); ++j) {
      csv.field(track.times[k]).field(j);
      for (int a = 0; a < dim; ++a) csv.field(track.centers[k][j][a]);
      csv.end_row();
    }
  }
}

void write_overlap_csv(const std::filesystem::path& path, const ManyBodyTrack& track) {
  CsvWriter csv(path, {"t", "i", "j", "O_ij"});
  for (std::size_t k = 0; k < track.times.size(); ++k) {
    const auto& o = track.overlaps[k];
    const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(o.size()))));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        csv.field(track.times[k]).field(i).field(j).field(o[i * n + j]);
        csv.end_row();
      }
    }
  }
}

}  // namespace dscale
