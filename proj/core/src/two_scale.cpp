#include "dscale/two_scale.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dscale/error.hpp"
#include "dscale/fourier.hpp"

namespace dscale {
namespace {

constexpr double kEntangledDefect = 1e-3;

// Linear interpolation of a 1D field; zero outside the node hull.
Complex sample_line(const WaveField& field, double x) {
  const Axis& ax = field.grid().axis(0);
  const double u = (x - ax.lower) / ax.spacing();
  if (!(u >= 0.0) || !(u <= static_cast<double>(ax.points - 1))) return {};
  const auto i = std::min(static_cast<std::size_t>(u), ax.points - 2);
  const double f = u - static_cast<double>(i);
  return (1.0 - f) * field[i] + f * field[i + 1];
}

void require_line(const WaveField& field, const char* what) {
  if (field.grid().dim() != 1) {
    throw ConfigurationError(std::string(what) + " must live on a 1D grid");
  }
}

void require_normalized(const WaveField& field, const char* what) {
  const double n2 = field.squared_norm();
  if (std::abs(n2 - 1.0) > 1e-6) {
    throw NormalizationError(std::string(what) + " is not normalized (norm^2 = " +
                             std::to_string(n2) + ")");
  }
}

WaveField with_constants(const WaveField& field, double mass, Frame frame) {
  return WaveField(field.grid(), {field.amplitudes().begin(), field.amplitudes().end()},
                   field.hbar(), mass, frame);
}

}  // namespace

CenterOfMassCoordinates cm_coordinates(std::span<const Point> positions,
                                       std::span<const double> masses) {
  if (positions.empty() || positions.size() != masses.size()) {
    throw ConfigurationError("cm_coordinates needs one mass per position");
  }
  double total = 0.0;
  Point center{};
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (!(masses[j] > 0.0)) throw ConfigurationError("masses must be positive");
    total += masses[j];
    for (int a = 0; a < kMaxDim; ++a) center[a] += masses[j] * positions[j][a];
  }
  for (auto& c : center) c /= total;
  CenterOfMassCoordinates out{center, {}};
  for (const Point& x : positions) out.relative.push_back({x[0] - center[0], x[1] - center[1]});
  return out;
}

std::vector<Point> from_cm_coordinates(const CenterOfMassCoordinates& coordinates) {
  std::vector<Point> out;
  for (const Point& r : coordinates.relative) {
    out.push_back({coordinates.center[0] + r[0], coordinates.center[1] + r[1]});
  }
  return out;
}

double reduced_mass(const std::array<double, 2>& masses) {
  if (!(masses[0] > 0.0) || !(masses[1] > 0.0)) throw ConfigurationError("masses must be positive");
  return masses[0] * masses[1] / (masses[0] + masses[1]);
}

TwoScaleState make_two_scale_state(WaveField external, WaveField relative,
                                   const std::array<double, 2>& masses, const Point& cm_start) {
  const double mu = reduced_mass(masses);
  require_line(external, "external wave");
  require_line(relative, "relative wave");
  require_normalized(external, "external wave");
  require_normalized(relative, "relative wave");
  if (external.hbar() != relative.hbar()) throw ConfigurationError("external and relative hbar differ");
  TwoScaleState state;
  state.masses = masses;
  state.external = with_constants(external, masses[0] + masses[1], Frame::laboratory);
  state.relative = with_constants(relative, mu, Frame::center_of_mass);
  state.cm_start = cm_start;
  return state;
}

TwoScaleEvolution evolve_two_scale(const TwoScaleState& state, const PotentialSpec& external,
                                   const PotentialSpec& pair, const EvolutionOptions& options,
                                   std::size_t substeps) {
  if (external.is_pair()) throw ConfigurationError("external potential must not be a pair kind");
  if (!pair.is_pair() && pair.kind() != PotentialKind::free) {
    throw ConfigurationError("coupling must be a pair potential");
  }
  TwoScaleEvolution out;
  out.masses = state.masses;
  out.external = split_step_evolve(state.external, external, options);
  out.relative =
      split_step_evolve(state.relative, pair.sample_pair(state.relative.grid()), options);
  out.cm_track = integrate_dbb(out.external, state.cm_start, substeps);
  return out;
}

std::vector<Complex> factor_product(const Grid& configuration, const WaveField& external,
                                    const WaveField& relative,
                                    const std::array<double, 2>& masses) {
  if (configuration.dim() != 2) throw ConfigurationError("configuration grid must be 2D");
  require_line(external, "external wave");
  require_line(relative, "relative wave");
  const double total = masses[0] + masses[1];
  std::vector<Complex> out(configuration.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point x = configuration.point(i);
    const double xg = (masses[0] * x[0] + masses[1] * x[1]) / total;
    const double r = x[0] - x[1];
    out[i] = sample_line(external, xg) * sample_line(relative, r);
  }
  return out;
}

FactorizationReport verify_factorization(const WaveField& full0, const WaveField& external0,
                                         const WaveField& relative0,
                                         const std::array<double, 2>& masses,
                                         const PotentialSpec& external, const PotentialSpec& pair,
                                         const EvolutionOptions& options) {
  const Grid& config = full0.grid();
  const TwoScaleState state = make_two_scale_state(external0, relative0, masses, Point{});
  FactorizationReport report;
  auto distance = [&](std::span<const Complex> a, const std::vector<Complex>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a[i] - b[i]);
    return std::sqrt(sum * config.cell_volume());
  };
  report.initial_defect =
      distance(full0.amplitudes(), factor_product(config, state.external, state.relative, masses));
  report.hypothesis_violated = report.initial_defect > kEntangledDefect;

  const EvolutionRecord full = evolve_full_two_body(full0, masses, pair, external, options);
  const EvolutionRecord ext = split_step_evolve(state.external, external, options);
  const EvolutionRecord rel =
      split_step_evolve(state.relative, pair.sample_pair(state.relative.grid()), options);
  for (std::size_t k = 0; k < full.times.size(); ++k) {
    const auto product = factor_product(config, ext.snapshots[k], rel.snapshots[k], masses);
    report.samples.push_back({full.times[k], distance(full.snapshots[k].amplitudes(), product)});
  }
  return report;
}

WaveField reconstruct_internal(const WaveField& relative, const Point& shift) {
  const Grid& grid = relative.grid();
  const int dim = grid.dim();
  double peak = 0.0;
  for (const auto& a : relative.amplitudes()) peak = std::max(peak, std::abs(a));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(relative[i]) <= 1e-8 * peak) continue;
    const Point x = grid.point(i);
    for (int a = 0; a < dim; ++a) {
      const double moved = x[a] + shift[a];
      if (moved < grid.axis(a).lower || moved >= grid.axis(a).upper) {
        throw DomainError("shifted internal wave leaves the laboratory grid");
      }
    }
  }

  std::array<long long, kMaxDim> cells{0, 0};
  bool integral = true;
  for (int a = 0; a < dim; ++a) {
    const double u = shift[a] / grid.axis(a).spacing();
    const double r = std::round(u);
    if (std::abs(u - r) > 1e-12 * std::max(1.0, std::abs(u))) integral = false;
    cells[a] = static_cast<long long>(r);
  }
  std::vector<Complex> out(grid.size());
  if (integral) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto idx = grid.unravel(i);
      for (int a = 0; a < dim; ++a) {
        const auto n = static_cast<long long>(grid.axis(a).points);
        long long j = (static_cast<long long>(idx[a]) + cells[a]) % n;
        if (j < 0) j += n;
        idx[a] = static_cast<std::size_t>(j);
      }
      out[grid.index(idx[0], idx[1])] = relative[i];
    }
  } else {
    out.assign(relative.amplitudes().begin(), relative.amplitudes().end());
    FourierTransform fft(grid);
    fft.forward(out);
    std::vector<std::vector<double>> k;
    for (int a = 0; a < dim; ++a) k.push_back(wavenumbers(grid.axis(a)));
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto idx = grid.unravel(i);
      double phase = 0.0;
      for (int a = 0; a < dim; ++a) phase -= k[static_cast<std::size_t>(a)][idx[a]] * shift[a];
      out[i] *= std::polar(scale, phase);
    }
    fft.backward(out);
  }
  return WaveField(grid, std::move(out), relative.hbar(), relative.mass(), Frame::laboratory);
}

WaveField body_relative_wave(const WaveField& relative, const std::array<double, 2>& masses,
                             int body, const Grid& grid) {
  require_line(relative, "relative wave");
  if (grid.dim() != 1) throw ConfigurationError("body relative wave lives on a 1D grid");
  if (body != 0 && body != 1) throw ConfigurationError("body index must be 0 or 1");
  const double total = masses[0] + masses[1];
  // x'_1 = (m2/M) r, x'_2 = -(m1/M) r.
  const double factor = body == 0 ? masses[1] / total : -masses[0] / total;
  const double jacobian = 1.0 / std::sqrt(std::abs(factor));
  std::vector<Complex> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = jacobian * sample_line(relative, grid.point(i)[0] / factor);
  }
  return WaveField(grid, std::move(out), relative.hbar(), masses[static_cast<std::size_t>(body)],
                   Frame::center_of_mass);
}

}  // namespace dscale
