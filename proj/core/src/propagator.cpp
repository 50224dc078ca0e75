#include "dscale/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dscale/error.hpp"

namespace dscale {
namespace {

constexpr std::size_t kCacheSlots = 4;
constexpr double kBoundaryThreshold = 1e-8;

const std::vector<Complex>* find_cached(
    const std::vector<std::pair<double, std::vector<Complex>>>& cache, double dt) {
  for (const auto& [key, value] : cache) {
    if (key == dt) return &value;
  }
  return nullptr;
}

const std::vector<Complex>& insert_cached(std::vector<std::pair<double, std::vector<Complex>>>& cache,
                                          double dt, std::vector<Complex> value) {
  if (cache.size() >= kCacheSlots) cache.erase(cache.begin());
  cache.emplace_back(dt, std::move(value));
  return cache.back().second;
}

void check_finite(std::span<const Complex> psi, std::size_t step) {
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!std::isfinite(psi[i].real()) || !std::isfinite(psi[i].imag())) {
      std::ostringstream msg;
      msg << "non-finite amplitude at node " << i << " after step " << step;
      throw DivergenceError(msg.str(), step);
    }
  }
}

void validate(const EvolutionOptions& options) {
  if (!(options.dt > 0.0) || !std::isfinite(options.dt)) {
    throw ConfigurationError("evolution: dt must be positive and finite");
  }
  if (options.store_every == 0) throw ConfigurationError("evolution: store_every must be >= 1");
}

EvolutionRecord run(const WaveField& field, SplitStepper& stepper, const Point& axis_masses,
                    const EvolutionOptions& options) {
  validate(options);
  EvolutionRecord record;
  const Grid& grid = field.grid();
  const double limit = stability_limit(grid, field.hbar(), axis_masses);
  if (options.dt > limit) {
    std::ostringstream msg;
    msg << "dt = " << options.dt << " exceeds the stability advisory m dx^2/(pi hbar) = " << limit;
    record.advisories.push_back(msg.str());
  }

  std::vector<Complex> psi(field.amplitudes().begin(), field.amplitudes().end());
  auto diagnose = [&](std::size_t step) {
    const WaveField snap = field.with_amplitudes(psi);
    StepDiagnostics d;
    d.step = step;
    d.t = static_cast<double>(step) * options.dt;
    const double n2 = snap.squared_norm();
    d.norm = n2;
    d.energy = stepper.energy(psi);
    const auto rho = density(snap);
    d.mean = expectation_position(grid, rho);
    for (auto& c : d.mean) c /= n2;
    d.boundary_amplitude = boundary_amplitude(snap);
    d.boundary_mass = boundary_mass(snap);
    if (d.boundary_amplitude >= kBoundaryThreshold && !record.boundary_warning) {
      record.boundary_warning = true;
      std::ostringstream msg;
      msg << "boundary amplitude " << d.boundary_amplitude << " at t = " << d.t
          << " exceeds " << kBoundaryThreshold;
      record.advisories.push_back(msg.str());
    }
    record.diagnostics.push_back(d);
  };
  auto store = [&](std::size_t step) {
    record.times.push_back(static_cast<double>(step) * options.dt);
    record.snapshots.push_back(field.with_amplitudes(psi));
  };

  for (std::size_t step = 0;; ++step) {
    const bool stored = step % options.store_every == 0 || step == options.steps;
    const bool diag = stored || (options.diagnostics_every != 0 && step % options.diagnostics_every == 0);
    if (stored) store(step);
    if (diag) diagnose(step);
    if (step == options.steps) break;
    stepper.step(psi, options.dt, options.scheme);
    check_finite(psi, step + 1);
  }
  return record;
}

}  // namespace

SplitStepper::SplitStepper(const Grid& grid, double hbar, const Point& axis_masses,
                           std::vector<double> potential)
    : grid_(grid),
      hbar_(hbar),
      fft_(grid),
      kinetic_(kinetic_spectrum(grid, hbar, axis_masses)) {
  if (!(hbar > 0.0)) throw ConfigurationError("hbar must be positive");
  for (int a = 0; a < grid.dim(); ++a) {
    if (!(axis_masses[a] > 0.0)) throw ConfigurationError("masses must be positive");
  }
  set_potential(std::move(potential));
}

void SplitStepper::set_potential(std::vector<double> potential) {
  if (potential.size() != grid_.size()) throw GridMismatchError("potential size mismatch");
  for (double v : potential) {
    if (!std::isfinite(v)) throw ConfigurationError("potential has non-finite values");
  }
  potential_ = std::move(potential);
  potential_cache_.clear();
}

std::span<const Complex> SplitStepper::kinetic_phase(double dt) const {
  if (const auto* hit = find_cached(kinetic_cache_, dt)) return *hit;
  std::vector<Complex> phase(kinetic_.size());
  const double scale = 1.0 / static_cast<double>(kinetic_.size());
  for (std::size_t i = 0; i < phase.size(); ++i) {
    phase[i] = std::polar(scale, -kinetic_[i] * dt / hbar_);
  }
  return insert_cached(kinetic_cache_, dt, std::move(phase));
}

std::span<const Complex> SplitStepper::potential_half_phase(double dt) const {
  if (const auto* hit = find_cached(potential_cache_, dt)) return *hit;
  std::vector<Complex> phase(potential_.size());
  for (std::size_t i = 0; i < phase.size(); ++i) {
    phase[i] = std::polar(1.0, -potential_[i] * dt / (2.0 * hbar_));
  }
  return insert_cached(potential_cache_, dt, std::move(phase));
}

void SplitStepper::strang(std::span<Complex> psi, double dt) const {
  const auto half = potential_half_phase(dt);
  const auto kin = kinetic_phase(dt);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half[i];
  fft_.forward(psi);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= kin[i];
  fft_.backward(psi);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half[i];
}

void SplitStepper::step(std::span<Complex> psi, double dt, SplitScheme scheme) const {
  if (psi.size() != grid_.size()) throw GridMismatchError("stepper: field size mismatch");
  if (scheme == SplitScheme::strang) {
    strang(psi, dt);
    return;
  }
  const double cbrt2 = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - cbrt2);
  const double w0 = -cbrt2 / (2.0 - cbrt2);
  strang(psi, w1 * dt);
  strang(psi, w0 * dt);
  strang(psi, w1 * dt);
}

double SplitStepper::kinetic_energy(std::span<const Complex> psi) const {
  std::vector<Complex> hat(psi.begin(), psi.end());
  fft_.forward(hat);
  double sum = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) sum += kinetic_[i] * std::norm(hat[i]);
  return sum * grid_.cell_volume() / static_cast<double>(hat.size());
}

double SplitStepper::energy(std::span<const Complex> psi) const {
  double pot = 0.0;
  double n2 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double r = std::norm(psi[i]);
    pot += potential_[i] * r;
    n2 += r;
  }
  const double dv = grid_.cell_volume();
  return (kinetic_energy(psi) + pot * dv) / (n2 * dv);
}

double stability_limit(const Grid& grid, double hbar, const Point& axis_masses) {
  double limit = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid.dim(); ++a) {
    const double dx = grid.axis(a).spacing();
    limit = std::min(limit, axis_masses[a] * dx * dx / (std::numbers::pi * hbar));
  }
  return limit;
}

double energy(const WaveField& field, const PotentialSpec& potential) {
  const Point masses{field.mass(), field.mass()};
  SplitStepper stepper(field.grid(), field.hbar(), masses,
                       potential.sample(field.grid(), field.mass()));
  return stepper.energy(field.amplitudes());
}

EvolutionRecord split_step_evolve(const WaveField& field, const PotentialSpec& potential,
                                  const EvolutionOptions& options) {
  if (potential.is_pair()) throw ConfigurationError("split_step_evolve needs an external potential");
  return split_step_evolve(field, potential.sample(field.grid(), field.mass()), options);
}

EvolutionRecord split_step_evolve(const WaveField& field, std::vector<double> potential_values,
                                  const EvolutionOptions& options) {
  validate(options);
  const Point masses{field.mass(), field.mass()};
  SplitStepper stepper(field.grid(), field.hbar(), masses, std::move(potential_values));
  return run(field, stepper, masses, options);
}

EvolutionRecord evolve_full_two_body(const WaveField& psi0, const std::array<double, 2>& masses,
                                     const PotentialSpec& pair, const PotentialSpec& external,
                                     const EvolutionOptions& options) {
  validate(options);
  const Grid& grid = psi0.grid();
  if (grid.dim() != 2) throw ConfigurationError("two-body solve needs a 2D configuration grid");
  if (!(masses[0] > 0.0) || !(masses[1] > 0.0)) throw ConfigurationError("masses must be positive");
  if (!pair.is_pair() && pair.kind() != PotentialKind::free) {
    throw ConfigurationError("two-body solve: coupling must be a pair potential");
  }
  if (external.is_pair()) throw ConfigurationError("two-body solve: external must not be a pair kind");
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    v[i] = external.external(Point{x[0], 0.0}, masses[0], 1) +
           external.external(Point{x[1], 0.0}, masses[1], 1) + pair.pair(std::abs(x[0] - x[1]));
  }
  const Point axis_masses{masses[0], masses[1]};
  const WaveField start(grid, {psi0.amplitudes().begin(), psi0.amplitudes().end()}, psi0.hbar(),
                        masses[0] + masses[1], psi0.frame());
  SplitStepper stepper(grid, psi0.hbar(), axis_masses, std::move(v));
  return run(start, stepper, axis_masses, options);
}

}  // namespace dscale
