#include "dscale/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dscale/error.hpp"

namespace dscale {
namespace {

constexpr double kMarginSigmas = 5.0;

double orbit_axis(double x0, double v0, double omega, double t) {
  return x0 * std::cos(omega * t) + v0 / omega * std::sin(omega * t);
}

}  // namespace

double CoherentParams::sigma() const { return std::sqrt(hbar / (2.0 * mass * omega)); }

void CoherentParams::validate() const {
  if (!(mass > 0.0) || !(omega > 0.0) || !(hbar > 0.0)) {
    throw ConfigurationError("coherent state needs positive mass, omega and hbar");
  }
}

PotentialSpec CoherentParams::potential() const {
  return PotentialSpec::harmonic(Point{omega, omega});
}

PhaseSpacePoint classical_oscillator(const CoherentParams& params, double t) {
  const double c = std::cos(params.omega * t);
  const double s = std::sin(params.omega * t);
  PhaseSpacePoint p;
  for (int a = 0; a < kMaxDim; ++a) {
    p.position[a] = params.x0[a] * c + params.v0[a] / params.omega * s;
    p.velocity[a] = -params.x0[a] * params.omega * s + params.v0[a] * c;
  }
  return p;
}

double classical_phase(const CoherentParams& params, double t) {
  const double w = params.omega;
  double g = 0.0;
  for (int a = 0; a < kMaxDim; ++a) {
    const double x0 = params.x0[a];
    const double v0 = params.v0[a];
    g += 0.5 * params.mass *
         ((v0 * v0 - w * w * x0 * x0) * std::sin(2.0 * w * t) / (2.0 * w) -
          x0 * v0 * (1.0 - std::cos(2.0 * w * t)));
  }
  return g;
}

double g_phase(const CoherentParams& params, double t) {
  return params.hbar * params.omega * t + classical_phase(params, t);
}

void check_orbit_margin(const CoherentParams& params, const Grid& grid) {
  params.validate();
  if (grid.dim() != 2) throw ConfigurationError("coherent states live on a 2D grid");
  const double margin = kMarginSigmas * params.sigma();
  const double period = 2.0 * std::numbers::pi / params.omega;
  constexpr int samples = 4096;
  for (int k = 0; k <= samples; ++k) {
    const double t = period * k / samples;
    for (int a = 0; a < 2; ++a) {
      const double x = orbit_axis(params.x0[a], params.v0[a], params.omega, t);
      const Axis& ax = grid.axis(a);
      if (x - margin < ax.lower || x + margin > ax.upper) {
        std::ostringstream msg;
        msg << "coherent orbit comes within 5 sigma of the boundary on axis " << a
            << " at t = " << t;
        throw DomainError(msg.str());
      }
    }
  }
}

WaveField coherent_field(const CoherentParams& params, double t, const Grid& grid) {
  check_orbit_margin(params, grid);
  const PhaseSpacePoint p = classical_oscillator(params, t);
  const double s2 = params.sigma() * params.sigma();
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * s2);
  const double g = g_phase(params, t);
  std::vector<Complex> amplitudes(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    double r2 = 0.0;
    double mvx = 0.0;
    for (int a = 0; a < 2; ++a) {
      const double d = x[a] - p.position[a];
      r2 += d * d;
      mvx += params.mass * p.velocity[a] * x[a];
    }
    amplitudes[i] = std::polar(norm * std::exp(-r2 / (4.0 * s2)), (mvx - g) / params.hbar);
  }
  return WaveField(grid, std::move(amplitudes), params.hbar, params.mass);
}

PolarField coherent_polar(const CoherentParams& params, double t, const Grid& grid) {
  check_orbit_margin(params, grid);
  const PhaseSpacePoint p = classical_oscillator(params, t);
  const double s2 = params.sigma() * params.sigma();
  const double peak = 1.0 / (2.0 * std::numbers::pi * s2);
  const double g = g_phase(params, t);
  PolarField polar;
  polar.grid = grid;
  polar.hbar = params.hbar;
  polar.mass = params.mass;
  polar.rho.resize(grid.size());
  polar.action.resize(grid.size());
  polar.valid.assign(grid.size(), 1);
  polar.component.assign(grid.size(), 0);
  polar.component_count = 1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    double r2 = 0.0;
    double mvx = 0.0;
    for (int a = 0; a < 2; ++a) {
      const double d = x[a] - p.position[a];
      r2 += d * d;
      mvx += params.mass * p.velocity[a] * x[a];
    }
    polar.rho[i] = peak * std::exp(-r2 / (2.0 * s2));
    polar.action[i] = mvx - g;
  }
  return polar;
}

DeltaConvergenceReport delta_convergence_check(const CoherentParams& base,
                                               std::span<const double> hbars, double t,
                                               const Grid& grid,
                                               const DeltaConvergenceOptions& options) {
  for (std::size_t i = 1; i < hbars.size(); ++i) {
    if (!(hbars[i] < hbars[i - 1])) throw ConfigurationError("hbar list must be strictly decreasing");
  }
  DeltaConvergenceReport report;
  for (double hbar : hbars) {
    CoherentParams params = base;
    params.hbar = hbar;
    DeltaConvergenceRow row;
    row.hbar = hbar;
    std::vector<double> rho;
    if (options.evolve) {
      if (!(options.dt > 0.0)) throw ConfigurationError("evolved delta check needs dt > 0");
      EvolutionOptions evo;
      evo.steps = static_cast<std::size_t>(std::llround(t / options.dt));
      evo.dt = evo.steps > 0 ? t / static_cast<double>(evo.steps) : options.dt;
      evo.store_every = std::max<std::size_t>(evo.steps, 1);
      evo.scheme = options.scheme;
      evo.diagnostics_every = 0;
      const auto record = split_step_evolve(coherent_field(params, 0.0, grid), params.potential(), evo);
      rho = density(record.snapshots.back());
    } else {
      rho = density(coherent_field(params, t, grid));
    }
    row.variance = position_variance(grid, rho);
    const double s2 = params.sigma() * params.sigma();
    row.expected_variance = {s2, s2};
    // S_hbar - S is the same constant at every node.
    const PolarField polar = coherent_polar(params, t, grid);
    const PhaseSpacePoint p = classical_oscillator(params, t);
    const double g_limit = classical_phase(params, t);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point x = grid.point(i);
      const double s_limit = params.mass * (p.velocity[0] * x[0] + p.velocity[1] * x[1]) - g_limit;
      sup = std::max(sup, std::abs(polar.action[i] - s_limit));
    }
    row.action_offset = sup;
    report.rows.push_back(row);
  }
  if (report.rows.size() >= 2) {
    Point slope{};
    const auto n = static_cast<double>(report.rows.size());
    for (int a = 0; a < 2; ++a) {
      double sx = 0.0;
      double sy = 0.0;
      double sxx = 0.0;
      double sxy = 0.0;
      for (const auto& row : report.rows) {
        sx += row.hbar;
        sy += row.variance[a];
        sxx += row.hbar * row.hbar;
        sxy += row.hbar * row.variance[a];
      }
      slope[a] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    report.variance_slope = slope;
  }
  return report;
}

}  // namespace dscale
