#include "dscale/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "dscale/classical.hpp"
#include "dscale/coherent.hpp"
#include "dscale/csv.hpp"
#include "dscale/dswf.hpp"
#include "dscale/madelung.hpp"
#include "dscale/manybody.hpp"
#include "dscale/two_scale.hpp"

namespace dscale {

bool evaluate(const CheckResult& check) {
  return check.bound == ">=" ? check.value >= check.tolerance : check.value <= check.tolerance;
}

bool ScenarioOutcome::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

namespace fs = std::filesystem;

std::string numbered(std::string_view stem, std::size_t i, std::string_view ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return std::string(stem) + "_" + buf + std::string(ext);
}

CheckResult at_most(std::string name, double value, double tolerance, std::string detail = {}) {
  return {std::move(name), value, tolerance, "<=", value <= tolerance, std::move(detail)};
}

CheckResult at_least(std::string name, double value, double minimum, std::string detail = {}) {
  return {std::move(name), value, minimum, ">=", value >= minimum, std::move(detail)};
}

Grid grid_from(const ScenarioConfig& config) {
  const int dim = static_cast<int>(config.integer("grid.dim"));
  if (dim < 1 || dim > 2) throw ConfigurationError("grid.dim must be 1 or 2");
  auto expand = [&](std::vector<double> v, const char* key) {
    if (v.size() == 1) v.resize(static_cast<std::size_t>(dim), v.front());
    if (v.size() != static_cast<std::size_t>(dim)) {
      throw ConfigurationError(std::string("'") + key + "' needs one value or one per axis");
    }
    return v;
  };
  const auto lower = expand(config.numbers("grid.lower"), "grid.lower");
  const auto upper = expand(config.numbers("grid.upper"), "grid.upper");
  const auto points = expand(config.numbers("grid.points"), "grid.points");
  std::vector<std::array<double, 2>> bounds;
  std::vector<std::size_t> counts;
  for (int a = 0; a < dim; ++a) {
    bounds.push_back({lower[static_cast<std::size_t>(a)], upper[static_cast<std::size_t>(a)]});
    const double n = points[static_cast<std::size_t>(a)];
    if (n < 1) throw ConfigurationError("grid.points must be positive");
    counts.push_back(static_cast<std::size_t>(n));
  }
  return make_grid(dim, bounds, counts);
}

Point point_from(const ScenarioConfig& config, std::string_view key, int dim, Point fallback = {}) {
  if (!config.has(key)) return fallback;
  const auto v = config.numbers(key);
  Point p{};
  if (v.size() == 1) {
    for (int a = 0; a < dim; ++a) p[static_cast<std::size_t>(a)] = v.front();
    if (dim == 1) p[1] = 0.0;
    return p;
  }
  if (v.size() != static_cast<std::size_t>(dim)) {
    throw ConfigurationError("'" + std::string(key) + "' needs one value or one per axis");
  }
  for (int a = 0; a < dim; ++a) p[static_cast<std::size_t>(a)] = v[static_cast<std::size_t>(a)];
  return p;
}

// Velocity lists are per-axis vectors; a single entry is the axis-0 component.
Point vector_from(const ScenarioConfig& config, std::string_view key, int dim) {
  if (!config.has(key)) return {};
  const auto v = config.numbers(key);
  if (v.size() > static_cast<std::size_t>(dim)) {
    throw ConfigurationError("'" + std::string(key) + "' has more components than grid.dim");
  }
  Point p{};
  for (std::size_t a = 0; a < v.size(); ++a) p[a] = v[a];
  return p;
}

EvolutionOptions evolution_from(const ScenarioConfig& config, double period,
                                std::vector<std::string>& advisories) {
  EvolutionOptions options;
  options.dt = config.number("time.dt");
  if (config.has("time.periods")) {
    if (!(period > 0.0)) throw ConfigurationError("time.periods needs a periodic scenario");
    const double exact = config.number("time.periods") * period / options.dt;
    options.steps = static_cast<std::size_t>(std::llround(exact));
    if (std::abs(exact - static_cast<double>(options.steps)) > 1e-6 * exact) {
      advisories.push_back("time.periods is not a whole number of steps; final time rounded to " +
                           format_double(static_cast<double>(options.steps) * options.dt));
    }
  } else {
    options.steps = static_cast<std::size_t>(config.integer("time.steps"));
  }
  if (options.steps == 0) throw ConfigurationError("the run needs at least one step");
  options.store_every = static_cast<std::size_t>(config.integer("time.store_every", 1));
  options.diagnostics_every = static_cast<std::size_t>(config.integer("time.diagnostics_every", 1));
  options.scheme = config.text("time.scheme", "strang") == "yoshida4" ? SplitScheme::yoshida4
                                                                     : SplitScheme::strang;
  return options;
}

double tolerance(const ScenarioConfig& config, const std::string& name, double fallback) {
  const auto tol = config.tolerances();
  const auto it = tol.find(name);
  return it == tol.end() ? fallback : it->second;
}

void write_diagnostics_csv(const fs::path& path, const EvolutionRecord& record) {
  CsvWriter csv(path, {"step", "t", "norm", "energy", "mean_x", "mean_y", "boundary_amplitude",
                       "boundary_mass"});
  for (const auto& d : record.diagnostics) {
    csv.field(d.step).field(d.t).field(d.norm).field(d.energy).field(d.mean[0]).field(d.mean[1]);
    csv.field(d.boundary_amplitude).field(d.boundary_mass);
    csv.end_row();
  }
}

void write_snapshots(const fs::path& dir, std::string_view stem, const EvolutionRecord& record) {
  for (std::size_t i = 0; i < record.snapshots.size(); ++i) {
    write_dswf(dir / numbered(stem, i, ".dswf"), record.snapshots[i]);
  }
}

void add_conservation_checks(ScenarioOutcome& out, const ScenarioConfig& config,
                             const EvolutionRecord& record, bool energy_check = true) {
  const auto& d = record.diagnostics;
  double norm_drift = 0.0;
  double energy_drift = 0.0;
  const double e0 = d.front().energy;
  for (const auto& s : d) {
    norm_drift = std::max(norm_drift, std::abs(s.norm - d.front().norm));
    energy_drift = std::max(energy_drift, std::abs(s.energy - e0) / std::max(std::abs(e0), 1e-300));
  }
  out.checks.push_back(at_most("norm", norm_drift, tolerance(config, "norm", 1e-10),
                               "max |N(t) - N(0)|"));
  if (energy_check) {
    out.checks.push_back(at_most("energy", energy_drift, tolerance(config, "energy", 1e-6),
                                 "max |E(t) - E(0)| / |E(0)|"));
  }
  out.advisories.insert(out.advisories.end(), record.advisories.begin(), record.advisories.end());
}

std::uint64_t seed_of(const ScenarioConfig& config) {
  return static_cast<std::uint64_t>(config.integer("ensemble.seed"));
}

void add_equivariance(ScenarioOutcome& out, const ScenarioConfig& config, const fs::path& dir,
                      const EvolutionRecord& record, const Ensemble& ensemble, int dim) {
  const auto samples = equivariance_check(record, ensemble);
  write_ensemble_csv(dir / "ensemble.csv", samples, dim);
  double worst = 0.0;
  for (const auto& s : samples) {
    for (int a = 0; a < dim; ++a) worst = std::max(worst, s.ks[static_cast<std::size_t>(a)]);
  }
  out.checks.push_back(at_most("ks", worst, tolerance(config, "ks", 0.02),
                               "max KS distance over stored times and axes"));
}

ScenarioOutcome run_coherent(const ScenarioConfig& config, const fs::path& dir, unsigned threads) {
  ScenarioOutcome out;
  const Grid grid = grid_from(config);
  if (grid.dim() != 2) throw ConfigurationError("coherent-validate needs grid.dim = 2");
  CoherentParams params;
  params.mass = config.number("physics.mass");
  params.omega = config.number("physics.omega");
  params.hbar = config.number("physics.hbar");
  params.x0 = point_from(config, "packet.center", 2);
  params.v0 = vector_from(config, "packet.velocity", 2);
  params.validate();
  check_orbit_margin(params, grid);

  const auto options = evolution_from(config, 2.0 * std::numbers::pi / params.omega, out.advisories);
  const auto potential = params.potential();
  const auto record = split_step_evolve(coherent_field(params, 0.0, grid), potential, options);

  double l2 = 0.0;
  double width_error = 0.0;
  for (std::size_t i = 0; i < record.snapshots.size(); ++i) {
    const auto oracle = coherent_field(params, record.times[i], grid);
    l2 = std::max(l2, l2_distance(record.snapshots[i], oracle) / std::sqrt(oracle.squared_norm()));
    const auto var = position_variance(record.snapshots[i]);
    for (int a = 0; a < 2; ++a) {
      width_error = std::max(width_error, std::abs(std::sqrt(var[static_cast<std::size_t>(a)]) /
                                                   params.sigma() - 1.0));
    }
  }
  out.checks.push_back(at_most("l2", l2, tolerance(config, "l2", 1e-6),
                               "max relative L2 distance to the closed form"));
  add_conservation_checks(out, config, record);
  out.checks.push_back(at_most("width", width_error, tolerance(config, "width", 5e-3),
                               "max relative error of the density std"));

  write_snapshots(dir, "psi", record);
  write_diagnostics_csv(dir / "diagnostics.csv", record);
  write_polar_csv(dir / "polar_final.csv", to_polar(record.snapshots.back()));

  if (config.has("ensemble.count")) {
    const auto velocities = VelocityRecord::from(record);
    const auto substeps = static_cast<std::size_t>(config.integer("ensemble.substeps", 4));
    const auto ensemble =
        make_ensemble(velocities, config.integer("ensemble.count"), seed_of(config), substeps, threads);
    double amplitude = 0.0;
    for (int k = 0; k < 4096; ++k) {
      const auto p = classical_oscillator(params, 2.0 * std::numbers::pi * k / (4096 * params.omega));
      amplitude = std::max(amplitude, std::hypot(p.position[0], p.position[1]));
    }
    const auto origin = classical_oscillator(params, 0.0).position;
    double rigidity = 0.0;
    std::size_t used = 0;
    for (const auto& tr : ensemble.trajectories) {
      if (used == 32) break;
      if (tr.exited) continue;
      ++used;
      for (std::size_t s = 0; s < tr.times.size(); ++s) {
        const auto cl = classical_oscillator(params, tr.times[s]).position;
        const double dx = tr.positions[s][0] - tr.initial[0] - (cl[0] - origin[0]);
        const double dy = tr.positions[s][1] - tr.initial[1] - (cl[1] - origin[1]);
        rigidity = std::max(rigidity, std::hypot(dx, dy));
      }
    }
    out.checks.push_back(at_most("rigidity", rigidity / amplitude,
                                 tolerance(config, "rigidity", 1e-4),
                                 "max rigid-translation deviation / orbit amplitude over " +
                                     std::to_string(used) + " paths"));
    write_trajectory_csv(dir / "trajectories.csv", ensemble.trajectories, 2);
    add_equivariance(out, config, dir, record, ensemble, 2);
  }
  return out;
}

ScenarioOutcome run_free_spread(const ScenarioConfig& config, const fs::path& dir,
                                unsigned threads) {
  ScenarioOutcome out;
  const Grid grid = grid_from(config);
  const int dim = grid.dim();
  const double hbar = config.number("physics.hbar");
  const double mass = config.number("physics.mass");
  const double sigma = config.number("packet.width");
  const auto psi0 = gaussian_packet(grid, point_from(config, "packet.center", dim),
                                    vector_from(config, "packet.velocity", dim), sigma, hbar, mass);
  const auto options = evolution_from(config, 0.0, out.advisories);
  const auto potential = PotentialSpec::free();
  const auto record = split_step_evolve(psi0, potential, options);

  double width_error = 0.0;
  for (std::size_t i = 0; i < record.snapshots.size(); ++i) {
    const double tau = hbar * record.times[i] / (2.0 * mass * sigma * sigma);
    const double expected = sigma * std::sqrt(1.0 + tau * tau);
    const auto var = position_variance(record.snapshots[i]);
    for (int a = 0; a < dim; ++a) {
      width_error = std::max(width_error,
                             std::abs(std::sqrt(var[static_cast<std::size_t>(a)]) / expected - 1.0));
    }
  }
  out.checks.push_back(at_most("width", width_error, tolerance(config, "width", 5e-3),
                               "max relative error against the free spreading law"));
  add_conservation_checks(out, config, record);

  write_diagnostics_csv(dir / "diagnostics.csv", record);
  write_dswf(dir / "psi_final.dswf", record.snapshots.back());
  if (record.snapshots.size() >= 3) {
    write_residual_csv(dir / "residuals.csv", madelung_residuals(record, potential));
  }
  if (config.has("ensemble.count")) {
    const auto velocities = VelocityRecord::from(record);
    const auto ensemble = make_ensemble(velocities, config.integer("ensemble.count"), seed_of(config),
                                        static_cast<std::size_t>(config.integer("ensemble.substeps", 4)),
                                        threads);
    add_equivariance(out, config, dir, record, ensemble, dim);
  }
  return out;
}

ScenarioOutcome run_hbar_sweep(const ScenarioConfig& config, const fs::path& dir,
                               unsigned threads) {
  ScenarioOutcome out;
  SweepScenario s;
  s.grid = grid_from(config);
  if (s.grid.dim() != 1) throw ConfigurationError("hbar-sweep needs grid.dim = 1");
  s.mass = config.number("physics.mass");
  s.center = config.numbers("packet.center").front();
  s.width = config.number("packet.width");
  s.velocity = vector_from(config, "packet.velocity", 1)[0];
  if (config.text("physics.potential", "free") == "linear") {
    s.potential = PotentialSpec::linear(vector_from(config, "physics.gravity", 1));
  } else if (config.has("physics.gravity")) {
    throw ConfigurationError("physics.gravity needs physics.potential = linear");
  }
  s.target_time = config.number("sweep.target_time");
  s.dt = config.number("time.dt");
  s.store_every = static_cast<std::size_t>(config.integer("time.store_every", 10));
  s.trajectory_offset = config.number("sweep.trajectory_offset", 1.0);
  s.substeps = static_cast<std::size_t>(config.integer("ensemble.substeps", 4));
  s.threads = threads;
  const auto hbars = config.numbers("sweep.hbars");

  const auto report = hbar_sweep(s, hbars);
  write_convergence_csv(dir / "convergence.csv", report);
  const std::array<const char*, 3> names = {"action_decreasing", "density_decreasing",
                                            "trajectory_decreasing"};
  for (std::size_t k = 0; k < 3; ++k) {
    const bool ok = report.verdicts[k] == "decreasing";
    out.checks.push_back({names[k], ok ? 1.0 : 0.0, 1.0, ">=", ok, report.verdicts[k]});
  }

  const std::size_t intervals = 16;
  std::vector<double> times;
  for (std::size_t k = 0; k <= intervals; ++k) {
    times.push_back(s.target_time * static_cast<double>(k) / intervals);
  }
  std::vector<double> rho0(s.grid.size());
  std::vector<double> s0(s.grid.size());
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const double x = s.grid.point(i)[0];
    const double z = (x - s.center) / s.width;
    rho0[i] = std::exp(-0.5 * z * z) / (s.width * std::sqrt(2.0 * std::numbers::pi));
    s0[i] = s.mass * s.velocity * x;
  }
  const auto hj = solve_statistical_hj(s.grid, rho0, s0, times, s.potential, s.mass, threads);
  write_real_field(dir / "hj_action.dsrf", {s.grid, hj.action.back(), 0.0, s.mass});
  write_real_field(dir / "hj_density.dsrf", {s.grid, hj.density.back(), 0.0, s.mass});
  if (hj.caustic) out.advisories.push_back("caustic reached before the target time");

  if (config.has("ensemble.count")) {
    EvolutionOptions options;
    options.dt = s.dt;
    options.steps = static_cast<std::size_t>(std::llround(s.target_time / s.dt));
    options.store_every = s.store_every;
    const double hbar = hbars.back();
    const auto psi0 = gaussian_packet(s.grid, {s.center, 0.0}, {s.velocity, 0.0}, s.width, hbar,
                                      s.mass);
    const auto record = split_step_evolve(psi0, s.potential, options);
    const auto ensemble =
        make_ensemble(VelocityRecord::from(record), config.integer("ensemble.count"), seed_of(config),
                      s.substeps, threads);
    add_equivariance(out, config, dir, record, ensemble, 1);
  }
  return out;
}

ScenarioOutcome run_factorize(const ScenarioConfig& config, const fs::path& dir) {
  ScenarioOutcome out;
  const Grid configuration = grid_from(config);
  if (configuration.dim() != 2) {
    throw ConfigurationError("factorize-2body needs a 2D configuration grid (x1, x2)");
  }
  const std::array<double, 2> masses = {config.number("physics.mass1"), config.number("physics.mass2")};
  const double total = masses[0] + masses[1];
  const double mu = reduced_mass(masses);
  const double hbar = config.number("physics.hbar");
  const double stiffness = config.number("physics.stiffness");
  const auto pair = PotentialSpec::spring(stiffness, config.number("physics.rest_length", 0.0));
  const auto external = config.has("physics.gravity")
                            ? PotentialSpec::linear(vector_from(config, "physics.gravity", 1))
                            : PotentialSpec::free();

  const double xg = config.numbers("packet.center").front();
  const double vg = vector_from(config, "packet.velocity", 1)[0];
  const double sg = config.number("packet.width");
  const double r0 = config.number("relative.center");
  const double vr = config.number("relative.velocity", 0.0);
  const double sr = config.number("relative.width", std::sqrt(hbar / (2.0 * std::sqrt(stiffness * mu))));

  const auto& a0 = configuration.axis(0);
  const auto& a1 = configuration.axis(1);
  // Default factor grids are 128 times finer and offset by half a cell, so
  // configuration nodes fall between factor nodes.
  const auto fine = static_cast<std::size_t>(
      config.integer("factors.points", static_cast<long long>(128 * std::max(a0.points, a1.points))));
  const double ext_cell = (a0.extent() * masses[0] + a1.extent() * masses[1]) / total / fine;
  const double rel_cell = (a0.extent() + a1.extent()) / fine;
  const double ext_lo = config.number("factors.external_lower",
                                      (masses[0] * a0.lower + masses[1] * a1.lower) / total +
                                          0.5 * ext_cell);
  const double ext_hi = config.number("factors.external_upper",
                                      (masses[0] * a0.upper + masses[1] * a1.upper) / total +
                                          0.5 * ext_cell);
  const double rel_lo = config.number("factors.relative_lower", a0.lower - a1.upper + 0.5 * rel_cell);
  const double rel_hi = config.number("factors.relative_upper", a0.upper - a1.lower + 0.5 * rel_cell);
  const Grid ext_grid = make_line(ext_lo, ext_hi, fine);
  const Grid rel_grid = make_line(rel_lo, rel_hi, fine);

  const auto ext0 = gaussian_packet(ext_grid, {xg, 0.0}, {vg, 0.0}, sg, hbar, total);
  const auto rel0 = gaussian_packet(rel_grid, {r0, 0.0}, {vr, 0.0}, sr, hbar, mu)
                        .with_frame(Frame::center_of_mass);

  std::vector<Complex> amplitudes(configuration.size());
  for (std::size_t i = 0; i < configuration.size(); ++i) {
    const auto p = configuration.point(i);
    const double g = (masses[0] * p[0] + masses[1] * p[1]) / total;
    const double r = p[0] - p[1];
    amplitudes[i] = gaussian_amplitude({g, 0.0}, 1, {xg, 0.0}, {vg, 0.0}, {sg, sg}, hbar, total) *
                    gaussian_amplitude({r, 0.0}, 1, {r0, 0.0}, {vr, 0.0}, {sr, sr}, hbar, mu);
  }
  const auto full0 = normalize(WaveField(configuration, std::move(amplitudes), hbar, total));

  const double period = 2.0 * std::numbers::pi / std::sqrt(stiffness / mu);
  const auto options = evolution_from(config, period, out.advisories);
  const auto report = verify_factorization(full0, ext0, rel0, masses, external, pair, options);
  double worst = 0.0;
  {
    CsvWriter csv(dir / "factorization.csv", {"t", "discrepancy"});
    for (const auto& s : report.samples) {
      csv.field(s.t).field(s.discrepancy);
      csv.end_row();
      worst = std::max(worst, s.discrepancy);
    }
  }
  out.checks.push_back(at_most("factorization", report.samples.back().discrepancy,
                               tolerance(config, "factorization", 1e-6),
                               "L2 distance between the full solution and the product at the "
                               "final time; max over the run " + format_double(worst)));
  if (report.hypothesis_violated) {
    out.advisories.push_back("initial state is not a product (defect " +
                             format_double(report.initial_defect) + ")");
  }

  const auto two = evolve_two_scale(make_two_scale_state(ext0, rel0, masses, {xg, 0.0}), external,
                                    pair, options);
  write_trajectory_csv(dir / "cm_track.csv", std::span(&two.cm_track, 1), 1);
  for (std::size_t i = 0; i < two.external.snapshots.size(); ++i) {
    write_dswf(dir / numbered("external", i, ".dswf"), two.external.snapshots[i]);
    write_dswf(dir / numbered("relative", i, ".dswf"), two.relative.snapshots[i]);
    if (i < two.cm_track.positions.size()) {
      try {
        const auto body = body_relative_wave(two.relative.snapshots[i], masses, 0, ext_grid);
        write_dswf(dir / numbered("internal", i, ".dswf"),
                   reconstruct_internal(body, two.cm_track.positions[i]));
      } catch (const DomainError& e) {
        out.advisories.push_back("internal wave " + std::to_string(i) + " skipped: " + e.what());
      }
    }
  }
  return out;
}

PotentialSpec coupling_from(const ScenarioConfig& config) {
  if (config.text("physics.coupling", "spring") == "soft_coulomb") {
    return PotentialSpec::soft_coulomb(config.number("physics.charge_product"),
                                       config.number("physics.softening", 1.0));
  }
  return PotentialSpec::spring(config.number("physics.stiffness"),
                               config.number("physics.rest_length", 0.0));
}

std::vector<WaveField> packets(const ScenarioConfig& config, const Grid& grid,
                               std::span<const double> widths) {
  const auto centers = config.numbers("manybody.centers");
  auto velocities = config.numbers("manybody.velocities", std::vector<double>(centers.size(), 0.0));
  if (velocities.size() != centers.size()) {
    throw ConfigurationError("manybody.velocities needs one entry per center");
  }
  if (centers.size() < 2) throw ConfigurationError("manybody.centers needs at least two packets");
  std::vector<WaveField> waves;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    waves.push_back(gaussian_packet(grid, {centers[j], 0.0}, {velocities[j], 0.0},
                                    widths[std::min(j, widths.size() - 1)],
                                    config.number("physics.hbar"), config.number("physics.mass")));
  }
  return waves;
}

double manybody_period(const ScenarioConfig& config) {
  if (config.text("physics.coupling", "spring") != "spring") return 0.0;
  return 2.0 * std::numbers::pi /
         std::sqrt(2.0 * config.number("physics.stiffness") / config.number("physics.mass"));
}

ScenarioOutcome run_hartree(const ScenarioConfig& config, const fs::path& dir) {
  ScenarioOutcome out;
  const Grid grid = grid_from(config);
  if (grid.dim() != 1) throw ConfigurationError("many-body kinds need grid.dim = 1");
  const double width = config.number("manybody.width");
  auto state = make_manybody_state(packets(config, grid, std::span(&width, 1)),
                                   coupling_from(config),
                                   config.number("manybody.overlap_threshold", 1e-3));
  const auto options = evolution_from(config, manybody_period(config), out.advisories);
  const auto track = run_manybody(state, MeanFieldModel::hartree, options.dt, options.steps,
                                  options.store_every);
  double norm_drift = 0.0;
  for (std::size_t j = 0; j < state.count(); ++j) {
    norm_drift = std::max(norm_drift, std::abs(track.final_state.waves[j].squared_norm() -
                                               state.waves[j].squared_norm()));
    write_dswf(dir / numbered("wave", j, "_final.dswf"), track.final_state.waves[j]);
  }
  double momentum_drift = 0.0;
  for (double p : track.total_momentum) {
    momentum_drift = std::max(momentum_drift, std::abs(p - track.total_momentum.front()));
  }
  out.checks.push_back(at_most("norm", norm_drift, tolerance(config, "norm", 1e-10),
                               "max |N_j(T) - N_j(0)|"));
  out.checks.push_back(at_most("momentum", momentum_drift, tolerance(config, "momentum", 1e-8),
                               "max |P(t) - P(0)| of the total momentum"));
  write_centers_csv(dir / "centers.csv", track, 1);
  write_overlap_csv(dir / "overlap.csv", track);
  for (const auto& e : track.final_state.overlap_events) {
    out.advisories.push_back("overlap " + format_double(e.overlap) + " between waves " +
                             std::to_string(e.i) + " and " + std::to_string(e.j) + " at t = " +
                             format_double(e.t));
    if (out.advisories.size() > 32) break;
  }
  return out;
}

ScenarioOutcome run_delta_compare(const ScenarioConfig& config, const fs::path& dir) {
  ScenarioOutcome out;
  const Grid grid = grid_from(config);
  if (grid.dim() != 1) throw ConfigurationError("many-body kinds need grid.dim = 1");
  const auto widths = config.numbers("manybody.widths");
  const auto centers = config.numbers("manybody.centers");
  const double separation = std::abs(centers.at(1) - centers.at(0));
  const auto coupling = coupling_from(config);
  const auto options = evolution_from(config, manybody_period(config), out.advisories);

  CsvWriter csv(dir / "comparison.csv", {"width", "width_over_separation", "discrepancy",
                                         "amplitude", "relative_discrepancy"});
  std::vector<double> relative;
  for (double w : widths) {
    const auto state = make_manybody_state(packets(config, grid, std::span(&w, 1)), coupling,
                                           config.number("manybody.overlap_threshold", 1e-3));
    const auto h = run_manybody(state, MeanFieldModel::hartree, options.dt, options.steps,
                                options.store_every);
    const auto d = run_manybody(state, MeanFieldModel::delta, options.dt, options.steps,
                                options.store_every);
    double discrepancy = 0.0;
    double lo = h.centers.front()[0][0];
    double hi = lo;
    for (std::size_t s = 0; s < h.times.size(); ++s) {
      for (std::size_t j = 0; j < state.count(); ++j) {
        discrepancy = std::max(discrepancy, std::abs(h.centers[s][j][0] - d.centers[s][j][0]));
      }
      lo = std::min(lo, h.centers[s][0][0]);
      hi = std::max(hi, h.centers[s][0][0]);
    }
    const double amplitude = 0.5 * (hi - lo);
    relative.push_back(discrepancy / amplitude);
    csv.field(w).field(w / separation).field(discrepancy).field(amplitude).field(relative.back());
    csv.end_row();
  }
  out.checks.push_back(at_most("delta", relative.back(), tolerance(config, "delta", 0.01),
                               "center discrepancy / oscillation amplitude at the last width"));
  std::size_t increases = 0;
  for (std::size_t k = 1; k < relative.size(); ++k) {
    if (!(relative[k] < relative[k - 1])) ++increases;
  }
  if (relative.size() < 2) ++increases;
  const bool monotone = increases == 0;
  out.checks.push_back({"monotone", static_cast<double>(increases), 0.0, "<=", monotone,
                        "non-decreasing steps across the width list"});
  return out;
}

ScenarioOutcome run_double_slit_kind(const ScenarioConfig& config, const fs::path& dir,
                                     unsigned threads) {
  ScenarioOutcome out;
  DoubleSlitSetup setup;
  setup.grid = grid_from(config);
  if (setup.grid.dim() != 2) throw ConfigurationError("double-slit needs grid.dim = 2");
  setup.hbar = config.number("physics.hbar");
  setup.mass = config.number("physics.mass");
  setup.center = point_from(config, "packet.center", 2);
  setup.velocity = vector_from(config, "packet.velocity", 2);
  setup.width = point_from(config, "packet.width", 2);
  auto& b = setup.barrier;
  b.axis = static_cast<int>(config.integer("barrier.axis", 0));
  if (b.axis != 0 && b.axis != 1) throw ConfigurationError("barrier.axis must be 0 or 1");
  b.wall_position = config.number("barrier.wall_position");
  b.thickness = config.number("barrier.thickness");
  b.slit_centers = config.numbers("barrier.slit_centers");
  b.slit_widths = config.numbers("barrier.slit_widths");
  b.height = config.number("barrier.height");
  b.smoothing = config.number("barrier.smoothing",
                              2.0 * setup.grid.axis(1 - b.axis).spacing());
  setup.evolution = evolution_from(config, 0.0, out.advisories);
  setup.screen_position = config.number("screen.position");
  setup.peak_fraction = config.number("screen.peak_fraction", 0.05);
  setup.count = config.integer("ensemble.count");
  setup.seed = seed_of(config);
  setup.substeps = static_cast<std::size_t>(config.integer("ensemble.substeps", 4));

  double kinetic = 0.0;
  for (double v : setup.velocity) kinetic += 0.5 * setup.mass * v * v;
  if (b.height < 50.0 * kinetic) {
    out.advisories.push_back("barrier height is below 50 times the packet kinetic energy");
  }

  const auto r = run_double_slit(setup, threads);
  add_conservation_checks(out, config, r.record, false);
  out.checks.push_back(at_least("min_maxima", static_cast<double>(r.maxima),
                                tolerance(config, "min_maxima", 3.0),
                                "local maxima of the time-integrated screen density"));
  const double inside = r.crossed == 0
                            ? 0.0
                            : 1.0 - static_cast<double>(r.outside_apertures + r.multiple_apertures) /
                                        static_cast<double>(r.crossed);
  out.checks.push_back({"single_aperture", inside, 1.0, ">=",
                        r.crossed > 0 && r.outside_apertures == 0 && r.multiple_apertures == 0,
                        std::to_string(r.crossed) + " of " + std::to_string(setup.count) +
                            " paths crossed the wall; " + std::to_string(r.exited) +
                            " left the support"});
  out.advisories.push_back("transmitted fraction " + format_double(r.transmitted_fraction));

  {
    CsvWriter csv(dir / "screen.csv", {"coordinate", "density"});
    for (std::size_t i = 0; i < r.screen_density.size(); ++i) {
      csv.field(r.screen_coordinates[i]).field(r.screen_density[i]);
      csv.end_row();
    }
  }
  {
    CsvWriter csv(dir / "crossings.csv", {"id", "t", "coordinate", "aperture"});
    for (const auto& c : r.crossings) {
      csv.field(c.id).field(c.t).field(c.coordinate).field(c.aperture);
      csv.end_row();
    }
  }
  const std::size_t shown = std::min<std::size_t>(r.ensemble.trajectories.size(), 256);
  write_trajectory_csv(dir / "trajectories.csv",
                       std::span(r.ensemble.trajectories.data(), shown), 2);
  write_diagnostics_csv(dir / "diagnostics.csv", r.record);
  write_dswf(dir / "psi_final.dswf", r.record.snapshots.back());
  return out;
}

}  // namespace

std::size_t count_local_maxima(std::span<const double> profile, double fraction) {
  if (profile.size() < 3) return 0;
  const double top = *std::max_element(profile.begin(), profile.end());
  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < profile.size(); ++i) {
    if (profile[i] > profile[i - 1] && profile[i] > profile[i + 1] && profile[i] >= fraction * top) {
      ++count;
    }
  }
  return count;
}

int aperture_index(const BarrierParams& barrier, double coordinate) {
  for (std::size_t k = 0; k < barrier.slit_centers.size(); ++k) {
    if (std::abs(coordinate - barrier.slit_centers[k]) <= 0.5 * barrier.slit_widths.at(k)) {
      return static_cast<int>(k);
    }
  }
  return -1;
}

DoubleSlitResult run_double_slit(const DoubleSlitSetup& setup, unsigned threads) {
  if (setup.grid.dim() != 2) throw ConfigurationError("double slit needs a 2D grid");
  const auto& b = setup.barrier;
  if (b.slit_centers.size() != b.slit_widths.size() || b.slit_centers.empty()) {
    throw ConfigurationError("barrier needs one width per slit center");
  }
  if (setup.count <= 0) throw ConfigurationError("double slit needs a positive ensemble count");
  const int along = b.axis;
  const int across = 1 - along;
  const auto potential = PotentialSpec::barrier(b);

  DoubleSlitResult r;
  const auto psi0 = gaussian_packet(setup.grid, setup.center, setup.velocity, setup.width,
                                    setup.hbar, setup.mass);
  r.record = split_step_evolve(psi0, potential, setup.evolution);

  const auto& grid = setup.grid;
  const auto& ax = grid.axis(along);
  const auto& cx = grid.axis(across);
  const auto screen_node = static_cast<std::size_t>(
      std::clamp<long long>(std::llround((setup.screen_position - ax.lower) / ax.spacing()), 0,
                            static_cast<long long>(ax.points) - 1));
  r.screen_coordinates.resize(cx.points);
  r.screen_density.assign(cx.points, 0.0);
  for (std::size_t j = 0; j < cx.points; ++j) r.screen_coordinates[j] = cx.coordinate(j);
  for (std::size_t s = 1; s < r.record.snapshots.size(); ++s) {
    const double w = r.record.times[s] - r.record.times[s - 1];
    const auto& psi = r.record.snapshots[s];
    for (std::size_t j = 0; j < cx.points; ++j) {
      const std::size_t flat = along == 0 ? grid.index(screen_node, j) : grid.index(j, screen_node);
      r.screen_density[j] += w * std::norm(psi[flat]);
    }
  }
  r.maxima = count_local_maxima(r.screen_density, setup.peak_fraction);

  const double far_side = b.wall_position + 0.5 * b.thickness;
  const auto rho_final = density(r.record.snapshots.back());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.point(i)[static_cast<std::size_t>(along)] > far_side) {
      r.transmitted_fraction += rho_final[i] * grid.cell_volume();
    }
  }

  const auto velocities = VelocityRecord::from(r.record);
  r.ensemble = make_ensemble(velocities, setup.count, setup.seed, setup.substeps, threads);
  const auto a = static_cast<std::size_t>(along);
  const auto c = static_cast<std::size_t>(across);
  for (const auto& tr : r.ensemble.trajectories) {
    if (tr.exited) ++r.exited;
    int first = -2;
    bool crossed = false;
    bool outside = false;
    bool multiple = false;
    for (std::size_t s = 1; s < tr.positions.size(); ++s) {
      const double p0 = tr.positions[s - 1][a] - b.wall_position;
      const double p1 = tr.positions[s][a] - b.wall_position;
      if ((p0 < 0.0) == (p1 < 0.0)) continue;
      const double f = p0 / (p0 - p1);
      SlitCrossing x;
      x.id = tr.id;
      x.t = tr.times[s - 1] + f * (tr.times[s] - tr.times[s - 1]);
      x.coordinate = tr.positions[s - 1][c] + f * (tr.positions[s][c] - tr.positions[s - 1][c]);
      x.aperture = aperture_index(b, x.coordinate);
      crossed = true;
      if (x.aperture < 0) outside = true;
      if (first == -2) {
        first = x.aperture;
      } else if (x.aperture != first) {
        multiple = true;
      }
      r.crossings.push_back(x);
    }
    if (crossed) {
      ++r.crossed;
      if (outside) ++r.outside_apertures;
      if (multiple && !outside) ++r.multiple_apertures;
    }
  }
  return r;
}

ScenarioOutcome execute_scenario(const ScenarioConfig& config, const fs::path& out_dir,
                                 unsigned threads) {
  switch (config.kind()) {
    case ScenarioKind::coherent_validate: return run_coherent(config, out_dir, threads);
    case ScenarioKind::free_spread: return run_free_spread(config, out_dir, threads);
    case ScenarioKind::hbar_sweep: return run_hbar_sweep(config, out_dir, threads);
    case ScenarioKind::factorize_2body: return run_factorize(config, out_dir);
    case ScenarioKind::manybody_hartree: return run_hartree(config, out_dir);
    case ScenarioKind::manybody_delta_compare: return run_delta_compare(config, out_dir);
    case ScenarioKind::double_slit: return run_double_slit_kind(config, out_dir, threads);
  }
  throw ConfigurationError("unknown scenario kind");
}

}  // namespace dscale
