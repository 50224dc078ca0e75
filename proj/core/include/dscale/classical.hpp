#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dscale/bohm.hpp"
#include "dscale/potential.hpp"

namespace dscale {

struct PathOptions {
  std::size_t segments = 64;
  std::size_t max_sweeps = 20000;
  double tolerance = 1e-13;
};

// Classical action of the extremal path from (x0, 0) to (x, t).
// Free, linear and harmonic kinds use closed forms; other external kinds
// minimize the discretized action over piecewise-linear paths by
// over-relaxed coordinate descent. Harmonic with omega t >= pi on any axis
// throws FocalPointError.
double euler_lagrange_action(const Point& x0, const Point& x, double t,
                             const PotentialSpec& potential, double mass, int dim,
                             const PathOptions& options = {});

struct MinPlusResult {
  std::vector<double> action;
  std::vector<Point> argmin;
};

// S(x, t) = min over grid points x0 of S0(x0) + S_EL(x0; x, t), followed by
// a per-axis quadratic refinement around the discrete minimizer. Ties go to
// the lexicographically smallest x0.
MinPlusResult minplus_action(const Grid& grid, std::span<const double> s0, double t,
                             const PotentialSpec& potential, double mass,
                             unsigned threads = 1);

// Fourth-order Runge-Kutta on m x'' = -grad V, one sample per step.
Trajectory newton_trajectory(const Point& x0, const Point& v0, const PotentialSpec& potential,
                             double mass, double t_end, double dt, int dim);

struct TransportOptions {
  std::size_t characteristics = 100000;
  std::size_t substeps = 8;
};

struct TransportResult {
  std::vector<std::vector<double>> density;  // per time
  bool caustic = false;
  double lost_mass = 0.0;  // characteristics that left the grid
};

// Pushes rho0 forward along dX/dt = grad S / m using actions sampled on the
// time mesh, then deposits onto the grid with cloud-in-cell weights.
// Characteristics start on a regular sub-lattice of the grid cells.
TransportResult transport_density(const Grid& grid, std::span<const double> rho0,
                                  std::span<const double> times,
                                  const std::vector<std::vector<double>>& actions, double mass,
                                  const TransportOptions& options = {});

struct HJSolution {
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> action;
  std::vector<std::vector<double>> density;
  std::vector<std::vector<Point>> argmin;
  bool caustic = false;
};

HJSolution solve_statistical_hj(const Grid& grid, std::span<const double> rho0,
                                std::span<const double> s0, std::span<const double> times,
                                const PotentialSpec& potential, double mass,
                                unsigned threads = 1, const TransportOptions& options = {});

// 1D Wasserstein-1 distance: integral of |F_a - F_b|.
double wasserstein1(const Grid& grid, std::span<const double> rho_a,
                    std::span<const double> rho_b);

// sup |a - b - c| over the mask, with c the median of a - b on the mask.
double sup_difference_mod_constant(std::span<const double> a, std::span<const double> b,
                                   std::span<const std::uint8_t> mask);

// Prepared non-discerned 1D scenario: Gaussian rho0 of fixed width and
// S0 = m v0 x, neither depending on hbar.
struct SweepScenario {
  Grid grid;
  double mass = 1.0;
  double center = 0.0;
  double width = 1.0;
  double velocity = 0.0;
  // Set when the width is tied to hbar (sigma = sqrt(hbar / 2 m omega));
  // such a scenario is not prepared non-discerned.
  bool width_scales_with_hbar = false;
  PotentialSpec potential = PotentialSpec::free();
  double target_time = 1.0;
  double dt = 1e-3;
  std::size_t store_every = 10;
  // dBB/Newton comparison starts at center + offset.
  double trajectory_offset = 1.0;
  std::size_t substeps = 4;
  unsigned threads = 1;
};

struct ConvergenceRow {
  double hbar = 0.0;
  double action_sup_diff = 0.0;
  double density_w1 = 0.0;
  double traj_sup_dev = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  // "decreasing", "not-monotone" or "insufficient", per metric in the order
  // action, density, trajectory.
  std::array<std::string, 3> verdicts;
};

// Throws PreconditionError if the scenario is not prepared non-discerned or
// the hbar list is not strictly decreasing.
ConvergenceReport hbar_sweep(const SweepScenario& scenario, std::span<const double> hbars);

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& report);

}  // namespace dscale
