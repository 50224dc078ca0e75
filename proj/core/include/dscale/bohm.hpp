#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "dscale/madelung.hpp"
#include "dscale/propagator.hpp"

namespace dscale {

enum class TrajectoryKind { dbb, newton };

struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::dbb;
  std::size_t id = 0;
  Point initial{};
  std::vector<double> times;
  std::vector<Point> positions;
  std::vector<Point> velocities;
  // Set when the path left the valid region; samples stop at the last
  // valid time.
  bool exited = false;
};

// Velocity fields of every stored snapshot, interpolated bilinearly in space
// and linearly in time.
class VelocityRecord {
 public:
  static VelocityRecord from(const EvolutionRecord& record,
                             double rho_floor_relative = kDefaultRhoFloor);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> times() const noexcept { return times_; }
  const VelocityField& field(std::size_t i) const { return fields_.at(i); }
  const std::vector<double>& initial_density() const noexcept { return rho0_; }

  std::optional<Point> at(const Point& x, double t) const;
  std::optional<Point> at_snapshot(const Point& x, std::size_t snapshot) const;

 private:
  Grid grid_;
  std::vector<double> times_;
  std::vector<VelocityField> fields_;
  std::vector<double> rho0_;
  double rho_floor_ = 0.0;
  friend Trajectory integrate_dbb(const VelocityRecord&, const Point&, std::size_t);
};

// dX/dt = grad S / m at X, fourth-order Runge-Kutta with `substeps` steps per
// snapshot interval. Throws DomainError if x0 is off the initial support.
Trajectory integrate_dbb(const VelocityRecord& velocities, const Point& x0,
                         std::size_t substeps);
Trajectory integrate_dbb(const EvolutionRecord& record, const Point& x0, std::size_t substeps);

// Uniform deviate in (0, 1) from a counter-based generator: depends only on
// (seed, stream, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

// Inverse-CDF sampling of a gridded density (marginal on axis 0, then the
// conditional on axis 1 in 2D). Each node owns the cell [x - dx/2, x + dx/2)
// with uniform density inside.
std::vector<Point> sample_initial(const Grid& grid, std::span<const double> rho0,
                                  long long count, std::uint64_t master_seed);

struct Ensemble {
  std::vector<Trajectory> trajectories;
  std::uint64_t master_seed = 0;
};

// Samples from the record's initial density and integrates every path.
// Results are independent of `threads`.
Ensemble make_ensemble(const VelocityRecord& velocities, long long count,
                       std::uint64_t master_seed, std::size_t substeps, unsigned threads = 1);
Ensemble integrate_ensemble(const VelocityRecord& velocities, std::span<const Point> starts,
                            std::size_t substeps, unsigned threads = 1);

struct EquivarianceSample {
  double t = 0.0;
  Point ks{};
  std::size_t active = 0;
  std::size_t exited = 0;
};

// Kolmogorov-Smirnov distance per axis between active trajectory positions
// and the marginal CDF of |psi(t)|^2 at every stored time.
std::vector<EquivarianceSample> equivariance_check(const EvolutionRecord& record,
                                                   const Ensemble& ensemble);

// Marginal CDF of a gridded density along `axis`, under the same cell
// convention as sample_initial.
class MarginalCdf {
 public:
  MarginalCdf(const Grid& grid, std::span<const double> rho, int axis);
  double operator()(double x) const;

 private:
  double lower_ = 0.0;
  double spacing_ = 1.0;
  std::vector<double> cumulative_;  // at cell left edges, size n + 1
};

double ks_distance(std::vector<double> samples, const MarginalCdf& cdf);

// Columns: id, t, x[, y], vx[, vy], exited.
void write_trajectory_csv(const std::filesystem::path& path,
                          std::span<const Trajectory> trajectories, int dim);
// Columns: t, ks_x[, ks_y], n_active.
void write_ensemble_csv(const std::filesystem::path& path,
                        std::span<const EquivarianceSample> samples, int dim);

}  // namespace dscale
