#include "dscale/bohm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dscale/csv.hpp"
#include "dscale/error.hpp"
#include "parallel.hpp"

namespace dscale {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix(std::uint64_t z) noexcept {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Cell lookup along one axis for bilinear interpolation between nodes.
bool locate(const Axis& axis, double x, std::size_t& i, double& frac) {
  const double u = (x - axis.lower) / axis.spacing();
  if (!(u >= 0.0) || !(u <= static_cast<double>(axis.points - 1))) return false;
  const double fl = std::floor(u);
  i = std::min(static_cast<std::size_t>(fl), axis.points - 2);
  frac = u - static_cast<double>(i);
  return true;
}

Point add(const Point& a, const Point& b, double s) {
  return {a[0] + s * b[0], a[1] + s * b[1]};
}

// Cumulative weights c_0 = 0, c_{i+1} = c_i + w_i / sum(w).
std::vector<double> cumulative(std::span<const double> w) {
  std::vector<double> c(w.size() + 1, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) c[i + 1] = c[i] + std::max(w[i], 0.0);
  const double total = c.back();
  if (!(total > 0.0)) throw PreconditionError("density has no mass");
  for (auto& v : c) v /= total;
  c.back() = 1.0;
  return c;
}

double invert(const std::vector<double>& c, const Axis& axis, double u) {
  auto it = std::upper_bound(c.begin(), c.end(), u);
  std::size_t cell = static_cast<std::size_t>(std::distance(c.begin(), it));
  cell = std::clamp<std::size_t>(cell, 1, c.size() - 1) - 1;
  while (c[cell + 1] <= c[cell] && cell + 1 < c.size() - 1) ++cell;
  const double width = c[cell + 1] - c[cell];
  const double f = width > 0.0 ? std::clamp((u - c[cell]) / width, 0.0, 1.0) : 0.5;
  const double dx = axis.spacing();
  return axis.coordinate(cell) - 0.5 * dx + f * dx;
}

}  // namespace

VelocityRecord VelocityRecord::from(const EvolutionRecord& record, double rho_floor_relative) {
  if (record.snapshots.empty()) throw PreconditionError("velocity record needs snapshots");
  VelocityRecord out;
  out.grid_ = record.grid();
  out.times_ = record.times;
  out.fields_.reserve(record.snapshots.size());
  for (const auto& snap : record.snapshots) {
    out.fields_.push_back(velocity_field(to_polar(snap, rho_floor_relative)));
  }
  out.rho0_ = density(record.snapshots.front());
  const double peak = *std::max_element(out.rho0_.begin(), out.rho0_.end());
  out.rho_floor_ = rho_floor_relative * peak;
  return out;
}

std::optional<Point> VelocityRecord::at_snapshot(const Point& x, std::size_t snapshot) const {
  const VelocityField& f = fields_.at(snapshot);
  std::array<std::size_t, kMaxDim> i{};
  Point frac{};
  for (int a = 0; a < grid_.dim(); ++a) {
    if (!locate(grid_.axis(a), x[a], i[a], frac[a])) return std::nullopt;
  }
  Point v{};
  if (grid_.dim() == 1) {
    const std::size_t lo = i[0];
    const std::size_t hi = i[0] + 1;
    if (!f.valid[lo] || !f.valid[hi]) return std::nullopt;
    v[0] = (1.0 - frac[0]) * f.velocity[lo][0] + frac[0] * f.velocity[hi][0];
    return v;
  }
  const std::size_t c00 = grid_.index(i[0], i[1]);
  const std::size_t c01 = grid_.index(i[0], i[1] + 1);
  const std::size_t c10 = grid_.index(i[0] + 1, i[1]);
  const std::size_t c11 = grid_.index(i[0] + 1, i[1] + 1);
  if (!f.valid[c00] || !f.valid[c01] || !f.valid[c10] || !f.valid[c11]) return std::nullopt;
  for (int a = 0; a < 2; ++a) {
    v[a] = (1.0 - frac[0]) * ((1.0 - frac[1]) * f.velocity[c00][a] + frac[1] * f.velocity[c01][a]) +
           frac[0] * ((1.0 - frac[1]) * f.velocity[c10][a] + frac[1] * f.velocity[c11][a]);
  }
  return v;
}

std::optional<Point> VelocityRecord::at(const Point& x, double t) const {
  if (times_.size() == 1) return at_snapshot(x, 0);
  if (t < times_.front() || t > times_.back()) return std::nullopt;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = static_cast<std::size_t>(std::distance(times_.begin(), it));
  k = std::clamp<std::size_t>(k, 1, times_.size() - 1) - 1;
  const double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
  if (w <= 0.0) return at_snapshot(x, k);
  if (w >= 1.0) return at_snapshot(x, k + 1);
  const auto a = at_snapshot(x, k);
  const auto b = at_snapshot(x, k + 1);
  if (!a || !b) return std::nullopt;
  return Point{(1.0 - w) * (*a)[0] + w * (*b)[0], (1.0 - w) * (*a)[1] + w * (*b)[1]};
}

Trajectory integrate_dbb(const VelocityRecord& velocities, const Point& x0, std::size_t substeps) {
  if (substeps == 0) throw ConfigurationError("integrate_dbb: substeps must be >= 1");
  const Grid& grid = velocities.grid();
  if (!grid.contains(x0)) throw DomainError("trajectory start outside the grid");
  std::size_t node_index[kMaxDim] = {0, 0};
  for (int a = 0; a < grid.dim(); ++a) {
    const Axis& ax = grid.axis(a);
    const double u = std::round((x0[a] - ax.lower) / ax.spacing());
    node_index[a] = std::min(static_cast<std::size_t>(std::max(u, 0.0)), ax.points - 1);
  }
  const std::size_t node = grid.index(node_index[0], node_index[1]);
  if (!(velocities.rho0_[node] > velocities.rho_floor_)) {
    throw DomainError("trajectory start off the support of the initial density");
  }

  Trajectory traj;
  traj.kind = TrajectoryKind::dbb;
  traj.initial = x0;
  const auto times = velocities.times();
  Point x = x0;
  auto v0 = velocities.at(x, times.front());
  if (!v0) {
    traj.exited = true;
    return traj;
  }
  traj.times.push_back(times.front());
  traj.positions.push_back(x);
  traj.velocities.push_back(*v0);
  auto rk4 = [&](double t, double h, double t_end) {
    const auto k1 = velocities.at(x, t);
    if (!k1) return false;
    const auto k2 = velocities.at(add(x, *k1, 0.5 * h), t + 0.5 * h);
    if (!k2) return false;
    const auto k3 = velocities.at(add(x, *k2, 0.5 * h), t + 0.5 * h);
    if (!k3) return false;
    const auto k4 = velocities.at(add(x, *k3, h), t_end);
    if (!k4) return false;
    for (int a = 0; a < kMaxDim; ++a) {
      x[a] += h / 6.0 * ((*k1)[a] + 2.0 * (*k2)[a] + 2.0 * (*k3)[a] + (*k4)[a]);
    }
    return true;
  };
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = (times[k + 1] - times[k]) / static_cast<double>(substeps);
    for (std::size_t s = 0; s < substeps; ++s) {
      const double t = times[k] + static_cast<double>(s) * h;
      const double t_end = s + 1 == substeps ? times[k + 1] : t + h;
      if (!rk4(t, h, t_end)) {
        traj.exited = true;
        return traj;
      }
    }
    const auto v = velocities.at(x, times[k + 1]);
    if (!v) {
      traj.exited = true;
      return traj;
    }
    traj.times.push_back(times[k + 1]);
    traj.positions.push_back(x);
    traj.velocities.push_back(*v);
  }
  return traj;
}

Trajectory integrate_dbb(const EvolutionRecord& record, const Point& x0, std::size_t substeps) {
  return integrate_dbb(VelocityRecord::from(record), x0, substeps);
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
  const std::uint64_t key = splitmix(seed ^ splitmix(stream * kGolden + 0x632BE59BD9B4E019ull));
  const std::uint64_t bits = splitmix(key ^ splitmix(counter));
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<Point> sample_initial(const Grid& grid, std::span<const double> rho0, long long count,
                                  std::uint64_t master_seed) {
  if (count <= 0) throw ConfigurationError("sample count must be positive");
  if (rho0.size() != grid.size()) throw GridMismatchError("sample_initial: density size mismatch");
  std::vector<Point> out(static_cast<std::size_t>(count));
  const Axis& ax0 = grid.axis(0);
  if (grid.dim() == 1) {
    const auto c = cumulative(rho0);
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = {invert(c, ax0, counter_uniform(master_seed, 0, j)), 0.0};
    }
    return out;
  }
  const Axis& ax1 = grid.axis(1);
  const std::size_t n0 = ax0.points;
  const std::size_t n1 = ax1.points;
  std::vector<double> marginal(n0, 0.0);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t k = 0; k < n1; ++k) marginal[i] += std::max(rho0[grid.index(i, k)], 0.0);
  }
  const auto c0 = cumulative(marginal);
  std::vector<std::vector<double>> rows(n0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double x = invert(c0, ax0, counter_uniform(master_seed, 0, j));
    const double dx = ax0.spacing();
    const auto row = std::min(
        static_cast<std::size_t>(std::max(std::floor((x - ax0.lower + 0.5 * dx) / dx), 0.0)), n0 - 1);
    if (rows[row].empty()) rows[row] = cumulative(rho0.subspan(row * n1, n1));
    out[j] = {x, invert(rows[row], ax1, counter_uniform(master_seed, 1, j))};
  }
  return out;
}

Ensemble integrate_ensemble(const VelocityRecord& velocities, std::span<const Point> starts,
                            std::size_t substeps, unsigned threads) {
  Ensemble ensemble;
  ensemble.trajectories.resize(starts.size());
  detail::parallel_for(starts.size(), threads, [&](std::size_t i) {
    Trajectory traj;
    try {
      traj = integrate_dbb(velocities, starts[i], substeps);
    } catch (const DomainError&) {
      traj.initial = starts[i];
      traj.exited = true;
    }
    traj.id = i;
    ensemble.trajectories[i] = std::move(traj);
  });
  return ensemble;
}

Ensemble make_ensemble(const VelocityRecord& velocities, long long count,
                       std::uint64_t master_seed, std::size_t substeps, unsigned threads) {
  const auto starts = sample_initial(velocities.grid(), velocities.initial_density(), count,
                                     master_seed);
  Ensemble ensemble = integrate_ensemble(velocities, starts, substeps, threads);
  ensemble.master_seed = master_seed;
  return ensemble;
}

MarginalCdf::MarginalCdf(const Grid& grid, std::span<const double> rho, int axis) {
  if (axis < 0 || axis >= grid.dim()) throw ConfigurationError("MarginalCdf: bad axis");
  const Axis& ax = grid.axis(axis);
  std::vector<double> marginal(ax.points, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) marginal[grid.unravel(i)[axis]] += rho[i];
  cumulative_ = cumulative(marginal);
  spacing_ = ax.spacing();
  lower_ = ax.lower - 0.5 * spacing_;
}

double MarginalCdf::operator()(double x) const {
  const double u = (x - lower_) / spacing_;
  const auto n = static_cast<double>(cumulative_.size() - 1);
  if (!(u > 0.0)) return 0.0;
  if (u >= n) return 1.0;
  const auto i = static_cast<std::size_t>(u);
  const double f = u - static_cast<double>(i);
  return cumulative_[i] + f * (cumulative_[i + 1] - cumulative_[i]);
}

double ks_distance(std::vector<double> samples, const MarginalCdf& cdf) {
  if (samples.empty()) return 1.0;
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

std::vector<EquivarianceSample> equivariance_check(const EvolutionRecord& record,
                                                   const Ensemble& ensemble) {
  const Grid& grid = record.grid();
  for (const auto& traj : ensemble.trajectories) {
    if (traj.times.size() > record.times.size()) {
      throw PreconditionError("ensemble time mesh longer than the record");
    }
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      if (traj.times[k] != record.times[k]) {
        throw PreconditionError("ensemble time mesh does not match the record");
      }
    }
  }
  std::vector<EquivarianceSample> out;
  for (std::size_t k = 0; k < record.times.size(); ++k) {
    EquivarianceSample sample;
    sample.t = record.times[k];
    const auto rho = density(record.snapshots[k]);
    for (int a = 0; a < grid.dim(); ++a) {
      std::vector<double> xs;
      for (const auto& traj : ensemble.trajectories) {
        if (traj.positions.size() > k) xs.push_back(traj.positions[k][a]);
      }
      sample.active = xs.size();
      sample.ks[a] = ks_distance(std::move(xs), MarginalCdf(grid, rho, a));
    }
    sample.exited = ensemble.trajectories.size() - sample.active;
    out.push_back(sample);
  }
  return out;
}

void write_trajectory_csv(const std::filesystem::path& path,
                          std::span<const Trajectory> trajectories, int dim) {
  CsvWriter csv(path);
  if (dim == 1) {
    csv.header({"id", "t", "x", "vx", "exited"});
  } else {
    csv.header({"id", "t", "x", "y", "vx", "vy", "exited"});
  }
  for (const auto& traj : trajectories) {
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      csv.field(traj.id).field(traj.times[k]);
      for (int a = 0; a < dim; ++a) csv.field(traj.positions[k][a]);
      for (int a = 0; a < dim; ++a) csv.field(traj.velocities[k][a]);
      csv.field(static_cast<int>(traj.exited));
      csv.end_row();
    }
  }
}

void write_ensemble_csv(const std::filesystem::path& path,
                        std::span<const EquivarianceSample> samples, int dim) {
  CsvWriter csv(path);
  if (dim == 1) {
    csv.header({"t", "ks_x", "n_active"});
  } else {
    csv.header({"t", "ks_x", "ks_y", "n_active"});
  }
  for (const auto& s : samples) {
    csv.field(s.t);
    for (int a = 0; a < dim; ++a) csv.field(s.ks[a]);
    csv.field(s.active);
    csv.end_row();
  }
}

}  // namespace dscale
