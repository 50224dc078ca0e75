#include "dscale/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dscale/csv.hpp"
#include "dscale/error.hpp"
#include "dscale/madelung.hpp"
#include "dscale/propagator.hpp"
#include "dscale/wave_field.hpp"
#include "parallel.hpp"

namespace dscale {
namespace {

Point add_scaled(const Point& a, const Point& b, double s) {
  return {a[0] + s * b[0], a[1] + s * b[1]};
}

double free_axis(double x0, double x, double t, double mass) {
  const double d = x - x0;
  return 0.5 * mass * d * d / t;
}

double linear_axis(double x0, double x, double t, double mass, double g) {
  const double d = x - x0;
  return 0.5 * mass * d * d / t - 0.5 * mass * g * t * (x + x0) - mass * g * g * t * t * t / 24.0;
}

double harmonic_axis(double x0, double x, double t, double mass, double omega) {
  if (omega == 0.0) return free_axis(x0, x, t, mass);
  const double wt = omega * t;
  if (wt >= std::numbers::pi) {
    throw FocalPointError("harmonic kernel at or past the conjugate point (omega t = " +
                          std::to_string(wt) + ")");
  }
  return mass * omega / (2.0 * std::sin(wt)) * ((x0 * x0 + x * x) * std::cos(wt) - 2.0 * x0 * x);
}

// Per-axis kernel for the closed-form kinds; the total is the sum over axes.
double closed_form_axis(const PotentialSpec& potential, int a, double x0, double x, double t,
                        double mass) {
  switch (potential.kind()) {
    case PotentialKind::free: return free_axis(x0, x, t, mass);
    case PotentialKind::linear:
      return linear_axis(x0, x, t, mass, potential.as_linear()->slope[a]);
    case PotentialKind::harmonic: {
      const auto* h = potential.as_harmonic();
      const double c = h->center[a];
      // Shifting the origin adds nothing: V only depends on x - c.
      return harmonic_axis(x0 - c, x - c, t, mass, h->omega[a]);
    }
    default: throw PreconditionError("no closed-form kernel for " + to_string(potential.kind()));
  }
}

double path_action(const std::vector<Point>& nodes, double tau, const PotentialSpec& potential,
                   double mass, int dim) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = nodes[k + 1][a] - nodes[k][a];
      d2 += d * d;
    }
    s += 0.5 * mass * d2 / tau -
         0.5 * tau * (potential.external(nodes[k], mass, dim) + potential.external(nodes[k + 1], mass, dim));
  }
  return s;
}

double discretized_action(const Point& x0, const Point& x, double t, const PotentialSpec& potential,
                          double mass, int dim, const PathOptions& options) {
  const std::size_t k_seg = std::max<std::size_t>(options.segments, 1);
  const double tau = t / static_cast<double>(k_seg);
  std::vector<Point> nodes(k_seg + 1);
  for (std::size_t k = 0; k <= k_seg; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(k_seg);
    for (int a = 0; a < kMaxDim; ++a) nodes[k][a] = (1.0 - f) * x0[a] + f * x[a];
  }
  const double relax = 1.5;
  const double curvature = 2.0 * mass / tau;
  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double largest = 0.0;
    for (std::size_t k = 1; k < k_seg; ++k) {
      const Point g = potential.gradient(nodes[k], mass, dim);
      for (int a = 0; a < dim; ++a) {
        const double grad =
            mass * (2.0 * nodes[k][a] - nodes[k - 1][a] - nodes[k + 1][a]) / tau - tau * g[a];
        const double delta = relax * grad / curvature;
        nodes[k][a] -= delta;
        largest = std::max(largest, std::abs(delta));
      }
    }
    if (largest < options.tolerance) break;
  }
  return path_action(nodes, tau, potential, mass, dim);
}

// Centered gradient of a nodal scalar divided by mass; one-sided at the edges.
std::vector<Point> action_velocity(const Grid& grid, std::span<const double> s, double mass) {
  std::vector<Point> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unravel(i);
    for (int a = 0; a < grid.dim(); ++a) {
      const std::size_t n = grid.axis(a).points;
      auto lo = idx;
      auto hi = idx;
      double span = 2.0;
      if (idx[a] == 0) {
        hi[a] += 1;
        span = 1.0;
      } else if (idx[a] + 1 == n) {
        lo[a] -= 1;
        span = 1.0;
      } else {
        lo[a] -= 1;
        hi[a] += 1;
      }
      v[i][a] = (s[grid.index(hi[0], hi[1])] - s[grid.index(lo[0], lo[1])]) /
                (span * grid.axis(a).spacing() * mass);
    }
  }
  return v;
}

// Multilinear interpolation of nodal vectors, clamped to the grid.
Point interpolate_velocity(const Grid& grid, const std::vector<Point>& v, const Point& x) {
  std::array<std::size_t, kMaxDim> i{};
  Point f{};
  for (int a = 0; a < grid.dim(); ++a) {
    const Axis& ax = grid.axis(a);
    const double u = std::clamp((x[a] - ax.lower) / ax.spacing(), 0.0,
                                static_cast<double>(ax.points - 1));
    i[a] = std::min(static_cast<std::size_t>(u), ax.points - 2);
    f[a] = u - static_cast<double>(i[a]);
  }
  if (grid.dim() == 1) {
    return {(1.0 - f[0]) * v[i[0]][0] + f[0] * v[i[0] + 1][0], 0.0};
  }
  Point out{};
  const auto& v00 = v[grid.index(i[0], i[1])];
  const auto& v01 = v[grid.index(i[0], i[1] + 1)];
  const auto& v10 = v[grid.index(i[0] + 1, i[1])];
  const auto& v11 = v[grid.index(i[0] + 1, i[1] + 1)];
  for (int a = 0; a < 2; ++a) {
    out[a] = (1.0 - f[0]) * ((1.0 - f[1]) * v00[a] + f[1] * v01[a]) +
             f[0] * ((1.0 - f[1]) * v10[a] + f[1] * v11[a]);
  }
  return out;
}

// Cloud-in-cell deposit; returns false when x lies outside the node hull.
bool deposit(const Grid& grid, std::vector<double>& rho, const Point& x, double weight) {
  std::array<std::size_t, kMaxDim> i{};
  Point f{};
  for (int a = 0; a < grid.dim(); ++a) {
    const Axis& ax = grid.axis(a);
    const double u = (x[a] - ax.lower) / ax.spacing();
    if (!(u >= 0.0) || !(u <= static_cast<double>(ax.points - 1))) return false;
    i[a] = std::min(static_cast<std::size_t>(u), ax.points - 2);
    f[a] = u - static_cast<double>(i[a]);
  }
  if (grid.dim() == 1) {
    rho[i[0]] += (1.0 - f[0]) * weight;
    rho[i[0] + 1] += f[0] * weight;
    return true;
  }
  rho[grid.index(i[0], i[1])] += (1.0 - f[0]) * (1.0 - f[1]) * weight;
  rho[grid.index(i[0], i[1] + 1)] += (1.0 - f[0]) * f[1] * weight;
  rho[grid.index(i[0] + 1, i[1])] += f[0] * (1.0 - f[1]) * weight;
  rho[grid.index(i[0] + 1, i[1] + 1)] += f[0] * f[1] * weight;
  return true;
}

std::string verdict(const std::vector<ConvergenceRow>& rows, double ConvergenceRow::*metric) {
  if (rows.size() < 2) return "insufficient";
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].*metric < rows[i - 1].*metric)) return "not-monotone";
  }
  return "decreasing";
}

}  // namespace

double euler_lagrange_action(const Point& x0, const Point& x, double t,
                             const PotentialSpec& potential, double mass, int dim,
                             const PathOptions& options) {
  if (!(t > 0.0)) throw ConfigurationError("euler_lagrange_action: t must be positive");
  if (!(mass > 0.0)) throw ConfigurationError("euler_lagrange_action: mass must be positive");
  if (dim < 1 || dim > kMaxDim) throw ConfigurationError("euler_lagrange_action: bad dimension");
  if (potential.is_pair()) throw PreconditionError("euler_lagrange_action needs an external potential");
  if (potential.has_closed_form()) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += closed_form_axis(potential, a, x0[a], x[a], t, mass);
    return s;
  }
  return discretized_action(x0, x, t, potential, mass, dim, options);
}

MinPlusResult minplus_action(const Grid& grid, std::span<const double> s0, double t,
                             const PotentialSpec& potential, double mass, unsigned threads) {
  if (s0.size() != grid.size()) throw GridMismatchError("minplus_action: S0 size mismatch");
  for (double v : s0) {
    if (!std::isfinite(v)) throw ConfigurationError("minplus_action: S0 must be finite");
  }
  const std::size_t n = grid.size();
  MinPlusResult result{std::vector<double>(n), std::vector<Point>(n)};
  if (t == 0.0) {
    std::copy(s0.begin(), s0.end(), result.action.begin());
    for (std::size_t i = 0; i < n; ++i) result.argmin[i] = grid.point(i);
    return result;
  }
  if (!(t > 0.0)) throw ConfigurationError("minplus_action: t must be >= 0");
  const int dim = grid.dim();
  const std::size_t n0 = grid.axis(0).points;
  const std::size_t n1 = dim == 2 ? grid.axis(1).points : 1;

  // Kernel tables: separable per axis for the closed-form kinds.
  std::vector<std::vector<double>> table(static_cast<std::size_t>(dim));
  const bool separable = potential.has_closed_form();
  if (separable) {
    for (int a = 0; a < dim; ++a) {
      const Axis& ax = grid.axis(a);
      auto& k = table[static_cast<std::size_t>(a)];
      k.resize(ax.points * ax.points);
      for (std::size_t j = 0; j < ax.points; ++j) {
        for (std::size_t i = 0; i < ax.points; ++i) {
          k[j * ax.points + i] =
              closed_form_axis(potential, a, ax.coordinate(j), ax.coordinate(i), t, mass);
        }
      }
    }
  }
  auto kernel = [&](std::size_t j, std::size_t i) {
    if (separable) {
      const auto jj = grid.unravel(j);
      const auto ii = grid.unravel(i);
      double k = table[0][jj[0] * n0 + ii[0]];
      if (dim == 2) k += table[1][jj[1] * n1 + ii[1]];
      return k;
    }
    return euler_lagrange_action(grid.point(j), grid.point(i), t, potential, mass, dim);
  };

  detail::parallel_for(n, threads, [&](std::size_t i) {
    const auto ii = grid.unravel(i);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    if (separable) {
      const double* k0 = table[0].data();
      for (std::size_t j0 = 0; j0 < n0; ++j0) {
        const double base = k0[j0 * n0 + ii[0]];
        if (dim == 1) {
          const double f = s0[j0] + base;
          if (f < best) {
            best = f;
            best_j = j0;
          }
          continue;
        }
        const double* k1 = table[1].data();
        const double* row = s0.data() + j0 * n1;
        for (std::size_t j1 = 0; j1 < n1; ++j1) {
          const double f = row[j1] + base + k1[j1 * n1 + ii[1]];
          if (f < best) {
            best = f;
            best_j = j0 * n1 + j1;
          }
        }
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        const double f = s0[j] + kernel(j, i);
        if (f < best) {
          best = f;
          best_j = j;
        }
      }
    }
    // Quadratic refinement around the discrete minimizer, one axis at a time.
    Point x0 = grid.point(best_j);
    double refined = best;
    const auto jj = grid.unravel(best_j);
    for (int a = 0; a < dim; ++a) {
      const std::size_t na = grid.axis(a).points;
      if (jj[a] == 0 || jj[a] + 1 >= na) continue;
      auto lo = jj;
      auto hi = jj;
      lo[a] -= 1;
      hi[a] += 1;
      const std::size_t jl = grid.index(lo[0], lo[1]);
      const std::size_t jh = grid.index(hi[0], hi[1]);
      const double fm = s0[jl] + kernel(jl, i);
      const double fp = s0[jh] + kernel(jh, i);
      const double curv = fm - 2.0 * best + fp;
      if (!(curv > 0.0)) continue;
      const double offset = 0.5 * (fm - fp) / curv;
      if (std::abs(offset) > 1.0) continue;
      refined -= (fm - fp) * (fm - fp) / (8.0 * curv);
      x0[a] += offset * grid.axis(a).spacing();
    }
    result.action[i] = refined;
    result.argmin[i] = x0;
  });
  return result;
}

Trajectory newton_trajectory(const Point& x0, const Point& v0, const PotentialSpec& potential,
                             double mass, double t_end, double dt, int dim) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw ConfigurationError("newton_trajectory: bad time span");
  if (!(mass > 0.0)) throw ConfigurationError("newton_trajectory: mass must be positive");
  if (potential.is_pair()) throw PreconditionError("newton_trajectory needs an external potential");
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / dt - 1e-9)));
  const double h = t_end / static_cast<double>(steps);
  Trajectory traj;
  traj.kind = TrajectoryKind::newton;
  traj.initial = x0;
  Point x = x0;
  Point v = v0;
  for (int a = dim; a < kMaxDim; ++a) x[a] = v[a] = 0.0;
  auto accel = [&](const Point& p) {
    Point g = potential.gradient(p, mass, dim);
    for (int a = 0; a < kMaxDim; ++a) g[a] = a < dim ? -g[a] / mass : 0.0;
    return g;
  };
  traj.times.push_back(0.0);
  traj.positions.push_back(x);
  traj.velocities.push_back(v);
  for (std::size_t s = 0; s < steps; ++s) {
    const Point a1 = accel(x);
    const Point x2 = add_scaled(x, v, 0.5 * h);
    const Point v2 = add_scaled(v, a1, 0.5 * h);
    const Point a2 = accel(x2);
    const Point x3 = add_scaled(x, v2, 0.5 * h);
    const Point v3 = add_scaled(v, a2, 0.5 * h);
    const Point a3 = accel(x3);
    const Point x4 = add_scaled(x, v3, h);
    const Point v4 = add_scaled(v, a3, h);
    const Point a4 = accel(x4);
    for (int a = 0; a < kMaxDim; ++a) {
      x[a] += h / 6.0 * (v[a] + 2.0 * v2[a] + 2.0 * v3[a] + v4[a]);
      v[a] += h / 6.0 * (a1[a] + 2.0 * a2[a] + 2.0 * a3[a] + a4[a]);
    }
    traj.times.push_back(static_cast<double>(s + 1) * h);
    traj.positions.push_back(x);
    traj.velocities.push_back(v);
  }
  return traj;
}

TransportResult transport_density(const Grid& grid, std::span<const double> rho0,
                                  std::span<const double> times,
                                  const std::vector<std::vector<double>>& actions, double mass,
                                  const TransportOptions& options) {
  if (rho0.size() != grid.size()) throw GridMismatchError("transport_density: rho0 size mismatch");
  if (times.empty() || actions.size() != times.size()) {
    throw PreconditionError("transport_density: one action per time is required");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw PreconditionError("transport_density: times must increase");
  }
  const int dim = grid.dim();
  std::vector<std::vector<Point>> velocity;
  for (const auto& s : actions) {
    if (s.size() != grid.size()) throw GridMismatchError("transport_density: action size mismatch");
    velocity.push_back(action_velocity(grid, s, mass));
  }

  // Sub-lattice of `sub` points per axis in every grid cell.
  const double per_cell = static_cast<double>(options.characteristics) / static_cast<double>(grid.size());
  const auto sub = static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::pow(std::max(per_cell, 1.0), 1.0 / dim) - 1e-9)));
  std::array<std::size_t, kMaxDim> lattice{1, 1};
  for (int a = 0; a < dim; ++a) lattice[a] = grid.axis(a).points * sub;
  const std::size_t count = lattice[0] * lattice[1];
  const double sub_volume = grid.cell_volume() / std::pow(static_cast<double>(sub), dim);
  const double peak = *std::max_element(rho0.begin(), rho0.end());

  std::vector<Point> pos(count);
  std::vector<double> weight(count, 0.0);
  std::vector<std::uint8_t> alive(count, 0);
  for (std::size_t c = 0; c < count; ++c) {
    const std::array<std::size_t, kMaxDim> li{c / lattice[1], c % lattice[1]};
    std::array<std::size_t, kMaxDim> node{0, 0};
    for (int a = 0; a < dim; ++a) {
      const Axis& ax = grid.axis(a);
      node[a] = li[a] / sub;
      const double offset = (static_cast<double>(li[a] % sub) + 0.5) / static_cast<double>(sub) - 0.5;
      pos[c][a] = ax.coordinate(node[a]) + offset * ax.spacing();
    }
    const double r = rho0[grid.index(node[0], node[1])];
    if (r > 1e-16 * peak) {
      weight[c] = r * sub_volume;
      alive[c] = 1;
    }
  }

  auto deposit_all = [&](TransportResult& out) {
    std::vector<double> rho(grid.size(), 0.0);
    double lost = 0.0;
    for (std::size_t c = 0; c < count; ++c) {
      if (weight[c] == 0.0) continue;
      if (!alive[c] || !deposit(grid, rho, pos[c], weight[c])) lost += weight[c];
    }
    for (auto& r : rho) r /= grid.cell_volume();
    out.lost_mass = std::max(out.lost_mass, lost);
    out.density.push_back(std::move(rho));
  };

  auto jacobian_flips = [&]() {
    for (std::size_t c = 0; c < count; ++c) {
      if (!alive[c]) continue;
      const std::size_t l0 = c / lattice[1];
      const std::size_t l1 = c % lattice[1];
      if (dim == 1) {
        if (l0 + 1 < lattice[0] && alive[c + 1] && !(pos[c + 1][0] > pos[c][0])) return true;
        continue;
      }
      if (l0 + 1 >= lattice[0] || l1 + 1 >= lattice[1]) continue;
      const std::size_t c0 = c + lattice[1];
      const std::size_t c1 = c + 1;
      if (!alive[c0] || !alive[c1]) continue;
      const double j = (pos[c0][0] - pos[c][0]) * (pos[c1][1] - pos[c][1]) -
                       (pos[c0][1] - pos[c][1]) * (pos[c1][0] - pos[c][0]);
      if (!(j > 0.0)) return true;
    }
    return false;
  };

  TransportResult out;
  deposit_all(out);
  const std::size_t substeps = std::max<std::size_t>(options.substeps, 1);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = (times[k + 1] - times[k]) / static_cast<double>(substeps);
    auto vel = [&](const Point& x, double t) {
      const double w = std::clamp((t - times[k]) / (times[k + 1] - times[k]), 0.0, 1.0);
      const Point a = interpolate_velocity(grid, velocity[k], x);
      const Point b = interpolate_velocity(grid, velocity[k + 1], x);
      return Point{(1.0 - w) * a[0] + w * b[0], (1.0 - w) * a[1] + w * b[1]};
    };
    for (std::size_t c = 0; c < count; ++c) {
      if (!alive[c]) continue;
      Point x = pos[c];
      for (std::size_t s = 0; s < substeps; ++s) {
        const double t = times[k] + static_cast<double>(s) * h;
        const Point k1 = vel(x, t);
        const Point k2 = vel(add_scaled(x, k1, 0.5 * h), t + 0.5 * h);
        const Point k3 = vel(add_scaled(x, k2, 0.5 * h), t + 0.5 * h);
        const Point k4 = vel(add_scaled(x, k3, h), t + h);
        for (int a = 0; a < dim; ++a) {
          x[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        }
      }
      pos[c] = x;
      if (!grid.contains(x)) alive[c] = 0;
    }
    if (!out.caustic && jacobian_flips()) out.caustic = true;
    deposit_all(out);
  }
  return out;
}

HJSolution solve_statistical_hj(const Grid& grid, std::span<const double> rho0,
                                std::span<const double> s0, std::span<const double> times,
                                const PotentialSpec& potential, double mass, unsigned threads,
                                const TransportOptions& options) {
  HJSolution sol;
  sol.grid = grid;
  sol.times.assign(times.begin(), times.end());
  for (double t : times) {
    auto mp = minplus_action(grid, s0, t, potential, mass, threads);
    sol.action.push_back(std::move(mp.action));
    sol.argmin.push_back(std::move(mp.argmin));
  }
  auto transport = transport_density(grid, rho0, times, sol.action, mass, options);
  sol.density = std::move(transport.density);
  sol.caustic = transport.caustic;
  return sol;
}

double wasserstein1(const Grid& grid, std::span<const double> rho_a,
                    std::span<const double> rho_b) {
  if (grid.dim() != 1) throw ConfigurationError("wasserstein1 is implemented for 1D grids");
  if (rho_a.size() != grid.size() || rho_b.size() != grid.size()) {
    throw GridMismatchError("wasserstein1: density size mismatch");
  }
  double total_a = 0.0;
  double total_b = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    total_a += rho_a[i];
    total_b += rho_b[i];
  }
  if (!(total_a > 0.0) || !(total_b > 0.0)) throw PreconditionError("wasserstein1: empty density");
  double fa = 0.0;
  double fb = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fa += rho_a[i] / total_a;
    fb += rho_b[i] / total_b;
    sum += std::abs(fa - fb);
  }
  return sum * grid.axis(0).spacing();
}

double sup_difference_mod_constant(std::span<const double> a, std::span<const double> b,
                                   std::span<const std::uint8_t> mask) {
  if (a.size() != b.size() || a.size() != mask.size()) {
    throw GridMismatchError("sup_difference_mod_constant: size mismatch");
  }
  std::vector<double> diff;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (mask[i]) diff.push_back(a[i] - b[i]);
  }
  if (diff.empty()) throw PreconditionError("sup_difference_mod_constant: empty mask");
  std::vector<double> sorted = diff;
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  double median = sorted[mid];
  if (sorted.size() % 2 == 0) {
    const double below = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + below);
  }
  double sup = 0.0;
  for (double d : diff) sup = std::max(sup, std::abs(d - median));
  return sup;
}

ConvergenceReport hbar_sweep(const SweepScenario& scenario, std::span<const double> hbars) {
  if (scenario.width_scales_with_hbar) {
    throw PreconditionError("hbar sweep needs rho0 and S0 independent of hbar");
  }
  if (scenario.grid.dim() != 1) throw ConfigurationError("hbar sweep runs on a 1D grid");
  if (hbars.empty()) throw ConfigurationError("hbar sweep needs at least one hbar");
  for (std::size_t i = 0; i < hbars.size(); ++i) {
    if (!(hbars[i] > 0.0)) throw ConfigurationError("hbar values must be positive");
    if (i > 0 && !(hbars[i] < hbars[i - 1])) {
      throw PreconditionError("hbar values must be strictly decreasing");
    }
  }
  if (!(scenario.target_time > 0.0) || !(scenario.dt > 0.0)) {
    throw ConfigurationError("hbar sweep needs positive target time and dt");
  }
  const Grid& grid = scenario.grid;
  const double m = scenario.mass;
  const double sigma = scenario.width;
  const auto steps = static_cast<std::size_t>(std::llround(scenario.target_time / scenario.dt));
  const double dt = scenario.target_time / static_cast<double>(steps);

  std::vector<double> rho0(grid.size());
  std::vector<double> s0(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.point(i)[0];
    const double d = x - scenario.center;
    rho0[i] = std::exp(-d * d / (2.0 * sigma * sigma)) / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
    s0[i] = m * scenario.velocity * x;
  }
  std::vector<double> mesh;
  const std::size_t intervals = 16;
  for (std::size_t k = 0; k <= intervals; ++k) {
    mesh.push_back(scenario.target_time * static_cast<double>(k) / static_cast<double>(intervals));
  }
  const HJSolution hj = solve_statistical_hj(grid, rho0, s0, mesh, scenario.potential, m,
                                             scenario.threads);
  const auto& s_classical = hj.action.back();
  const auto& rho_classical = hj.density.back();

  const Point x0{scenario.center + scenario.trajectory_offset, 0.0};
  const Point v0{scenario.velocity, 0.0};
  const Trajectory newton = newton_trajectory(x0, v0, scenario.potential, m, scenario.target_time, dt, 1);

  ConvergenceReport report;
  report.rows.resize(hbars.size());
  detail::parallel_for(hbars.size(), scenario.threads, [&](std::size_t r) {
    const double hbar = hbars[r];
    const WaveField psi0 = gaussian_packet(grid, Point{scenario.center, 0.0}, v0, sigma, hbar, m);
    EvolutionOptions opts;
    opts.dt = dt;
    opts.steps = steps;
    opts.store_every = scenario.store_every;
    opts.diagnostics_every = 0;
    const EvolutionRecord record = split_step_evolve(psi0, scenario.potential, opts);
    const PolarField polar = to_polar(record.snapshots.back());
    const double peak = *std::max_element(polar.rho.begin(), polar.rho.end());
    std::vector<std::uint8_t> mask(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      mask[i] = polar.valid[i] && polar.rho[i] > 0.01 * peak;
    }
    ConvergenceRow row;
    row.hbar = hbar;
    row.action_sup_diff = sup_difference_mod_constant(polar.action, s_classical, mask);
    row.density_w1 = wasserstein1(grid, polar.rho, rho_classical);
    const Trajectory dbb = integrate_dbb(record, x0, scenario.substeps);
    double dev = 0.0;
    for (std::size_t k = 0; k < dbb.times.size(); ++k) {
      const auto n = static_cast<std::size_t>(std::llround(dbb.times[k] / dt));
      dev = std::max(dev, std::abs(dbb.positions[k][0] - newton.positions[n][0]));
    }
    if (dbb.exited) dev = std::numeric_limits<double>::infinity();
    row.traj_sup_dev = dev;
    report.rows[r] = row;
  });
  report.verdicts = {verdict(report.rows, &ConvergenceRow::action_sup_diff),
                     verdict(report.rows, &ConvergenceRow::density_w1),
                     verdict(report.rows, &ConvergenceRow::traj_sup_dev)};
  return report;
}

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& report) {
  CsvWriter csv(path, {"hbar", "action_sup_diff", "density_W1", "traj_sup_dev"});
  for (const auto& row : report.rows) {
    csv.field(row.hbar).field(row.action_sup_diff).field(row.density_w1).field(row.traj_sup_dev);
    csv.end_row();
  }
}

}  // namespace dscale
