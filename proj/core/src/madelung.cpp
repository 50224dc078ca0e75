#include "dscale/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "dscale/csv.hpp"
#include "dscale/error.hpp"

namespace dscale {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Wraps an angle into (-pi, pi].
double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a == -std::numbers::pi ? std::numbers::pi : a;
}

double wrap_action(double ds, double hbar) { return hbar * wrap_angle(ds / hbar); }

// Neighbor one step along `axis`; false past the edge (no periodic wrap).
bool neighbor(const Grid& grid, std::size_t flat, int axis, int dir, std::size_t& out) {
  auto idx = grid.unravel(flat);
  const std::size_t n = grid.axis(axis).points;
  if (dir < 0 && idx[axis] == 0) return false;
  if (dir > 0 && idx[axis] + 1 >= n) return false;
  idx[axis] = dir < 0 ? idx[axis] - 1 : idx[axis] + 1;
  out = grid.index(idx[0], idx[1]);
  return true;
}

// Node and both neighbors on every axis valid.
bool stencil_valid(const Grid& grid, std::span<const std::uint8_t> valid, std::size_t flat) {
  if (!valid[flat]) return false;
  for (int a = 0; a < grid.dim(); ++a) {
    std::size_t lo = 0;
    std::size_t hi = 0;
    if (!neighbor(grid, flat, a, -1, lo) || !neighbor(grid, flat, a, +1, hi)) return false;
    if (!valid[lo] || !valid[hi]) return false;
  }
  return true;
}

std::vector<std::uint8_t> support(const std::vector<double>& rho, double floor_relative) {
  const double peak = rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end());
  const double floor = floor_relative * peak;
  std::vector<std::uint8_t> valid(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) valid[i] = peak > 0.0 && rho[i] >= floor;
  return valid;
}

void polar_header(CsvWriter& csv, int dim) {
  if (dim == 1) {
    csv.header({"x", "rho", "S", "valid"});
  } else {
    csv.header({"x", "y", "rho", "S", "valid"});
  }
}

}  // namespace

PolarField to_polar(const WaveField& field, double rho_floor_relative) {
  const Grid& grid = field.grid();
  PolarField polar;
  polar.grid = grid;
  polar.hbar = field.hbar();
  polar.mass = field.mass();
  polar.rho = density(field);
  polar.valid = support(polar.rho, rho_floor_relative);
  polar.action.assign(grid.size(), kNaN);
  polar.component.assign(grid.size(), -1);

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (polar.valid[i]) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return polar.rho[a] > polar.rho[b]; });

  const double hbar = field.hbar();
  std::deque<std::size_t> queue;
  for (std::size_t seed : order) {
    if (polar.component[seed] >= 0) continue;
    const int label = polar.component_count++;
    polar.component[seed] = label;
    polar.action[seed] = hbar * std::arg(field[seed]);
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      const double phase = std::arg(field[cur]);
      for (int a = 0; a < grid.dim(); ++a) {
        for (int dir : {-1, +1}) {
          std::size_t next = 0;
          if (!neighbor(grid, cur, a, dir, next)) continue;
          if (!polar.valid[next] || polar.component[next] >= 0) continue;
          polar.component[next] = label;
          polar.action[next] =
              polar.action[cur] + hbar * wrap_angle(std::arg(field[next]) - phase);
          queue.push_back(next);
        }
      }
    }
  }
  polar.disconnected = polar.component_count > 1;
  return polar;
}

WaveField from_polar(const PolarField& polar, Frame frame) {
  std::vector<Complex> amplitudes(polar.grid.size());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const double s = polar.valid[i] ? polar.action[i] : 0.0;
    amplitudes[i] = std::polar(std::sqrt(std::max(polar.rho[i], 0.0)), s / polar.hbar);
  }
  return WaveField(polar.grid, std::move(amplitudes), polar.hbar, polar.mass, frame);
}

MaskedField quantum_potential(const WaveField& field, double rho_floor_relative) {
  const Grid& grid = field.grid();
  const auto rho = density(field);
  const auto valid = support(rho, rho_floor_relative);
  std::vector<double> root(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) root[i] = std::sqrt(rho[i]);

  MaskedField out{grid, std::vector<double>(grid.size(), kNaN),
                  std::vector<std::uint8_t>(grid.size(), 0)};
  const double scale = -field.hbar() * field.hbar() / (2.0 * field.mass());
  const Point h = grid.spacing();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!stencil_valid(grid, valid, i)) continue;
    double lap = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      std::size_t lo = 0;
      std::size_t hi = 0;
      neighbor(grid, i, a, -1, lo);
      neighbor(grid, i, a, +1, hi);
      lap += (root[hi] - 2.0 * root[i] + root[lo]) / (h[a] * h[a]);
    }
    out.values[i] = scale * lap / root[i];
    out.valid[i] = 1;
  }
  return out;
}

VelocityField velocity_field(const PolarField& polar) {
  const Grid& grid = polar.grid;
  VelocityField out{grid, std::vector<Point>(grid.size(), Point{kNaN, kNaN}),
                    std::vector<std::uint8_t>(grid.size(), 0), polar.disconnected};
  const Point h = grid.spacing();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!stencil_valid(grid, polar.valid, i)) continue;
    Point v{};
    for (int a = 0; a < grid.dim(); ++a) {
      std::size_t lo = 0;
      std::size_t hi = 0;
      neighbor(grid, i, a, -1, lo);
      neighbor(grid, i, a, +1, hi);
      const double ds = wrap_action(polar.action[hi] - polar.action[lo], polar.hbar);
      v[a] = ds / (2.0 * h[a] * polar.mass);
    }
    out.velocity[i] = v;
    out.valid[i] = 1;
  }
  return out;
}

std::vector<ResidualSample> madelung_residuals(const EvolutionRecord& record,
                                               const PotentialSpec& potential,
                                               double rho_floor_relative) {
  const std::size_t n = record.snapshots.size();
  if (n < 3) throw PreconditionError("madelung_residuals needs at least three snapshots");
  const double dt = record.times[1] - record.times[0];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double step = record.times[k + 1] - record.times[k];
    if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
      throw PreconditionError("madelung_residuals needs uniformly spaced snapshots");
    }
  }
  const Grid& grid = record.grid();
  const double mass = record.snapshots.front().mass();
  const double hbar = record.snapshots.front().hbar();
  const auto v_ext = potential.sample(grid, mass);
  const Point h = grid.spacing();

  std::vector<ResidualSample> out;
  PolarField prev = to_polar(record.snapshots[0], rho_floor_relative);
  PolarField cur = to_polar(record.snapshots[1], rho_floor_relative);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    PolarField next = to_polar(record.snapshots[k + 1], rho_floor_relative);
    const auto q = quantum_potential(record.snapshots[k], rho_floor_relative);
    ResidualSample sample;
    sample.t = record.times[k];
    double r1 = 0.0;
    double r2 = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!q.valid[i] || !prev.valid[i] || !next.valid[i]) continue;
      const double ds_dt = wrap_action(next.action[i] - prev.action[i], hbar) / (2.0 * dt);
      const double drho_dt = (next.rho[i] - prev.rho[i]) / (2.0 * dt);
      double grad_s2 = 0.0;
      double div_flux = 0.0;
      for (int a = 0; a < grid.dim(); ++a) {
        std::size_t lo = 0;
        std::size_t hi = 0;
        neighbor(grid, i, a, -1, lo);
        neighbor(grid, i, a, +1, hi);
        const double up = wrap_action(cur.action[hi] - cur.action[i], hbar);
        const double down = wrap_action(cur.action[i] - cur.action[lo], hbar);
        const double grad_s = (up + down) / (2.0 * h[a]);
        const double lap_s = (up - down) / (h[a] * h[a]);
        const double grad_rho = (cur.rho[hi] - cur.rho[lo]) / (2.0 * h[a]);
        grad_s2 += grad_s * grad_s;
        div_flux += (grad_rho * grad_s + cur.rho[i] * lap_s) / mass;
      }
      const double hj = ds_dt + grad_s2 / (2.0 * mass) + v_ext[i] + q.values[i];
      const double cont = drho_dt + div_flux;
      r1 += hj * hj;
      r2 += cont * cont;
      ++sample.points;
    }
    sample.hamilton_jacobi = std::sqrt(r1 * grid.cell_volume());
    sample.continuity = std::sqrt(r2 * grid.cell_volume());
    out.push_back(sample);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

void write_polar_csv(const std::filesystem::path& path, const PolarField& polar) {
  CsvWriter csv(path);
  polar_header(csv, polar.grid.dim());
  for (std::size_t i = 0; i < polar.grid.size(); ++i) {
    const Point x = polar.grid.point(i);
    for (int a = 0; a < polar.grid.dim(); ++a) csv.field(x[a]);
    csv.field(polar.rho[i]);
    if (polar.valid[i]) {
      csv.field(polar.action[i]);
    } else {
      csv.field(std::string_view("nan"));
    }
    csv.field(static_cast<int>(polar.valid[i]));
    csv.end_row();
  }
}

void write_residual_csv(const std::filesystem::path& path,
                        const std::vector<ResidualSample>& residuals) {
  CsvWriter csv(path, {"t", "hamilton_jacobi", "continuity", "points"});
  for (const auto& r : residuals) {
    csv.field(r.t).field(r.hamilton_jacobi).field(r.continuity).field(r.points);
    csv.end_row();
  }
}

}  // namespace dscale
