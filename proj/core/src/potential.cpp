#include "dscale/potential.hpp"

#include <algorithm>
#include <cmath>

#include "dscale/error.hpp"

namespace dscale {
namespace {

// Quintic smoothstep: 0 below -1/2, 1 above 1/2.
double ramp(double u) {
  if (u <= -0.5) return 0.0;
  if (u >= 0.5) return 1.0;
  const double t = u + 0.5;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

// Indicator of [a, b] whose edges rise over a band of width `smoothing`
// centered on each endpoint.
double window(double u, double a, double b, double smoothing) {
  if (smoothing <= 0.0) return (u >= a && u <= b) ? 1.0 : 0.0;
  return ramp((u - a) / smoothing) * ramp((b - u) / smoothing);
}

double barrier_value(const BarrierParams& p, const Point& x, int dim) {
  const double across = x[p.axis];
  const double half = 0.5 * p.thickness;
  const double wall = window(across, p.wall_position - half, p.wall_position + half, p.smoothing);
  if (dim < 2) return p.height * wall;
  const double along = x[1 - p.axis];
  double open = 0.0;
  for (std::size_t s = 0; s < p.slit_centers.size(); ++s) {
    const double hw = 0.5 * p.slit_widths[s];
    open += window(along, p.slit_centers[s] - hw, p.slit_centers[s] + hw, p.smoothing);
  }
  return p.height * wall * std::max(0.0, 1.0 - open);
}

double tabulated_value(const TabulatedParams& p, const Point& x) {
  const Grid& g = p.grid;
  // Multilinear interpolation with periodic wrap.
  std::array<std::size_t, kMaxDim> lo{};
  std::array<std::size_t, kMaxDim> hi{};
  Point frac{};
  for (int a = 0; a < g.dim(); ++a) {
    const Axis& ax = g.axis(a);
    const double u = (x[a] - ax.lower) / ax.spacing();
    const double fl = std::floor(u);
    const auto n = static_cast<long long>(ax.points);
    long long i = static_cast<long long>(fl) % n;
    if (i < 0) i += n;
    lo[a] = static_cast<std::size_t>(i);
    hi[a] = static_cast<std::size_t>((i + 1) % n);
    frac[a] = u - fl;
  }
  if (g.dim() == 1) {
    return (1.0 - frac[0]) * p.values[lo[0]] + frac[0] * p.values[hi[0]];
  }
  const double v00 = p.values[g.index(lo[0], lo[1])];
  const double v01 = p.values[g.index(lo[0], hi[1])];
  const double v10 = p.values[g.index(hi[0], lo[1])];
  const double v11 = p.values[g.index(hi[0], hi[1])];
  return (1.0 - frac[0]) * ((1.0 - frac[1]) * v00 + frac[1] * v01) +
         frac[0] * ((1.0 - frac[1]) * v10 + frac[1] * v11);
}

}  // namespace

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::free: return "free";
    case PotentialKind::linear: return "linear";
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::barrier: return "barrier";
    case PotentialKind::tabulated: return "tabulated";
    case PotentialKind::pair_spring: return "spring";
    case PotentialKind::pair_soft_coulomb: return "soft_coulomb";
    case PotentialKind::pair_radial_table: return "radial_table";
  }
  return "unknown";
}

PotentialSpec PotentialSpec::free() { return {PotentialKind::free, std::monostate{}}; }

PotentialSpec PotentialSpec::linear(const Point& slope) {
  return {PotentialKind::linear, LinearParams{slope}};
}

PotentialSpec PotentialSpec::harmonic(const Point& omega, const Point& center) {
  for (double w : omega) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigurationError("harmonic: omega must be >= 0");
  }
  return {PotentialKind::harmonic, HarmonicParams{omega, center}};
}

PotentialSpec PotentialSpec::barrier(BarrierParams params) {
  if (params.axis < 0 || params.axis >= kMaxDim) throw ConfigurationError("barrier: bad axis");
  if (params.slit_centers.size() != params.slit_widths.size()) {
    throw ConfigurationError("barrier: slit centers and widths differ in length");
  }
  if (!(params.thickness > 0.0)) throw ConfigurationError("barrier: thickness must be positive");
  if (params.smoothing < 0.0) throw ConfigurationError("barrier: smoothing must be >= 0");
  for (double w : params.slit_widths) {
    if (!(w > 0.0)) throw ConfigurationError("barrier: slit widths must be positive");
  }
  return {PotentialKind::barrier, std::move(params)};
}

PotentialSpec PotentialSpec::tabulated(Grid grid, std::vector<double> values) {
  if (values.size() != grid.size()) throw GridMismatchError("tabulated potential: size mismatch");
  return {PotentialKind::tabulated, TabulatedParams{std::move(grid), std::move(values)}};
}

PotentialSpec PotentialSpec::spring(double stiffness, double rest_length) {
  if (!(stiffness >= 0.0)) throw ConfigurationError("spring: stiffness must be >= 0");
  if (!(rest_length >= 0.0)) throw ConfigurationError("spring: rest length must be >= 0");
  return {PotentialKind::pair_spring, SpringParams{stiffness, rest_length}};
}

PotentialSpec PotentialSpec::soft_coulomb(double charge_product, double softening) {
  if (!(softening > 0.0)) throw ConfigurationError("soft_coulomb: softening must be positive");
  return {PotentialKind::pair_soft_coulomb, SoftCoulombParams{charge_product, softening}};
}

PotentialSpec PotentialSpec::radial_table(double spacing, std::vector<double> values) {
  if (!(spacing > 0.0) || values.size() < 2) {
    throw ConfigurationError("radial_table: need positive spacing and at least two values");
  }
  return {PotentialKind::pair_radial_table, RadialTableParams{spacing, std::move(values)}};
}

bool PotentialSpec::is_pair() const noexcept {
  return kind_ == PotentialKind::pair_spring || kind_ == PotentialKind::pair_soft_coulomb ||
         kind_ == PotentialKind::pair_radial_table;
}

bool PotentialSpec::has_closed_form() const noexcept {
  return kind_ == PotentialKind::free || kind_ == PotentialKind::linear ||
         kind_ == PotentialKind::harmonic;
}

double PotentialSpec::external(const Point& x, double mass, int dim) const {
  switch (kind_) {
    case PotentialKind::free: return 0.0;
    case PotentialKind::linear: {
      const auto& p = std::get<LinearParams>(params_);
      double v = 0.0;
      for (int a = 0; a < dim; ++a) v += mass * p.slope[a] * x[a];
      return v;
    }
    case PotentialKind::harmonic: {
      const auto& p = std::get<HarmonicParams>(params_);
      double v = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double d = x[a] - p.center[a];
        v += 0.5 * mass * p.omega[a] * p.omega[a] * d * d;
      }
      return v;
    }
    case PotentialKind::barrier:
      return barrier_value(std::get<BarrierParams>(params_), x, dim);
    case PotentialKind::tabulated: return tabulated_value(std::get<TabulatedParams>(params_), x);
    default: throw PreconditionError("pair potential used as an external field");
  }
}

Point PotentialSpec::gradient(const Point& x, double mass, int dim) const {
  switch (kind_) {
    case PotentialKind::free: return {};
    case PotentialKind::linear: {
      const auto& p = std::get<LinearParams>(params_);
      Point g{};
      for (int a = 0; a < dim; ++a) g[a] = mass * p.slope[a];
      return g;
    }
    case PotentialKind::harmonic: {
      const auto& p = std::get<HarmonicParams>(params_);
      Point g{};
      for (int a = 0; a < dim; ++a) g[a] = mass * p.omega[a] * p.omega[a] * (x[a] - p.center[a]);
      return g;
    }
    default: {
      if (is_pair()) throw PreconditionError("pair potential used as an external field");
      Point g{};
      const double h = 1e-5;
      for (int a = 0; a < dim; ++a) {
        Point xp = x;
        Point xm = x;
        xp[a] += h;
        xm[a] -= h;
        g[a] = (external(xp, mass, dim) - external(xm, mass, dim)) / (2.0 * h);
      }
      return g;
    }
  }
}

double PotentialSpec::pair(double distance) const {
  switch (kind_) {
    case PotentialKind::free: return 0.0;
    case PotentialKind::pair_spring: {
      const auto& p = std::get<SpringParams>(params_);
      const double d = distance - p.rest_length;
      return 0.5 * p.stiffness * d * d;
    }
    case PotentialKind::pair_soft_coulomb: {
      const auto& p = std::get<SoftCoulombParams>(params_);
      return p.charge_product / std::sqrt(distance * distance + p.softening * p.softening);
    }
    case PotentialKind::pair_radial_table: {
      const auto& p = std::get<RadialTableParams>(params_);
      const double u = distance / p.spacing;
      const auto last = p.values.size() - 1;
      if (u >= static_cast<double>(last)) return p.values.back();
      const auto i = static_cast<std::size_t>(u);
      const double f = u - static_cast<double>(i);
      return (1.0 - f) * p.values[i] + f * p.values[i + 1];
    }
    default: throw PreconditionError("external potential used as a pair coupling");
  }
}

std::vector<double> PotentialSpec::sample(const Grid& grid, double mass) const {
  std::vector<double> out(grid.size());
  if (const auto* t = std::get_if<TabulatedParams>(&params_); t && t->grid == grid) {
    return t->values;
  }
  if (const auto* b = as_barrier(); b && b->axis >= grid.dim()) {
    throw ConfigurationError("barrier axis exceeds grid dimension");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = external(grid.point(i), mass, grid.dim());
  return out;
}

std::vector<double> PotentialSpec::sample_pair(const Grid& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point r = grid.point(i);
    out[i] = pair(std::hypot(r[0], r[1]));
  }
  return out;
}

}  // namespace dscale
