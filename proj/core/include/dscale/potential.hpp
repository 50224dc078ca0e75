#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dscale/grid.hpp"

namespace dscale {

enum class PotentialKind {
  free,
  linear,
  harmonic,
  barrier,
  tabulated,
  pair_spring,
  pair_soft_coulomb,
  pair_radial_table,
};

std::string to_string(PotentialKind kind);

struct LinearParams {
  // Acceleration-like slope: V(x) = mass * slope . x.
  Point slope{};
};

struct HarmonicParams {
  Point omega{};
  Point center{};
};

// A wall perpendicular to `axis`, with rectangular apertures along the other
// axis. Edges rise smoothly (C2) over a band of width `smoothing`.
struct BarrierParams {
  int axis = 0;
  double wall_position = 0.0;
  double thickness = 0.0;
  std::vector<double> slit_centers;
  std::vector<double> slit_widths;
  double height = 0.0;
  double smoothing = 0.0;
};

struct TabulatedParams {
  Grid grid;
  std::vector<double> values;
};

// U(r) = k/2 (r - rest_length)^2 on the pair distance r = |x_i - x_j|.
struct SpringParams {
  double stiffness = 0.0;
  double rest_length = 0.0;
};

// U(r) = q_i q_j / sqrt(r^2 + a^2).
struct SoftCoulombParams {
  double charge_product = 0.0;
  double softening = 1.0;
};

// U(r) sampled at r = i * spacing, linearly interpolated, constant past the end.
struct RadialTableParams {
  double spacing = 0.0;
  std::vector<double> values;
};

// Parametric description of an external potential V(x) or of a pair
// coupling U(|x_i - x_j|). External kinds that model fields acting on mass
// (linear, harmonic) scale with the particle mass; the barrier and tabulated
// kinds are absolute energies.
class PotentialSpec {
 public:
  static PotentialSpec free();
  static PotentialSpec linear(const Point& slope);
  static PotentialSpec harmonic(const Point& omega, const Point& center = {});
  static PotentialSpec barrier(BarrierParams params);
  static PotentialSpec tabulated(Grid grid, std::vector<double> values);
  static PotentialSpec spring(double stiffness, double rest_length = 0.0);
  static PotentialSpec soft_coulomb(double charge_product, double softening);
  static PotentialSpec radial_table(double spacing, std::vector<double> values);

  PotentialKind kind() const noexcept { return kind_; }
  bool is_pair() const noexcept;
  // Closed-form Euler-Lagrange action and force available.
  bool has_closed_form() const noexcept;

  // External kinds: energy of a particle of `mass` at x. Only the first
  // `dim` components of x take part.
  double external(const Point& x, double mass, int dim = kMaxDim) const;
  // grad V; finite differences for the non-closed-form kinds.
  Point gradient(const Point& x, double mass, int dim = kMaxDim) const;
  // Pair kinds: U at distance r >= 0. The free kind returns zero.
  double pair(double distance) const;

  // External values on every grid node.
  std::vector<double> sample(const Grid& grid, double mass) const;
  // Pair values U(|r|) on a grid whose coordinate is the separation r.
  std::vector<double> sample_pair(const Grid& grid) const;

  const LinearParams* as_linear() const { return std::get_if<LinearParams>(&params_); }
  const HarmonicParams* as_harmonic() const { return std::get_if<HarmonicParams>(&params_); }
  const BarrierParams* as_barrier() const { return std::get_if<BarrierParams>(&params_); }
  const SpringParams* as_spring() const { return std::get_if<SpringParams>(&params_); }

 private:
  using Params = std::variant<std::monostate, LinearParams, HarmonicParams, BarrierParams,
                              TabulatedParams, SpringParams, SoftCoulombParams,
                              RadialTableParams>;
  PotentialSpec(PotentialKind kind, Params params) : kind_(kind), params_(std::move(params)) {}

  PotentialKind kind_ = PotentialKind::free;
  Params params_;
};

}  // namespace dscale
