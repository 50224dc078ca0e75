#include "dscale/grid.hpp"

#include <cmath>
#include <string>

#include "dscale/error.hpp"

namespace dscale {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

namespace {

void validate_axis(const Axis& axis, int a) {
  const std::string name = "axis " + std::to_string(a);
  if (!std::isfinite(axis.lower) || !std::isfinite(axis.upper) || !(axis.upper > axis.lower)) {
    throw ConfigurationError(name + ": bounds must be finite with lower < upper");
  }
  if (!is_power_of_two(axis.points) || axis.points < 16) {
    throw ConfigurationError(name + ": points must be a power of two >= 16, got " +
                             std::to_string(axis.points));
  }
}

}  // namespace

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > static_cast<std::size_t>(kMaxDim)) {
    throw ConfigurationError("grid dimension must be 1 or 2");
  }
  size_ = 1;
  cell_volume_ = 1.0;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    validate_axis(axes_[a], static_cast<int>(a));
    size_ *= axes_[a].points;
    cell_volume_ *= axes_[a].spacing();
  }
}

Point Grid::spacing() const noexcept {
  Point h{};
  for (int a = 0; a < dim(); ++a) h[a] = axes_[a].spacing();
  return h;
}

std::array<std::size_t, kMaxDim> Grid::unravel(std::size_t flat) const noexcept {
  if (dim() == 1) return {flat, 0};
  const std::size_t n1 = axes_[1].points;
  return {flat / n1, flat % n1};
}

Point Grid::point(std::size_t flat) const noexcept {
  const auto idx = unravel(flat);
  Point x{};
  for (int a = 0; a < dim(); ++a) x[a] = axes_[a].coordinate(idx[a]);
  return x;
}

bool Grid::contains(const Point& x) const noexcept {
  for (int a = 0; a < dim(); ++a) {
    if (!(x[a] >= axes_[a].lower && x[a] <= axes_[a].upper)) return false;
  }
  return true;
}

Grid make_grid(int dim, std::span<const std::array<double, 2>> bounds,
               std::span<const std::size_t> points) {
  if (dim < 1 || dim > kMaxDim) throw ConfigurationError("grid dimension must be 1 or 2");
  if (bounds.size() != static_cast<std::size_t>(dim) ||
      points.size() != static_cast<std::size_t>(dim)) {
    throw ConfigurationError("grid needs one bounds pair and one point count per axis");
  }
  std::vector<Axis> axes;
  for (int a = 0; a < dim; ++a) axes.push_back({bounds[a][0], bounds[a][1], points[a]});
  return Grid(std::move(axes));
}

Grid make_line(double lower, double upper, std::size_t points) {
  return Grid({Axis{lower, upper, points}});
}

Grid make_plane(double lower0, double upper0, std::size_t points0, double lower1,
                double upper1, std::size_t points1) {
  return Grid({Axis{lower0, upper0, points0}, Axis{lower1, upper1, points1}});
}

}  // namespace dscale
