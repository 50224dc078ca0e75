#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace dscale {

inline constexpr int kMaxDim = 2;

// Position/velocity vector in the laboratory frame. Components past the
// grid dimension are ignored and kept at zero.
using Point = std::array<double, kMaxDim>;

struct Axis {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t points = 0;

  double extent() const noexcept { return upper - lower; }
  double spacing() const noexcept { return extent() / static_cast<double>(points); }
  double coordinate(std::size_t i) const noexcept {
    return lower + static_cast<double>(i) * spacing();
  }

  friend bool operator==(const Axis&, const Axis&) = default;
};

// Regular periodic grid in one or two dimensions. Node i on an axis sits at
// lower + i * spacing; the upper bound is the periodic image of the lower one.
// Storage is row-major: axis 0 is the slow index.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<Axis> axes);

  int dim() const noexcept { return static_cast<int>(axes_.size()); }
  const Axis& axis(int a) const { return axes_.at(static_cast<std::size_t>(a)); }
  std::span<const Axis> axes() const noexcept { return axes_; }

  std::size_t size() const noexcept { return size_; }
  double cell_volume() const noexcept { return cell_volume_; }
  Point spacing() const noexcept;

  std::size_t index(std::size_t i0, std::size_t i1 = 0) const noexcept {
    return dim() == 1 ? i0 : i0 * axes_[1].points + i1;
  }
  std::array<std::size_t, kMaxDim> unravel(std::size_t flat) const noexcept;
  Point point(std::size_t flat) const noexcept;

  bool contains(const Point& x) const noexcept;

  friend bool operator==(const Grid& a, const Grid& b) { return a.axes_ == b.axes_; }

 private:
  std::vector<Axis> axes_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

// Validated constructor: 1 <= dim <= 2, power-of-two points >= 16 per axis,
// strictly ordered finite bounds. Throws ConfigurationError otherwise.
Grid make_grid(int dim, std::span<const std::array<double, 2>> bounds,
               std::span<const std::size_t> points);

Grid make_line(double lower, double upper, std::size_t points);
Grid make_plane(double lower0, double upper0, std::size_t points0, double lower1,
                double upper1, std::size_t points1);

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace dscale
